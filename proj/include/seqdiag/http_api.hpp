#pragma once

// JSON-over-HTTP facade, versioned under /api/v1.
//
//   GET  /api/v1/model
//   POST /api/v1/sessions                 {symptom}
//   GET  /api/v1/sessions/{id}
//   POST /api/v1/sessions/{id}/outcome    {component, outcome, override?, step?}
//   POST /api/v1/whatif                   {symptom, overrides: {id: {cost?, prob?}}}
//   POST /api/v1/sensitivity              {symptom, expert, s, n_samples, seed, band_mass?, renormalize?}
//
// Failures answer with a standard status and {"error", "detail"}.

#include <seqdiag/session.hpp>

#include <memory>
#include <string>

namespace seqdiag {

struct ApiResponse {
    int status = 200;
    std::string body;  // JSON
};

// Routing and JSON mapping, independent of the transport.
class ApiHandler {
public:
    explicit ApiHandler(std::shared_ptr<const FaultModel> model,
                        std::chrono::seconds session_ttl = SessionStore::kDefaultTtl);

    ApiResponse handle(const std::string& method, const std::string& path, const std::string& body);

    SessionStore& sessions() noexcept { return sessions_; }

private:
    std::shared_ptr<const FaultModel> model_;
    SessionStore sessions_;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::string static_dir;  // served at / when non-empty
};

// Blocking HTTP server around ApiHandler.
class ApiServer {
public:
    ApiServer(std::shared_ptr<const FaultModel> model, ServerOptions options);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    // Binds the socket; returns the bound port. Throws IoError.
    int bind();
    // Serves until stop(). bind() must have succeeded.
    void serve();
    void stop();

    ApiHandler& handler() noexcept { return handler_; }

private:
    struct Impl;
    ApiHandler handler_;
    ServerOptions options_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace seqdiag
