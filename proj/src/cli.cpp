#include <seqdiag/cli.hpp>
#include <seqdiag/engine.hpp>
#include <seqdiag/http_api.hpp>
#include <seqdiag/report.hpp>
#include <seqdiag/sensitivity.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <csignal>
#include <fstream>
#include <ostream>
#include <sstream>

namespace seqdiag {

namespace {

// Three significant figures, keeping trailing zeros ("57.0", "285").
std::string sig3(double v) {
    if (!std::isfinite(v)) return "inf";
    const double a = std::abs(v);
    if (a >= 100.0) return fmt::format("{:.0f}", v);
    if (a >= 10.0) return fmt::format("{:.1f}", v);
    if (a >= 1.0) return fmt::format("{:.2f}", v);
    return fmt::format("{:.3g}", v);
}

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Sweep {
    double lo = 1.0, hi = 3.0, step = 0.25;
};

Sweep parse_sweep(const std::string& text) {
    Sweep s;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> s.lo >> c1 >> s.hi >> c2 >> s.step) || c1 != ':' || c2 != ':' || !in.eof()) {
        throw Error(ErrorKind::Validation, "expected lo:hi:step, got '" + text + "'", "--sweep");
    }
    return s;
}

struct Options {
    std::string model_path;
    std::string format = "md";
    std::string symptom;
    std::string expert = "expert-2";
    std::string order;
    double s = 2.0;
    std::size_t samples = 10000;
    std::uint64_t seed = kDefaultSeed;
    std::string emit_cdf;
    std::string sweep;
    bool no_renormalize = false;
    double percentile = 0.15;
    double s_max = 5.0;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
};

FaultModel load(const Options& o) {
    return o.model_path.empty() ? bundled_dataset() : load_model(o.model_path);
}

bool csv(const Options& o) {
    return o.format == "csv";
}

int cmd_sequence(const Options& o, std::ostream& out) {
    const FaultModel model = load(o);
    const Symptom symptom = normalize(model.symptom(o.symptom));
    const auto seq = cp_sequence(symptom);
    TestStrategy strategy{symptom.id, {}};
    for (const auto& t : seq) strategy.order.push_back(t.component_id);
    const double ec = expected_cost(strategy, symptom).expected_cost;

    if (csv(o)) {
        out << "rank,component,cost,prob,cp_ratio\n";
        for (const auto& t : seq) {
            out << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", t.rank, t.component_id, t.cost, t.prob, t.cp_ratio);
        }
        return kExitOk;
    }
    out << fmt::format("C/P sequence for {}\n\n", symptom.id);
    out << "| Rank | Component | Cost (min) | Prob | C/P |\n|---:|---|---:|---:|---:|\n";
    for (const auto& t : seq) {
        out << fmt::format("| {} | {} | {:.1f} | {:.3f} | {} |\n", t.rank, t.component_id, t.cost, t.prob,
                           sig3(t.cp_ratio));
    }
    out << fmt::format("\nExpected cost: {:.1f} min\n", ec);
    return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    const FaultModel model = load(o);
    const Symptom symptom = normalize(model.symptom(o.symptom));
    const TestStrategy strategy{symptom.id, split_csv_list(o.order)};
    const auto eval = expected_cost(strategy, symptom);

    if (csv(o)) {
        out << "position,component,cost,reach_probability,term\n";
        for (std::size_t j = 0; j < eval.terms.size(); ++j) {
            const auto& c = symptom.component(strategy.order[j]);
            out << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", j + 1, c.id, c.cost, eval.reach_probability[j],
                               eval.terms[j]);
        }
        out << fmt::format("total,,,,{:.17g}\n", eval.expected_cost);
        return kExitOk;
    }
    out << "| Position | Component | Cost (min) | P(reached) | Term |\n|---:|---|---:|---:|---:|\n";
    for (std::size_t j = 0; j < eval.terms.size(); ++j) {
        const auto& c = symptom.component(strategy.order[j]);
        out << fmt::format("| {} | {} | {:.1f} | {:.3f} | {:.2f} |\n", j + 1, c.id, c.cost,
                           eval.reach_probability[j], eval.terms[j]);
    }
    out << fmt::format("\nExpected cost: {:.1f} min\n", eval.expected_cost);
    return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
    out << render(compare(load(o)), csv(o) ? ReportFormat::Csv : ReportFormat::Markdown);
    return kExitOk;
}

int cmd_oracle(const Options& o, std::ostream& out) {
    const FaultModel model = load(o);
    const Symptom symptom = normalize(model.symptom(o.symptom));
    const TestStrategy cp = cp_strategy(symptom);
    const double cp_ec = expected_cost(cp, symptom).expected_cost;
    const OptimumResult best = brute_force_optimum(symptom);
    const bool optimal = std::abs(cp_ec - best.expected_cost) <= 1e-9;
    if (optimal) {
        out << fmt::format("C/P optimal: EC {:.2f} over {} permutations\n", cp_ec, best.permutations);
    } else {
        out << fmt::format("C/P NOT optimal: EC {:.6f} vs brute-force minimum {:.6f} over {} permutations\n", cp_ec,
                           best.expected_cost, best.permutations);
    }
    return kExitOk;
}

SensitivityConfig sensitivity_config(const Options& o) {
    SensitivityConfig cfg;
    cfg.error_factor = o.s;
    cfg.n_samples = o.samples;
    cfg.seed = o.seed;
    cfg.renormalize_samples = !o.no_renormalize;
    return cfg;
}

int cmd_sensitivity(const Options& o, std::ostream& out) {
    const FaultModel model = load(o);
    const Symptom& symptom = model.symptom(o.symptom);
    const TestStrategy& expert = model.rule(o.expert, o.symptom).strategy;
    const TestStrategy cp = cp_strategy(symptom);
    const SensitivityConfig cfg = sensitivity_config(o);

    if (!o.sweep.empty()) {
        const Sweep sw = parse_sweep(o.sweep);
        const auto points = sweep(symptom, expert, cp, cfg, sw.lo, sw.hi, sw.step);
        if (csv(o)) {
            out << "s,band_lower,median,band_upper,prob_positive\n";
            for (const auto& p : points) {
                out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", p.error_factor, p.band_lower, p.median,
                                   p.band_upper, p.prob_positive);
            }
        } else {
            out << fmt::format("EC({}) - EC(C/P) for {}, {} samples, seed {}\n\n", o.expert, symptom.id, cfg.n_samples,
                               cfg.seed);
            out << fmt::format("| s | q{:.2f} | median | q{:.2f} | P(diff > 0) |\n|---:|---:|---:|---:|---:|\n",
                               cfg.lower_level(), cfg.upper_level());
            for (const auto& p : points) {
                out << fmt::format("| {:.2f} | {:.1f} | {:.1f} | {:.1f} | {:.3f} |\n", p.error_factor, p.band_lower,
                                   p.median, p.band_upper, p.prob_positive);
            }
        }
        return kExitOk;
    }

    const SensitivitySummary summary = diff_distribution(symptom, expert, cp, cfg);
    if (!o.emit_cdf.empty()) {
        std::ofstream file(o.emit_cdf);
        if (!file) throw IoError("cannot write '" + o.emit_cdf + "'");
        write_cdf_csv(file, summary);
        if (!file) throw IoError("write to '" + o.emit_cdf + "' failed");
    }
    if (csv(o)) {
        out << "quantity,value\n";
        out << fmt::format("s,{:.17g}\nn_samples,{}\nnominal_diff,{:.17g}\nmean_diff,{:.17g}\nprob_positive,{:.17g}\n",
                           summary.error_factor, summary.n_samples, summary.nominal_diff, summary.mean_diff,
                           summary.prob_positive);
        for (const auto& [level, value] : summary.quantiles) out << fmt::format("q{:.4g},{:.17g}\n", level, value);
        return kExitOk;
    }
    out << fmt::format("EC({}) - EC(C/P) for {} at s = {:.2f} ({} samples, seed {})\n\n", o.expert, symptom.id,
                       summary.error_factor, summary.n_samples, cfg.seed);
    out << fmt::format("nominal difference: {:.1f} min\n", summary.nominal_diff);
    out << fmt::format("mean difference:    {:.1f} min\n", summary.mean_diff);
    for (const auto& [level, value] : summary.quantiles) {
        out << fmt::format("quantile {:.2f}:      {:.1f} min\n", level, value);
    }
    out << fmt::format("P(diff > 0):        {:.3f}\n", summary.prob_positive);
    return kExitOk;
}

int cmd_critical_s(const Options& o, std::ostream& out) {
    const FaultModel model = load(o);
    const Symptom& symptom = model.symptom(o.symptom);
    const TestStrategy& expert = model.rule(o.expert, o.symptom).strategy;
    if (!(o.percentile > 0.0 && o.percentile < 0.5)) {
        throw Error(ErrorKind::Validation, "percentile must lie in (0, 0.5)", "--percentile");
    }
    SensitivityConfig cfg = sensitivity_config(o);
    cfg.band_mass = 1.0 - 2.0 * o.percentile;
    const auto r = critical_error_factor(symptom, expert, cp_strategy(symptom), cfg, o.s_max);
    if (r.s_star) {
        out << fmt::format("critical error factor s* = {:.2f} (quantile {:.2f} of EC({}) - EC(C/P) reaches 0)\n",
                           *r.s_star, o.percentile, o.expert);
    } else {
        out << fmt::format("C/P sequence dominates up to s_max = {:.2f} (quantile {:.2f} still {:.2f} min)\n", r.s_max,
                           o.percentile, r.lower_at_s_max);
    }
    return kExitOk;
}

ApiServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
    auto model = std::make_shared<const FaultModel>(load(o));
    ApiServer server(model, ServerOptions{o.host, o.port, o.static_dir});
    const int port = server.bind();
    err << fmt::format("serving {} on http://{}:{}/api/v1\n", model->name(), o.host, port);
    out.flush();
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.serve();
    g_server = nullptr;
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Expected-cost optimal test sequencing for single-fault troubleshooting", "seqdiag"};
    app.require_subcommand(1);
    Options o;

    app.add_option("--model", o.model_path, "Model JSON file (defaults to the bundled motorcycle model)");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"md", "csv"}));

    auto* sequence = app.add_subcommand("sequence", "Print the C/P sequence of a symptom");
    sequence->add_option("--symptom", o.symptom)->required();

    auto* evaluate = app.add_subcommand("evaluate", "Expected cost of a given test order");
    evaluate->add_option("--symptom", o.symptom)->required();
    evaluate->add_option("--order", o.order, "Comma-separated component ids")->required();

    auto* comp = app.add_subcommand("compare", "Expert rules vs C/P sequences for every rule in the model");

    auto* oracle = app.add_subcommand("oracle", "Check the C/P sequence against brute-force enumeration");
    oracle->add_option("--symptom", o.symptom)->required();

    auto* sens = app.add_subcommand("sensitivity", "Monte Carlo distribution of EC(expert) - EC(C/P)");
    sens->add_option("--symptom", o.symptom)->required();
    sens->add_option("--expert", o.expert)->capture_default_str();
    sens->add_option("--s", o.s, "Error factor")->capture_default_str();
    sens->add_option("--samples", o.samples)->capture_default_str();
    sens->add_option("--seed", o.seed)->capture_default_str();
    sens->add_option("--emit-cdf", o.emit_cdf, "Write CDF points as CSV to this path");
    sens->add_option("--sweep", o.sweep, "Band edges over s, as lo:hi:step");
    sens->add_flag("--no-renormalize", o.no_renormalize, "Keep perturbed probabilities unnormalized");

    auto* crit = app.add_subcommand("critical-s", "Smallest error factor at which the lower band reaches zero");
    crit->add_option("--symptom", o.symptom)->required();
    crit->add_option("--expert", o.expert)->capture_default_str();
    crit->add_option("--percentile", o.percentile, "Lower band quantile")->capture_default_str();
    crit->add_option("--s-max", o.s_max)->capture_default_str();
    crit->add_option("--samples", o.samples)->capture_default_str();
    crit->add_option("--seed", o.seed)->capture_default_str();

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--host", o.host)->capture_default_str();
    serve->add_option("--port", o.port)->capture_default_str();
    serve->add_option("--static-dir", o.static_dir, "Directory of web UI assets served at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (sequence->parsed()) return cmd_sequence(o, out);
        if (evaluate->parsed()) return cmd_evaluate(o, out);
        if (comp->parsed()) return cmd_compare(o, out);
        if (oracle->parsed()) return cmd_oracle(o, out);
        if (sens->parsed()) return cmd_sensitivity(o, out);
        if (crit->parsed()) return cmd_critical_s(o, out);
        if (serve->parsed()) return cmd_serve(o, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}

}  // namespace seqdiag
