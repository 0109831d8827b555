// Command-line front end: parameter conversion, Monte Carlo simulation,
// exact enumeration and checks, bound curves and counterexample certificates.
//
// Exit codes: 0 = completed, all requested checks hold; 2 = an inequality
// check found a violation (a scientific result, not a failure);
// 1 = usage or runtime error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exclusion/bounds.hpp"
#include "exclusion/geometry.hpp"
#include "exclusion/graphs.hpp"
#include "exclusion/io.hpp"
#include "exclusion/rgg.hpp"
#include "exclusion/samplers.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

struct Output {
    std::string path;  // empty = stdout
    bool append = false;

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream os(path, append ? std::ios::app : std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open output path '" + path + "'");
        os << text;
    }

    bool appending_to_existing() const {
        if (!append || path.empty()) return false;
        std::ifstream is(path);
        return is.good() && is.peek() != std::ifstream::traits_type::eof();
    }
};

excl::JsonValue report_envelope(const std::string& command) {
    auto v = excl::JsonValue::object();
    v.set("tool", std::string(excl::kToolName));
    v.set("version", std::string(excl::kToolVersion));
    v.set("command", command);
    return v;
}

excl::JsonValue params_json(const excl::ModelParams& p) {
    auto v = excl::JsonValue::object();
    v.set("n", static_cast<unsigned long long>(p.n));
    v.set("d", static_cast<unsigned long long>(p.d));
    v.set("metric", excl::metric_name(p.metric));
    v.set("r", p.r);
    v.set("p", p.p);
    v.set("alpha", p.alpha);
    return v;
}

excl::JsonValue estimate_json(const excl::Estimate& e) {
    auto v = excl::JsonValue::object();
    v.set("method", excl::method_name(e.method));
    v.set("mean", e.mean);
    v.set("stderr", e.std_err);
    v.set("samples", static_cast<unsigned long long>(e.samples));
    v.set("seed", static_cast<unsigned long long>(e.seed));
    return v;
}

// Shared model-parameter flags for params/simulate.
struct ModelFlags {
    std::size_t n = 0;
    std::size_t d = 1;
    std::string metric = "l2";
    double r = 0.0, p = 0.0, alpha = 0.0;
    CLI::Option* r_opt = nullptr;
    CLI::Option* p_opt = nullptr;
    CLI::Option* alpha_opt = nullptr;

    void attach(CLI::App* cmd, bool require_n) {
        auto* n_opt = cmd->add_option("--n", n, "number of particles");
        if (require_n) n_opt->required();
        cmd->add_option("--d", d, "dimension")->required();
        cmd->add_option("--metric", metric, "l2 (spheres) or linf (squares)");
        r_opt = cmd->add_option("--r", r, "exclusion radius");
        p_opt = cmd->add_option("--p", p, "pair-collision probability");
        alpha_opt = cmd->add_option("--alpha", alpha, "packing density");
    }

    excl::ModelParams resolve() const {
        excl::PartialParams in;
        in.n = n;
        in.d = d;
        in.metric = excl::parse_metric(metric);
        if (r_opt->count()) in.r = r;
        if (p_opt->count()) in.p = p;
        if (alpha_opt->count()) in.alpha = alpha;
        return excl::convert_params(in);
    }
};

struct GraphFlags {
    std::string spec;
    std::string edge_list;

    void attach(CLI::App* cmd) {
        cmd->add_option("--graph", spec,
                        "graph spec: hypercube:D, cycle:N, discrete_torus:D:SIDE, disjoint_kdd:D:COPIES");
        cmd->add_option("--edge-list", edge_list, "edge-list file: first line 'n d', then 'u v' pairs");
    }

    excl::RegularGraph resolve() const {
        if (spec.empty() == edge_list.empty())
            throw CLI::ValidationError("exactly one of --graph / --edge-list is required");
        if (!spec.empty()) return excl::build_graph(spec);
        std::ifstream is(edge_list);
        if (!is) throw std::runtime_error("cannot open edge list '" + edge_list + "'");
        return excl::graph_from_edge_list(is, edge_list);
    }
};

int run_params(const ModelFlags& model, const Output& out) {
    const excl::ModelParams p = model.resolve();
    auto rep = report_envelope("params");
    rep.set("params", params_json(p));
    out.write(rep.dump());
    return kExitOk;
}

struct SimulateFlags {
    ModelFlags model;
    std::string quantity = "prob-empty";
    std::string method = "naive";
    std::string backend = "auto";
    std::size_t k = 0;
    excl::EstimatorOptions opt;
    std::string format = "json";
};

int run_simulate(const SimulateFlags& f, const Output& out) {
    const excl::ModelParams params = f.model.resolve();
    excl::EstimatorOptions opt = f.opt;
    opt.method = f.method == "telescoping" ? excl::EstimateMethod::Telescoping
                                           : excl::EstimateMethod::NaiveMc;
    if (f.backend == "rejection") opt.backend = excl::SamplerBackend::Rejection;
    else if (f.backend == "mcmc") opt.backend = excl::SamplerBackend::Mcmc;
    else opt.backend = excl::SamplerBackend::Auto;

    const std::string model_name = params.metric == excl::Metric::L2 ? "sphere" : "square";

    if (f.quantity == "sample") {
        const auto cfg = excl::sample_uniform(params.n, params.d, params.metric, opt.seed);
        std::ostringstream os;
        excl::write_configuration_csv(cfg, os);
        out.write(os.str());
        return kExitOk;
    }

    if (f.quantity == "prob-empty") {
        const excl::Estimate est = excl::estimate_prob_empty(params, opt);
        if (f.format == "csv") {
            std::ostringstream os;
            excl::CsvWriter csv(os);
            if (!out.appending_to_existing())
                csv.row({"model", "quantity", "d", "n", "metric", "r", "p", "alpha", "method", "mean",
                         "stderr", "samples", "seed"});
            csv.row({model_name, "prob-empty", std::to_string(params.d), std::to_string(params.n),
                     excl::metric_name(params.metric), excl::format_double(params.r),
                     excl::format_double(params.p), excl::format_double(params.alpha),
                     excl::method_name(est.method), excl::format_double(est.mean),
                     excl::format_double(est.std_err), std::to_string(est.samples),
                     std::to_string(est.seed)});
            out.write(os.str());
        } else {
            auto rep = report_envelope("simulate");
            rep.set("model", model_name);
            rep.set("quantity", "prob-empty");
            rep.set("params", params_json(params));
            rep.set("seed", static_cast<unsigned long long>(opt.seed));
            rep.set("result", estimate_json(est));
            out.write(rep.dump());
        }
        return kExitOk;
    }

    if (f.quantity == "gap") {
        const std::size_t k = f.k == 0 ? params.n : f.k;
        const excl::RepulsionGap gap = excl::repulsion_gap(k, params, opt);
        const bool violation =
            gap.gap.mean < -excl::kConfidenceSigmas * gap.gap.std_err && gap.gap.std_err > 0.0;
        if (f.format == "csv") {
            std::ostringstream os;
            excl::CsvWriter csv(os);
            if (!out.appending_to_existing())
                csv.row({"model", "quantity", "d", "n", "k", "metric", "r", "p", "alpha", "backend",
                         "conditional", "conditional_stderr", "unconditional", "gap", "gap_stderr",
                         "sphere_est_rhs", "samples", "seed"});
            csv.row({model_name, "gap", std::to_string(params.d), std::to_string(params.n),
                     std::to_string(k), excl::metric_name(params.metric), excl::format_double(params.r),
                     excl::format_double(params.p), excl::format_double(params.alpha),
                     excl::backend_name(gap.backend_used), excl::format_double(gap.conditional.mean),
                     excl::format_double(gap.conditional.std_err), excl::format_double(gap.unconditional),
                     excl::format_double(gap.gap.mean), excl::format_double(gap.gap.std_err),
                     gap.sphere_est_applicable ? excl::format_double(gap.sphere_est_rhs) : "inapplicable",
                     std::to_string(gap.conditional.samples), std::to_string(opt.seed)});
            out.write(os.str());
        } else {
            auto rep = report_envelope("simulate");
            rep.set("model", model_name);
            rep.set("quantity", "gap");
            rep.set("k", static_cast<unsigned long long>(k));
            rep.set("params", params_json(params));
            rep.set("seed", static_cast<unsigned long long>(opt.seed));
            rep.set("backend", excl::backend_name(gap.backend_used));
            rep.set("conditional", estimate_json(gap.conditional));
            rep.set("unconditional", gap.unconditional);
            rep.set("gap", estimate_json(gap.gap));
            rep.set("sphere_est_rhs",
                    gap.sphere_est_applicable ? excl::JsonValue(gap.sphere_est_rhs) : excl::JsonValue());
            rep.set("repulsion_violated", violation);
            out.write(rep.dump());
        }
        return violation ? kExitViolation : kExitOk;
    }

    throw CLI::ValidationError("--quantity must be prob-empty, gap, or sample");
}

struct EnumerateFlags {
    GraphFlags graph;
    std::string mode = "is";
    excl::EnumerationBudget budget;
    unsigned threads = 0;
};

excl::CountMode parse_mode(const std::string& mode) {
    if (mode == "is" || mode == "independent-sets") return excl::CountMode::IndependentSets;
    if (mode == "matching" || mode == "matchings") return excl::CountMode::Matchings;
    throw CLI::ValidationError("--mode must be is or matching");
}

int run_enumerate(const EnumerateFlags& f, const Output& out) {
    const excl::RegularGraph g = f.graph.resolve();
    const excl::CountMode mode = parse_mode(f.mode);
    const excl::ExactSummary s = excl::enumerate_graph(g, mode, f.budget, f.threads);
    std::ostringstream os;
    excl::CsvWriter csv(os);
    csv.row({"k", "count", "lhs", "rhs", "holds"});
    std::size_t kmax = 0;
    for (std::size_t k = 0; k < s.profile.counts.size(); ++k)
        if (s.profile.counts[k] != 0) kmax = k;
    for (std::size_t k = 0; k <= kmax; ++k) {
        const excl::ExactCheck c = excl::birthday_check(s, k);
        csv.row({std::to_string(k), s.profile.counts[k].str(), excl::rational_string(c.lhs),
                 excl::rational_string(c.rhs), c.holds ? "true" : "false"});
    }
    out.write(os.str());
    return kExitOk;
}

struct CheckFlags {
    GraphFlags graph;
    std::string mode = "is";
    std::string which = "all";
    std::size_t k = 0;
    bool all_k = false;
    excl::EnumerationBudget budget;
    unsigned threads = 0;
};

int run_check(const CheckFlags& f, const Output& out) {
    const excl::RegularGraph g = f.graph.resolve();
    const excl::CountMode mode = parse_mode(f.mode);
    const excl::ExactSummary s = excl::enumerate_graph(g, mode, f.budget, f.threads);

    std::vector<std::size_t> ks;
    if (f.all_k) {
        for (std::size_t k = 0; k < s.profile.counts.size(); ++k)
            if (s.profile.counts[k] != 0) ks.push_back(k);
    } else {
        ks.push_back(f.k);
    }

    const bool do_birthday = f.which == "all" || f.which == "birthday";
    const bool do_repulsion = f.which == "all" || f.which == "repulsion";
    const bool do_bipest =
        (f.which == "all" || f.which == "bipest") && mode == excl::CountMode::IndependentSets;
    const bool do_conj2 = f.which == "conjecture2";

    std::ostringstream os;
    excl::CsvWriter csv(os);
    csv.row({"graph", "mode", "check", "k", "lhs", "rhs", "holds", "slack"});
    bool violated = false;
    const auto emit = [&](const char* name, const excl::ExactCheck& c) {
        csv.row({g.label, excl::count_mode_name(mode), name, std::to_string(c.k),
                 excl::rational_string(c.lhs), excl::rational_string(c.rhs),
                 c.holds ? "true" : "false", excl::format_double(c.slack)});
        if (!c.holds) violated = true;
    };
    for (std::size_t k : ks) {
        if (do_birthday) emit("birthday", excl::birthday_check(s, k));
        if (do_repulsion && k < s.profile.counts.size() && s.profile.counts[k] != 0)
            emit("repulsion", excl::repulsion_check(s, k));
        if (do_bipest && excl::BigRat(static_cast<unsigned long long>(k)) * s.p < 1 &&
            k < s.profile.counts.size() && s.profile.counts[k] != 0)
            emit("bipest", excl::bipest_check(s, k));
        if (do_conj2) {
            try {
                const excl::ComparisonResult c = excl::conjecture2_compare(g, k, f.budget, f.threads);
                csv.row({g.label, "independent-sets", "conjecture2", std::to_string(k),
                         excl::rational_string(c.value_g), excl::rational_string(c.value_h),
                         c.consistent ? "true" : "false",
                         excl::format_double(excl::to_double(excl::BigRat(c.value_g - c.value_h)))});
                if (!c.consistent) violated = true;
            } catch (const std::domain_error&) {
                if (!f.all_k) throw;  // with --all-k, skip k infeasible in H_{d,n}
            }
        }
    }
    out.write(os.str());
    return violated ? kExitViolation : kExitOk;
}

struct BoundsFlags {
    std::string model = "sphere";
    unsigned d = 24;
    double rho = excl::kRho24;
};

excl::BoundReport build_report(const std::string& model, unsigned d, double rho, double t) {
    if (model == "sphere" || model == "sphere24") return excl::sphere24_certificate(t, rho);
    if (model == "square") return excl::square_certificate(d);
    if (model == "hardcore") return excl::hardcore_certificate(d);
    if (model == "matching") return excl::matching_report(d);
    throw CLI::ValidationError("--model must be sphere24, square, hardcore, or matching");
}

int run_bounds(const BoundsFlags& f, double t, const Output& out) {
    const excl::BoundReport rep = build_report(f.model, f.d, f.rho, t);
    std::ostringstream os;
    excl::CsvWriter csv(os);
    csv.row({"alpha", "birthday", "comparison", "gap"});
    for (const auto& pt : rep.curve)
        csv.row({excl::format_double(pt.alpha), excl::format_double(pt.birthday),
                 excl::format_double(pt.comparison), excl::format_double(pt.birthday - pt.comparison)});
    out.write(os.str());
    return kExitOk;
}

int run_certify(const BoundsFlags& f, double t, const Output& out) {
    const excl::BoundReport rep = build_report(f.model, f.d, f.rho, t);
    auto doc = report_envelope("certify");
    doc.set("model", rep.model);
    doc.set("d", static_cast<unsigned long long>(rep.d));
    doc.set("rho", rep.rho);
    // all free-energy comparisons are n -> infinity limit forms
    doc.set("regime", "asymptotic");
    if (rep.failure_interval) {
        auto iv = excl::JsonValue::object();
        iv.set("lo", rep.failure_interval->lo);
        iv.set("hi", rep.failure_interval->hi);
        doc.set("failure_interval", std::move(iv));
    } else {
        doc.set("failure_interval", excl::JsonValue());
    }
    if (rep.asymptotic_ratio) doc.set("asymptotic_ratio", *rep.asymptotic_ratio);
    auto wit = excl::JsonValue::array();
    for (const auto& w : rep.witnesses) {
        auto p = excl::JsonValue::object();
        p.set("alpha", w.alpha);
        p.set("birthday", w.birthday);
        p.set("comparison", w.comparison);
        wit.push(std::move(p));
    }
    doc.set("witnesses", std::move(wit));
    out.write(doc.dump());
    return rep.failure_interval ? kExitViolation : kExitOk;
}

// --manifest FILE: JSON object whose "command" picks the subcommand and whose
// other keys become flags; flags given on the command line override it.
std::vector<std::string> splice_manifest(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--manifest" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--manifest=", 0) == 0) {
            path = args[i].substr(11);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open manifest '" + path + "'");
    nlohmann::ordered_json doc = nlohmann::ordered_json::parse(is);
    if (!doc.is_object() || !doc.contains("command"))
        throw std::runtime_error("manifest must be a JSON object with a \"command\" field");
    const std::string cmd = doc["command"].get<std::string>();

    std::vector<std::string> merged;
    merged.push_back(cmd);
    for (const auto& [key, value] : doc.items()) {
        if (key == "command") continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) merged.push_back("--" + key);
            continue;
        }
        merged.push_back("--" + key);
        merged.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
    if (!args.empty() && args.front() == cmd) args.erase(args.begin());
    else if (!args.empty() && !args.front().empty() && args.front()[0] != '-')
        throw std::runtime_error("manifest command '" + cmd + "' conflicts with '" + args.front() + "'");
    merged.insert(merged.end(), args.begin(), args.end());
    return merged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exclusion: birthday and repulsion inequalities for hard spheres, the hard-core "
                 "model, and matchings"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    Output out;

    // params
    auto* params_cmd = app.add_subcommand("params", "complete (r, p, alpha) and print as JSON");
    ModelFlags params_model;
    params_model.attach(params_cmd, true);
    params_cmd->add_option("--out", out.path, "output path");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimates on the torus");
    SimulateFlags sim;
    sim.model.attach(sim_cmd, true);
    sim_cmd->add_option("--quantity", sim.quantity, "prob-empty, gap, or sample");
    sim_cmd->add_option("--method", sim.method, "naive or telescoping (prob-empty)");
    sim_cmd->add_option("--backend", sim.backend, "auto, rejection, or mcmc");
    sim_cmd->add_option("--k", sim.k, "number of conditioned centers for --quantity gap (default n)");
    sim_cmd->add_option("--replicas", sim.opt.replicas, "Monte Carlo replicas");
    sim_cmd->add_option("--seed", sim.opt.seed, "RNG seed (recorded in the output)");
    sim_cmd->add_option("--probes", sim.opt.probes, "coverage probes per conditional sample (d >= 2)");
    sim_cmd->add_option("--threads", sim.opt.threads, "worker threads; never affects results (0 = all)");
    sim_cmd->add_option("--max-attempts", sim.opt.max_attempts, "rejection budget per sample");
    sim_cmd->add_option("--format", sim.format, "json or csv");
    bool sim_append = false;
    sim_cmd->add_flag("--append", sim_append, "append CSV rows without a header");
    sim_cmd->add_option("--out", out.path, "output path");

    // enumerate
    auto* enum_cmd = app.add_subcommand("enumerate", "exact count table of a graph");
    EnumerateFlags enu;
    enu.graph.attach(enum_cmd);
    enum_cmd->add_option("--mode", enu.mode, "is or matching");
    enum_cmd->add_option("--budget-n", enu.budget.max_vertices, "vertex budget for IS enumeration");
    enum_cmd->add_option("--budget-m", enu.budget.max_edges, "edge budget for matching enumeration");
    enum_cmd->add_option("--threads", enu.threads, "worker threads (0 = all)");
    enum_cmd->add_option("--out", out.path, "output path");

    // check
    auto* check_cmd = app.add_subcommand("check", "exact birthday/repulsion checks on a graph");
    CheckFlags chk;
    chk.graph.attach(check_cmd);
    check_cmd->add_option("--mode", chk.mode, "is or matching");
    check_cmd->add_option("--check", chk.which, "birthday, repulsion, bipest, conjecture2, or all");
    check_cmd->add_option("--k", chk.k, "set size");
    check_cmd->add_flag("--all-k", chk.all_k, "run every feasible k");
    check_cmd->add_option("--budget-n", chk.budget.max_vertices, "vertex budget");
    check_cmd->add_option("--budget-m", chk.budget.max_edges, "edge budget");
    check_cmd->add_option("--threads", chk.threads, "worker threads (0 = all)");
    check_cmd->add_option("--out", out.path, "output path");

    // bounds / certify
    BoundsFlags bnd;
    double t_check = 0.79;
    auto* bounds_cmd = app.add_subcommand("bounds", "closed-form bound curves as CSV");
    bounds_cmd->add_option("--model", bnd.model, "sphere24, square, hardcore, or matching");
    bounds_cmd->add_option("--d", bnd.d, "dimension or degree");
    bounds_cmd->add_option("--rho", bnd.rho, "reference packing density (sphere24)");
    bounds_cmd->add_option("--t", t_check, "shrink parameter checked for sphere24");
    bounds_cmd->add_option("--out", out.path, "output path");

    auto* cert_cmd = app.add_subcommand("certify", "counterexample certificate as JSON");
    cert_cmd->add_option("--model", bnd.model, "sphere24, square, hardcore, or matching");
    cert_cmd->add_option("--d", bnd.d, "dimension or degree");
    cert_cmd->add_option("--rho", bnd.rho, "reference packing density (sphere24)");
    cert_cmd->add_option("--t", t_check, "shrink parameter checked for sphere24");
    cert_cmd->add_option("--out", out.path, "output path");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = splice_manifest(std::move(args));
    } catch (const std::exception& ex) {
        std::cerr << "exclusion: " << ex.what() << "\n";
        return kExitError;
    }

    try {
        std::vector<const char*> cargs;
        cargs.push_back("exclusion");
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }

    const auto t0 = std::chrono::steady_clock::now();
    int code = kExitError;
    try {
        if (params_cmd->parsed()) code = run_params(params_model, out);
        else if (sim_cmd->parsed()) {
            out.append = sim_append;
            code = run_simulate(sim, out);
        } else if (enum_cmd->parsed()) code = run_enumerate(enu, out);
        else if (check_cmd->parsed()) code = run_check(chk, out);
        else if (bounds_cmd->parsed()) code = run_bounds(bnd, t_check, out);
        else if (cert_cmd->parsed()) code = run_certify(bnd, t_check, out);
    } catch (const std::exception& ex) {
        std::cerr << "exclusion: error: " << ex.what() << "\n";
        return kExitError;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // wall time goes to stderr only: report files must be byte-identical runs
    std::fprintf(stderr, "exclusion: done in %.3fs (exit %d)\n", secs, code);
    return code;
}
