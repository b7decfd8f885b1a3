// ma_bench: solves, capacity curves, envelopes and hypothesis/estimate checks
// for radial Monge-Ampere measures on projective space.
//
// Exit codes: 0 pass, 1 usage or config error, 2 hypothesis not met,
// 3 assertion violated.

#include "mabench/io.hpp"
#include "mabench/errors.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <string>

using namespace mabench;

namespace {

enum Exit { kPass = 0, kUsage = 1, kHypothesis = 2, kViolation = 3 };

struct Run {
    RunConfig config;
    std::filesystem::path dir;
    bool csv = true;
    bool json = true;

    void emit_csv(const std::string& name, const std::string& body) const {
        if (csv) write_atomic(dir / name, body);
    }
    void emit_json(const std::string& name, const Json& body) const {
        if (json) write_atomic(dir / name, body.dump(2) + "\n");
    }
};

// Flag -> config key. Flags override whatever the config file says.
struct Overrides {
    std::string config_path;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    bool no_rescale = false;
    bool lenient = false;

    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        options[key] = app->add_option(flag, values[key], help);
    }

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key = value file with [section] headers")->check(CLI::ExistingFile);
        add(app, "--n", "geometry.n", "complex dimension");
        add(app, "--eps", "weight.eps", "weight: const(c), pow(a), exp(l), table(file.csv), optionally c*...");
        add(app, "--gallery", "measure.gallery", "gallery example (see `gallery list`)");
        add(app, "--measure", "measure.name", "named measure: omega or a gallery name");
        add(app, "--measure-csv", "measure.csv", "CSV of t, M(t) ball masses");
        add(app, "--density", "measure.density", "density against omega^n: const or logpow(beta)");
        add(app, "--kappa", "measure.kappa", "ex41 decay parameter");
        add(app, "--r-cut", "measure.r_cut", "ex44 splice radius");
        add(app, "--atom", "measure.atom", "mass moved to a point mass at the pole");
        add(app, "--t-min", "grids.t_min", "left end of the log-radius grid");
        add(app, "--t-max", "grids.t_max", "right end of the log-radius grid");
        add(app, "--t-nodes", "grids.t_nodes", "log-radius grid nodes");
        add(app, "--s-min", "grids.s_min", "first level");
        add(app, "--s-max", "grids.s_max", "last level");
        add(app, "--s-samples", "grids.s_samples", "number of levels");
        add(app, "--c1", "constants.c1", "compactness constant (negative: estimate)");
        add(app, "--nu", "constants.nu", "Lelong number bound");
        add(app, "--C2", "constants.C2", "integrability constant (negative: estimate)");
        add(app, "--C2-prime", "constants.C2_prime", "L^{Nq} constant (negative: estimate)");
        add(app, "--c-N", "constants.c_N", "capacity constant of the N-th moment step (negative: 2^N)");
        add(app, "--s0", "constants.s0", "envelope shift");
        add(app, "--p", "verify.p", "integrability exponent of the density");
        add(app, "--exponent", "verify.exponent", "Orlicz exponent (n or a number)");
        add(app, "--tolerance", "verify.tolerance", "multiplicative tolerance on capacities");
        add(app, "--out", "output.dir", "output directory");
        add(app, "--formats", "output.formats", "comma-separated subset of csv,json");
        app->add_flag("--no-rescale", no_rescale, "refuse instead of rescaling eps when mu exceeds F_eps");
        app->add_flag("--lenient", lenient, "solve measures with an atom at the pole");
    }

    Run resolve() const {
        Run run{config_path.empty() ? RunConfig() : RunConfig::from_file(config_path), {}, true, true};
        for (const auto& [key, opt] : options)
            if (opt->count()) run.config.set(key, values.at(key));
        if (no_rescale) run.config.set("verify.rescale", "false");
        if (lenient) run.config.set("verify.strict", "false");
        run.config.validate();
        run.dir = run.config.get("output.dir");
        const std::string& f = run.config.get("output.formats");
        run.csv = f.find("csv") != std::string::npos;
        run.json = f.find("json") != std::string::npos;
        return run;
    }
};

int measure_keys_given(const RunConfig& c) {
    int k = 0;
    for (const char* key : {"measure.gallery", "measure.name", "measure.csv", "measure.density"})
        k += !c.get(key).empty();
    return k;
}

Vector s_grid(const RunConfig& c) {
    return Vector::LinSpaced(c.integer("grids.s_samples"), c.number("grids.s_min"), c.number("grids.s_max"));
}

RadialProfile solve(const Run& run, const RadialMeasure& mu) {
    SolveOptions opt;
    opt.strict = run.config.flag("verify.strict");
    return solve_radial_ma(mu, opt);
}

std::string capacity_csv(const CapacityCurve& c) {
    Vector cap = c.log_cap.array().exp().matrix();
    return csv_table({"s", "log_cap", "cap", "g"}, {c.s, c.log_cap, cap, c.g_values()});
}

const char* tail_name(CapacityCurve::TailKind k) {
    switch (k) {
        case CapacityCurve::TailKind::None: return "none";
        case CapacityCurve::TailKind::Zero: return "zero";
        case CapacityCurve::TailKind::Exponential: return "exponential";
        case CapacityCurve::TailKind::Power: return "power";
    }
    return "none";
}

Json curve_json(const CapacityCurve& c) {
    Json j;
    j["samples"] = c.s.size();
    j["s_max"] = c.s_max();
    j["tail"] = tail_name(c.tail);
    j["rate"] = c.rate;
    j["provenance"] = c.provenance;
    return j;
}

void say(const std::string& line) { std::cout << line << std::endl; }

// Which constants were supplied and which were estimated.
Json constant_sources(const RunConfig& cfg, std::initializer_list<const char*> keys) {
    Json j = Json::object();
    for (const char* key : keys)
        j[key] = cfg.number(std::string("constants.") + key) < 0 ? "empirical: stress-family maximum x 2" : "config";
    return j;
}

// ---------------------------------------------------------------- commands

int cmd_solve(const Run& run) {
    const RadialGeometry geo = geometry_from(run.config);
    const ResolvedMeasure m = resolve_measure(run.config, geo);
    const RadialProfile phi = solve(run, m.measure);
    const SampledFunction h = phi.h();
    run.emit_csv("profile.csv", csv_table({"t", "chi", "h"}, {geo.grid.nodes(), phi.chi.values(), h.values()}));
    Json j = report_header(run.config, "solve");
    j["measure"] = m.name;
    j["sup_phi"] = json_number(phi.supremum());
    j["inf_phi"] = json_number(phi.infimum());
    const bool bounded = std::isfinite(phi.infimum());
    j["bounded"] = bounded;
    j["sup_norm"] = json_number(-phi.infimum());
    if (!bounded) {
        const CapacityCurve c = cap_curve(phi, s_grid(run.config));
        run.emit_csv("capacity.csv", capacity_csv(c));
        j["capacity_curve"] = "capacity.csv";
        j["capacity"] = curve_json(c);
    }
    run.emit_json("summary.json", j);
    say("solve " + m.name + ": " + (bounded ? "bounded, sup norm " + format_double(-phi.infimum())
                                            : "unbounded (capacity curve in capacity.csv)"));
    return kPass;
}

int cmd_capacity(const Run& run) {
    const RadialGeometry geo = geometry_from(run.config);
    const ResolvedMeasure m = resolve_measure(run.config, geo);
    const CapacityCurve c = cap_curve(solve(run, m.measure), s_grid(run.config));
    run.emit_csv("capacity.csv", capacity_csv(c));
    Json j = report_header(run.config, "capacity");
    j["measure"] = m.name;
    j["curve"] = curve_json(c);
    run.emit_json("capacity.json", j);
    say("capacity " + m.name + ": " + std::to_string(c.s.size()) + " levels, tail " + tail_name(c.tail));
    return kPass;
}

int cmd_envelope(const Run& run) {
    const RunConfig& cfg = run.config;
    const WeightEps eps = WeightEps::parse(cfg.get("weight.eps"));
    const int n = cfg.integer("geometry.n");
    const double s0 = cfg.number("constants.s0");
    const BoundEnvelope env(eps, s0, n);
    const Vector s = s_grid(cfg);
    Vector logv(s.size()), v(s.size());
    for (Index i = 0; i < s.size(); ++i) {
        logv[i] = env.log_value(s[i]);
        v[i] = std::exp(logv[i]);
    }
    std::vector<std::string> header{"s", "envelope", "log_envelope"};
    std::vector<Vector> cols{s, v, logv};
    Json j = report_header(cfg, "envelope");
    j["eps"] = eps.describe();
    j["s0"] = s0;
    j["s_infinity"] = json_number(env.H().s_infinity());
    j["bounded_regime"] = kolodziej_test(eps, s0).bounded_regime;
    if (measure_keys_given(cfg)) {
        const RadialGeometry geo = geometry_from(cfg);
        const ResolvedMeasure m = resolve_measure(cfg, geo);
        const CapacityCurve c = cap_curve(solve(run, m.measure), s);
        if (c.s.size() == s.size()) {
            header.insert(header.end(), {"log_cap", "cap"});
            cols.push_back(c.log_cap);
            cols.push_back(c.log_cap.array().exp().matrix());
        }
        j["measure"] = m.name;
        j["curve"] = curve_json(c);
    }
    run.emit_csv("envelope.csv", csv_table(header, cols));
    run.emit_json("envelope.json", j);
    say("envelope " + eps.describe() + ": s_infinity " + format_double(env.H().s_infinity()));
    return kPass;
}

int verify_theoremB(const Run& run) {
    const RunConfig& cfg = run.config;
    const RadialGeometry geo = geometry_from(cfg);
    const ResolvedMeasure m = resolve_measure(cfg, geo);
    TheoremBOptions opt;
    opt.c1 = cfg.number("constants.c1");
    opt.s_max = cfg.number("grids.s_max");
    opt.s_samples = cfg.integer("grids.s_samples");
    opt.tolerance = cfg.number("verify.tolerance");
    opt.rescale_to_dominate = cfg.flag("verify.rescale");
    const TheoremBReport r = verify_theoremB(m.measure, WeightEps::parse(cfg.get("weight.eps")), opt);
    Json j = report_header(cfg, "verify theoremB");
    j["measure"] = m.name;
    j["constant_sources"] = constant_sources(cfg, {"c1"});
    j["report"] = to_json(r);
    if (r.hypothesis) {
        j["curve"] = curve_json(r.curve);
        Vector cap = r.curve.log_cap.array().exp().matrix();
        Vector env = r.envelope_log.array().exp().matrix();
        run.emit_csv("theoremB.csv",
                     csv_table({"s", "cap", "envelope", "log_cap", "log_envelope"},
                               {r.curve.s, cap, env, r.curve.log_cap, r.envelope_log}));
    }
    run.emit_json("theoremB.json", j);
    say("verify theoremB " + m.name + ": " + r.message);
    if (!r.hypothesis) return kHypothesis;
    return r.pass ? kPass : kViolation;
}

int verify_lemma23(const Run& run) {
    const RunConfig& cfg = run.config;
    const RadialGeometry geo = geometry_from(cfg);
    const ResolvedMeasure m = resolve_measure(cfg, geo);
    Vector t(3);
    t << 0.1, 0.5, 1.0;
    const Lemma23Report r = check_lemma23(solve(run, m.measure), s_grid(cfg), t);
    Json j = report_header(cfg, "verify lemma23");
    j["measure"] = m.name;
    j["report"] = to_json(r);
    run.emit_json("lemma23.json", j);
    say("verify lemma23 " + m.name + ": " + (r.pass ? "pass" : "violation") + ", worst relative excess " +
        format_double(std::max(r.max_violation_lower, r.max_violation_upper)));
    return r.pass ? kPass : kViolation;
}

int verify_est(const Run& run) {
    const RunConfig& cfg = run.config;
    const RadialGeometry geo = geometry_from(cfg);
    const ResolvedMeasure m = resolve_measure(cfg, geo);
    const WeightEps eps = WeightEps::parse(cfg.get("weight.eps"));
    Json j = report_header(cfg, "verify est");
    j["measure"] = m.name;
    const DominationReport d = check_domination(m.measure, eps);
    j["domination"] = to_json(d);
    if (!d.pass) {
        run.emit_json("est.json", j);
        say("verify est " + m.name + ": mu is not dominated by F_eps on the ball family");
        return kHypothesis;
    }
    const CapacityCurve c = cap_curve(solve(run, m.measure), s_grid(cfg));
    Vector t(4);
    t << 0.01, 0.1, 0.5, 1.0;
    const EstReport r = check_est_inequality(c, eps, t, 1.0);
    j["report"] = to_json(r);
    run.emit_csv("est.csv", capacity_csv(c));
    run.emit_json("est.json", j);
    say("verify est " + m.name + ": " + (r.pass ? "pass" : "violation") + ", min margin " + format_double(r.min_margin));
    return r.pass ? kPass : kViolation;
}

int verify_yau(const Run& run) {
    const RunConfig& cfg = run.config;
    const RadialGeometry geo = geometry_from(cfg);
    const ResolvedMeasure m = resolve_measure(cfg, geo);
    YauConstants k;
    k.nu = cfg.number("constants.nu");
    k.C2_skoda = cfg.number("constants.C2");
    k.C2_prime = cfg.number("constants.C2_prime");
    k.c_N = cfg.number("constants.c_N");
    const YauBoundReport r = yau_bound(m.measure, cfg.number("verify.p"), k);
    Json j = report_header(cfg, "verify yau");
    j["measure"] = m.name;
    j["constant_sources"] = constant_sources(cfg, {"C2", "C2_prime"});
    j["report"] = to_json(r);
    run.emit_json("yau.json", j);
    say("verify yau " + m.name + ": " + r.message +
        (r.f_in_Lp && r.C1 > 0 ? " (sup norm " + format_double(r.sup_norm_phi) + ", bound " + format_double(r.M_bound) + ")"
                               : ""));
    if (!r.f_in_Lp || !(r.C1 > 0)) return kHypothesis;
    return r.pass ? kPass : kViolation;
}

std::string domination_csv(const DominationReport& d) {
    Vector r = d.t0.array().exp().matrix();
    Vector cap = d.log_cap.array().exp().matrix();
    Vector F = d.log_F.array().exp().matrix();
    Vector ratio(d.t0.size());
    for (Index i = 0; i < ratio.size(); ++i)
        ratio[i] = d.mass[i] == 0 ? 0.0 : std::exp(std::log(d.mass[i]) - d.log_F[i]);
    return csv_table({"t0", "r", "mu", "cap", "F_eps", "ratio"}, {d.t0, r, d.mass, cap, F, ratio});
}

int verify_domination(const Run& run) {
    const RunConfig& cfg = run.config;
    const RadialGeometry geo = geometry_from(cfg);
    const ResolvedMeasure m = resolve_measure(cfg, geo);
    const DominationReport d = check_domination(m.measure, WeightEps::parse(cfg.get("weight.eps")));
    Json j = report_header(cfg, "verify domination");
    j["measure"] = m.name;
    j["report"] = to_json(d);
    run.emit_csv("domination.csv", domination_csv(d));
    run.emit_json("domination.json", j);
    say("verify domination " + m.name + ": " + (d.pass ? "pass" : "fail") + ", A = " + format_double(d.constant_A));
    return d.pass ? kPass : kHypothesis;
}

double orlicz_exponent(const RunConfig& cfg) {
    const std::string& e = cfg.get("verify.exponent");
    return e == "n" ? -1.0 : cfg.number("verify.exponent");
}

int verify_orlicz(const Run& run) {
    const RunConfig& cfg = run.config;
    const RadialGeometry geo = geometry_from(cfg);
    const ResolvedMeasure m = resolve_measure(cfg, geo);
    const OrliczResult r = orlicz_test(m.measure, WeightEps::parse(cfg.get("weight.eps")), orlicz_exponent(cfg));
    Json j = report_header(cfg, "verify orlicz");
    j["measure"] = m.name;
    j["report"] = to_json(r);
    run.emit_json("orlicz.json", j);
    say("verify orlicz " + m.name + ": " + (r.finite ? "finite, " + format_double(r.integral) : "divergent"));
    return r.finite ? kPass : kHypothesis;
}

int cmd_dominate(const Run& run) {
    const RunConfig& cfg = run.config;
    const RadialGeometry geo = geometry_from(cfg);
    const ResolvedMeasure m = resolve_measure(cfg, geo);
    const BridgeReport b =
        proposition43_bridge(m.measure, WeightEps::parse(cfg.get("weight.eps")), {}, orlicz_exponent(cfg));
    Json j = report_header(cfg, "dominate");
    j["measure"] = m.name;
    j["report"] = to_json(b);
    if (b.applicable) run.emit_csv("domination.csv", domination_csv(b.domination));
    run.emit_json("dominate.json", j);
    if (!b.applicable) {
        say("dominate " + m.name + ": Orlicz integral diverges, not applicable");
        return kHypothesis;
    }
    say("dominate " + m.name + ": A = " + format_double(b.domination.constant_A));
    return b.finite_A ? kPass : kViolation;
}

int cmd_gallery_list() {
    for (const auto& name : gallery_names()) say(name + "  " + example_gallery(name).description);
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial complex Monge-Ampere benchmarks: solves, capacities, envelopes, verifications"};
    app.set_version_flag("--version", kLibraryVersion);
    app.require_subcommand(1);

    std::map<std::string, Overrides> over;
    auto with_common = [&](CLI::App* sub, const std::string& key) {
        over[key].attach(sub);
        return sub;
    };
    std::function<int()> action;
    auto bind = [&](CLI::App* sub, const std::string& key, int (*fn)(const Run&)) {
        sub->callback([&, key, fn] { action = [&, key, fn] { return fn(over.at(key).resolve()); }; });
    };

    bind(with_common(app.add_subcommand("solve", "solve (omega + dd^c phi)^n = mu"), "solve"), "solve", cmd_solve);
    bind(with_common(app.add_subcommand("capacity", "capacity curve s -> Cap(phi < -s)"), "capacity"), "capacity",
         cmd_capacity);
    bind(with_common(app.add_subcommand("envelope", "envelope exp(-n H^{-1}(s)), optionally beside a curve"),
                     "envelope"),
         "envelope", cmd_envelope);
    bind(with_common(app.add_subcommand("dominate", "Orlicz integral and the domination constant A"), "dominate"),
         "dominate", cmd_dominate);

    CLI::App* verify = app.add_subcommand("verify", "hypothesis and estimate checks");
    verify->require_subcommand(1);
    const std::pair<const char*, int (*)(const Run&)> checks[] = {
        {"theoremB", verify_theoremB}, {"lemma23", verify_lemma23},       {"est", verify_est},
        {"yau", verify_yau},           {"domination", verify_domination}, {"orlicz", verify_orlicz},
    };
    for (const auto& [name, fn] : checks) {
        const std::string key = std::string("verify.") + name;
        bind(with_common(verify->add_subcommand(name), key), key, fn);
    }

    CLI::App* gallery = app.add_subcommand("gallery", "built-in examples");
    gallery->require_subcommand(1);
    gallery->add_subcommand("list", "names and descriptions")->callback([&] { action = cmd_gallery_list; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }
    try {
        return action();
    } catch (const PluripolarChargeError& e) {
        std::cerr << "hypothesis not met: " << e.what() << std::endl;
        return kHypothesis;
    } catch (const DataError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kUsage;
    } catch (const ContractError& e) {
        std::cerr << "invalid input: " << e.what() << std::endl;
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kUsage;
    }
}
