#include "mabench/bounds.hpp"

#include "mabench/errors.hpp"
#include "mabench/parallel.hpp"

#include <cmath>
#include <limits>

namespace mabench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kE = std::exp(1.0);

// d/dt of the omega^n mass of the ball of log-radius t, in log form.
double log_fs_mass_density(int n, double t) {
    return std::log(2.0 * n) + n * fs_log_slope(t) + fs_log_slope(-t);
}

// int over the whole space of an integrand given per unit t; each half is
// integrated towards its own pole.
PoleIntegral integrate_over_space(const std::function<double(double)>& f) {
    const PoleIntegral left = integrate_towards_pole(f, 0.0);
    const PoleIntegral right = integrate_towards_pole([&f](double u) { return f(-u); }, 0.0);
    PoleIntegral out;
    out.divergent = left.divergent || right.divergent;
    out.value = out.divergent ? kInf : left.value + right.value;
    out.partials = left.partials;
    return out;
}

}  // namespace

// ---------------------------------------------------------------- g function

GFunction::GFunction(CapacityCurve curve) : curve_(std::move(curve)) { curve_.validate(); }

double GFunction::operator()(double s) const {
    const double lc = curve_.log_cap_at(s);
    return std::isinf(lc) ? kInf : -lc / curve_.n;
}

double GFunction::first_reaching(double y) const {
    for (Index i = 0; i < curve_.s.size(); ++i)
        if ((*this)(curve_.s[i]) >= y) return curve_.s[i];
    return kInf;
}

GFunction g_of(const CapacityCurve& curve) { return GFunction(curve); }

// ---------------------------------------------------------------- sublevel sets against balls

Lemma23Report check_lemma23(const RadialProfile& profile, const Vector& s_grid, const Vector& t_grid,
                            double tolerance) {
    for (Index j = 0; j < t_grid.size(); ++j)
        if (!(t_grid[j] >= 0 && t_grid[j] <= 1)) throw ContractError("check_lemma23: t must lie in [0, 1]");
    const RadialMeasure mu = ma_mass(profile);
    const RadialGeometry& geo = profile.geometry;
    const int n = geo.n;
    // log mu(phi < -s) and log Cap(phi < -s); -inf for empty sets.
    auto level = [&](double s) -> std::pair<double, double> {
        const auto t = sublevel_radius(profile, s);
        if (!t) return {-kInf, -kInf};
        if (std::isinf(*t)) return {0.0, 0.0};
        const double M = mu.M(*t);
        return {M > 0 ? std::log(M) : -kInf, log_cap_ball(RadialCompact{*t}, geo)};
    };
    Lemma23Report r;
    r.tolerance = tolerance;
    double worst = 0;
    for (Index i = 0; i < s_grid.size(); ++i) {
        const double s = s_grid[i];
        const auto [lm, lc] = level(s);
        if (s >= 1 && !std::isinf(lm)) {
            const double excess = lm - (n * std::log(s) + lc);
            const double v = excess > 0 ? std::expm1(excess) : 0.0;
            r.max_violation_upper = std::max(r.max_violation_upper, v);
            if (v > worst) worst = v, r.worst_s = s, r.worst_t = 0;
            ++r.checks;
        }
        for (Index j = 0; j < t_grid.size(); ++j) {
            const double t = t_grid[j];
            if (t == 0) continue;
            const double lhs = n * std::log(t) + level(s + t).second;
            if (std::isinf(lhs)) continue;
            const double excess = lhs - lm;
            const double v = excess > 0 ? std::expm1(excess) : 0.0;
            r.max_violation_lower = std::max(r.max_violation_lower, v);
            if (v > worst) worst = v, r.worst_s = s, r.worst_t = t;
            ++r.checks;
        }
    }
    r.pass = r.max_violation_lower <= tolerance && r.max_violation_upper <= tolerance;
    return r;
}

EstReport check_est_inequality(const CapacityCurve& curve, const WeightEps& eps, const Vector& t_grid, double s_min) {
    const GFunction g(curve);
    EstReport r;
    r.tolerance = std::log(1.05) / curve.n;
    r.min_margin = kInf;
    for (Index i = 0; i < curve.s.size(); ++i) {
        const double s = curve.s[i];
        if (s <= 0 || s < s_min) continue;
        const double gs = g(s);
        if (std::isinf(gs)) continue;
        for (Index j = 0; j < t_grid.size(); ++j) {
            const double t = t_grid[j];
            if (!(t > 0 && t <= 1)) throw ContractError("check_est_inequality: t must lie in (0, 1]");
            if (s + t > curve.s_max() && curve.tail == CapacityCurve::TailKind::None) continue;
            const double lhs = std::log(t) - std::log(eps(gs)) + gs;
            const double margin = g(s + t) - lhs;
            ++r.checks;
            if (margin < r.min_margin) r.min_margin = margin, r.worst_s = s, r.worst_t = t;
        }
    }
    r.pass = r.min_margin >= -r.tolerance;
    return r;
}

// ---------------------------------------------------------------- s0 and iteration

double compute_s0(const WeightEps& eps, int n, double c1) {
    if (n < 1) throw ContractError("dimension must be >= 1");
    if (!(c1 >= 0)) throw ContractError("c1 must be >= 0");
    const double x = eps.inverse(1.0 / kE);
    if (std::isinf(x)) return kInf;
    return (n + c1) * std::exp(n * x);
}

double s0_from_curve(const GFunction& g, const WeightEps& eps) {
    if (std::isinf(eps.inverse(1.0 / kE))) return g.first_reaching(1.0);
    const CapacityCurve& c = g.curve();
    for (Index i = 0; i < c.s.size(); ++i) {
        const double gs = g(c.s[i]);
        const double e = std::isinf(gs) ? eps(1e300) : eps(gs);
        if (kE * e <= 1.0) return c.s[i];
    }
    return kInf;
}

IterationTrace run_iteration(const WeightEps& eps, double s0, const std::optional<GFunction>& g, int max_steps) {
    if (!(s0 >= 0) || std::isinf(s0)) throw ContractError("run_iteration: s0 must be finite and >= 0");
    IterationTrace tr;
    double s = s0;
    tr.s_values.push_back(s);
    if (!g) {
        tr.mode = IterationTrace::Mode::Envelope;
        for (int j = 0; j < max_steps; ++j) {
            const double step = kE * eps(static_cast<double>(j));
            if (step <= 1e-17 * std::max(1.0, s)) break;
            s += step;
            tr.s_values.push_back(s);
        }
        const double total = eps.total_integral();
        tr.converged_to = std::isinf(total) ? kInf : s0 + kE * eps(0.0) + kE * total;
        return tr;
    }
    tr.mode = IterationTrace::Mode::ProofFaithful;
    const CapacityCurve& c = g->curve();
    const double slack = std::log(1.05) / c.n;
    bool stalled = false;
    for (int j = 0; j <= max_steps; ++j) {
        if (s > c.s_max() && c.tail == CapacityCurve::TailKind::None) break;
        const double gs = (*g)(s);
        tr.g_values.push_back(gs);
        if (gs < j - slack) tr.induction_holds = false;
        if (j == max_steps) break;
        const double step = kE * (std::isinf(gs) ? eps(1e300) : eps(gs));
        if (step <= 1e-15 * std::max(1.0, s)) {
            stalled = true;
            break;
        }
        s += step;
        tr.s_values.push_back(s);
    }
    tr.converged_to = stalled ? s : kInf;
    return tr;
}

// ---------------------------------------------------------------- envelope

BoundEnvelope::BoundEnvelope(const WeightEps& eps, double s0, int n) : H_(eps, s0), n_(n) {
    if (n < 1) throw ContractError("dimension must be >= 1");
}

double BoundEnvelope::log_value(double s) const {
    const double x = H_.inverse(s);
    return std::isinf(x) ? -kInf : -n_ * x;
}

double BoundEnvelope::operator()(double s) const { return std::exp(log_value(s)); }

BoundEnvelope envelope(const WeightEps& eps, double s0, int n) { return BoundEnvelope(eps, s0, n); }

// ---------------------------------------------------------------- end-to-end envelope check

TheoremBReport verify_theoremB(const RadialMeasure& mu, const WeightEps& eps_in, const TheoremBOptions& opt) {
    const RadialGeometry& geo = mu.geometry;
    const int n = geo.n;
    TheoremBReport r;
    r.domination = check_domination(mu, eps_in, opt.domination_t);
    WeightEps eps = eps_in;
    // F_eps(Cap) -> 0 on shrinking balls while an atom keeps its mass: no A
    // works once the family reaches far enough.
    if (mu.atom_at_pole > SolveOptions{}.atom_tolerance) {
        r.domination.constant_A = std::numeric_limits<double>::infinity();
        r.domination.pass = false;
    }
    if (!std::isfinite(r.domination.constant_A)) {
        r.message = "mu is not dominated by any multiple of F_eps on the ball family (charge at the pole?)";
        return r;
    }
    if (!r.domination.pass) {
        if (!opt.rescale_to_dominate) {
            r.message = "mu exceeds F_eps on the ball family (A = " + std::to_string(r.domination.constant_A) + ")";
            return r;
        }
        // F_{c eps} = c^n F_eps.
        r.eps_scale = std::pow(r.domination.constant_A * (1 + 1e-9), 1.0 / n);
        eps = eps_in.scaled(r.eps_scale);
    }
    r.hypothesis = true;
    r.eps_used = eps.describe();

    const RadialProfile phi = solve_radial_ma(mu);
    r.curve = cap_curve(phi, Vector::LinSpaced(opt.s_samples, 0.0, opt.s_max));
    const GFunction g(r.curve);
    const double c1 = opt.c1 >= 0 ? opt.c1 : estimate_c1(geo);
    r.s0_formula = compute_s0(eps, n, c1);
    r.s0 = s0_from_curve(g, eps);
    if (std::isinf(r.s0)) r.s0 = r.s0_formula;
    if (std::isinf(r.s0)) {
        r.message = "no admissible s0: the curve never meets e eps(g(s)) <= 1 and eps stays above 1/e";
        return r;
    }
    r.s0_envelope = r.s0 + kE * eps(0.0);
    const BoundEnvelope env(eps, r.s0_envelope, n);
    r.s_infinity = env.H().s_infinity();
    r.envelope_log = Vector(r.curve.s.size());
    double worst = -kInf;
    for (Index i = 0; i < r.curve.s.size(); ++i) {
        const double s = r.curve.s[i];
        r.envelope_log[i] = env.log_value(s);
        if (s < r.s0) continue;
        const double lc = r.curve.log_cap[i];
        if (std::isinf(lc)) continue;
        const double lr = std::isinf(r.envelope_log[i]) ? kInf : lc - r.envelope_log[i];
        if (lr > worst) worst = lr, r.worst_s = s;
    }
    r.max_ratio = std::exp(worst);
    r.pass = r.max_ratio <= opt.tolerance;
    r.message = r.pass ? "envelope dominates the capacity curve" : "capacity curve exceeds the envelope";
    return r;
}

// ---------------------------------------------------------------- constants

std::vector<RadialProfile> lelong_family(const RadialGeometry& geometry, const std::vector<double>& lelong) {
    std::vector<RadialProfile> out;
    for (double a : lelong) {
        if (!(a > 0 && a <= 1)) throw ContractError("Lelong numbers of omega-psh profiles lie in (0, 1]");
        if (a == 1) {
            // h = t: chi = t - g(t).
            out.push_back(profile_from_chi(
                geometry, [](double t) { return t - fs_potential(t); }, [](double t) { return 1.0 - fs_slope(t); }));
            continue;
        }
        const double b = 0.5 * std::log(a / (1 - a));  // g'(b) = a
        const double gb = fs_potential(b);
        out.push_back(profile_from_chi(
            geometry, [=](double t) { return t >= b ? 0.0 : gb + a * (t - b) - fs_potential(t); },
            [=](double t) { return t >= b ? 0.0 : a - fs_slope(t); }));
    }
    return out;
}

std::vector<RadialProfile> stress_family(const RadialGeometry& geometry) {
    std::vector<double> a;
    for (int k = 1; k <= 10; ++k) a.push_back(0.1 * k);
    std::vector<RadialProfile> out = lelong_family(geometry, a);
    // Mirror t -> -t: chi(-t) is again omega-psh (h(-t) + t is convex with
    // slope 1 - h'(-t)).
    const Index m = static_cast<Index>(out.size());
    for (Index k = 0; k < m; ++k) {
        const SampledFunction base = out[static_cast<size_t>(k)].chi;
        out.push_back(profile_from_chi(
            geometry, [base](double t) { return base(-t); },
            [base](double t) { return -derivative(base, -t, Side::Left); }));
    }
    return out;
}

namespace {

double space_integral_of(const RadialProfile& p, const std::function<double(double)>& of_chi, bool* divergent) {
    const int n = p.geometry.n;
    const PoleIntegral r = integrate_over_space(
        [&](double t) { return of_chi(p.eval(t)) * std::exp(log_fs_mass_density(n, t)); });
    if (divergent) *divergent = r.divergent;
    return r.value;
}

}  // namespace

double estimate_c1(const RadialGeometry& geometry) {
    const auto family = stress_family(geometry);
    std::vector<double> vals(family.size());
    parallel_for(family.size(), [&](std::size_t k) {
        vals[k] = space_integral_of(family[k], [](double c) { return -c; }, nullptr);
    });
    double m = 0;
    for (double v : vals) m = std::max(m, v);
    return 2 * m;
}

double estimate_C2_prime(const RadialGeometry& geometry, int N, double q) {
    const auto family = stress_family(geometry);
    const double e = N * q;
    std::vector<double> vals(family.size());
    parallel_for(family.size(), [&](std::size_t k) {
        const double I = space_integral_of(family[k], [e](double c) { return std::pow(std::max(0.0, -c), e); }, nullptr);
        vals[k] = std::pow(I, 1.0 / q);
    });
    double m = 0;
    for (double v : vals) m = std::max(m, v);
    return 2 * m;
}

SkodaEstimate skoda_estimate(const RadialGeometry& geometry, double nu, const std::vector<RadialProfile>& samples) {
    if (!(nu > 0)) throw ContractError("skoda_estimate: nu must be > 0");
    SkodaEstimate out;
    std::vector<double> vals(samples.size());
    std::vector<char> div(samples.size(), 0);
    parallel_for(samples.size(), [&](std::size_t k) {
        bool d = false;
        vals[k] = space_integral_of(samples[k], [nu](double c) { return std::exp(-c / nu); }, &d);
        div[k] = d;
    });
    (void)geometry;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        // Slope of h far towards the pole.
        const SampledFunction h = samples[k].h();
        const double lelong = (h(-1000.0) - h(-2000.0)) / 1000.0;
        if (div[k]) {
            out.divergent = true;
            out.value = kInf;
            out.worst_lelong = std::max(out.worst_lelong, lelong);
        } else if (!out.divergent && vals[k] > out.value) {
            out.value = vals[k];
            out.worst_lelong = lelong;
        }
    }
    return out;
}

double density_Lp_norm(const RadialMeasure& mu, double p, bool* divergent) {
    if (!(p >= 1)) throw ContractError("density_Lp_norm: p must be >= 1");
    // f^p omega^n = f^{p-1} dM.
    auto integrand = [&](double t) {
        const double ld = mu.log_dmass ? mu.log_dmass(t) : std::log(std::max(0.0, mu.dM(t)));
        if (std::isinf(ld) && ld < 0) return 0.0;
        return std::exp((p - 1) * mu.log_density(t) + ld);
    };
    const PoleIntegral r = integrate_over_space(integrand);
    if (divergent) *divergent = r.divergent;
    return r.divergent ? kInf : std::pow(r.value, 1.0 / p);
}

double yau_M_bound(double C1, double C2_N, int n, double f_norm) {
    const double K = std::pow(C1, n) * std::pow(kE, n) * C2_N;
    const double root = std::pow(f_norm, 1.0 / n);
    const double s0 = (K >= 1 ? K : std::pow(K, 1.0 / (2 * n))) * root;
    return s0 + 2 * kE * C1 * root;
}

YauBoundReport yau_bound(const RadialMeasure& mu, double p, const YauConstants& k) {
    if (!(p > 1)) throw ContractError("yau_bound: p must be > 1");
    const RadialGeometry& geo = mu.geometry;
    const int n = geo.n;
    YauBoundReport r;
    r.p = p;
    r.q = p / (p - 1);
    bool divergent = false;
    const double norm = density_Lp_norm(mu, p, &divergent);
    if (divergent) {
        r.f_in_Lp = false;
        r.f_Lp_norm = kInf;
        r.message = "density is not in L^p: the bound does not apply";
        return r;
    }
    // The normalization forces ||f||_p >= 1; quadrature may land a hair below.
    r.f_Lp_norm = std::max(1.0, norm);
    r.nu_omega = k.nu;
    if (k.C2_skoda > 0) {
        r.C2_skoda = k.C2_skoda;
    } else {
        const SkodaEstimate est = skoda_estimate(geo, k.nu, stress_family(geo));
        if (est.divergent) {
            r.message = "exp(-psi/nu) is not integrable on the stress family: nu too small";
            return r;
        }
        r.C2_skoda = 2 * est.value;
    }
    r.a = 1.0 / (r.q * r.nu_omega);
    const double peak = 2.0 * n / r.a;  // maximizer of y^{2n} e^{-a y}
    r.C_n = peak >= 1 ? std::pow(peak / kE, 2 * n) : std::exp(-r.a);
    r.C1 = std::pow(std::pow(r.C2_skoda, 1.0 / r.q) * std::exp(r.a) * r.C_n, 1.0 / n);
    r.N = 2 * n;
    r.c_N = k.c_N > 0 ? k.c_N : std::pow(2.0, r.N);
    r.C2_prime = k.C2_prime > 0 ? k.C2_prime : estimate_C2_prime(geo, r.N, r.q);
    r.C2_N = r.c_N * std::max(r.C2_prime, 1.0);
    const double K = std::pow(r.C1, n) * std::pow(kE, n) * r.C2_N;
    const double root = std::pow(r.f_Lp_norm, 1.0 / n);
    r.s0 = (K >= 1 ? K : std::pow(K, 1.0 / (2 * n))) * root;
    r.M_bound = yau_M_bound(r.C1, r.C2_N, n, r.f_Lp_norm);
    const RadialProfile phi = solve_radial_ma(mu);
    r.sup_norm_phi = -phi.infimum();
    r.pass = r.sup_norm_phi <= r.M_bound;
    r.message = r.pass ? "sup norm within the bound" : "sup norm exceeds the bound";
    return r;
}

}  // namespace mabench
