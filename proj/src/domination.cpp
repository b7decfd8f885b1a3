#include "mabench/domination.hpp"

#include "mabench/errors.hpp"
#include "mabench/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mabench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_mass_density(const RadialMeasure& mu, double t) {
    if (mu.log_dmass) return mu.log_dmass(t);
    const double d = mu.dM(t);
    return d > 0 ? std::log(d) : -kInf;
}

}  // namespace

Vector default_ball_family() { return Vector::LinSpaced(451, -40.0, 5.0); }

DominationReport check_domination(const RadialMeasure& mu, const WeightEps& eps, const Vector& t0_in,
                                  double tolerance) {
    const Vector t0 = t0_in.size() ? t0_in : default_ball_family();
    const int n = mu.geometry.n;
    DominationReport r;
    r.t0 = t0;
    r.tolerance = tolerance;
    r.mass = Vector(t0.size());
    r.log_cap = Vector(t0.size());
    r.log_F = Vector(t0.size());
    Vector log_ratio(t0.size());
    parallel_for(static_cast<std::size_t>(t0.size()), [&](std::size_t k) {
        const Index i = static_cast<Index>(k);
        const double M = std::max(0.0, mu.M(t0[i]));
        const double lc = log_cap_ball(RadialCompact{t0[i]}, mu.geometry);
        const double e = eps(-lc / n);
        const double lF = (std::isinf(lc) || e <= 0) ? -kInf : lc + n * std::log(e);
        r.mass[i] = M;
        r.log_cap[i] = lc;
        r.log_F[i] = lF;
        if (M == 0)
            log_ratio[i] = -kInf;
        else
            log_ratio[i] = std::isinf(lF) ? kInf : std::log(M) - lF;
    });
    Index worst = 0;
    const double lr = log_ratio.maxCoeff(&worst);
    r.worst_ratio = std::exp(lr);
    r.worst_t0 = t0[worst];
    r.constant_A = r.worst_ratio;
    r.pass = r.worst_ratio <= 1.0 + tolerance;
    return r;
}

PoleIntegral integrate_towards_pole(const std::function<double(double)>& integrand, double t_right, double floor,
                                    int max_windows) {
    PoleIntegral out;
    double total = 0.0;
    for (double a = -1.0; a < t_right; a += 1.0) total += adaptive_simpson(integrand, a, std::min(a + 1.0, t_right), 1e-14);
    out.partials.push_back(total);
    const double ln2 = std::log(2.0);
    bool overflow = false;
    auto in_log = [&](double u) {
        const double eu = std::exp(u);
        const double v = integrand(-eu) * eu;
        if (std::isinf(v)) overflow = true;
        return std::isfinite(v) ? v : 0.0;
    };
    double prev_inc = -1.0;
    int growing = 0, quiet = 0;
    for (int k = 0; k < max_windows; ++k) {
        const double a = k * ln2, b = (k + 1) * ln2;
        // Tolerance relative to a coarse look at the window, so that huge
        // integrands do not drive the recursion to full depth.
        double coarse = 0.0;
        for (int j = 0; j <= 8; ++j) coarse = std::max(coarse, in_log(a + (b - a) * j / 8.0));
        const double inc = overflow ? kInf : adaptive_simpson(in_log, a, b, 1e-15 * std::max({1.0, total, coarse}));
        if (overflow || !std::isfinite(inc)) {
            out.divergent = true;
            out.value = kInf;
            return out;
        }
        total += inc;
        out.partials.push_back(total);
        if (inc > floor && prev_inc >= 0 && inc >= 0.9 * prev_inc && k >= 4)
            ++growing;
        else
            growing = 0;
        if (growing >= 5) {
            out.divergent = true;
            out.value = kInf;
            return out;
        }
        quiet = inc <= 1e-15 * std::max(total, 1e-300) ? quiet + 1 : 0;
        if (quiet >= 3) break;
        prev_inc = inc;
    }
    out.value = total;
    return out;
}

OrliczResult orlicz_test(const RadialMeasure& mu, const WeightEps& eps, double exponent) {
    const int n = mu.geometry.n;
    const double e = exponent < 0 ? n : exponent;
    auto integrand = [&](double t) {
        const double ld = log_mass_density(mu, t);
        if (std::isinf(ld) && ld < 0) return 0.0;
        const double lf = mu.log_density(t);
        const double L = lf > 35 ? lf + std::log1p(std::exp(-lf)) : std::log1p(std::exp(lf));
        const double w = eps(std::log1p(std::abs(lf)));
        if (!(w > 0)) return kInf;
        return std::exp(ld) * std::pow(L / w, e);
    };
    const PoleIntegral p = integrate_towards_pole(integrand, 40.0);
    OrliczResult r;
    r.finite = !p.divergent;
    r.integral = p.value;
    r.partials = p.partials;
    r.exponent = e;
    return r;
}

BridgeReport proposition43_bridge(const RadialMeasure& mu, const WeightEps& eps, const Vector& t0, double exponent) {
    BridgeReport r;
    r.orlicz = orlicz_test(mu, eps, exponent);
    r.applicable = r.orlicz.finite;
    if (!r.applicable) return r;
    r.domination = check_domination(mu, eps, t0);
    r.finite_A = std::isfinite(r.domination.constant_A);
    return r;
}

}  // namespace mabench
