#include "mabench/errors.hpp"
#include "mabench/radial.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>

namespace mabench {

namespace {

// log(1 + e^{-2t}) without overflow.
double log_ball_deficit(double t) {
    if (t < 0) return -2 * t + std::log1p(std::exp(2 * t));
    return std::log1p(std::exp(-2 * t));
}

// Five-point Gauss-Legendre on every grid cell of a closed slope q, summed
// into node values of h (h at t_min is 0).
Vector integrate_slope_on_grid(const Grid1D& grid, const std::function<double(double)>& q) {
    static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
    static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    Vector h(grid.size());
    h[0] = 0.0;
    for (Index i = 0; i + 1 < grid.size(); ++i) {
        const double mid = 0.5 * (grid[i] + grid[i + 1]), half = 0.5 * (grid[i + 1] - grid[i]);
        double cell = 0.0;
        for (int k = 0; k < 5; ++k) cell += wg[k] * q(mid + half * xg[k]);
        h[i + 1] = h[i] + half * cell;
    }
    return h;
}

GalleryEntry from_closed_mass(std::string name, std::string description, const RadialGeometry& geo,
                              std::function<double(double)> mass, std::function<double(double)> dmass,
                              std::function<double(double)> log_dmass) {
    const double inv_n = 1.0 / geo.n;
    auto q = [mass, inv_n](double t) { return std::pow(mass(t), inv_n); };
    GalleryEntry e{std::move(name), std::move(description),
                   measure_from_mass(geo, mass, std::move(dmass), std::move(log_dmass)),
                   profile_from_slope_nodes(geo, integrate_slope_on_grid(geo.grid, q), q, q),
                   std::nullopt,
                   {}};
    return e;
}

GalleryEntry ex41(const GalleryParams& p, const RadialGeometry& geo) {
    const double kappa = p.kappa;
    if (!(kappa > 0)) throw ContractError("ex41 needs kappa > 0");
    auto mass = [kappa](double t) { return 1.0 / (1.0 + kappa * log_ball_deficit(t)); };
    auto dmass = [kappa](double t) {
        const double d = 1.0 + kappa * log_ball_deficit(t);
        return 2 * kappa * fs_slope(-t) / (d * d);
    };
    auto log_dmass = [kappa](double t) {
        return std::log(2 * kappa) + fs_log_slope(-t) - 2 * std::log1p(kappa * log_ball_deficit(t));
    };
    GalleryEntry e = from_closed_mass("ex41", "loglog pole: density ~ c/(|z|^2 (log|z|)^2)", geo, mass, dmass,
                                      log_dmass);
    e.constants["kappa"] = kappa;
    e.constants["c_prime"] = 1.0 / (2 * kappa);
    return e;
}

GalleryEntry ex42(const GalleryParams& p, const RadialGeometry& geo) {
    const WeightEps eps = p.eps ? *p.eps : WeightEps::power(0.5);
    const double e0 = eps(0.0);
    if (!(e0 > 0)) throw ContractError("ex42 needs eps(0) > 0");
    auto ell = [](double t) { return 0.5 * log_ball_deficit(t); };
    auto mass = [eps, e0, ell](double t) {
        const double l = ell(t);
        return eps(std::log1p(l)) / (e0 * (1 + l));
    };
    auto dmass = [eps, e0, ell](double t) {
        const double l = ell(t), u = std::log1p(l);
        return fs_slope(-t) * (eps(u) - eps.derivative(u)) / (e0 * (1 + l) * (1 + l));
    };
    auto log_dmass = [eps, e0, ell](double t) {
        const double l = ell(t), u = std::log1p(l);
        return fs_log_slope(-t) + std::log(eps(u) - eps.derivative(u)) - std::log(e0) - 2 * std::log1p(l);
    };
    GalleryEntry e = from_closed_mass("ex42", "weighted loglog pole: density ~ eps(log(-log|z|))/(|z|^2 (log|z|)^2)",
                                      geo, mass, dmass, log_dmass);
    e.eps = eps;
    e.constants["eps0"] = e0;
    if (geo.n == 1) {
        // chi(t) + E(log(1 + l(t))) / eps(0) tends to a constant at the pole,
        // E being the primitive of eps.
        const double far = -1e8;
        e.constants["chi_offset"] = e.reference.chi(far) + eps.integral(std::log1p(ell(far))) / e0;
    }
    return e;
}

GalleryEntry ex44(const GalleryParams& p, const RadialGeometry& geo) {
    const int n = geo.n;
    const double tc = std::log(p.r_cut);
    if (!(tc < -1)) throw ContractError("ex44 needs r_cut < e^{-1}");
    const double m = 1.0 / (-tc);
    const double tb = 0.5 * std::log(m / (1 - m));  // g'(tb) = m
    const double gb = fs_potential(tb);
    const double C = gb + m * (tc - tb) + std::log(-tc);
    auto h = [=](double t) {
        if (t >= tb) return fs_potential(t);
        if (t >= tc) return gb + m * (t - tb);
        return C - std::log(-t);
    };
    auto dh = [=](double t) {
        if (t >= tb) return fs_slope(t);
        if (t >= tc) return m;
        return 1.0 / (-t);
    };
    auto chi = [h, tb](double t) { return t >= tb ? 0.0 : h(t) - fs_potential(t); };
    auto dchi = [dh](double t) { return dh(t) - fs_slope(t); };
    auto mass = [dh, n](double t) { return std::pow(dh(t), n); };
    auto log_dmass = [=](double t) {
        if (t >= tb) return std::log(2.0 * n) + n * fs_log_slope(t) + fs_log_slope(-t);
        if (t >= tc) return -std::numeric_limits<double>::infinity();
        return std::log(static_cast<double>(n)) - (n + 1) * std::log(-t);
    };
    auto dmass = [log_dmass](double t) { return std::exp(log_dmass(t)); };
    GalleryEntry e{"ex44",
                   "log pole spliced at r_cut: ball masses (-log r)^{-n}, density c_n/(|z|^{2n}(-log|z|)^{n+1})",
                   measure_from_mass(geo, mass, dmass, log_dmass),
                   profile_from_chi(geo, chi, dchi, true),
                   std::nullopt,
                   {}};
    e.constants["t_cut"] = tc;
    e.constants["t_bridge"] = tb;
    e.constants["bridge_slope"] = m;
    e.constants["pole_offset"] = C;
    return e;
}

}  // namespace

// With w = 2 - log g'(t): M = c 2^{-beta} e^2 Gamma(beta + 1, w), and
// Gamma(beta + 1, 2) fixes c.
RadialMeasure log_power_density(const RadialGeometry& geometry, double beta) {
    if (geometry.n != 1) throw ContractError("log_power_density is defined on P^1 only");
    if (!(beta >= 0)) throw ContractError("log_power_density needs beta >= 0");
    const double a = beta + 1;
    const double log_c = -std::log(boost::math::tgamma(a, 2.0)) + beta * std::log(2.0) - 2.0;
    const double scale = std::exp(log_c - beta * std::log(2.0) + 2.0);
    auto w = [](double t) { return 2.0 - fs_log_slope(t); };
    auto mass = [a, scale, w](double t) {
        const double x = w(t);
        if (x > 700) return 0.0;
        return scale * boost::math::tgamma(a, x);
    };
    auto log_dmass = [beta, log_c](double t) {
        // f = c (1 + l)^beta, dM_omega = 2 g' (1 - g') dt
        return log_c + beta * std::log1p(-0.5 * fs_log_slope(t)) + std::log(2.0) + fs_log_slope(t) + fs_log_slope(-t);
    };
    auto dmass = [log_dmass](double t) { return std::exp(log_dmass(t)); };
    return measure_from_mass(geometry, mass, dmass, log_dmass);
}

double log_power_density_Lp_power(double beta, double p) {
    const double log_c = -std::log(boost::math::tgamma(beta + 1, 2.0)) + beta * std::log(2.0) - 2.0;
    return std::exp(p * log_c - beta * p * std::log(2.0) + 2.0) * boost::math::tgamma(beta * p + 1, 2.0);
}

std::vector<std::string> gallery_names() { return {"ex41", "ex42", "ex44", "omega"}; }

GalleryEntry example_gallery(const std::string& name, const GalleryParams& params, const Grid1D& grid) {
    const RadialGeometry geo = RadialGeometry::fubini_study(params.n, grid);
    if (name == "ex41") return ex41(params, geo);
    if (name == "ex42") return ex42(params, geo);
    if (name == "ex44") return ex44(params, geo);
    if (name == "omega") {
        return GalleryEntry{"omega", "omega^n itself: the solution is 0", fs_measure(geo),
                            profile_from_chi(geo, [](double) { return 0.0; }, [](double) { return 0.0; }, true),
                            std::nullopt, {}};
    }
    throw ContractError("unknown gallery example '" + name + "'");
}

}  // namespace mabench
