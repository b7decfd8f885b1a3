#include "mabench/capacity.hpp"

#include "mabench/errors.hpp"
#include "mabench/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace mabench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Beyond this log-radius the slope-1 line from the corner stays below g.
const double kNoTangency = -0.5 * std::log(std::expm1(2.0));

// Sign of log(g'(b) (b - t0)) - log(1 + g(b) - g(t0)): negative left of the
// tangency point, positive right of it.
double tangency_gap(double b, double t0) {
    return fs_log_slope(b) + std::log(b - t0) - std::log1p(fs_potential(b) - fs_potential(t0));
}

void check_t0(double t0) {
    if (std::isnan(t0)) throw ContractError("ball log-radius is NaN");
}

}  // namespace

Tangency corner_tangent(double t0) {
    check_t0(t0);
    if (t0 >= kNoTangency) return {kInf, 1.0, 0.0};
    if (t0 == -kInf) return {-kInf, 0.0, -kInf};
    double lo = std::max(t0, -0.5 * std::log1p(-t0) - 20.0);
    if (lo <= t0) lo = t0 + 1e-12 * std::max(1.0, std::abs(t0));
    double hi = 1.0;
    while (tangency_gap(hi, t0) <= 0) hi *= 2;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (tangency_gap(mid, t0) <= 0)
            lo = mid;
        else
            hi = mid;
    }
    const double b = 0.5 * (lo + hi);
    return {b, fs_slope(b), fs_log_slope(b)};
}

ExtremalFunction relative_extremal(const RadialCompact& K, const RadialGeometry& geometry) {
    using Kind = ExtremalFunction::Kind;
    const double t0 = K.t0;
    const Tangency tan = corner_tangent(t0);
    if (t0 == kInf) {
        return {Kind::Relative,
                profile_from_chi(geometry, [](double) { return -1.0; }, [](double) { return 0.0; }, false),
                tan.contact_t, tan.slope, -1.0};
    }
    if (t0 == -kInf) {
        return {Kind::Relative,
                profile_from_chi(geometry, [](double) { return 0.0; }, [](double) { return 0.0; }, true),
                tan.contact_t, tan.slope, 0.0};
    }
    const double corner = fs_potential(t0) - 1.0;
    const double m = tan.slope, b = tan.contact_t;
    auto chi = [=](double t) {
        if (t <= t0) return -1.0;
        if (t >= b) return 0.0;
        return corner + m * (t - t0) - fs_potential(t);
    };
    auto dchi = [=](double t) {
        if (t < t0 || t >= b) return 0.0;
        return m - fs_slope(t);
    };
    // Without tangency the slope-1 line ends below g: sup v = g(t0) - 1 - t0.
    const double sup = std::isfinite(b) ? 0.0 : fs_potential(t0) - 1.0 - t0;
    return {Kind::Relative, profile_from_chi(geometry, chi, dchi, std::isfinite(b)), b, m, sup};
}

double log_cap_ball(const RadialCompact& K, const RadialGeometry& geometry) {
    check_t0(K.t0);
    if (K.t0 == kInf) return 0.0;
    return geometry.n * corner_tangent(K.t0).log_slope;
}

double cap_ball(const RadialCompact& K, const RadialGeometry& geometry) {
    return std::exp(log_cap_ball(K, geometry));
}

namespace {

// g(t0) - t0, the limit of h - g for the global extremal.
double global_sup(double t0) {
    return t0 < 0 ? -t0 + 0.5 * std::log1p(std::exp(2 * t0)) : 0.5 * std::log1p(std::exp(-2 * t0));
}

}  // namespace

ExtremalFunction global_extremal(const RadialCompact& K, const RadialGeometry& geometry) {
    using Kind = ExtremalFunction::Kind;
    const double t0 = K.t0;
    check_t0(t0);
    if (t0 == -kInf) throw ContractError("global_extremal: the pole alone is pluripolar");
    if (t0 == kInf) {
        return {Kind::Global, profile_from_chi(geometry, [](double) { return 0.0; }, [](double) { return 0.0; }, true),
                t0, 1.0, 0.0};
    }
    const double g0 = fs_potential(t0);
    auto chi = [=](double t) { return t <= t0 ? 0.0 : g0 + (t - t0) - fs_potential(t); };
    auto dchi = [=](double t) { return t < t0 ? 0.0 : 1.0 - fs_slope(t); };
    return {Kind::Global, profile_from_chi(geometry, chi, dchi, false), t0, 1.0, global_sup(t0)};
}

double T_omega(const RadialCompact& K, const RadialGeometry&) {
    check_t0(K.t0);
    if (K.t0 == kInf) return 1.0;
    if (K.t0 == -kInf) return 0.0;
    return std::exp(-global_sup(K.t0));
}

double log_alexander_taylor_bound(const RadialCompact& K, const RadialGeometry& geometry) {
    const double lc = log_cap_ball(K, geometry);
    return 1.0 - std::exp(-lc / geometry.n);
}

CapacityCurve cap_curve(const RadialProfile& profile, const Vector& s_grid) {
    if (s_grid.size() < 2) throw ContractError("cap_curve: need at least two levels");
    for (Index i = 0; i < s_grid.size(); ++i) {
        if (!(s_grid[i] >= 0) || !std::isfinite(s_grid[i])) throw ContractError("cap_curve: levels must be finite and >= 0");
        if (i > 0 && !(s_grid[i] > s_grid[i - 1])) throw ContractError("cap_curve: levels must increase");
    }
    if (profile.supremum() > 1e-6) throw ContractError("cap_curve: profile is not sup-normalized");
    const RadialGeometry& geo = profile.geometry;
    CapacityCurve c;
    c.s = s_grid;
    c.log_cap = Vector(s_grid.size());
    c.n = geo.n;
    std::vector<char> unresolved(static_cast<std::size_t>(s_grid.size()), 0);
    parallel_for(static_cast<std::size_t>(s_grid.size()), [&](std::size_t k) {
        const Index i = static_cast<Index>(k);
        const double s = s_grid[i];
        if (s == 0.0) {
            c.log_cap[i] = 0.0;
            return;
        }
        const auto t = sublevel_radius(profile, s);
        // A nonempty sublevel set whose radius is below e^{-1e300}.
        if (t && std::isinf(*t) && *t < 0) unresolved[k] = 1;
        c.log_cap[i] = t ? log_cap_ball(RadialCompact{*t}, geo) : -kInf;
    });
    const auto cut = std::find(unresolved.begin(), unresolved.end(), 1) - unresolved.begin();
    if (cut < static_cast<std::ptrdiff_t>(unresolved.size())) {
        if (cut < 2) throw RangeError("cap_curve: sublevel sets leave double range below level " + std::to_string(s_grid[cut]));
        c.s = c.s.head(cut).eval();
        c.log_cap = c.log_cap.head(cut).eval();
        c.provenance = "cap_curve (truncated at s = " + std::to_string(s_grid[cut]) + ")";
        c.validate();
        return c;
    }
    const double inf = profile.infimum();
    if (std::isfinite(inf)) {
        c.tail = CapacityCurve::TailKind::Zero;
    } else {
        const Index k = c.s.size() - 1;
        const double rate = -(c.log_cap[k] - c.log_cap[k - 1]) / (c.s[k] - c.s[k - 1]);
        if (std::isfinite(rate) && rate > 0) {
            c.tail = CapacityCurve::TailKind::Exponential;
            c.rate = rate;
        }
    }
    c.provenance = "cap_curve";
    c.validate();
    return c;
}

}  // namespace mabench
