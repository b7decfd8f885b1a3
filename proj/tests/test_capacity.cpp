#include "doctest.h"

#include "mabench/capacity.hpp"
#include "mabench/errors.hpp"
#include "relaxation_oracle.hpp"

#include <cmath>
#include <limits>

using namespace mabench;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// g(b) - (g(t0) - 1) - g'(b) (b - t0): zero at the tangency point.
double tangency_residual(double b, double t0) {
    return fs_potential(b) - fs_potential(t0) + 1.0 - fs_slope(b) * (b - t0);
}

}  // namespace

TEST_CASE("corner_tangent solves the tangency condition") {
    for (double t0 : {-1.0, -2.0, -5.0, -10.0, -20.0, -100.0, -1e4}) {
        const Tangency tan = corner_tangent(t0);
        INFO("t0 = " << t0);
        CHECK(std::isfinite(tan.contact_t));
        CHECK(tan.contact_t > t0);
        CHECK(std::abs(tangency_residual(tan.contact_t, t0)) <= 1e-10);
        CHECK(tan.slope == doctest::Approx(fs_slope(tan.contact_t)));
    }
    const double edge = -0.5 * std::log(std::exp(2.0) - 1.0);
    CHECK(corner_tangent(edge + 1e-9).slope == 1.0);
    CHECK(corner_tangent(0.0).slope == 1.0);
    CHECK(corner_tangent(edge - 1e-3).slope < 1.0);
    // Far below double range for the slope itself.
    CHECK(corner_tangent(-1e300).log_slope == doctest::Approx(-std::log(1e300)).epsilon(1e-3));
}

TEST_CASE("relative_extremal: trivial limits") {
    const auto geo = RadialGeometry::fubini_study(1);
    const auto all = relative_extremal({kInf}, geo);
    CHECK(all.profile.chi.values().maxCoeff() == -1.0);
    CHECK(all.profile.chi.values().minCoeff() == -1.0);
    const auto none = relative_extremal({-kInf}, geo);
    CHECK(none.profile.chi.values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("relative_extremal: shape and envelope") {
    const auto geo = RadialGeometry::fubini_study(1);
    for (double t0 : {-0.5, -2.0, -7.0, -15.0}) {
        const auto e = relative_extremal({t0}, geo);
        INFO("t0 = " << t0);
        CHECK(validate_omega_psh(e.profile).pass);
        const Vector& v = e.profile.chi.values();
        CHECK(v.maxCoeff() <= 1e-15);
        CHECK(v.minCoeff() >= -1.0);
        for (Index i = 0; i < geo.grid.size(); ++i)
            if (geo.grid[i] <= t0) CHECK(v[i] == -1.0);

        if (!std::isfinite(e.contact_t)) {
            // No tangency: slope 1 from the corner on.
            CHECK(e.slope == 1.0);
            CHECK(e.profile.h()(t0 + 5.0) - e.profile.h()(t0) == doctest::Approx(5.0).epsilon(1e-4));
            continue;
        }
        // h agrees with the lower convex hull of the obstacle.
        const auto obstacle = SampledFunction::sample(
            geo.grid, [t0](double t) { return fs_potential(t) - (t <= t0 ? 1.0 : 0.0); });
        const Vector hull = convex_envelope(obstacle).values();
        const Vector h = e.profile.h().values();
        CHECK((hull - h).cwiseAbs().maxCoeff() <= 2e-3 * std::max(1.0, e.slope));
        // Mass strictly between K and the contact point vanishes.
        const auto mu = ma_mass(e.profile);
        if (std::isfinite(e.contact_t)) {
            const double a = t0 + 0.01, b = e.contact_t - 0.01;
            if (b > a) CHECK(std::abs(mu.M(b) - mu.M(a)) <= 1e-6);
        }
    }
}

TEST_CASE("relative_extremal at t0 = 0 matches the relaxation oracle") {
    const auto geo = RadialGeometry::fubini_study(1);
    const auto r = oracle::relative_extremal(0.0, 4.0, 6.0);
    const auto e = relative_extremal({0.0}, geo);
    double err = 0;
    for (int i = 0; i < static_cast<int>(r.w.size()); ++i) err = std::max(err, std::abs(r.v(i) - e.profile.eval(r.t(i))));
    CHECK(err <= 0.02);
}

TEST_CASE("cap_ball against the relaxation oracle") {
    const auto geo = RadialGeometry::fubini_study(1);
    for (double t0 : {-2.0, -5.0, -10.0, -15.0, -20.0}) {
        const auto r = oracle::relative_extremal(t0, 3.0, 8.0);
        const int i0 = static_cast<int>(std::lround((t0 - r.t_min) / r.dt));
        const double oracle_cap = r.mass_at(i0);
        const double cap = cap_ball({t0}, geo);
        INFO("t0 = " << t0 << " oracle " << oracle_cap << " cap " << cap);
        CHECK(cap == doctest::Approx(oracle_cap).epsilon(0.05));
        // Cap ~ 1 / (-log r).
        CHECK(cap * (-t0) >= 0.5);
        CHECK(cap * (-t0) <= 2.0);
    }
}

TEST_CASE("cap_ball: whole space, monotonicity, agreement with ma_mass") {
    for (int n : {1, 2, 3}) {
        const auto geo = RadialGeometry::fubini_study(n);
        CHECK(cap_ball({kInf}, geo) == 1.0);
        CHECK(cap_ball({5.0}, geo) == 1.0);
        double prev = 0;
        for (double t0 = -40; t0 <= 1; t0 += 0.5) {
            const double c = cap_ball({t0}, geo);
            CHECK(c > 0);
            CHECK(c <= 1);
            CHECK(c >= prev);
            prev = c;
        }
        // M at a node t0 with the right slope.
        const double t0 = geo.grid[geo.grid.cell(-6.0)];
        const auto mu = ma_mass(relative_extremal({t0}, geo).profile);
        CHECK(mu.mass.values()[geo.grid.cell(t0)] == doctest::Approx(cap_ball({t0}, geo)).epsilon(1e-6));
    }
}

TEST_CASE("global_extremal and T_omega") {
    const auto geo = RadialGeometry::fubini_study(1);
    const auto all = global_extremal({kInf}, geo);
    CHECK(all.sup_value == 0.0);
    CHECK(T_omega({kInf}, geo) == 1.0);
    CHECK_THROWS_AS(global_extremal({-kInf}, geo), ContractError);

    double prev_sup = 0, prev_T = 2;
    for (double t0 = 3; t0 >= -30; t0 -= 1) {
        const auto e = global_extremal({t0}, geo);
        CHECK(validate_omega_psh(e.profile).pass);
        CHECK(e.sup_value >= prev_sup);
        CHECK(e.profile.supremum() == doctest::Approx(e.sup_value).epsilon(1e-9));
        const double T = T_omega({t0}, geo);
        CHECK(T <= prev_T);
        CHECK(T == doctest::Approx(std::exp(-e.sup_value)));
        prev_sup = e.sup_value;
        prev_T = T;
    }
    // Comparable to the radius.
    const double T = T_omega({-10.0}, geo);
    CHECK(T / std::exp(-10.0) >= 1 / std::exp(1.0));
    CHECK(T / std::exp(-10.0) <= std::exp(1.0));
}

TEST_CASE("Alexander-Taylor comparison holds for every ball") {
    for (int n : {1, 2, 3}) {
        const auto geo = RadialGeometry::fubini_study(n);
        for (double t0 = -200; t0 <= 3; t0 += 0.25) {
            const RadialCompact K{t0};
            CHECK(std::log(T_omega(K, geo)) <= log_alexander_taylor_bound(K, geo) + 1e-12);
        }
    }
}

TEST_CASE("cap_curve examples") {
    const auto geo = RadialGeometry::fubini_study(1);
    const auto zero = profile_from_chi(geo, [](double) { return 0.0; }, [](double) { return 0.0; });
    Vector s(4);
    s << 0.0, 0.5, 1.0, 2.0;
    const auto c0 = cap_curve(zero, s);
    CHECK(c0.log_cap[0] == 0.0);
    for (Index i = 1; i < 4; ++i) CHECK(c0.log_cap[i] == -kInf);
    CHECK(c0.tail == CapacityCurve::TailKind::Zero);

    // ex41: log Cap(phi < -s) decays like -s.
    const auto ex41 = example_gallery("ex41");
    const Vector grid = Vector::LinSpaced(46, 5.0, 50.0);
    const auto c = cap_curve(ex41.reference, grid);
    for (Index i = 0; i + 1 < grid.size(); ++i) {
        const double slope = -(c.log_cap[i + 1] - c.log_cap[i]) / (grid[i + 1] - grid[i]);
        CHECK(slope >= 0.5);
        CHECK(slope <= 2.0);
    }
    CHECK(c.tail == CapacityCurve::TailKind::Exponential);

    // A log pole: the curve never reaches zero.
    const auto ex44 = example_gallery("ex44");
    const auto c44 = cap_curve(ex44.reference, grid);
    CHECK(std::isfinite(c44.log_cap[c44.log_cap.size() - 1]));
    CHECK_THROWS_AS(cap_curve(ex41.reference, Vector::LinSpaced(3, 2.0, 1.0)), ContractError);
}
