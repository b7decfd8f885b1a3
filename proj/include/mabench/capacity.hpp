#pragma once

// Capacities of closed balls about the pole of P^n.
//
// The relative extremal function of the ball of log-radius t0 has
// h = g - 1 on (-inf, t0], then the line from the corner (t0, g(t0) - 1)
// tangent to g at some b > t0, then g. Its Monge-Ampere mass on the ball is
// the slope of that line to the n-th power. When no tangent line with slope
// below 1 exists the line has slope 1 and the capacity is 1.

#include "mabench/capacity_curve.hpp"
#include "mabench/radial.hpp"

namespace mabench {

/// Closed ball of log-radius t0 about the pole. t0 = +inf is the whole space,
/// t0 = -inf the pole alone.
struct RadialCompact {
    double t0 = 0.0;
};

struct ExtremalFunction {
    enum class Kind { Relative, Global };
    Kind kind = Kind::Relative;
    RadialProfile profile;
    double contact_t = 0.0;  // where h leaves the obstacle for good (+inf if never)
    double slope = 0.0;      // h' on (t0, contact_t)
    double sup_value = 0.0;  // sup of the function over the whole space
};

struct Tangency {
    double contact_t;  // b
    double slope;      // g'(b), or 1 with contact_t = +inf
    double log_slope;
};

/// Line through (t0, g(t0) - 1) tangent to g.
Tangency corner_tangent(double t0);

ExtremalFunction relative_extremal(const RadialCompact& K, const RadialGeometry& geometry);

/// Cap(K) = M(t0) of the relative extremal, slope jump at t0 included.
double cap_ball(const RadialCompact& K, const RadialGeometry& geometry);
double log_cap_ball(const RadialCompact& K, const RadialGeometry& geometry);

/// Largest omega-psh V <= 0 on K: h = g on (-inf, t0], slope 1 after.
ExtremalFunction global_extremal(const RadialCompact& K, const RadialGeometry& geometry);

/// exp(-sup V_K).
double T_omega(const RadialCompact& K, const RadialGeometry& geometry);

/// Right side of the comparison T(K) <= e exp(-Cap(K)^{-1/n}), in log form.
double log_alexander_taylor_bound(const RadialCompact& K, const RadialGeometry& geometry);

/// s -> Cap(phi < -s) for a sup-normalized profile. s_grid must be
/// increasing and nonnegative. Levels whose sublevel radius falls below
/// e^{-1e300} are dropped together with everything above them, and the tail
/// is then left unknown.
CapacityCurve cap_curve(const RadialProfile& profile, const Vector& s_grid);

}  // namespace mabench
