#pragma once

// Checks of the hypothesis mu(K) <= F_eps(Cap(K)) over closed balls about the
// pole, and the Orlicz-type integrability condition that implies it.

#include "mabench/capacity.hpp"
#include "mabench/weights.hpp"

#include <string>
#include <vector>

namespace mabench {

struct DominationReport {
    /// Always "radial-family domination": only closed balls about the pole
    /// are tested, never all Borel sets.
    std::string family = "radial-family domination";
    Vector t0;      // ball log-radii
    Vector mass;    // mu(closed ball)
    Vector log_cap;
    Vector log_F;   // log F_eps(Cap)
    double worst_ratio = 0.0;
    double worst_t0 = 0.0;
    double constant_A = 0.0;  // smallest A with mu <= A F_eps on the family
    double tolerance = 1e-9;
    bool pass = false;
};

/// Default ball family: log-radii -40 .. 5 with 451 samples.
Vector default_ball_family();

DominationReport check_domination(const RadialMeasure& mu, const WeightEps& eps, const Vector& t0 = {},
                                  double tolerance = 1e-9);

/// Integral of a nonnegative integrand over (-inf, t_right], split into the
/// windows [-2^{k+1}, -2^k] plus [-1, t_right].
struct PoleIntegral {
    double value = 0.0;
    bool divergent = false;
    std::vector<double> partials;  // running totals after each window
};

/// Divergent when 5 consecutive window increments exceed `floor` without
/// shrinking by at least 10% each; finite once increments are negligible.
PoleIntegral integrate_towards_pole(const std::function<double(double)>& integrand, double t_right,
                                    double floor = 1e-6, int max_windows = 1000);

struct OrliczResult {
    bool finite = false;
    double integral = 0.0;
    std::vector<double> partials;
    double exponent = 0.0;
};

/// int f [log(1+f) / eps(log(1+|log f|))]^exponent omega^n with f the
/// density of mu; exponent defaults to n.
OrliczResult orlicz_test(const RadialMeasure& mu, const WeightEps& eps, double exponent = -1.0);

struct BridgeReport {
    OrliczResult orlicz;
    DominationReport domination;
    bool applicable = false;  // Orlicz integral finite
    bool finite_A = false;
};

/// Orlicz finite => a finite A with mu <= A F_eps on the ball family. The
/// exponent is passed to orlicz_test (default n).
BridgeReport proposition43_bridge(const RadialMeasure& mu, const WeightEps& eps, const Vector& t0 = {},
                                  double exponent = -1.0);

}  // namespace mabench
