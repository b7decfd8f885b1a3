#pragma once

// Capacity-decay bounds for solutions of (omega + dd^c phi)^n = mu when
// mu(K) <= F_eps(Cap(K)): the function g(s) = -(1/n) log Cap(phi < -s), the
// one-step growth inequality it satisfies, the s_j iteration, the envelope
// exp(-n H^{-1}(s)), and the constant chain for L^p densities.

#include "mabench/capacity.hpp"
#include "mabench/domination.hpp"
#include "mabench/weights.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mabench {

/// g(s) = -(1/n) log Cap(phi < -s) read off a capacity curve; +inf where
/// the capacity vanishes.
class GFunction {
public:
    explicit GFunction(CapacityCurve curve);
    double operator()(double s) const;
    const CapacityCurve& curve() const { return curve_; }
    /// Smallest sampled s with g(s) >= y (+inf if none; exact on samples).
    double first_reaching(double y) const;

private:
    CapacityCurve curve_;
};

GFunction g_of(const CapacityCurve& curve);

struct Lemma23Report {
    double max_violation_lower = 0.0;  // relative excess of t^n Cap(phi < -s-t) over mu(phi < -s)
    double max_violation_upper = 0.0;  // relative excess of mu(phi < -s) over s^n Cap(phi < -s), s >= 1
    double worst_s = 0.0;
    double worst_t = 0.0;
    Index checks = 0;
    double tolerance = 1e-3;
    bool pass = false;
};

/// t^n Cap(phi < -s-t) <= mu(phi < -s) <= s^n Cap(phi < -s) on the grids, the
/// second inequality for s >= 1 only. mu is the Monge-Ampere measure of the
/// profile.
Lemma23Report check_lemma23(const RadialProfile& profile, const Vector& s_grid, const Vector& t_grid,
                            double tolerance = 1e-3);

struct EstReport {
    double min_margin = 0.0;  // min of g(s+t) - (log t - log eps(g(s)) + g(s))
    double worst_s = 0.0;
    double worst_t = 0.0;
    Index checks = 0;
    double tolerance = 0.0;  // log(1.05) / n: the capacity discretization factor
    bool pass = false;
};

/// log t - log eps(g(s)) + g(s) <= g(s+t) for curve samples s >= s_min and
/// t in t_grid, (0, 1].
EstReport check_est_inequality(const CapacityCurve& curve, const WeightEps& eps, const Vector& t_grid,
                               double s_min = 0.0);

/// (n + c1) exp(n eps^{-1}(1/e)); +inf when eps never drops to 1/e.
double compute_s0(const WeightEps& eps, int n, double c1);

/// Smallest curve sample s with e eps(g(s)) <= 1, which makes every step of
/// the iteration at most 1. When eps stays above 1/e, the smallest s with
/// g(s) >= 1. +inf if the curve never gets there.
double s0_from_curve(const GFunction& g, const WeightEps& eps);

struct IterationTrace {
    enum class Mode { ProofFaithful, Envelope };
    Mode mode = Mode::Envelope;
    std::vector<double> s_values;
    std::vector<double> g_values;  // ProofFaithful only
    double converged_to = 0.0;     // +inf when the sequence diverges
    bool induction_holds = true;   // g(s_j) >= j along the trace (ProofFaithful)
};

/// s_{j+1} = s_j + e eps(g(s_j)) with g supplied (proof-faithful), or
/// s_{j+1} = s_j + e eps(j) using only g(s_j) >= j (envelope mode, g empty).
IterationTrace run_iteration(const WeightEps& eps, double s0, const std::optional<GFunction>& g = std::nullopt,
                             int max_steps = 2000);

/// s -> exp(-n H^{-1}(s)) with H = e int eps + s0; zero from s_infinity on.
class BoundEnvelope {
public:
    BoundEnvelope(const WeightEps& eps, double s0, int n);
    const GrowthH& H() const { return H_; }
    int n() const { return n_; }
    double log_value(double s) const;
    double operator()(double s) const;

private:
    GrowthH H_;
    int n_;
};

BoundEnvelope envelope(const WeightEps& eps, double s0, int n);

struct TheoremBOptions {
    double c1 = -1.0;              // < 0: estimate_c1
    double s_max = 60.0;           // capacity curve range
    Index s_samples = 601;
    double tolerance = 1.05;       // multiplicative, on capacities
    bool rescale_to_dominate = true;
    Vector domination_t;           // empty: default ball family
};

struct TheoremBReport {
    DominationReport domination;
    bool hypothesis = false;
    double eps_scale = 1.0;        // eps was multiplied by this to meet the hypothesis
    std::string eps_used;
    double s0_formula = 0.0;       // compute_s0, reported only
    double s0 = 0.0;               // from the curve (or the formula if the curve never qualifies)
    double s0_envelope = 0.0;      // s0 + e eps(0): the shift the iteration bound carries
    double s_infinity = 0.0;
    double max_ratio = 0.0;        // max over s >= s0 of Cap / envelope
    double worst_s = 0.0;
    bool pass = false;
    std::string message;
    CapacityCurve curve;
    Vector envelope_log;           // log envelope at curve.s
};

/// End-to-end check of Cap(phi < -s) <= exp(-n H^{-1}(s)) for the solution
/// of mu. Refuses (hypothesis = false) when mu is not dominated.
TheoremBReport verify_theoremB(const RadialMeasure& mu, const WeightEps& eps, const TheoremBOptions& options = {});

// ---------------------------------------------------------------- L^p densities

/// Stress family of sup-normalized profiles: lines of slope a tangent to g
/// below the tangency point (a log pole of Lelong number a at the pole), and
/// the mirrored family with slope 1 - a towards the antipode.
std::vector<RadialProfile> stress_family(const RadialGeometry& geometry);

/// 2 max int (-phi) omega^n over the stress family.
double estimate_c1(const RadialGeometry& geometry);

/// 2 max (int (-phi)^{N q} omega^n)^{1/q} over the stress family.
double estimate_C2_prime(const RadialGeometry& geometry, int N, double q);

struct SkodaEstimate {
    double value = 0.0;  // empirical sup of int exp(-psi / nu) omega^n
    bool divergent = false;
    double worst_lelong = 0.0;
};

/// int exp(-psi / nu) omega^n over sample profiles; the log pole with Lelong
/// number a integrates iff a < 2 n nu.
SkodaEstimate skoda_estimate(const RadialGeometry& geometry, double nu, const std::vector<RadialProfile>& samples);

/// Profiles of the tangent-line family for the given Lelong numbers.
std::vector<RadialProfile> lelong_family(const RadialGeometry& geometry, const std::vector<double>& lelong);

struct YauConstants {
    double nu = 1.0;        // sup of Lelong numbers of omega-psh functions
    double C2_skoda = -1;   // < 0: 2 x skoda_estimate over the stress family
    double C2_prime = -1;   // < 0: estimate_C2_prime
    double c_N = -1;        // < 0: 2^N
};

struct YauBoundReport {
    double p = 2, q = 2;
    double f_Lp_norm = 1;
    bool f_in_Lp = true;
    double nu_omega = 1;
    double C2_skoda = 0;
    double a = 0;           // 1 / (q nu)
    double C_n = 0;         // sup_{0<x<=1} exp(-a x^{-1/n}) / x^2
    double C1 = 0;
    double C2_prime = 0;
    double c_N = 0;
    int N = 2;
    double C2_N = 0;        // c_N max(C2', 1)
    double s0 = 0;
    double M_bound = 0;
    double sup_norm_phi = 0;
    bool pass = false;
    std::string message;
};

/// Lp norm of the density of mu against omega^n (+inf if divergent).
double density_Lp_norm(const RadialMeasure& mu, double p, bool* divergent = nullptr);

/// The constant chain for mu = f omega^n with f in L^p, and the check that the
/// computed solution has sup norm at most M_bound.
YauBoundReport yau_bound(const RadialMeasure& mu, double p, const YauConstants& constants = {});

/// M_bound from the constants and a given norm (the formula alone).
double yau_M_bound(double C1, double C2_N, int n, double f_norm);

}  // namespace mabench
