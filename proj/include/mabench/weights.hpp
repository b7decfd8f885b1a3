#pragma once

// Weight functions: the dominating weight eps, the growth function
// H(x) = e * int_0^x eps + s0 with its inverse, weights chi on the negative
// axis and the energy-class tests built from them.

#include "mabench/capacity_curve.hpp"
#include "mabench/numerics.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace mabench {

/// Continuous nonincreasing eps: [0, inf) -> [0, inf).
///
///   constant     c
///   power        c (1+t)^(-a),   a >= 0
///   exponential  c exp(-lambda t), lambda >= 0
///   table        piecewise linear through (t_k, eps_k), constant past the ends
class WeightEps {
public:
    enum class Kind { Constant, Power, Exponential, Table };

    static WeightEps constant(double c);
    static WeightEps power(double a, double scale = 1.0);
    static WeightEps exponential(double lambda, double scale = 1.0);
    static WeightEps table(Vector t, Vector eps);
    /// Reads a two-column CSV (t, eps); a non-numeric first line is skipped.
    static WeightEps table_from_csv(const std::string& path);

    /// Parses `const(c) | pow(a) | exp(lambda) | table(path)`, optionally
    /// prefixed by a scale factor as in `2*pow(0.5)`.
    static WeightEps parse(const std::string& spec);

    /// c * eps.
    WeightEps scaled(double c) const;

    Kind kind() const { return kind_; }
    double scale() const { return scale_; }
    double parameter() const { return param_; }

    double operator()(double t) const;
    /// Right derivative.
    double derivative(double t) const;
    /// int_0^x eps. x may be +inf.
    double integral(double x) const;
    double total_integral() const { return integral(std::numeric_limits<double>::infinity()); }
    /// inf{t >= 0 : eps(t) <= y}, +inf when eps never gets that low.
    double inverse(double y) const;

    /// Canonical spec string (round-trips through parse for closed forms).
    std::string describe() const;

private:
    WeightEps() = default;

    Kind kind_ = Kind::Constant;
    double scale_ = 1.0;
    double param_ = 0.0;
    Vector table_t_;
    Vector table_eps_;
    Vector table_prim_;
    std::string source_;
};

/// x [eps(-ln x / n)]^n for 0 < x <= 1, and 0 at x = 0.
double eval_F_eps(const WeightEps& eps, int n, double x);

/// H(x) = e * int_0^x eps + s0 and its inverse.
class GrowthH {
public:
    GrowthH(WeightEps eps, double s0, double x_max = 200.0, Index nodes = 4001);

    double s0() const { return s0_; }
    const WeightEps& eps() const { return eps_; }
    /// lim H; +inf unless eps is integrable.
    double s_infinity() const { return s_inf_; }
    /// Samples of H on [0, x_max] with the exact formula attached as right tail.
    const SampledFunction& sampled() const { return sampled_; }

    double operator()(double x) const;
    /// Smallest x >= 0 with H(x) >= s: 0 for s <= s0, +inf for s >= s_infinity.
    double inverse(double s) const;
    /// dH/dx = e eps(x).
    double slope(double x) const;

private:
    WeightEps eps_;
    double s0_;
    double s_inf_;
    SampledFunction sampled_;
};

GrowthH build_H(const WeightEps& eps, double s0);

/// Increasing weight chi on an interval [lo, hi] of the real line, with an
/// optional closed derivative. Without one, derivatives are one-sided
/// difference quotients.
class WeightChi {
public:
    WeightChi(std::function<double(double)> f, std::function<double(double)> df, double lo, double hi);
    static WeightChi from_samples(const SampledFunction& samples);

    double domain_min() const { return lo_; }
    double domain_max() const { return hi_; }
    double operator()(double t) const;
    double derivative(double t) const;

private:
    std::function<double(double)> f_;
    std::function<double(double)> df_;
    double lo_, hi_;
};

/// chi(-t) = -exp(n H^{-1}(t) / 2) for 0 <= t < s_infinity.
WeightChi chi_from_H(const GrowthH& H, int n);

/// chi_hat with chi_hat'(t) = chi'(t-1) / t^n for t > 1 and chi_hat(1) = chi(0).
/// Evaluation below t = 1 throws RangeError.
WeightChi hat_transform(const WeightChi& chi, int n);

struct MembershipResult {
    enum class Verdict { Finite, Infinite, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
    double value = 0.0;             // +inf when infinite
    std::vector<double> partials;   // integral over [0, 2^k], k = 0, 1, ...
    bool finite() const { return verdict == Verdict::Finite; }
};

/// int_0^inf t^n chi'(-t) Cap(phi < -t) dt using the curve's tail.
MembershipResult class_membership(const CapacityCurve& curve, const WeightChi& chi, int n);

struct KolodziejResult {
    bool bounded_regime = false;
    double s_infinity = 0.0;
};

/// Bounded regime iff eps is integrable; s_infinity of H with the given s0.
KolodziejResult kolodziej_test(const WeightEps& eps, double s0 = 0.0);

}  // namespace mabench
