#pragma once

// One-dimensional kernels over the logarithmic radial coordinate t = log|z|:
// sampled functions with analytic tails, high-order quadrature, monotone
// inversion by bisection, one-sided derivatives and lower convex envelopes.

#include <Eigen/Core>

#include <functional>
#include <optional>

namespace mabench {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Side { Left, Right };

/// Strictly increasing sample points. At least three nodes.
class Grid1D {
public:
    explicit Grid1D(Vector nodes);

    static Grid1D uniform(double t_min, double t_max, Index count);

    /// 2^16 uniform nodes on [-60, 30].
    static Grid1D standard();

    double t_min() const { return nodes_[0]; }
    double t_max() const { return nodes_[nodes_.size() - 1]; }
    Index size() const { return nodes_.size(); }
    const Vector& nodes() const { return nodes_; }
    double operator[](Index i) const { return nodes_[i]; }

    bool is_uniform() const { return uniform_; }
    /// Spacing of the cell containing t (clamped to the grid).
    double local_spacing(double t) const;
    /// Index i with nodes[i] <= t < nodes[i+1], clamped to [0, size-2].
    Index cell(double t) const;
    bool contains(double t) const { return t >= t_min() && t <= t_max(); }

private:
    Vector nodes_;
    bool uniform_ = false;
};

/// Analytic continuation of a sampled function beyond one end of its grid.
///
/// Constant, affine and exponential tails are anchored at the boundary sample
/// when attached to a SampledFunction. Closed tails carry their own formula;
/// `primitive` is any antiderivative and enables exact tail integrals.
struct Tail {
    enum class Kind { Constant, Affine, Exponential, Closed };

    Kind kind = Kind::Constant;
    double slope = 0.0;  // Affine
    double rate = 0.0;   // Exponential: value * exp(-rate * |t - anchor|)
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> primitive;

    // Filled in when attached.
    double anchor = 0.0;
    double value = 0.0;

    static Tail constant() { return Tail{}; }
    static Tail affine(double slope);
    static Tail exponential(double rate);
    static Tail closed(std::function<double(double)> f,
                       std::function<double(double)> df,
                       std::function<double(double)> primitive = {});

    double eval(double t) const;
    double derivative(double t) const;
    /// Integral over [a, b] lying entirely on this tail's side. b or a may be
    /// infinite; returns +-inf when the tail integral diverges.
    double integral(double a, double b) const;
};

/// Values on a Grid1D, linearly interpolated between nodes, with optional
/// tails outside [t_min, t_max]. Immutable.
class SampledFunction {
public:
    SampledFunction(Grid1D grid, Vector values, std::optional<Tail> left = std::nullopt,
                    std::optional<Tail> right = std::nullopt);

    /// Samples a callable on the grid.
    static SampledFunction sample(const Grid1D& grid, const std::function<double(double)>& f,
                                  std::optional<Tail> left = std::nullopt,
                                  std::optional<Tail> right = std::nullopt);

    const Grid1D& grid() const { return grid_; }
    const Vector& values() const { return values_; }
    const std::optional<Tail>& left_tail() const { return left_; }
    const std::optional<Tail>& right_tail() const { return right_; }

    double domain_min() const;
    double domain_max() const;
    bool in_domain(double t) const { return t >= domain_min() && t <= domain_max(); }

    double operator()(double t) const;

    SampledFunction with_values(Vector values) const;

    /// Integral from t_min to each node (see cumulative_integral).
    const Vector& node_primitive() const { return primitive_; }

private:
    Grid1D grid_;
    Vector values_;
    std::optional<Tail> left_;
    std::optional<Tail> right_;
    Vector primitive_;
};

/// Integral of f over [a, b], 4th-order accurate on uniform grids (local
/// cubic rule), trapezoidal on irregular ones; tails integrated analytically.
double integrate(const SampledFunction& f, double a, double b);

/// Running integral from t_min to each node.
Vector cumulative_integral(const SampledFunction& f);

/// Smallest t with f(t) >= y, found by bisection. Returns +inf when y exceeds
/// sup f and -inf when f >= y on the whole (unbounded) domain. Node values
/// may drop by at most 1e-6 between neighbours.
double invert_monotone(const SampledFunction& f, double y, double abs_tol = 1e-10);

/// Largest convex function below f on the grid (lower hull by monotone
/// chain). Tails become affine continuations of the boundary hull segments.
SampledFunction convex_envelope(const SampledFunction& f);

/// One-sided second-order difference quotient at the local grid spacing.
/// Exact on affine pieces.
double derivative(const SampledFunction& f, double t, Side side);

/// Right derivatives at every node: 4th-order central differences where the
/// five-point window is smooth, 4th-order one-sided stencils next to jumps
/// of f' or f''.
Vector nodal_derivative(const SampledFunction& f);

/// Smallest increase between consecutive cell slopes; >= 0 for convex samples.
double min_second_difference(const SampledFunction& f);
/// Smallest first difference quotient (f[i+1]-f[i]) / h.
double min_first_difference(const SampledFunction& f);

/// Adaptive Simpson quadrature of a callable on a finite interval.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

/// Bisection for the smallest x in [lo, hi] with pred(x) true, assuming pred
/// is monotone (false ... false true ... true) and pred(hi) holds.
double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi,
                        double abs_tol = 1e-10);

}  // namespace mabench
