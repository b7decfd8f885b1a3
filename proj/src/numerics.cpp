#include "mabench/numerics.hpp"

#include "mabench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace mabench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double signed_infinity(double sign) { return sign > 0 ? kInf : (sign < 0 ? -kInf : 0.0); }

// Integral of the cubic through four uniformly spaced samples (x0 + k h, k=0..3)
// from x0 + a h to x0 + b h, via 3-point Gauss-Legendre (exact for cubics).
double cubic_segment_integral(const double* y, double a, double b, double h) {
    auto lagrange = [y](double s) {
        const double l0 = -(s - 1) * (s - 2) * (s - 3) / 6.0;
        const double l1 = s * (s - 2) * (s - 3) / 2.0;
        const double l2 = -s * (s - 1) * (s - 3) / 2.0;
        const double l3 = s * (s - 1) * (s - 2) / 6.0;
        return l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3];
    };
    static const double xg[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double wg[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) sum += wg[k] * lagrange(mid + half * xg[k]);
    return sum * half * h;
}

Vector running_integral(const Grid1D& grid, const Vector& f) {
    const Index n = grid.size();
    Vector out(n);
    out[0] = 0.0;
    if (!grid.is_uniform() || n < 4) {
        for (Index i = 0; i + 1 < n; ++i)
            out[i + 1] = out[i] + 0.5 * (grid[i + 1] - grid[i]) * (f[i] + f[i + 1]);
        return out;
    }
    const double h = (grid.t_max() - grid.t_min()) / static_cast<double>(n - 1);
    for (Index i = 0; i + 1 < n; ++i) {
        double cell;
        if (i == 0)
            cell = 9 * f[0] + 19 * f[1] - 5 * f[2] + f[3];
        else if (i == n - 2)
            cell = 9 * f[n - 1] + 19 * f[n - 2] - 5 * f[n - 3] + f[n - 4];
        else
            cell = -f[i - 1] + 13 * f[i] + 13 * f[i + 1] - f[i + 2];
        out[i + 1] = out[i] + h * cell / 24.0;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- Grid1D

Grid1D::Grid1D(Vector nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 3) throw ContractError("Grid1D needs at least 3 nodes");
    for (Index i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i])) throw DataError("Grid1D node is not finite");
        if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
            throw ContractError("Grid1D nodes must be strictly increasing");
    }
    const double h0 = (t_max() - t_min()) / static_cast<double>(nodes_.size() - 1);
    uniform_ = true;
    for (Index i = 0; i + 1 < nodes_.size(); ++i) {
        if (std::abs((nodes_[i + 1] - nodes_[i]) - h0) > 1e-9 * h0) {
            uniform_ = false;
            break;
        }
    }
}

Grid1D Grid1D::uniform(double t_min, double t_max, Index count) {
    if (!(t_min < t_max)) throw ContractError("Grid1D::uniform requires t_min < t_max");
    if (count < 3) throw ContractError("Grid1D needs at least 3 nodes");
    return Grid1D(Vector::LinSpaced(count, t_min, t_max));
}

Grid1D Grid1D::standard() { return uniform(-60.0, 30.0, Index{1} << 16); }

Index Grid1D::cell(double t) const {
    const Index last = size() - 2;
    if (t <= t_min()) return 0;
    if (t >= t_max()) return last;
    if (uniform_) {
        const double h = (t_max() - t_min()) / static_cast<double>(size() - 1);
        auto i = static_cast<Index>(std::floor((t - t_min()) / h));
        i = std::clamp<Index>(i, 0, last);
        // Guard against rounding at cell boundaries.
        if (nodes_[i] > t && i > 0) --i;
        if (i < last && nodes_[i + 1] <= t) ++i;
        return i;
    }
    const double* begin = nodes_.data();
    const double* it = std::upper_bound(begin, begin + size(), t);
    return std::clamp<Index>(static_cast<Index>(it - begin) - 1, 0, last);
}

double Grid1D::local_spacing(double t) const {
    const Index i = cell(t);
    return nodes_[i + 1] - nodes_[i];
}

// ---------------------------------------------------------------- Tail

Tail Tail::affine(double slope) {
    Tail t;
    t.kind = Kind::Affine;
    t.slope = slope;
    return t;
}

Tail Tail::exponential(double rate) {
    Tail t;
    t.kind = Kind::Exponential;
    t.rate = rate;
    return t;
}

Tail Tail::closed(std::function<double(double)> f, std::function<double(double)> df,
                  std::function<double(double)> primitive) {
    Tail t;
    t.kind = Kind::Closed;
    t.f = std::move(f);
    t.df = std::move(df);
    t.primitive = std::move(primitive);
    return t;
}

double Tail::eval(double t) const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::Affine: return value + slope * (t - anchor);
        case Kind::Exponential: return value * std::exp(-rate * std::abs(t - anchor));
        case Kind::Closed: return f(t);
    }
    return value;
}

double Tail::derivative(double t) const {
    switch (kind) {
        case Kind::Constant: return 0.0;
        case Kind::Affine: return slope;
        case Kind::Exponential: {
            const double s = t >= anchor ? -1.0 : 1.0;
            return s * rate * value * std::exp(-rate * std::abs(t - anchor));
        }
        case Kind::Closed: {
            if (df) return df(t);
            const double h = 1e-6 * std::max(1.0, std::abs(t));
            return (f(t + h) - f(t - h)) / (2 * h);
        }
    }
    return 0.0;
}

double Tail::integral(double a, double b) const {
    if (a > b) return -integral(b, a);
    if (a == b) return 0.0;
    const bool infinite = std::isinf(a) || std::isinf(b);
    switch (kind) {
        case Kind::Constant:
            if (infinite) return value == 0.0 ? 0.0 : signed_infinity(value);
            return value * (b - a);
        case Kind::Affine:
            if (infinite) {
                if (slope == 0.0) return value == 0.0 ? 0.0 : signed_infinity(value);
                return std::isinf(b) ? signed_infinity(slope) : signed_infinity(-slope);
            }
            return value * (b - a) + 0.5 * slope * ((b - anchor) * (b - anchor) - (a - anchor) * (a - anchor));
        case Kind::Exponential: {
            if (rate <= 0.0) {
                if (infinite) return value == 0.0 ? 0.0 : signed_infinity(value);
                return value * (b - a);
            }
            // Entirely on one side of the anchor.
            const bool right_side = a >= anchor;
            auto prim = [&](double t) {
                if (std::isinf(t)) return 0.0;
                if (right_side) return -value / rate * std::exp(-rate * (t - anchor));
                return value / rate * std::exp(rate * (t - anchor));
            };
            return prim(b) - prim(a);
        }
        case Kind::Closed: {
            if (primitive) {
                const double r = primitive(b) - primitive(a);
                if (!std::isnan(r)) return r;
            }
            if (!infinite) return adaptive_simpson(f, a, b, 1e-12 * std::max(1.0, std::abs(b - a)));
            // Doubling intervals away from the finite end.
            const bool right = std::isinf(b);
            const double start = right ? a : b;
            double sum = 0.0, width = 1.0, lo = start;
            int quiet = 0;
            for (int k = 0; k < 200 && quiet < 3; ++k) {
                const double hi = right ? lo + width : lo - width;
                const double inc = right ? adaptive_simpson(f, lo, hi, 1e-13) : adaptive_simpson(f, hi, lo, 1e-13);
                sum += inc;
                quiet = std::abs(inc) <= 1e-14 * std::max(1.0, std::abs(sum)) ? quiet + 1 : 0;
                lo = hi;
                width *= 2;
            }
            if (quiet < 3) return signed_infinity(sum);
            return sum;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------- SampledFunction

namespace {

Tail attach(Tail tail, double anchor, double value) {
    tail.anchor = anchor;
    tail.value = value;
    if (tail.kind == Tail::Kind::Closed) {
        if (!tail.f) throw ContractError("closed tail without a formula");
        const double fv = tail.f(anchor);
        if (!(std::abs(fv - value) <= 1e-6 * (1.0 + std::abs(value))))
            throw DataError("closed tail inconsistent with boundary sample: " + std::to_string(fv) +
                            " vs " + std::to_string(value));
    }
    return tail;
}

}  // namespace

SampledFunction::SampledFunction(Grid1D grid, Vector values, std::optional<Tail> left,
                                 std::optional<Tail> right)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw ContractError("SampledFunction: size mismatch");
    for (Index i = 0; i < values_.size(); ++i)
        if (!std::isfinite(values_[i])) throw DataError("SampledFunction: non-finite sample");
    if (left) left_ = attach(std::move(*left), grid_.t_min(), values_[0]);
    if (right) right_ = attach(std::move(*right), grid_.t_max(), values_[values_.size() - 1]);
    primitive_ = running_integral(grid_, values_);
}

SampledFunction SampledFunction::sample(const Grid1D& grid, const std::function<double(double)>& f,
                                        std::optional<Tail> left, std::optional<Tail> right) {
    Vector v(grid.size());
    for (Index i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return SampledFunction(grid, std::move(v), std::move(left), std::move(right));
}

double SampledFunction::domain_min() const { return left_ ? -kInf : grid_.t_min(); }
double SampledFunction::domain_max() const { return right_ ? kInf : grid_.t_max(); }

double SampledFunction::operator()(double t) const {
    if (t < grid_.t_min()) {
        if (!left_) throw RangeError("evaluation left of the grid without a tail");
        return left_->eval(t);
    }
    if (t > grid_.t_max()) {
        if (!right_) throw RangeError("evaluation right of the grid without a tail");
        return right_->eval(t);
    }
    const Index i = grid_.cell(t);
    const double t0 = grid_[i], t1 = grid_[i + 1];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
}

SampledFunction SampledFunction::with_values(Vector values) const {
    return SampledFunction(grid_, std::move(values), left_, right_);
}

// ---------------------------------------------------------------- quadrature

Vector cumulative_integral(const SampledFunction& f) { return f.node_primitive(); }

namespace {

// Integral of f over [t_min, x] for x inside the grid, using precomputed
// node primitives.
double grid_primitive(const SampledFunction& f, const Vector& prim, double x) {
    const Grid1D& g = f.grid();
    const Index i = g.cell(x);
    if (x == g[i]) return prim[i];
    const double h = g[i + 1] - g[i];
    const Index n = g.size();
    if (!g.is_uniform() || n < 4) {
        const double fx = f(x);
        return prim[i] + 0.5 * (x - g[i]) * (f.values()[i] + fx);
    }
    const Index j0 = std::clamp<Index>(i - 1, 0, n - 4);
    const double a = static_cast<double>(i - j0);
    const double b = a + (x - g[i]) / h;
    return prim[i] + cubic_segment_integral(f.values().data() + j0, a, b, h);
}

}  // namespace

double integrate(const SampledFunction& f, double a, double b) {
    if (std::isnan(a) || std::isnan(b)) throw RangeError("integrate: NaN bound");
    if (a > b) throw RangeError("integrate: a > b");
    if (a < f.domain_min() || b > f.domain_max()) throw RangeError("integrate: outside domain");
    const Grid1D& g = f.grid();
    double total = 0.0;
    if (a < g.t_min()) total += f.left_tail()->integral(a, std::min(b, g.t_min()));
    if (b > g.t_max()) total += f.right_tail()->integral(std::max(a, g.t_max()), b);
    const double lo = std::max(a, g.t_min()), hi = std::min(b, g.t_max());
    if (lo < hi) total += grid_primitive(f, f.node_primitive(), hi) - grid_primitive(f, f.node_primitive(), lo);
    if (std::isnan(total)) throw DataError("integrate: result is NaN");
    return total;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    // Start from four panels so symmetric integrands are not mistaken for converged.
    double total = 0.0;
    const double w = (b - a) / 4.0;
    for (int k = 0; k < 4; ++k) {
        const double lo = a + k * w, hi = k == 3 ? b : a + (k + 1) * w;
        const double flo = f(lo), fhi = f(hi), fm = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (flo + 4 * fm + fhi);
        total += simpson_step(f, lo, hi, flo, fm, fhi, whole, 0.25 * tol, max_depth);
    }
    return total;
}

// ---------------------------------------------------------------- inversion

double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi, double abs_tol) {
    for (int it = 0; it < 2000; ++it) {
        const double scale = std::max(std::abs(lo), std::abs(hi));
        if (hi - lo <= std::max(abs_tol, 4 * std::numeric_limits<double>::epsilon() * scale)) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double min_first_difference(const SampledFunction& f) {
    const Grid1D& g = f.grid();
    const Vector& v = f.values();
    double m = kInf;
    for (Index i = 0; i + 1 < g.size(); ++i) m = std::min(m, (v[i + 1] - v[i]) / (g[i + 1] - g[i]));
    return m;
}

double min_second_difference(const SampledFunction& f) {
    const Grid1D& g = f.grid();
    const Vector& v = f.values();
    double m = kInf;
    double prev = (v[1] - v[0]) / (g[1] - g[0]);
    for (Index i = 1; i + 1 < g.size(); ++i) {
        const double s = (v[i + 1] - v[i]) / (g[i + 1] - g[i]);
        m = std::min(m, s - prev);
        prev = s;
    }
    return m;
}

double invert_monotone(const SampledFunction& f, double y, double abs_tol) {
    if (std::isnan(y)) throw ContractError("invert_monotone: NaN level");
    const Grid1D& g = f.grid();
    const Vector& v = f.values();
    // Drops of discretization size are tolerated.
    const double drop = (v.head(v.size() - 1) - v.tail(v.size() - 1)).maxCoeff();
    if (drop > 1e-6) throw ContractError("invert_monotone: input is not nondecreasing");
    auto pred = [&](double t) { return f(t) >= y; };

    if (v[v.size() - 1] < y) {
        if (!f.right_tail()) return kInf;
        double step = std::max(1.0, std::abs(g.t_max()));
        double lo = g.t_max();
        while (true) {
            const double hi = g.t_max() + step;
            if (!std::isfinite(hi) || hi > 1e300) return kInf;
            if (pred(hi)) return bisect_predicate(pred, lo, hi, abs_tol);
            lo = hi;
            step *= 2;
        }
    }
    if (v[0] >= y) {
        if (!f.left_tail()) return g.t_min();
        double step = std::max(1.0, std::abs(g.t_min()));
        double hi = g.t_min();
        while (true) {
            const double lo = g.t_min() - step;
            if (!std::isfinite(lo) || lo < -1e300) return -kInf;
            if (!pred(lo)) return bisect_predicate(pred, lo, hi, abs_tol);
            hi = lo;
            step *= 2;
        }
    }
    // First node reaching y; the crossing lies in the preceding cell.
    const double* begin = v.data();
    const double* it = std::lower_bound(begin, begin + v.size(), y);
    Index i = static_cast<Index>(it - begin);
    // lower_bound needs sorted data; tolerate tiny decreases by a linear scan fallback.
    while (i > 0 && v[i - 1] >= y) --i;
    while (i < v.size() && v[i] < y) ++i;
    return bisect_predicate(pred, g[i - 1], g[i], abs_tol);
}

// ---------------------------------------------------------------- envelope

SampledFunction convex_envelope(const SampledFunction& f) {
    const Grid1D& g = f.grid();
    const Vector& v = f.values();
    const Index n = g.size();
    std::vector<Index> hull;
    hull.reserve(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            const Index o = hull[hull.size() - 2], a = hull.back();
            const double cross = (g[a] - g[o]) * (v[i] - v[o]) - (v[a] - v[o]) * (g[i] - g[o]);
            if (cross > 0) break;
            hull.pop_back();
        }
        hull.push_back(i);
    }
    Vector out(n);
    for (size_t k = 0; k + 1 < hull.size(); ++k) {
        const Index a = hull[k], b = hull[k + 1];
        out[a] = v[a];
        for (Index i = a + 1; i < b; ++i) {
            const double w = (g[i] - g[a]) / (g[b] - g[a]);
            out[i] = std::min(v[i], (1.0 - w) * v[a] + w * v[b]);
        }
    }
    out[n - 1] = v[n - 1];
    std::optional<Tail> left, right;
    if (f.left_tail()) left = Tail::affine((out[1] - out[0]) / (g[1] - g[0]));
    if (f.right_tail()) right = Tail::affine((out[n - 1] - out[n - 2]) / (g[n - 1] - g[n - 2]));
    return SampledFunction(g, std::move(out), left, right);
}

// ---------------------------------------------------------------- derivatives

double derivative(const SampledFunction& f, double t, Side side) {
    if (std::isnan(t) || !f.in_domain(t)) throw RangeError("derivative: t outside domain");
    const double h = f.grid().local_spacing(t);
    const bool right_ok = t + 2 * h <= f.domain_max();
    const bool left_ok = t - 2 * h >= f.domain_min();
    if ((side == Side::Right && right_ok) || !left_ok)
        return (-3 * f(t) + 4 * f(t + h) - f(t + 2 * h)) / (2 * h);
    return (3 * f(t) - 4 * f(t - h) + f(t - 2 * h)) / (2 * h);
}

Vector nodal_derivative(const SampledFunction& f) {
    const Grid1D& g = f.grid();
    const Vector& v = f.values();
    const Index n = g.size();
    Vector d(n);
    if (!g.is_uniform() || n < 10) {
        for (Index i = 0; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i]) / (g[i + 1] - g[i]);
        d[n - 1] = (v[n - 1] - v[n - 2]) / (g[n - 1] - g[n - 2]);
        return d;
    }
    const double h = (g.t_max() - g.t_min()) / static_cast<double>(n - 1);
    // Third differences on nodes j-1..j+2; they blow up next to a jump in h'
    // or h'' and stay O(h^3) elsewhere.
    Vector d3 = Vector::Zero(n);
    for (Index j = 1; j + 2 < n; ++j) d3[j] = std::abs(v[j + 2] - 3 * v[j + 1] + 3 * v[j] - v[j - 1]);
    auto window = [&](Index j0, Index j1) {
        double m = 0;
        for (Index j = std::max<Index>(j0, 1); j <= std::min(j1, n - 3); ++j) m = std::max(m, d3[j]);
        return m;
    };
    auto forward4 = [&](Index i) {
        return (-25 * v[i] + 48 * v[i + 1] - 36 * v[i + 2] + 16 * v[i + 3] - 3 * v[i + 4]) / (12 * h);
    };
    auto backward4 = [&](Index i) {
        return (25 * v[i] - 48 * v[i - 1] + 36 * v[i - 2] - 16 * v[i - 3] + 3 * v[i - 4]) / (12 * h);
    };
    for (Index i = 0; i < n; ++i) {
        const bool has_fwd = i + 4 < n, has_bwd = i >= 4;
        const double floor = 1e-12 * (1.0 + std::abs(v[i]));
        const double sf = has_fwd ? window(i + 1, i + 2) : std::numeric_limits<double>::infinity();
        const double sb = has_bwd ? window(i - 3, i - 2) : std::numeric_limits<double>::infinity();
        if (i >= 2 && i + 2 < n) {
            const double sc = window(i - 1, i);
            if (sc <= 4 * std::min(sf, sb) + floor) {
                d[i] = (v[i - 2] - 8 * v[i - 1] + 8 * v[i + 1] - v[i + 2]) / (12 * h);
                continue;
            }
        }
        // Prefer the right side on ties so that a kink on a node gets its
        // right slope.
        if (has_fwd && (sf <= 4 * sb + floor || !has_bwd)) {
            d[i] = forward4(i);
        } else if (has_bwd) {
            d[i] = backward4(i);
        } else {
            d[i] = i + 1 < n ? (v[i + 1] - v[i]) / h : (v[i] - v[i - 1]) / h;
        }
    }
    return d;
}

}  // namespace mabench
