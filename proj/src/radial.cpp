#include "mabench/radial.hpp"

#include "mabench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

namespace mabench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Stand-in for t -> -inf when probing tails.
constexpr double kFarLeft = -1e300;

}  // namespace

// ---------------------------------------------------------------- FS potential

double fs_potential(double t) {
    if (t > 0) return t + 0.5 * std::log1p(std::exp(-2 * t));
    return 0.5 * std::log1p(std::exp(2 * t));
}

double fs_slope(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-2 * t));
    const double e = std::exp(2 * t);
    return e / (1.0 + e);
}

double fs_log_slope(double t) {
    if (t >= 0) return -std::log1p(std::exp(-2 * t));
    return 2 * t - std::log1p(std::exp(2 * t));
}

double fs_curvature(double t) {
    const double s = fs_slope(t);
    return 2 * s * fs_slope(-t);
}

RadialGeometry RadialGeometry::fubini_study(int n, const Grid1D& grid) {
    if (n < 1) throw ContractError("dimension must be >= 1");
    RadialGeometry geo{n, 1.0, grid,
                       SampledFunction::sample(grid, fs_potential, Tail::closed(fs_potential, fs_slope),
                                               Tail::closed(fs_potential, fs_slope))};
    return geo;
}

double RadialGeometry::ball_mass(double t) const { return std::pow(fs_slope(t), n); }
double RadialGeometry::log_ball_mass(double t) const { return n * fs_log_slope(t); }

// ---------------------------------------------------------------- profiles

namespace {

std::optional<Tail> shifted_closed(const std::optional<Tail>& tail, std::function<double(double)> extra,
                                   std::function<double(double)> dextra) {
    if (!tail) return std::nullopt;
    Tail base = *tail;
    return Tail::closed([base, extra](double t) { return base.eval(t) + extra(t); },
                        [base, dextra](double t) { return base.derivative(t) + dextra(t); });
}

}  // namespace

SampledFunction RadialProfile::h() const {
    Vector v = chi.values() + geometry.g_omega.values();
    return SampledFunction(chi.grid(), std::move(v), shifted_closed(chi.left_tail(), fs_potential, fs_slope),
                           shifted_closed(chi.right_tail(), fs_potential, fs_slope));
}

double RadialProfile::infimum() const {
    if (chi.left_tail()) {
        // A tail still moving between -1e150 and -1e300 has a pole.
        const double far = chi.left_tail()->eval(kFarLeft), mid = chi.left_tail()->eval(-1e150);
        if (mid - far > 1e-9 * (1.0 + std::abs(mid))) return -kInf;
        return far;
    }
    return chi.values().minCoeff();
}

double RadialProfile::supremum() const {
    double m = chi.values().maxCoeff();
    if (chi.right_tail()) m = std::max(m, chi.right_tail()->eval(chi.grid().t_max() + 50.0));
    return m;
}

// ---------------------------------------------------------------- measures

double RadialMeasure::dM(double t) const {
    if (dmass) return dmass(t);
    if (log_dmass) return std::exp(log_dmass(t));
    return std::max(0.0, derivative(mass, t, Side::Right));
}

double RadialMeasure::log_density(double t) const {
    const double ld = log_dmass ? log_dmass(t) : std::log(dM(t));
    const int n = geometry.n;
    // d/dt g'(t)^n = 2n g'^n (1 - g').
    return ld - std::log(2.0 * n) - n * fs_log_slope(t) - fs_log_slope(-t);
}

RadialMeasure fs_measure(const RadialGeometry& geometry) {
    const int n = geometry.n;
    return measure_from_mass(
        geometry, [n](double t) { return std::pow(fs_slope(t), n); },
        [n](double t) { return 2.0 * n * std::pow(fs_slope(t), n) * fs_slope(-t); },
        [n](double t) { return std::log(2.0 * n) + n * fs_log_slope(t) + fs_log_slope(-t); });
}

RadialMeasure measure_from_mass(const RadialGeometry& geometry, std::function<double(double)> mass,
                                std::function<double(double)> dmass, std::function<double(double)> log_dmass) {
    RadialMeasure mu{SampledFunction::sample(geometry.grid, mass, Tail::closed(mass, dmass), Tail::closed(mass, dmass)),
                     0.0, geometry, std::move(dmass), std::move(log_dmass)};
    mu.atom_at_pole = std::max(0.0, mass(kFarLeft));
    return mu;
}

RadialProfile profile_from_chi(const RadialGeometry& geometry, std::function<double(double)> chi,
                               std::function<double(double)> dchi, bool sup_normalized) {
    return RadialProfile{
        SampledFunction::sample(geometry.grid, chi, Tail::closed(chi, dchi), Tail::closed(chi, dchi)), geometry,
        sup_normalized};
}

// ---------------------------------------------------------------- validation

ValidationReport validate_omega_psh(const RadialProfile& profile, double tolerance) {
    ValidationReport r;
    r.tolerance = tolerance;
    const Grid1D& grid = profile.chi.grid();
    const Vector h = profile.chi.values() + profile.geometry.g_omega.values();
    // Raw first and second differences of h: slope quantities scaled by the spacing.
    double min_d1 = kInf, min_d2 = kInf, min_slope = kInf, max_slope = -kInf;
    double prev_slope = 0.0;
    for (Index i = 0; i + 1 < grid.size(); ++i) {
        const double dt = grid[i + 1] - grid[i];
        const double d1 = h[i + 1] - h[i];
        const double slope = d1 / dt;
        min_d1 = std::min(min_d1, d1);
        min_slope = std::min(min_slope, slope);
        max_slope = std::max(max_slope, slope);
        if (i > 0) min_d2 = std::min(min_d2, (slope - prev_slope) * dt);
        prev_slope = slope;
    }
    r.min_second_difference = min_d2;
    r.min_slope = min_slope;
    r.max_slope = max_slope;
    r.max_chi = profile.supremum();
    const bool convex = min_d2 >= -tolerance;
    const bool monotone = min_d1 >= -tolerance;
    const bool bounded_slope = max_slope <= 1.0 + 1e-6;
    const bool normalized = !profile.sup_normalized || r.max_chi <= 1e-9;
    r.pass = convex && monotone && bounded_slope && normalized;
    if (!convex) r.message += "h is not convex; ";
    if (!monotone) r.message += "h is decreasing somewhere; ";
    if (!bounded_slope) r.message += "h' exceeds 1; ";
    if (!normalized) r.message += "sup chi > 0; ";
    if (r.pass) r.message = "ok";
    return r;
}

// ---------------------------------------------------------------- MA mass

RadialMeasure ma_mass(const RadialProfile& profile) {
    const ValidationReport report = validate_omega_psh(profile);
    if (!report.pass) throw ContractError("ma_mass: profile is not omega-psh: " + report.message);
    const int n = profile.geometry.n;
    const SampledFunction h = profile.h();
    Vector slope = nodal_derivative(h).cwiseMax(0.0).cwiseMin(1.0);
    // Rounding in the stencils can leave 1e-12 dips; M is monotone.
    for (Index i = 1; i < slope.size(); ++i) slope[i] = std::max(slope[i], slope[i - 1]);
    Vector M = slope.array().pow(n).matrix();

    std::optional<Tail> left, right;
    std::function<double(double)> left_mass;
    if (h.left_tail()) {
        const Tail tail = *h.left_tail();
        left_mass = [tail, n](double t) { return std::pow(std::clamp(tail.derivative(t), 0.0, 1.0), n); };
        left = Tail::closed(left_mass, {});
    }
    if (h.right_tail()) {
        const Tail tail = *h.right_tail();
        right = Tail::closed([tail, n](double t) { return std::pow(std::clamp(tail.derivative(t), 0.0, 1.0), n); },
                             {});
    }
    RadialMeasure mu{SampledFunction(h.grid(), std::move(M), left, right), 0.0, profile.geometry, {}, {}};
    if (left_mass) mu.atom_at_pole = left_mass(kFarLeft);
    return mu;
}

// ---------------------------------------------------------------- solver

namespace {

// int_t^{t_min} q. The limit q(-inf) (a pole) is integrated exactly; the
// rest goes through u = t_min + 1 - e^v, which turns 1/|u| decay into a
// bounded integrand on a logarithmic range. Whole v-cells are tabulated on
// first use, so an evaluation only integrates one partial cell.
class LeftTailIntegral {
public:
    LeftTailIntegral(std::function<double(double)> q, double t_min) : q_(std::move(q)), t_min_(t_min) {}

    double operator()(double t) const {
        if (t >= t_min_) return 0.0;
        std::call_once(once_, [this] { build(); });
        const double V = std::log1p(t_min_ - t);
        const Index k = std::min(static_cast<Index>(V / kCell), static_cast<Index>(cum_.size()) - 1);
        return q_inf_ * (t_min_ - t) + cum_[static_cast<size_t>(k)] + cell(k * kCell, V);
    }

private:
    static constexpr double kCell = 0.05;
    static constexpr double kVMax = 700.0;  // past log(1e300)

    double integrand(double v) const {
        const double ev = std::exp(v);
        return (q_(t_min_ + 1.0 - ev) - q_inf_) * ev;
    }
    // 5-point Gauss-Legendre over [a, b].
    double cell(double a, double b) const {
        static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                    0.9061798459386640};
        static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                    0.2369268850561891, 0.2369268850561891};
        if (b <= a) return 0.0;
        const double c = 0.5 * (a + b), r = 0.5 * (b - a);
        double sum = 0.0;
        for (int i = 0; i < 5; ++i) sum += w[i] * integrand(c + r * x[i]);
        return r * sum;
    }
    void build() const {
        q_inf_ = q_(kFarLeft);
        const auto cells = static_cast<size_t>(kVMax / kCell);
        cum_.assign(cells + 1, 0.0);
        for (size_t k = 0; k < cells; ++k) cum_[k + 1] = cum_[k] + cell(k * kCell, (k + 1) * kCell);
    }

    std::function<double(double)> q_;
    double t_min_;
    mutable std::once_flag once_;
    mutable double q_inf_ = 0.0;
    mutable std::vector<double> cum_;
};

}  // namespace

RadialProfile profile_from_slope_nodes(const RadialGeometry& geometry, const Vector& h_nodes,
                                       std::function<double(double)> q_left, std::function<double(double)> q_right) {
    const Grid1D& grid = geometry.grid;
    Vector chi = h_nodes - geometry.g_omega.values();
    const double t_min = grid.t_min(), t_max = grid.t_max();
    const Index last = grid.size() - 1;

    auto right_value = [q_right, t_max](double base, double t) {
        if (t <= t_max) return base;
        auto d = [&](double u) { return q_right(u) - fs_slope(u); };
        return base + adaptive_simpson(d, t_max, t, 1e-13);
    };
    double sup = chi.maxCoeff();
    if (q_right) sup = std::max(sup, right_value(chi[last], t_max + 50.0));
    chi.array() -= sup;

    std::optional<Tail> left, right;
    if (q_left) {
        const double base = chi[0], g0 = fs_potential(t_min);
        const auto integral = std::make_shared<LeftTailIntegral>(q_left, t_min);
        left = Tail::closed(
            [integral, base, g0](double t) { return base - (*integral)(t) - (fs_potential(t) - g0); },
            [q_left](double t) { return q_left(t) - fs_slope(t); });
    }
    if (q_right) {
        const double base = chi[last];
        right = Tail::closed([right_value, base](double t) { return right_value(base, t); },
                             [q_right](double t) { return q_right(t) - fs_slope(t); });
    }
    return RadialProfile{SampledFunction(grid, std::move(chi), left, right), geometry, true};
}

RadialProfile solve_radial_ma(const RadialMeasure& mu, const SolveOptions& options) {
    const RadialGeometry& geo = mu.geometry;
    const int n = geo.n;
    const SampledFunction& M = mu.mass;
    const Vector& m = M.values();
    if (min_first_difference(M) * (M.grid()[1] - M.grid()[0]) < -1e-9)
        throw ContractError("solve_radial_ma: ball masses decrease");
    double top = m[m.size() - 1];
    if (M.right_tail()) top = M.right_tail()->eval(M.grid().t_max() + 1e3);
    if (std::abs(top - 1.0) > options.normalization_tolerance)
        throw ContractError("solve_radial_ma: measure is not normalized (total mass " + std::to_string(top) + ")");
    double atom = mu.atom_at_pole;
    if (M.left_tail()) atom = std::max(atom, M.left_tail()->eval(kFarLeft));
    if (atom > options.atom_tolerance && options.strict)
        throw PluripolarChargeError("measure has an atom of mass " + std::to_string(atom) +
                                    " at the pole, which is pluripolar");

    const double inv_n = 1.0 / n;
    Vector q = m.cwiseMax(0.0).cwiseMin(1.0).array().pow(inv_n).matrix();
    const SampledFunction qf(M.grid(), q);
    const Vector P = cumulative_integral(qf);
    // The cubic cell integrals can overshoot at a kink of q; the exact cell
    // average of a nondecreasing q lies in [q_i, q_{i+1}], which keeps H convex.
    const Grid1D& grid = M.grid();
    Vector H(P.size());
    H[0] = P[0];
    for (Index i = 0; i + 1 < P.size(); ++i) {
        const double dt = grid[i + 1] - grid[i];
        const double lo = std::min(q[i], q[i + 1]) * dt, hi = std::max(q[i], q[i + 1]) * dt;
        H[i + 1] = H[i] + std::clamp(P[i + 1] - P[i], lo, hi);
    }

    std::function<double(double)> q_left, q_right;
    if (M.left_tail()) {
        const Tail tail = *M.left_tail();
        q_left = [tail, inv_n](double t) { return std::pow(std::clamp(tail.eval(t), 0.0, 1.0), inv_n); };
    }
    if (M.right_tail()) {
        const Tail tail = *M.right_tail();
        q_right = [tail, inv_n](double t) { return std::pow(std::clamp(tail.eval(t), 0.0, 1.0), inv_n); };
    }
    return profile_from_slope_nodes(geo, H, q_left, q_right);
}

// ---------------------------------------------------------------- sublevel sets

std::optional<double> sublevel_radius(const RadialProfile& profile, double s) {
    if (std::isnan(s)) throw ContractError("sublevel_radius: NaN level");
    if (-s > profile.supremum()) return kInf;
    if (-s <= profile.infimum()) return std::nullopt;
    return invert_monotone(profile.chi, -s);
}

}  // namespace mabench
