#pragma once

// Test-only reference for n = 1: the relative extremal function of a ball
// about the pole of P^1 computed by projected SOR on a log-polar grid.
//
// With w = g + v in the coordinates (t, theta) of z = e^{t + i theta}, the
// conditions are: w subharmonic (the Laplacian of the cylinder), w <= g,
// w <= g - 1 for t <= t0. The largest such w solves the obstacle problem
// w = min(obstacle, neighbour average). The far ends are the two poles of
// P^1: boundedness there is a zero-flux condition in each pole's own chart,
// i.e. dw/dt = 0 at the left end and dw/dt = 1 at the right end.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct Relaxation {
    double t_min, dt;
    std::vector<double> w;  // theta-averaged w on the t nodes
    int sweeps = 0;

    double t(int i) const { return t_min + dt * i; }
    double v(int i) const {
        const double ti = t(i);
        return w[i] - (ti > 0 ? ti + 0.5 * std::log1p(std::exp(-2 * ti)) : 0.5 * std::log1p(std::exp(2 * ti)));
    }
    /// Flux through the circle at node i0 from the right: the mass of the
    /// closed ball.
    double mass_at(int i0) const { return (w[i0 + 1] - w[i0]) / dt; }
};

inline double potential(double t) {
    return t > 0 ? t + 0.5 * std::log1p(std::exp(-2 * t)) : 0.5 * std::log1p(std::exp(2 * t));
}

/// t0 sits on node i0 of nt nodes spanning [t0 - left, t0 - left + (nt-1) dt].
inline Relaxation relative_extremal(double t0, double left, double right_end, int nt = 512, int ntheta = 64,
                                    double tol = 1e-13, int max_sweeps = 200000) {
    Relaxation r;
    r.t_min = t0 - left;
    r.dt = (right_end - r.t_min) / (nt - 1);
    // Move t0 onto a node.
    const int i0 = static_cast<int>(std::lround(left / r.dt));
    r.t_min = t0 - i0 * r.dt;
    const double dth = 2 * std::acos(-1.0) / ntheta;
    std::vector<double> psi(nt);
    for (int i = 0; i < nt; ++i) psi[i] = potential(r.t(i)) - (i <= i0 ? 1.0 : 0.0);
    std::vector<double> w(static_cast<size_t>(nt) * ntheta);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < ntheta; ++j) w[static_cast<size_t>(i) * ntheta + j] = psi[i];
    auto at = [&](int i, int j) -> double& { return w[static_cast<size_t>(i) * ntheta + ((j + ntheta) % ntheta)]; };
    const double ct = 1.0 / (r.dt * r.dt), cth = 1.0 / (dth * dth);
    const double diag = 2 * ct + 2 * cth;
    const double omega = 2.0 / (1.0 + std::sin(std::acos(-1.0) / nt));
    for (r.sweeps = 0; r.sweeps < max_sweeps; ++r.sweeps) {
        double change = 0;
        for (int i = 0; i < nt; ++i) {
            for (int j = 0; j < ntheta; ++j) {
                // Ghost nodes from the zero-flux conditions in the pole charts.
                const double left_n = i > 0 ? at(i - 1, j) : at(i + 1, j);
                const double right_n = i + 1 < nt ? at(i + 1, j) : at(i - 1, j) + 2 * r.dt;
                const double avg = (ct * (left_n + right_n) + cth * (at(i, j - 1) + at(i, j + 1))) / diag;
                double& x = at(i, j);
                const double next = std::min(psi[i], x + omega * (avg - x));
                change = std::max(change, std::abs(next - x));
                x = next;
            }
        }
        if (change < tol) break;
    }
    r.w.assign(nt, 0.0);
    for (int i = 0; i < nt; ++i) {
        double s = 0;
        for (int j = 0; j < ntheta; ++j) s += at(i, j);
        r.w[i] = s / ntheta;
    }
    return r;
}

}  // namespace oracle
