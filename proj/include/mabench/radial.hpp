#pragma once

// Rotation-invariant omega-psh functions on P^n with the Fubini-Study form,
// written in the coordinate t = log|z| of the affine chart around a pole.
//
// A profile chi(t) is omega-psh iff h = chi + g is convex and nondecreasing
// with h' <= 1, where g(t) = log(1 + e^{2t}) / 2 is the local potential of
// omega. Its Monge-Ampere measure is rotation invariant with ball masses
// M(t) = h'(t)^n.

#include "mabench/numerics.hpp"
#include "mabench/weights.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mabench {

/// g(t) = log(1 + e^{2t}) / 2, evaluated without overflow.
double fs_potential(double t);
/// g'(t) = 1 / (1 + e^{-2t}).
double fs_slope(double t);
/// log g'(t).
double fs_log_slope(double t);
/// g''(t).
double fs_curvature(double t);

struct RadialGeometry {
    int n = 1;
    double total_mass = 1.0;
    Grid1D grid = Grid1D::standard();
    SampledFunction g_omega;

    static RadialGeometry fubini_study(int n, const Grid1D& grid = Grid1D::standard());

    /// omega^n mass of the closed ball of log-radius t.
    double ball_mass(double t) const;
    double log_ball_mass(double t) const;
};

struct RadialProfile {
    SampledFunction chi;
    RadialGeometry geometry;
    bool sup_normalized = false;

    /// h = chi + g sampled on the grid, tails included.
    SampledFunction h() const;
    double eval(double t) const { return chi(t); }
    /// lim chi at -inf (-inf for profiles with a pole).
    double infimum() const;
    /// sup chi over the grid and the right tail.
    double supremum() const;
};

struct RadialMeasure {
    SampledFunction mass;  // M(t) = mu(closed ball of log-radius t)
    double atom_at_pole = 0.0;
    RadialGeometry geometry;
    /// Closed form of dM/dt when known; otherwise derived from the samples.
    std::function<double(double)> dmass;
    /// Closed form of log dM/dt, used for densities at extreme t.
    std::function<double(double)> log_dmass;

    double M(double t) const { return mass(t); }
    double dM(double t) const;
    /// Density against omega^n: dM/dt divided by d(ball_mass)/dt, in log form.
    double log_density(double t) const;
    double density(double t) const { return std::exp(log_density(t)); }
};

struct ValidationReport {
    double min_second_difference = 0.0;  // of h, as slope increments
    double min_slope = 0.0;              // of h
    double max_slope = 0.0;              // of h
    double max_chi = 0.0;
    double tolerance = 1e-9;
    bool pass = false;
    std::string message;
};

ValidationReport validate_omega_psh(const RadialProfile& profile, double tolerance = 1e-9);

/// M = (h'_+)^n with the right derivative, so the mass of the closed ball
/// includes any slope jump at its boundary.
RadialMeasure ma_mass(const RadialProfile& profile);

struct SolveOptions {
    bool strict = true;          // reject atoms at the pole
    double atom_tolerance = 1e-12;
    double normalization_tolerance = 1e-6;
};

/// h' = M^{1/n}, integrated and shifted so that sup chi = 0.
RadialProfile solve_radial_ma(const RadialMeasure& mu, const SolveOptions& options = {});

/// Sup-normalized profile from h at the grid nodes; q_left and q_right are
/// closed forms of h' continuing it past the grid ends (either may be empty).
RadialProfile profile_from_slope_nodes(const RadialGeometry& geometry, const Vector& h_nodes,
                                       std::function<double(double)> q_left,
                                       std::function<double(double)> q_right);

/// Largest t with chi(t) < -s, so that {phi < -s} is the ball of log-radius
/// t. nullopt when the sublevel set is empty. +inf when it is everything.
std::optional<double> sublevel_radius(const RadialProfile& profile, double s);

/// omega^n itself: M(t) = g'(t)^n.
RadialMeasure fs_measure(const RadialGeometry& geometry);

/// Measure from a closed ball-mass function; tails use the same formula.
RadialMeasure measure_from_mass(const RadialGeometry& geometry, std::function<double(double)> mass,
                                std::function<double(double)> dmass = {},
                                std::function<double(double)> log_dmass = {});

/// n = 1 only: density c (1 + l)^beta against omega with l = -log g'(t) / 2,
/// so c (-log|z|)^beta near the pole. Normalized; beta >= 0.
RadialMeasure log_power_density(const RadialGeometry& geometry, double beta);

/// ||f||_p^p for log_power_density, from its closed form.
double log_power_density_Lp_power(double beta, double p);

/// Profile from a closed chi; tails use the same formula.
RadialProfile profile_from_chi(const RadialGeometry& geometry, std::function<double(double)> chi,
                               std::function<double(double)> dchi = {}, bool sup_normalized = true);

struct GalleryParams {
    int n = 1;
    double kappa = 0.5;                 // ex41 decay parameter
    std::optional<WeightEps> eps;       // ex42 weight
    double r_cut = 0.1353352832366127;  // ex44 splice radius e^{-2}
};

struct GalleryEntry {
    std::string name;
    std::string description;
    RadialMeasure measure;
    RadialProfile reference;
    std::optional<WeightEps> eps;
    std::map<std::string, double> constants;
};

std::vector<std::string> gallery_names();

/// ex41: M = 1 / (1 + kappa log(1 + e^{-2t})), a loglog pole with
///       phi ~ -(1/(2 kappa)) log(-log|z|).
/// ex42: M = eps(log(1+l)) / (eps(0) (1+l)) with l = log(1 + e^{-2t}) / 2,
///       phi ~ -(1/eps(0)) int_0^{log(-log|z|)} eps.
/// ex44: h = -log(-t) below log r_cut, affine up to the tangency with g,
///       g beyond; ball masses (-t)^{-n} near the pole.
GalleryEntry example_gallery(const std::string& name, const GalleryParams& params = {},
                             const Grid1D& grid = Grid1D::standard());

}  // namespace mabench
