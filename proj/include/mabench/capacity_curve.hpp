#pragma once

#include "mabench/numerics.hpp"

#include <string>

namespace mabench {

/// Sampled map s -> Cap(phi < -s), stored as log-capacity so that decay far
/// below double range stays representable.
struct CapacityCurve {
    /// How the curve continues beyond the last sample.
    enum class TailKind {
        None,         // unknown: queries beyond s.max() are out of range
        Zero,         // capacity vanishes (bounded function)
        Exponential,  // log cap decreases with slope -rate
        Power,        // cap ~ s^(-rate)
    };

    Vector s;        // strictly increasing, s[0] >= 0
    Vector log_cap;  // -inf where the sublevel set is empty
    int n = 1;
    TailKind tail = TailKind::None;
    double rate = 0.0;
    std::string provenance;

    double s_max() const { return s[s.size() - 1]; }

    /// log Cap at s, linear in s between samples.
    double log_cap_at(double x) const;
    double cap_at(double x) const;

    /// -(1/n) log Cap at every sample.
    Vector g_values() const;

    /// Throws ContractError unless samples are sorted and capacities lie in
    /// [0, 1] and are nonincreasing.
    void validate() const;
};

}  // namespace mabench
