#include "mabench/capacity_curve.hpp"

#include "mabench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mabench {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double CapacityCurve::log_cap_at(double x) const {
    if (s.size() == 0) throw ContractError("empty capacity curve");
    if (std::isnan(x) || x < s[0]) throw RangeError("capacity curve queried below its first sample");
    const Index m = s.size();
    if (x > s[m - 1]) {
        const double last = log_cap[m - 1];
        switch (tail) {
            case TailKind::None: throw RangeError("capacity curve queried beyond its samples without a tail");
            case TailKind::Zero: return -kInf;
            case TailKind::Exponential: return last - rate * (x - s[m - 1]);
            case TailKind::Power: return last - rate * std::log(x / s[m - 1]);
        }
    }
    const double* begin = s.data();
    const double* it = std::upper_bound(begin, begin + m, x);
    Index i = std::clamp<Index>(static_cast<Index>(it - begin) - 1, 0, m - 2);
    if (m == 1) return log_cap[0];
    const double a = log_cap[i], b = log_cap[i + 1];
    if (x == s[i]) return a;
    if (std::isinf(b)) return x >= s[i + 1] ? b : a;
    const double w = (x - s[i]) / (s[i + 1] - s[i]);
    return (1 - w) * a + w * b;
}

double CapacityCurve::cap_at(double x) const { return std::exp(log_cap_at(x)); }

Vector CapacityCurve::g_values() const { return -log_cap / static_cast<double>(n); }

void CapacityCurve::validate() const {
    if (s.size() != log_cap.size() || s.size() == 0) throw ContractError("capacity curve: size mismatch");
    if (n < 1) throw ContractError("capacity curve: dimension must be >= 1");
    for (Index i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s[i]) || s[i] < 0) throw ContractError("capacity curve: bad s sample");
        if (std::isnan(log_cap[i]) || log_cap[i] > 1e-12) throw ContractError("capacity outside [0, 1]");
        if (i > 0 && !(s[i] > s[i - 1])) throw ContractError("capacity curve: s not increasing");
        if (i > 0 && log_cap[i] > log_cap[i - 1] + 1e-9 * (1 + std::abs(log_cap[i - 1])))
            throw ContractError("capacity curve: capacity increases with s");
    }
}

}  // namespace mabench
