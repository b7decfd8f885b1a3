#include "mabench/weights.hpp"

#include "mabench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

namespace mabench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kE = std::exp(1.0);

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_number(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw DataError("cannot parse " + what + ": '" + text + "'");
    }
    if (used != text.size()) throw DataError("cannot parse " + what + ": '" + text + "'");
    return v;
}

}  // namespace

// ---------------------------------------------------------------- WeightEps

WeightEps WeightEps::constant(double c) {
    if (!(c >= 0) || !std::isfinite(c)) throw ContractError("constant weight must be finite and >= 0");
    WeightEps w;
    w.kind_ = Kind::Constant;
    w.scale_ = c;
    return w;
}

WeightEps WeightEps::power(double a, double scale) {
    if (!(a >= 0) || !std::isfinite(a)) throw ContractError("pow(a) needs a >= 0 to be nonincreasing");
    if (!(scale >= 0) || !std::isfinite(scale)) throw ContractError("weight scale must be finite and >= 0");
    WeightEps w;
    w.kind_ = Kind::Power;
    w.param_ = a;
    w.scale_ = scale;
    return w;
}

WeightEps WeightEps::exponential(double lambda, double scale) {
    if (!(lambda >= 0) || !std::isfinite(lambda))
        throw ContractError("exp(lambda) needs lambda >= 0 to be nonincreasing");
    if (!(scale >= 0) || !std::isfinite(scale)) throw ContractError("weight scale must be finite and >= 0");
    WeightEps w;
    w.kind_ = Kind::Exponential;
    w.param_ = lambda;
    w.scale_ = scale;
    return w;
}

WeightEps WeightEps::table(Vector t, Vector eps) {
    if (t.size() != eps.size() || t.size() < 2) throw DataError("weight table needs at least two rows");
    for (Index i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(eps[i])) throw DataError("weight table has non-finite entries");
        if (eps[i] < 0) throw ContractError("weight table has negative values");
        if (i > 0 && !(t[i] > t[i - 1])) throw DataError("weight table t column must be strictly increasing");
        if (i > 0 && eps[i] > eps[i - 1]) throw ContractError("weight table is not nonincreasing");
    }
    WeightEps w;
    w.kind_ = Kind::Table;
    w.table_prim_ = Vector::Zero(t.size());
    for (Index i = 1; i < t.size(); ++i)
        w.table_prim_[i] = w.table_prim_[i - 1] + 0.5 * (t[i] - t[i - 1]) * (eps[i] + eps[i - 1]);
    w.table_t_ = std::move(t);
    w.table_eps_ = std::move(eps);
    return w;
}

WeightEps WeightEps::table_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open weight table '" + path + "'");
    std::vector<double> ts, es;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double a, b;
        if (!(fields >> a >> b)) {
            if (first) {
                first = false;
                continue;
            }
            throw DataError("malformed row in weight table '" + path + "': " + line);
        }
        first = false;
        ts.push_back(a);
        es.push_back(b);
    }
    auto w = table(Eigen::Map<Vector>(ts.data(), static_cast<Index>(ts.size())),
                   Eigen::Map<Vector>(es.data(), static_cast<Index>(es.size())));
    w.source_ = path;
    return w;
}

WeightEps WeightEps::parse(const std::string& spec) {
    static const std::regex re(R"(^\s*(?:([^*()\s]+)\s*\*\s*)?(const|pow|exp|table)\s*\(\s*(.*?)\s*\)\s*$)");
    std::smatch m;
    if (!std::regex_match(spec, m, re)) throw DataError("unrecognized weight spec '" + spec + "'");
    const double scale = m[1].matched ? parse_number(m[1].str(), "weight scale") : 1.0;
    const std::string kind = m[2].str();
    const std::string arg = m[3].str();
    if (kind == "const") return constant(scale * parse_number(arg, "const(c)"));
    if (kind == "pow") return power(parse_number(arg, "pow(a)"), scale);
    if (kind == "exp") return exponential(parse_number(arg, "exp(lambda)"), scale);
    return table_from_csv(arg).scaled(scale);
}

WeightEps WeightEps::scaled(double c) const {
    if (!(c > 0) || !std::isfinite(c)) throw ContractError("weight scale must be positive and finite");
    WeightEps w = *this;
    w.scale_ *= c;
    if (kind_ == Kind::Table) {
        w.table_eps_ *= c;
        w.table_prim_ *= c;
    }
    return w;
}

double WeightEps::operator()(double t) const {
    if (std::isnan(t) || t < -1e-12) throw RangeError("eps is defined on [0, inf)");
    t = std::max(t, 0.0);
    switch (kind_) {
        case Kind::Constant: return scale_;
        case Kind::Power: return scale_ * std::pow(1.0 + t, -param_);
        case Kind::Exponential: return scale_ * std::exp(-param_ * t);
        case Kind::Table: {
            const Index m = table_t_.size();
            if (t <= table_t_[0]) return table_eps_[0];
            if (t >= table_t_[m - 1]) return table_eps_[m - 1];
            const double* begin = table_t_.data();
            const Index i = static_cast<Index>(std::upper_bound(begin, begin + m, t) - begin) - 1;
            const double w = (t - table_t_[i]) / (table_t_[i + 1] - table_t_[i]);
            return (1 - w) * table_eps_[i] + w * table_eps_[i + 1];
        }
    }
    return 0.0;
}

double WeightEps::derivative(double t) const {
    if (std::isnan(t) || t < -1e-12) throw RangeError("eps is defined on [0, inf)");
    t = std::max(t, 0.0);
    switch (kind_) {
        case Kind::Constant: return 0.0;
        case Kind::Power: return -param_ * scale_ * std::pow(1.0 + t, -param_ - 1);
        case Kind::Exponential: return -param_ * scale_ * std::exp(-param_ * t);
        case Kind::Table: {
            const Index m = table_t_.size();
            if (t < table_t_[0] || t >= table_t_[m - 1]) return 0.0;
            const double* begin = table_t_.data();
            const Index i = static_cast<Index>(std::upper_bound(begin, begin + m, t) - begin) - 1;
            return (table_eps_[i + 1] - table_eps_[i]) / (table_t_[i + 1] - table_t_[i]);
        }
    }
    return 0.0;
}

double WeightEps::integral(double x) const {
    if (std::isnan(x) || x < 0) throw RangeError("eps integral needs x >= 0");
    if (x == 0) return 0.0;
    const bool inf = std::isinf(x);
    switch (kind_) {
        case Kind::Constant:
            if (inf) return scale_ == 0 ? 0.0 : kInf;
            return scale_ * x;
        case Kind::Power: {
            if (scale_ == 0) return 0.0;
            const double a = param_;
            if (inf) return a > 1 ? scale_ / (a - 1) : kInf;
            if (std::abs(a - 1) < 1e-14) return scale_ * std::log1p(x);
            return scale_ * std::expm1((1 - a) * std::log1p(x)) / (1 - a);
        }
        case Kind::Exponential: {
            if (scale_ == 0) return 0.0;
            if (param_ == 0) return inf ? kInf : scale_ * x;
            if (inf) return scale_ / param_;
            return -scale_ * std::expm1(-param_ * x) / param_;
        }
        case Kind::Table: {
            const Index m = table_t_.size();
            // Primitive measured from the first table node, constant extension on both sides.
            auto prim = [&](double u) {
                if (u <= table_t_[0]) return table_eps_[0] * (u - table_t_[0]);
                if (u >= table_t_[m - 1]) return table_prim_[m - 1] + table_eps_[m - 1] * (u - table_t_[m - 1]);
                const double* begin = table_t_.data();
                const Index i = static_cast<Index>(std::upper_bound(begin, begin + m, u) - begin) - 1;
                const double d = u - table_t_[i];
                const double slope = (table_eps_[i + 1] - table_eps_[i]) / (table_t_[i + 1] - table_t_[i]);
                return table_prim_[i] + table_eps_[i] * d + 0.5 * slope * d * d;
            };
            if (inf) {
                if (table_eps_[m - 1] > 0) return kInf;
                return table_prim_[m - 1] - prim(0.0);
            }
            return prim(x) - prim(0.0);
        }
    }
    return 0.0;
}

double WeightEps::inverse(double y) const {
    if (std::isnan(y)) throw ContractError("eps inverse of NaN");
    if ((*this)(0.0) <= y) return 0.0;
    switch (kind_) {
        case Kind::Constant: return kInf;
        case Kind::Power:
            if (y <= 0 || param_ == 0) return kInf;
            return std::max(0.0, std::pow(scale_ / y, 1.0 / param_) - 1.0);
        case Kind::Exponential:
            if (y <= 0 || param_ == 0) return kInf;
            return std::max(0.0, std::log(scale_ / y) / param_);
        case Kind::Table: {
            const Index m = table_t_.size();
            for (Index i = 0; i + 1 < m; ++i) {
                if (table_eps_[i + 1] <= y) {
                    if (table_t_[i + 1] <= 0) return 0.0;
                    const double e0 = table_eps_[i], e1 = table_eps_[i + 1];
                    const double w = e0 == e1 ? 0.0 : (e0 - y) / (e0 - e1);
                    return std::max(0.0, table_t_[i] + w * (table_t_[i + 1] - table_t_[i]));
                }
            }
            return kInf;
        }
    }
    return kInf;
}

std::string WeightEps::describe() const {
    const std::string prefix = scale_ == 1.0 ? "" : num(scale_) + "*";
    switch (kind_) {
        case Kind::Constant: return "const(" + num(scale_) + ")";
        case Kind::Power: return prefix + "pow(" + num(param_) + ")";
        case Kind::Exponential: return prefix + "exp(" + num(param_) + ")";
        case Kind::Table: return prefix + "table(" + (source_.empty() ? std::string("<inline>") : source_) + ")";
    }
    return "";
}

double eval_F_eps(const WeightEps& eps, int n, double x) {
    if (n < 1) throw ContractError("dimension must be >= 1");
    if (std::isnan(x) || x < 0 || x > 1) throw RangeError("F_eps is defined for capacities in [0, 1]");
    if (x == 0) return 0.0;
    return x * std::pow(eps(-std::log(x) / n), n);
}

// ---------------------------------------------------------------- GrowthH

namespace {

Grid1D h_grid(double x_max, Index nodes) {
    if (!(x_max > 0)) throw ContractError("H sampling range must be positive");
    return Grid1D::uniform(0.0, x_max, nodes);
}

}  // namespace

GrowthH::GrowthH(WeightEps eps, double s0, double x_max, Index nodes)
    : eps_(std::move(eps)),
      s0_(s0),
      s_inf_(s0 + kE * eps_.total_integral()),
      sampled_(SampledFunction::sample(
          h_grid(x_max, nodes), [this](double x) { return (*this)(x); }, std::nullopt,
          Tail::closed([e = eps_, s0](double x) { return s0 + kE * e.integral(x); },
                       [e = eps_](double x) { return kE * e(x); }))) {
    if (!(s0 >= 0) || !std::isfinite(s0)) throw ContractError("s0 must be finite and >= 0");
}

double GrowthH::operator()(double x) const { return s0_ + kE * eps_.integral(x); }

double GrowthH::slope(double x) const { return kE * eps_(x); }

double GrowthH::inverse(double s) const {
    if (std::isnan(s)) throw ContractError("H inverse of NaN");
    if (s <= s0_) return 0.0;
    if (s >= s_inf_) return kInf;
    double hi = 1.0;
    while ((*this)(hi) < s) {
        hi *= 2;
        if (hi > 1e300) return kInf;
    }
    auto reached = [&](double x) { return (*this)(x) >= s; };
    return bisect_predicate(reached, 0.0, hi, 1e-13 * std::max(1.0, hi));
}

GrowthH build_H(const WeightEps& eps, double s0) { return GrowthH(eps, s0); }

// ---------------------------------------------------------------- WeightChi

WeightChi::WeightChi(std::function<double(double)> f, std::function<double(double)> df, double lo, double hi)
    : f_(std::move(f)), df_(std::move(df)), lo_(lo), hi_(hi) {
    if (!f_) throw ContractError("weight chi needs a formula");
    if (!(lo < hi)) throw ContractError("weight chi needs a nonempty domain");
}

WeightChi WeightChi::from_samples(const SampledFunction& samples) {
    const Grid1D& g = samples.grid();
    for (Index i = 0; i + 1 < g.size(); ++i)
        if (g[i + 1] - g[i] > 1.0 / 256 + 1e-15)
            throw ContractError("tabulated chi needs at least 256 nodes per unit");
    if (min_first_difference(samples) < -1e-9) throw ContractError("chi must be increasing");
    auto f = [samples](double t) { return samples(t); };
    return WeightChi(f, {}, samples.domain_min(), samples.domain_max());
}

double WeightChi::operator()(double t) const {
    if (std::isnan(t) || t < lo_ || t > hi_) throw RangeError("chi evaluated outside its domain");
    return f_(t);
}

double WeightChi::derivative(double t) const {
    if (std::isnan(t) || t < lo_ || t > hi_) throw RangeError("chi' evaluated outside its domain");
    if (df_) return df_(t);
    const double h = 1e-5 * std::max(1.0, std::abs(t));
    if (t + 2 * h <= hi_) return (-3 * f_(t) + 4 * f_(t + h) - f_(t + 2 * h)) / (2 * h);
    return (3 * f_(t) - 4 * f_(t - h) + f_(t - 2 * h)) / (2 * h);
}

WeightChi chi_from_H(const GrowthH& H, int n) {
    if (n < 1) throw ContractError("dimension must be >= 1");
    auto f = [H, n](double u) {
        const double x = H.inverse(-u);
        return std::isinf(x) ? -kInf : -std::exp(0.5 * n * x);
    };
    auto df = [H, n](double u) {
        const double s = -u;
        if (s <= H.s0()) return 0.0;
        const double x = H.inverse(s);
        if (std::isinf(x)) return kInf;
        return 0.5 * n * std::exp(0.5 * n * x) / H.slope(x);
    };
    return WeightChi(f, df, std::isinf(H.s_infinity()) ? -kInf : -H.s_infinity(), 0.0);
}

WeightChi hat_transform(const WeightChi& chi, int n) {
    if (n < 0) throw ContractError("hat transform needs n >= 0");
    if (chi.domain_min() > 0 || chi.domain_max() < 0)
        throw ContractError("hat transform needs chi defined at 0");
    const double base = chi(0.0);
    auto dhat = [chi, n](double t) { return chi.derivative(t - 1) / std::pow(t, n); };
    auto f = [dhat, base](double t) {
        if (t == 1.0) return base;
        return base + adaptive_simpson(dhat, 1.0, t, 1e-13 * std::max(1.0, t - 1));
    };
    return WeightChi(f, dhat, 1.0, chi.domain_max() + 1.0);
}

// ---------------------------------------------------------------- membership

MembershipResult class_membership(const CapacityCurve& curve, const WeightChi& chi, int n) {
    if (n < 1) throw ContractError("dimension must be >= 1");
    curve.validate();
    if (curve.s[0] > 0) throw ContractError("membership test needs the curve from s = 0");
    using V = MembershipResult::Verdict;
    MembershipResult r;

    // chi is only defined down to its domain minimum; beyond it the tail is empty.
    const double chi_end = -chi.domain_min();
    const bool curve_ends = curve.tail == CapacityCurve::TailKind::None ||
                            curve.tail == CapacityCurve::TailKind::Zero;
    const double upper = std::min(chi_end, curve_ends ? curve.s_max() : kInf);

    auto integrand = [&](double t) {
        if (t >= chi_end) return 0.0;
        const double lc = curve.log_cap_at(t);
        if (std::isinf(lc)) return 0.0;
        const double d = chi.derivative(-t);
        if (d == 0.0) return 0.0;
        const double v = std::pow(t, n) * d * std::exp(lc);
        // Integrable blow-up where chi reaches -inf; the endpoint itself carries no mass.
        return std::isfinite(v) ? v : 0.0;
    };

    // Five-point Gauss-Legendre per cell: curve samples inside the sampled
    // range (the curve is log-linear between them), 64 uniform cells beyond.
    auto window_integral = [&](double a, double b) {
        std::vector<double> cuts{a};
        const double inner = std::min(b, curve.s_max());
        for (Index i = 0; i < curve.s.size(); ++i)
            if (curve.s[i] > a && curve.s[i] < inner) cuts.push_back(curve.s[i]);
        if (inner > a) cuts.push_back(inner);
        const double from = std::max(a, curve.s_max());
        if (b > from)
            for (int k = 1; k <= 64; ++k) cuts.push_back(from + (b - from) * k / 64.0);
        static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                     0.9061798459386640};
        static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};
        double total = 0.0;
        for (size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double mid = 0.5 * (cuts[c] + cuts[c + 1]), half = 0.5 * (cuts[c + 1] - cuts[c]);
            if (half <= 0) continue;
            for (int q = 0; q < 5; ++q) total += half * wg[q] * integrand(mid + half * xg[q]);
        }
        return total;
    };

    double sum = 0.0, lo = 0.0, hi = 1.0;
    int quiet = 0, growing = 0;
    double prev_inc = -1.0;
    for (int k = 0; k <= 80; ++k) {
        const double b = std::min(hi, upper);
        const double inc = window_integral(lo, b);
        sum += inc;
        r.partials.push_back(sum);
        if (!std::isfinite(sum)) {
            r.verdict = V::Infinite;
            r.value = kInf;
            return r;
        }
        if (b >= upper) {
            const bool truncated = curve.tail == CapacityCurve::TailKind::None && upper < chi_end &&
                                   upper == curve.s_max();
            if (truncated) {
                // Unknown continuation: only conclusive if the integrand has died out.
                const double last = integrand(upper) * upper;
                r.verdict = last <= 1e-10 * std::max(sum, 1e-300) ? V::Finite : V::Inconclusive;
            } else {
                r.verdict = V::Finite;
            }
            r.value = sum;
            return r;
        }
        quiet = inc <= 1e-13 * sum ? quiet + 1 : 0;
        growing = prev_inc >= 0 && inc >= prev_inc * 0.999 && inc > 0 ? growing + 1 : 0;
        prev_inc = inc;
        if (quiet >= 3) {
            r.verdict = V::Finite;
            r.value = sum;
            return r;
        }
        if (growing >= 8) {
            r.verdict = V::Infinite;
            r.value = kInf;
            return r;
        }
        lo = hi;
        hi *= 2;
    }
    // Neither settled nor growing after 2^80.
    r.verdict = V::Inconclusive;
    r.value = sum;
    return r;
}

KolodziejResult kolodziej_test(const WeightEps& eps, double s0) {
    KolodziejResult r;
    r.bounded_regime = std::isfinite(eps.total_integral());
    r.s_infinity = GrowthH(eps, s0).s_infinity();
    return r;
}

}  // namespace mabench
