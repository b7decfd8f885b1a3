#include "mabench/io.hpp"

#include "mabench/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

namespace mabench {

namespace {

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"geometry.n", "1"},
        {"weight.eps", "const(1)"},
        {"measure.gallery", ""},
        {"measure.name", ""},
        {"measure.csv", ""},
        {"measure.density", ""},
        {"measure.kappa", "0.5"},
        {"measure.r_cut", "0.1353352832366127"},
        {"measure.atom", "0"},
        {"grids.t_min", "-60"},
        {"grids.t_max", "30"},
        {"grids.t_nodes", "65536"},
        {"grids.s_min", "0"},
        {"grids.s_max", "60"},
        {"grids.s_samples", "601"},
        {"constants.c1", "-1"},
        {"constants.nu", "1"},
        {"constants.C2", "-1"},
        {"constants.C2_prime", "-1"},
        {"constants.c_N", "-1"},
        {"constants.s0", "0"},
        {"verify.p", "2"},
        {"verify.exponent", "n"},
        {"verify.tolerance", "1.05"},
        {"verify.rescale", "true"},
        {"verify.strict", "true"},
        {"output.dir", "."},
        {"output.formats", "csv,json"},
    };
    return d;
}

double to_number(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw DataError("config key '" + key + "': '" + value + "' is not a number");
    }
    if (value.find_first_not_of(" \t", pos) != std::string::npos)
        throw DataError("config key '" + key + "': '" + value + "' is not a number");
    return x;
}

std::vector<std::pair<double, double>> read_two_columns(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + what + " '" + path + "'");
    std::vector<std::pair<double, double>> rows;
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
            throw DataError("malformed row in " + what + " '" + path + "': " + line);
        }
        first = false;
        rows.emplace_back(a, b);
    }
    return rows;
}

}  // namespace

// ---------------------------------------------------------------- config

RunConfig::RunConfig() : values_(defaults()) {}

RunConfig RunConfig::from_text(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    RunConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw DataError("config: key '" + section + "' outside a [section]");
        for (const auto& [key, value] : body) c.set(section + "." + key, value.get_value<std::string>());
    }
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw DataError("unknown config key '" + key + "'");
    it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw DataError("unknown config key '" + key + "'");
    return it->second;
}

double RunConfig::number(const std::string& key) const { return to_number(key, get(key)); }

int RunConfig::integer(const std::string& key) const {
    const double x = number(key);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw DataError("config key '" + key + "' must be an integer");
    return static_cast<int>(x);
}

bool RunConfig::flag(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw DataError("config key '" + key + "' must be true or false");
}

void RunConfig::validate() const {
    if (integer("geometry.n") < 1) throw DataError("geometry.n must be >= 1");
    for (const char* k : {"grids.t_min", "grids.t_max", "grids.s_min", "grids.s_max", "measure.kappa",
                          "measure.r_cut", "measure.atom", "constants.c1", "constants.nu", "constants.C2", "constants.C2_prime",
                          "constants.c_N", "constants.s0", "verify.p", "verify.tolerance"})
        number(k);
    if (integer("grids.t_nodes") < 16) throw DataError("grids.t_nodes must be >= 16");
    if (integer("grids.s_samples") < 2) throw DataError("grids.s_samples must be >= 2");
    if (!(number("grids.t_min") < number("grids.t_max"))) throw DataError("grids.t_min must be < grids.t_max");
    if (!(number("grids.s_min") >= 0 && number("grids.s_min") < number("grids.s_max")))
        throw DataError("grids.s_min must lie in [0, grids.s_max)");
    if (!(number("measure.atom") >= 0 && number("measure.atom") < 1)) throw DataError("measure.atom must lie in [0, 1)");
    if (get("verify.exponent") != "n") number("verify.exponent");
    try {
        WeightEps::parse(get("weight.eps"));
    } catch (const DataError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(std::string("weight.eps: ") + e.what());
    }
    flag("verify.rescale");
    flag("verify.strict");
    const std::string& csv = get("measure.csv");
    if (!csv.empty() && !std::filesystem::exists(csv)) throw DataError("measure.csv '" + csv + "' does not exist");
}

std::string RunConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_)
        if (!k.starts_with("output.")) out += k + "=" + v + "\n";
    return out;
}

std::string RunConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------- output

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<Vector>& columns) {
    if (header.size() != columns.size()) throw ContractError("csv_table: header and columns differ in count");
    const Index rows = columns.empty() ? 0 : columns[0].size();
    for (const auto& c : columns)
        if (c.size() != rows) throw ContractError("csv_table: columns differ in length");
    std::string out;
    for (size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + header[j];
    out += "\n";
    for (Index i = 0; i < rows; ++i) {
        for (size_t j = 0; j < columns.size(); ++j) out += (j ? "," : "") + format_double(columns[j][i]);
        out += "\n";
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw DataError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

Json json_number(double x) {
    if (x == 0) return 0.0;
    if (std::isfinite(x)) return x;
    return format_double(x);
}

Json report_header(const RunConfig& config, const std::string& command) {
    Json j;
    j["command"] = command;
    j["version"] = kLibraryVersion;
    j["config_hash"] = config.hash();
    Json cfg = Json::object();
    for (const auto& [k, v] : config.values())
        if (!k.starts_with("output.")) cfg[k] = v;
    j["config"] = cfg;
    return j;
}

// ---------------------------------------------------------------- measures

RadialGeometry geometry_from(const RunConfig& config) {
    const int n = config.integer("geometry.n");
    const Index nodes = config.integer("grids.t_nodes");
    const double lo = config.number("grids.t_min"), hi = config.number("grids.t_max");
    if (lo == -60.0 && hi == 30.0 && nodes == (Index{1} << 16)) return RadialGeometry::fubini_study(n);
    return RadialGeometry::fubini_study(n, Grid1D::uniform(lo, hi, nodes));
}

RadialMeasure measure_from_csv(const RadialGeometry& geometry, const std::string& path) {
    const auto rows = read_two_columns(path, "measure table");
    if (rows.size() < 2) throw DataError("measure table '" + path + "' needs at least two rows");
    std::vector<double> t, M;
    for (const auto& [a, b] : rows) {
        if (!std::isfinite(a) || !std::isfinite(b)) throw DataError("non-finite entry in '" + path + "'");
        if (!t.empty() && !(a > t.back())) throw DataError("measure table '" + path + "': t must increase");
        if (!M.empty() && b < M.back()) throw DataError("measure table '" + path + "': masses must not decrease");
        if (b < 0 || b > 1 + 1e-12) throw DataError("measure table '" + path + "': masses must lie in [0, 1]");
        t.push_back(a);
        M.push_back(b);
    }
    const int n = geometry.n;
    auto mass = [t, M, n](double x) {
        if (x <= t.front()) return M.front() * std::exp(n * (fs_log_slope(x) - fs_log_slope(t.front())));
        if (x >= t.back()) return 1.0 - (1.0 - M.back()) * std::exp(fs_log_slope(-x) - fs_log_slope(-t.back()));
        const auto k = static_cast<size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
        const double w = (x - t[k]) / (t[k + 1] - t[k]);
        return (1 - w) * M[k] + w * M[k + 1];
    };
    return measure_from_mass(geometry, mass);
}

RadialMeasure density_measure(const RadialGeometry& geometry, const std::string& spec) {
    if (spec == "const") return fs_measure(geometry);
    static const std::regex re(R"(^\s*logpow\s*\(\s*([^)\s]+)\s*\)\s*$)");
    std::smatch m;
    if (std::regex_match(spec, m, re)) return log_power_density(geometry, to_number("measure.density", m[1].str()));
    throw DataError("unrecognized density '" + spec + "' (const or logpow(beta))");
}

namespace {

ResolvedMeasure resolve_base(const RunConfig& config, const RadialGeometry& geometry) {
    const std::string& gallery = config.get("measure.gallery");
    const std::string& name = config.get("measure.name");
    const std::string& csv = config.get("measure.csv");
    const std::string& density = config.get("measure.density");
    const int given = !gallery.empty() + !name.empty() + !csv.empty() + !density.empty();
    if (given != 1) throw DataError("give exactly one of measure.gallery, measure.name, measure.csv, measure.density");
    if (!csv.empty()) return {"csv:" + csv, measure_from_csv(geometry, csv), std::nullopt};
    if (!density.empty()) return {"density:" + density, density_measure(geometry, density), std::nullopt};
    const std::string which = gallery.empty() ? name : gallery;
    GalleryParams p;
    p.n = geometry.n;
    p.kappa = config.number("measure.kappa");
    p.r_cut = config.number("measure.r_cut");
    if (which == "ex42") p.eps = WeightEps::parse(config.get("weight.eps"));
    GalleryEntry e = example_gallery(which, p, geometry.grid);
    return {e.name, std::move(e.measure), e.eps};
}

}  // namespace

ResolvedMeasure resolve_measure(const RunConfig& config, const RadialGeometry& geometry) {
    ResolvedMeasure r = resolve_base(config, geometry);
    const double a = config.number("measure.atom");
    if (a == 0) return r;
    // (1 - a) mu + a delta_pole
    const RadialMeasure base = r.measure;
    const double keep = 1 - a;
    r.measure = measure_from_mass(
        geometry, [base, a, keep](double t) { return a + keep * base.M(t); },
        [base, keep](double t) { return keep * base.dM(t); },
        [base, keep](double t) { return std::log(keep) + (base.log_dmass ? base.log_dmass(t) : std::log(base.dM(t))); });
    r.measure.atom_at_pole = a + keep * base.atom_at_pole;
    r.name += "+atom";
    return r;
}

// ---------------------------------------------------------------- reports

namespace {

Json numbers(const Vector& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(json_number(v[i]));
    return a;
}

Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(json_number(x));
    return a;
}

}  // namespace

Json to_json(const DominationReport& r) {
    Json j;
    j["family"] = r.family;
    j["balls"] = r.t0.size();
    j["t0_min"] = json_number(r.t0.size() ? r.t0.minCoeff() : 0.0);
    j["t0_max"] = json_number(r.t0.size() ? r.t0.maxCoeff() : 0.0);
    j["worst_ratio"] = json_number(r.worst_ratio);
    j["worst_t0"] = json_number(r.worst_t0);
    j["constant_A"] = json_number(r.constant_A);
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const OrliczResult& r) {
    Json j;
    j["finite"] = r.finite;
    j["integral"] = json_number(r.integral);
    j["exponent"] = r.exponent;
    j["partials"] = numbers(r.partials);
    return j;
}

Json to_json(const BridgeReport& r) {
    Json j;
    j["applicable"] = r.applicable;
    j["orlicz"] = to_json(r.orlicz);
    if (r.applicable) {
        j["domination"] = to_json(r.domination);
        j["finite_A"] = r.finite_A;
    }
    return j;
}

Json to_json(const Lemma23Report& r) {
    Json j;
    j["max_violation_lower"] = json_number(r.max_violation_lower);
    j["max_violation_upper"] = json_number(r.max_violation_upper);
    j["worst_s"] = r.worst_s;
    j["worst_t"] = r.worst_t;
    j["checks"] = r.checks;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const EstReport& r) {
    Json j;
    j["min_margin"] = json_number(r.min_margin);
    j["worst_s"] = r.worst_s;
    j["worst_t"] = r.worst_t;
    j["checks"] = r.checks;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const IterationTrace& r) {
    Json j;
    j["mode"] = r.mode == IterationTrace::Mode::Envelope ? "envelope" : "proof_faithful";
    j["steps"] = r.s_values.size();
    j["converged_to"] = json_number(r.converged_to);
    j["induction_holds"] = r.induction_holds;
    return j;
}

Json to_json(const TheoremBReport& r) {
    Json j;
    j["hypothesis"] = r.hypothesis;
    j["domination"] = to_json(r.domination);
    j["eps_scale"] = r.eps_scale;
    j["eps_used"] = r.eps_used;
    j["s0"] = json_number(r.s0);
    j["envelope_params"] = {{"s0_formula", json_number(r.s0_formula)},
                            {"s0_envelope", json_number(r.s0_envelope)},
                            {"s_infinity", json_number(r.s_infinity)},
                            {"n", r.curve.n}};
    j["max_ratio"] = json_number(r.max_ratio);
    j["worst_s"] = r.worst_s;
    j["pass"] = r.pass;
    j["message"] = r.message;
    return j;
}

Json to_json(const YauBoundReport& r) {
    Json j;
    j["p"] = r.p;
    j["q"] = r.q;
    j["f_in_Lp"] = r.f_in_Lp;
    j["f_Lp_norm"] = json_number(r.f_Lp_norm);
    j["nu_omega"] = r.nu_omega;
    j["C2_skoda"] = json_number(r.C2_skoda);
    j["a"] = r.a;
    j["C_n"] = r.C_n;
    j["C1"] = r.C1;
    j["N"] = r.N;
    j["c_N"] = r.c_N;
    j["C2_prime"] = r.C2_prime;
    j["C2_N"] = r.C2_N;
    j["s0"] = r.s0;
    j["M_bound"] = r.M_bound;
    j["sup_norm_phi"] = json_number(r.sup_norm_phi);
    j["pass"] = r.pass;
    j["message"] = r.message;
    return j;
}

}  // namespace mabench
