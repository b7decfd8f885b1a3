#pragma once

// Run configuration, CSV/JSON output and the report serializers shared by the
// command-line tool.

#include "mabench/bounds.hpp"
#include "mabench/domination.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mabench {

inline constexpr const char* kLibraryVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// Flat settings keyed "section.key". Every key has a default; unknown keys
/// are rejected.
class RunConfig {
public:
    RunConfig();

    /// Reads `key = value` lines under `[section]` headers; `#` and `;`
    /// start comments.
    static RunConfig from_text(const std::string& text);
    static RunConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    const std::string& get(const std::string& key) const;
    double number(const std::string& key) const;
    int integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    const std::map<std::string, std::string>& values() const { return values_; }

    /// Throws DataError unless n >= 1, referenced files exist and numbers parse.
    void validate() const;

    /// Sorted `key=value` lines without the output.* keys: the hash input.
    std::string canonical() const;
    /// FNV-1a of canonical(), 16 hex digits.
    std::string hash() const;

private:
    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// 17 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

/// Columns of equal length under a header row.
std::string csv_table(const std::vector<std::string>& header, const std::vector<Vector>& columns);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Finite values as numbers, the rest as the strings of format_double.
Json json_number(double x);

/// {"command", "version", "config_hash", "config"}.
Json report_header(const RunConfig& config, const std::string& command);

RadialGeometry geometry_from(const RunConfig& config);

struct ResolvedMeasure {
    std::string name;
    RadialMeasure measure;
    std::optional<WeightEps> eps;  // the gallery's own weight, if any
};

/// From exactly one of measure.gallery, measure.name, measure.csv and
/// measure.density.
ResolvedMeasure resolve_measure(const RunConfig& config, const RadialGeometry& geometry);

/// CSV columns t, M (ball masses) sampled increasingly. Outside the samples
/// the mass decays like omega^n towards the pole and approaches 1 like it
/// towards the antipode.
RadialMeasure measure_from_csv(const RadialGeometry& geometry, const std::string& path);

/// measure.density: "const" or "logpow(beta)".
RadialMeasure density_measure(const RadialGeometry& geometry, const std::string& spec);

Json to_json(const DominationReport& r);
Json to_json(const OrliczResult& r);
Json to_json(const BridgeReport& r);
Json to_json(const Lemma23Report& r);
Json to_json(const EstReport& r);
Json to_json(const IterationTrace& r);
Json to_json(const TheoremBReport& r);
Json to_json(const YauBoundReport& r);

}  // namespace mabench
