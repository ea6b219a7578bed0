#ifndef SPHTRANS_CONFIG_HPP
#define SPHTRANS_CONFIG_HPP

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sphtrans/geometry.hpp"
#include "sphtrans/io.hpp"
#include "sphtrans/solver.hpp"
#include "sphtrans/testcases.hpp"

namespace sphtrans {

/// Raw `key = value` pairs in file order semantics: later sources override
/// earlier ones through merge_settings.
using Settings = std::map<std::string, std::string>;

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
/// Throws FormatError for lines without `=` or with an empty key, and
/// ConfigError for a key given twice.
Settings parse_settings(std::istream& in);
Settings read_settings_file(const std::string& path);

/// `overrides` wins on every key it holds.
Settings merge_settings(Settings base, const Settings& overrides);

/// A fully validated description of one run (or one sweep template).
struct RunManifest {
    FlowKind test = FlowKind::Vortex;
    std::optional<double> final_time;  // defaults to the test's own T
    double bell_radius = 0.5;

    // Point set: generated phyllotaxis of size n, or a file.
    std::size_t n = 0;
    std::string points_file;
    PointFormat points_format = PointFormat::PlainXyz;

    SolverConfig solver;

    /// Optional evaluation set for the error functional; the solution is carried
    /// there through the active method's shape functions.
    std::string error_points_file;
    PointFormat error_points_format = PointFormat::PlainXyz;

    std::vector<double> snapshot_times;
    std::vector<SnapshotFormat> snapshot_formats{SnapshotFormat::Csv};
    std::string output_dir = "out";
    bool dump_matrices = false;
    /// Sweep sizes; empty for single runs.
    std::vector<std::size_t> n_list;

    TestCase test_case() const;
    /// Generated or loaded nodes; `n_override` replaces n for generated sets.
    PointSet point_set(std::optional<std::size_t> n_override = std::nullopt) const;
    /// Step indices of snapshot_times; throws ConfigError for times off the dt grid.
    std::vector<int> snapshot_steps() const;
};

/// Every accepted key, in documentation order.
const std::vector<std::string>& manifest_keys();

/// Validates and applies defaults. Throws ConfigError naming the key for an
/// unknown key, an unparsable or out-of-range value, or a dt that does not
/// divide the final time.
RunManifest manifest_from_settings(const Settings& settings);

/// Resolved manifest as `key = value` lines that parse back to the same manifest.
std::string manifest_to_text(const RunManifest& manifest);

/// Environment variable that, when set and non-empty, replaces output_dir.
inline constexpr const char* kOutputDirEnv = "SPHTRANS_OUTPUT_DIR";

}  // namespace sphtrans

#endif  // SPHTRANS_CONFIG_HPP
