#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "snwave/stackelberg.hpp"

namespace snwave {

/// Flat run configuration. Every field has a key of the same name in config
/// files and --set overrides.
struct RunConfig {
    double k = 0.25;
    double T_multiple = 1.0;    ///< T = T_multiple * T_c(k) unless T is set
    std::optional<double> T;    ///< absolute horizon, required when k = 0
    int N = 100;
    int M = 100;
    double sigma = 1e2;
    double epsilon = 1e-5;
    int max_iter = 100;
    double u2 = 10.0;
    SegmentMode segment_mode = SegmentMode::DisjointHalves;
    double phi_f0 = 0.0;        ///< f0(x) = phi_f0 sin(pi x / alpha(T))
    double phi_f1 = 0.0;        ///< f1(x) = phi_f1 sin(pi x / alpha(T))
    double w1_init = 0.0;       ///< constant initial leader control
    double w2_init = 0.0;       ///< constant initial follower control
    FluxMethod flux = FluxMethod::ThreePoint;
    int nash_directions = 5;    ///< 0 disables the Nash check
    std::uint64_t seed = 20210101;
    std::string output_dir = ".";

    double horizon() const;
    /// Throws ConfigError naming the first offending key.
    void validate() const;
};

/// Keys accepted by apply_setting, in documentation order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value. Unknown keys and malformed values
/// throw ConfigError naming the key.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses "key = value" lines ('#' starts a comment) on top of base.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

/// key=value listing of every field, loadable by parse_config.
std::string dump_config(const RunConfig& config);

SNConfig to_sn_config(const RunConfig& config);

struct RunOutcome {
    RunConfig config;
    double T = 0.0;
    SNResult result;
    std::optional<NashCheck> nash;
    double J2 = 0.0;
    std::string summary;
};

/// Runs the fixed point. With write_artifacts, writes iterations.csv,
/// final_state.csv and controls.csv into config.output_dir.
RunOutcome run_single(const RunConfig& config, bool write_artifacts = true);

struct TableRow {
    std::string key;
    std::vector<double> values;
};

struct Table {
    std::string name;
    std::vector<std::string> columns;  ///< numeric columns, after "key"
    std::vector<TableRow> rows;

    /// Throws std::out_of_range for an unknown column or row.
    double value(std::size_t row, const std::string& column) const;
    std::vector<double> column(const std::string& column) const;
    void write_csv(std::ostream& out) const;
};

/// T = 1..10 x T_c. Columns: T_multiple, T, iterations, converged, stop_qty,
/// du_last, dw_last, du_prev_to_final, dw_prev_to_final, J2,
/// follower_residual, nash_fd_discrepancy.
Table run_table_T(const RunConfig& base);

/// sigma = 1e1..1e10 at the base horizon. Same columns as run_table_T with
/// sigma in place of T_multiple.
Table run_table_sigma(const RunConfig& base);

/// Space-time trapezoid statistics for T = 1..10 x T_c at edge T/96.
/// Columns: T_multiple, T, vertices, triangles, border_length, exact_perimeter.
Table run_table_mesh(const RunConfig& base);

/// One run per k at T = T_c(k). Same columns as run_table_T with k in
/// place of T_multiple.
Table run_table_k(const RunConfig& base, const std::vector<double>& ks);

/// Target edge length used by run_table_mesh.
double mesh_edge_for(double T);

}  // namespace snwave
