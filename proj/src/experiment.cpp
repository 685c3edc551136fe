#include "snwave/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "snwave/csv.hpp"
#include "snwave/errors.hpp"

namespace snwave {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
    throw ConfigError(key + ": " + what + " (got '" + value + "')");
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end || value.empty()) bad_value(key, value, "expected a number");
    return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& value) {
    Int out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end || value.empty()) bad_value(key, value, "expected an integer");
    return out;
}

const char* segment_name(SegmentMode m) {
    return m == SegmentMode::DisjointHalves ? "disjoint" : "overlap";
}

const char* flux_name(FluxMethod f) {
    return f == FluxMethod::ThreePoint ? "three-point" : "variational";
}

std::vector<double> constant_control(double v, int M) {
    return std::vector<double>(static_cast<std::size_t>(M), v);
}

double last_or_nan(const IterationLog& log, std::size_t back, double IterationRecord::*field) {
    if (log.size() < back + 1) return std::numeric_limits<double>::quiet_NaN();
    return log[log.size() - 1 - back].*field;
}

std::vector<double> run_columns(const RunOutcome& o) {
    const auto& log = o.result.log;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {
        o.T,
        static_cast<double>(o.result.iterations),
        o.result.converged ? 1.0 : 0.0,
        last_or_nan(log, 0, &IterationRecord::stop_qty),
        last_or_nan(log, 0, &IterationRecord::du_l2),
        last_or_nan(log, 0, &IterationRecord::dw_l2),
        last_or_nan(log, 1, &IterationRecord::du_to_final),
        last_or_nan(log, 1, &IterationRecord::dw_to_final),
        o.J2,
        o.nash ? o.nash->follower_residual : nan,
        o.nash ? o.nash->max_relative_discrepancy : nan,
    };
}

const std::vector<std::string> kRunColumns = {
    "T",        "iterations",       "converged",         "stop_qty",
    "du_last",  "dw_last",          "du_prev_to_final",  "dw_prev_to_final",
    "J2",       "follower_residual", "nash_fd_discrepancy"};

// Sweep entries are independent; run them concurrently and keep row order.
Table sweep(std::string name, std::string param, const std::vector<RunConfig>& configs,
            const std::vector<double>& params, const std::vector<std::string>& keys) {
    std::vector<std::future<RunOutcome>> jobs;
    jobs.reserve(configs.size());
    for (const auto& c : configs) {
        jobs.push_back(std::async(std::launch::async, [c] { return run_single(c, false); }));
    }
    Table t;
    t.name = std::move(name);
    t.columns.push_back(std::move(param));
    t.columns.insert(t.columns.end(), kRunColumns.begin(), kRunColumns.end());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        TableRow row{keys[i], {params[i]}};
        const auto cols = run_columns(jobs[i].get());
        row.values.insert(row.values.end(), cols.begin(), cols.end());
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string multiple_key(int i) { return i == 1 ? "Tc" : std::to_string(i) + "Tc"; }

}  // namespace

double RunConfig::horizon() const {
    if (T) return *T;
    return T_multiple * control_time(k);
}

void RunConfig::validate() const {
    if (!(k >= 0.0 && k < 1.0)) throw ConfigError("k: must lie in [0, 1)");
    if (T) {
        if (!(*T > 0.0) || !std::isfinite(*T)) throw ConfigError("T: must be positive");
    } else {
        if (k == 0.0) throw ConfigError("T: required when k = 0 (T_c is undefined)");
        if (!(T_multiple > 0.0) || !std::isfinite(T_multiple)) {
            throw ConfigError("T_multiple: must be positive");
        }
    }
    if (N < 2) throw ConfigError("N: need at least 2 cells");
    if (M < 2) throw ConfigError("M: need at least 2 time steps");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma: must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon: must be positive");
    if (max_iter < 1) throw ConfigError("max_iter: must be at least 1");
    if (!std::isfinite(u2)) throw ConfigError("u2: must be finite");
    if (!std::isfinite(phi_f0)) throw ConfigError("phi_f0: must be finite");
    if (!std::isfinite(phi_f1)) throw ConfigError("phi_f1: must be finite");
    if (!std::isfinite(w1_init)) throw ConfigError("w1_init: must be finite");
    if (!std::isfinite(w2_init)) throw ConfigError("w2_init: must be finite");
    if (nash_directions < 0) throw ConfigError("nash_directions: must be non-negative");
    if (output_dir.empty()) throw ConfigError("output_dir: must not be empty");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "k",      "T_multiple", "T",       "N",       "M",
        "sigma",  "epsilon",    "max_iter", "u2",     "segment_mode",
        "phi_f0", "phi_f1",     "w1_init", "w2_init", "flux",
        "nash_directions", "seed", "output_dir"};
    return keys;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "k") c.k = parse_double(key, v);
    else if (key == "T_multiple") { c.T_multiple = parse_double(key, v); c.T.reset(); }
    else if (key == "T") c.T = parse_double(key, v);
    else if (key == "N") c.N = parse_int<int>(key, v);
    else if (key == "M") c.M = parse_int<int>(key, v);
    else if (key == "sigma") c.sigma = parse_double(key, v);
    else if (key == "epsilon") c.epsilon = parse_double(key, v);
    else if (key == "max_iter") c.max_iter = parse_int<int>(key, v);
    else if (key == "u2") c.u2 = parse_double(key, v);
    else if (key == "phi_f0") c.phi_f0 = parse_double(key, v);
    else if (key == "phi_f1") c.phi_f1 = parse_double(key, v);
    else if (key == "w1_init") c.w1_init = parse_double(key, v);
    else if (key == "w2_init") c.w2_init = parse_double(key, v);
    else if (key == "nash_directions") c.nash_directions = parse_int<int>(key, v);
    else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, v);
    else if (key == "output_dir") {
        if (v.empty()) bad_value(key, v, "expected a path");
        c.output_dir = v;
    } else if (key == "segment_mode") {
        if (v == "disjoint") c.segment_mode = SegmentMode::DisjointHalves;
        else if (v == "overlap") c.segment_mode = SegmentMode::AdditiveOverlap;
        else bad_value(key, v, "expected disjoint or overlap");
    } else if (key == "flux") {
        if (v == "three-point") c.flux = FluxMethod::ThreePoint;
        else if (v == "variational") c.flux = FluxMethod::Variational;
        else bad_value(key, v, "expected three-point or variational");
    } else {
        throw ConfigError(key + ": unknown key");
    }
}

RunConfig parse_config(std::istream& in, RunConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    return parse_config(in, std::move(base));
}

std::string dump_config(const RunConfig& c) {
    std::ostringstream out;
    out << "k = " << sci(c.k) << '\n';
    if (c.T) out << "T = " << sci(*c.T) << '\n';
    else out << "T_multiple = " << sci(c.T_multiple) << '\n';
    out << "N = " << c.N << '\n'
        << "M = " << c.M << '\n'
        << "sigma = " << sci(c.sigma) << '\n'
        << "epsilon = " << sci(c.epsilon) << '\n'
        << "max_iter = " << c.max_iter << '\n'
        << "u2 = " << sci(c.u2) << '\n'
        << "segment_mode = " << segment_name(c.segment_mode) << '\n'
        << "phi_f0 = " << sci(c.phi_f0) << '\n'
        << "phi_f1 = " << sci(c.phi_f1) << '\n'
        << "w1_init = " << sci(c.w1_init) << '\n'
        << "w2_init = " << sci(c.w2_init) << '\n'
        << "flux = " << flux_name(c.flux) << '\n'
        << "nash_directions = " << c.nash_directions << '\n'
        << "seed = " << c.seed << '\n'
        << "output_dir = " << c.output_dir << '\n';
    return out.str();
}

SNConfig to_sn_config(const RunConfig& c) {
    c.validate();
    SNConfig s;
    s.sigma = c.sigma;
    s.epsilon = c.epsilon;
    s.max_iter = c.max_iter;
    s.u2 = c.u2;
    s.segment_mode = c.segment_mode;
    s.flux_method = c.flux;
    const double len = alpha(MovingDomain(c.k, c.horizon()), c.horizon());
    if (c.phi_f0 != 0.0) {
        s.phi_terminal0 = [a = c.phi_f0, len](double x) {
            return a * std::sin(std::numbers::pi * x / len);
        };
    }
    if (c.phi_f1 != 0.0) {
        s.phi_terminal1 = [a = c.phi_f1, len](double x) {
            return a * std::sin(std::numbers::pi * x / len);
        };
    }
    if (c.w1_init != 0.0) s.initial_w1 = constant_control(c.w1_init, c.M);
    if (c.w2_init != 0.0) s.initial_w2 = constant_control(c.w2_init, c.M);
    return s;
}

RunOutcome run_single(const RunConfig& config, bool write_artifacts) {
    const SNConfig sn = to_sn_config(config);
    RunOutcome o;
    o.config = config;
    o.T = config.horizon();
    const Discretization disc(MovingDomain(config.k, o.T), config.M, config.N);
    o.result = fixed_point_solve(sn, disc);
    o.J2 = evaluate_J2(o.result.u, o.result.w2, sn, disc);
    if (config.nash_directions > 0) {
        o.nash = nash_gradient_check(o.result.w1, o.result.w2, sn, disc, config.nash_directions,
                                     config.seed);
    }

    std::ostringstream s;
    s << "k=" << config.k << " T=" << sci(o.T) << " N=" << config.N << " M=" << config.M
      << " sigma=" << sci(config.sigma) << " converged=" << (o.result.converged ? "yes" : "no")
      << " iterations=" << o.result.iterations
      << " stop_qty=" << sci(o.result.log.empty() ? 0.0 : o.result.log.back().stop_qty)
      << " J=" << sci(evaluate_J(o.result.w1, disc.grid())) << " J2=" << sci(o.J2);
    if (o.nash) {
        s << " follower_residual=" << sci(o.nash->follower_residual)
          << " nash_fd_discrepancy=" << sci(o.nash->max_relative_discrepancy);
    }
    o.summary = s.str();

    if (write_artifacts) {
        const std::filesystem::path dir(config.output_dir);
        std::filesystem::create_directories(dir);
        {
            std::ofstream out(dir / "iterations.csv");
            write_iteration_log_csv(out, o.result.log);
        }
        {
            std::ofstream out(dir / "final_state.csv");
            out << "x,u\n";
            const auto& f = o.result.u[config.M];
            for (std::size_t j = 0; j < f.values.size(); ++j) {
                out << sci(f.mesh.nodes[j]) << ',' << sci(f.values[j]) << '\n';
            }
        }
        {
            std::ofstream out(dir / "controls.csv");
            out << "m,t,w1,w2\n";
            const TimeGrid& g = disc.grid();
            for (int m = 0; m < g.M; ++m) {
                const auto i = static_cast<std::size_t>(m);
                out << m << ',' << sci(g.time(m)) << ',' << sci(o.result.w1.values[i]) << ','
                    << sci(o.result.w2.values[i]) << '\n';
            }
        }
        std::ofstream(dir / "summary.txt") << o.summary << '\n';
    }
    return o;
}

double Table::value(std::size_t row, const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] == name) return rows.at(row).values.at(c);
    }
    throw std::out_of_range("no column " + name + " in table " + this->name);
}

std::vector<double> Table::column(const std::string& name) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(value(r, name));
    return out;
}

void Table::write_csv(std::ostream& out) const {
    out << "key";
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    for (const auto& r : rows) {
        out << r.key;
        for (double v : r.values) out << ',' << sci(v);
        out << '\n';
    }
}

Table run_table_T(const RunConfig& base) {
    std::vector<RunConfig> configs;
    std::vector<double> params;
    std::vector<std::string> keys;
    for (int i = 1; i <= 10; ++i) {
        RunConfig c = base;
        c.T.reset();
        c.T_multiple = i;
        configs.push_back(c);
        params.push_back(i);
        keys.push_back(multiple_key(i));
    }
    return sweep("table-T", "T_multiple", configs, params, keys);
}

Table run_table_sigma(const RunConfig& base) {
    std::vector<RunConfig> configs;
    std::vector<double> params;
    std::vector<std::string> keys;
    for (int e = 1; e <= 10; ++e) {
        RunConfig c = base;
        c.sigma = std::pow(10.0, e);
        configs.push_back(c);
        params.push_back(c.sigma);
        keys.push_back("1e" + std::to_string(e));
    }
    return sweep("table-sigma", "sigma", configs, params, keys);
}

double mesh_edge_for(double T) { return T / 96.0; }

Table run_table_mesh(const RunConfig& base) {
    Table t;
    t.name = "table-mesh";
    t.columns = {"T_multiple", "T", "vertices", "triangles", "border_length", "exact_perimeter"};
    const double tc = control_time(base.k);
    for (int i = 1; i <= 10; ++i) {
        const MovingDomain dom(base.k, i * tc);
        const auto st = trapezoid_stats(dom, mesh_edge_for(dom.T));
        t.rows.push_back({multiple_key(i),
                          {static_cast<double>(i), dom.T, static_cast<double>(st.n_vertices),
                           static_cast<double>(st.n_triangles), st.border_length,
                           trapezoid_perimeter(dom)}});
    }
    return t;
}

Table run_table_k(const RunConfig& base, const std::vector<double>& ks) {
    std::vector<RunConfig> configs;
    std::vector<double> params;
    std::vector<std::string> keys;
    for (double k : ks) {
        RunConfig c = base;
        c.k = k;
        c.T.reset();
        c.T_multiple = 1.0;
        configs.push_back(c);
        params.push_back(k);
        std::ostringstream key;
        key << "k=" << k;
        keys.push_back(key.str());
    }
    return sweep("table-k", "k", configs, params, keys);
}

}  // namespace snwave
