#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "snwave/errors.hpp"
#include "snwave/experiment.hpp"
#include "snwave/verification.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kDivergence = 3;

const char* kColumnsHelp = R"(CSV outputs (full-precision scientific notation, header row first):
  run          iterations.csv   n,stop_qty,du_L2,dw_L2,J,J2,du_to_final,dw_to_final
               final_state.csv  x,u            (u(x,T) on the final mesh)
               controls.csv     m,t,w1,w2      (one value per interval [t_m, t_m+1))
               summary.txt      the summary line printed to stdout
  table-T      table_T.csv      key,T_multiple,T,iterations,converged,stop_qty,du_last,
                                dw_last,du_prev_to_final,dw_prev_to_final,J2,
                                follower_residual,nash_fd_discrepancy
  table-sigma  table_sigma.csv  key,sigma,... (same columns as table-T after the first)
  table-k      table_k.csv      key,k,...     (same columns as table-T after the first)
  table-mesh   table_mesh.csv   key,T_multiple,T,vertices,triangles,border_length,exact_perimeter
du_L2 and dw_L2 are successive-iterate distances; *_to_final are distances to the
converged iterate. Exit codes: 0 ok, 1 verify check failed, 2 usage, 3 divergence.)";

// Options shared by every subcommand; values stay textual until apply_setting.
struct ConfigOptions {
    std::string file;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;

    void attach(CLI::App* app) {
        app->add_option("--config", file, "key = value config file")->check(CLI::ExistingFile);
        app->add_option("--set", sets, "override key=value (repeatable)");
        for (const auto& key : snwave::config_keys()) {
            app->add_option_function<std::string>(
                "--" + key, [this, key](const std::string& v) { flags[key] = v; },
                "RunConfig key " + key);
        }
    }

    snwave::RunConfig resolve() const {
        snwave::RunConfig c;
        if (!file.empty()) c = snwave::load_config_file(file, c);
        for (const auto& [k, v] : flags) snwave::apply_setting(c, k, v);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw snwave::ConfigError(s + ": expected key=value");
            snwave::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
        }
        c.validate();
        return c;
    }
};

void emit(const snwave::Table& t, const snwave::RunConfig& c, const std::string& file) {
    const std::filesystem::path dir(c.output_dir);
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / file);
    t.write_csv(out);
    t.write_csv(std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stackelberg-Nash boundary control of the wave equation on a moving interval"};
    app.footer(kColumnsHelp);
    app.require_subcommand(1);

    ConfigOptions run_opts, t_opts, sigma_opts, mesh_opts, k_opts;
    auto* run = app.add_subcommand("run", "single fixed-point run with CSV artifacts");
    run_opts.attach(run);
    auto* table_t = app.add_subcommand("table-T", "sweep T = 1..10 x T_c");
    t_opts.attach(table_t);
    auto* table_sigma = app.add_subcommand("table-sigma", "sweep sigma = 1e1..1e10");
    sigma_opts.attach(table_sigma);
    auto* table_mesh = app.add_subcommand("table-mesh", "space-time trapezoid mesh statistics");
    mesh_opts.attach(table_mesh);
    auto* table_k = app.add_subcommand("table-k", "sweep the expansion rate k at T = T_c(k)");
    k_opts.attach(table_k);
    std::vector<double> ks = {0.05, 0.1, 0.25, 0.4, 0.5};
    table_k->add_option("--ks", ks, "expansion rates")->delimiter(',');
    auto* verify = app.add_subcommand("verify", "run the invariant and oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (run->parsed()) {
            const auto c = run_opts.resolve();
            const auto o = snwave::run_single(c, true);
            std::cout << o.summary << '\n';
        } else if (table_t->parsed()) {
            const auto c = t_opts.resolve();
            emit(snwave::run_table_T(c), c, "table_T.csv");
        } else if (table_sigma->parsed()) {
            const auto c = sigma_opts.resolve();
            emit(snwave::run_table_sigma(c), c, "table_sigma.csv");
        } else if (table_mesh->parsed()) {
            const auto c = mesh_opts.resolve();
            emit(snwave::run_table_mesh(c), c, "table_mesh.csv");
        } else if (table_k->parsed()) {
            const auto c = k_opts.resolve();
            emit(snwave::run_table_k(c, ks), c, "table_k.csv");
        } else if (verify->parsed()) {
            const auto checks = snwave::verify::run_invariant_suite();
            snwave::verify::print_checks(std::cout, checks);
            for (const auto& ch : checks) {
                if (!ch.pass) return kCheckFailed;
            }
        }
    } catch (const snwave::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const snwave::DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const snwave::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return kDivergence;
    }
    return kOk;
}
