// sphtrans: command-line front end for transport runs on the sphere.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sphtrans/config.hpp"
#include "sphtrans/experiment.hpp"
#include "sphtrans/geometry.hpp"
#include "sphtrans/io.hpp"

using namespace sphtrans;

namespace {

enum Exit { kOk = 0, kRunFailed = 1, kBadInput = 2 };

struct ManifestArgs {
    std::string config;
    std::vector<std::string> sets;
    std::string test, method, points_file, dt, output_dir;
    std::optional<long> n, m;

    void attach(CLI::App* cmd) {
        cmd->add_option("-c,--config", config, "key = value configuration file");
        cmd->add_option("-s,--set", sets, "override one setting, key=value (repeatable)");
        cmd->add_option("--test", test, "solid_body | vortex | deformational");
        cmd->add_option("--method", method, "GMLS | MKLS");
        cmd->add_option("-n,--n", n, "number of generated phyllotaxis points");
        cmd->add_option("--points", points_file, "node file instead of generated points");
        cmd->add_option("-m,--degree", m, "harmonic degree");
        cmd->add_option("--dt", dt, "time step, e.g. 0.003 or 3/1000");
        cmd->add_option("-o,--output-dir", output_dir, "output directory");
    }

    // File, then --set, then dedicated flags; the output directory environment
    // variable sits between the file and the flags.
    RunManifest resolve() const {
        Settings settings = config.empty() ? Settings{} : read_settings_file(config);
        Settings flags;
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw ConfigError(kv, "--set expects key=value");
            }
            auto trim = [](std::string s) {
                s.erase(0, s.find_first_not_of(" \t"));
                s.erase(s.find_last_not_of(" \t") + 1);
                return s;
            };
            flags[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
        }
        if (!test.empty()) flags["test"] = test;
        if (!method.empty()) flags["method"] = method;
        if (n) flags["n"] = std::to_string(*n);
        if (!points_file.empty()) flags["points_file"] = points_file;
        if (m) flags["m"] = std::to_string(*m);
        if (!dt.empty()) flags["dt"] = dt;
        if (!output_dir.empty()) flags["output_dir"] = output_dir;

        if (const char* env = std::getenv(kOutputDirEnv); env && *env && !flags.count("output_dir")) {
            settings["output_dir"] = env;
        }
        return manifest_from_settings(merge_settings(settings, flags));
    }
};

void print_failure(const std::string& verb, const std::vector<nlohmann::json>& failures) {
    nlohmann::json summary = {{"status", "failed"}, {"verb", verb}, {"failures", failures}};
    std::cerr << summary.dump() << '\n';
}

int cmd_run(const ManifestArgs& args) {
    const RunManifest mf = args.resolve();
    const RunOutcome r = execute_run(mf, mf.output_dir, std::nullopt, &std::cerr);
    std::cout << report_text(r.report) << report_json(r.report, false) << '\n';
    if (!r.ok()) {
        print_failure("run", {{{"n", r.report.n}, {"error", r.failure.empty() ? "not converged" : r.failure}}});
        return kRunFailed;
    }
    return kOk;
}

int cmd_sweep(const ManifestArgs& args, const std::vector<std::size_t>& n_list_flag) {
    RunManifest mf = args.resolve();
    const std::vector<std::size_t> n_list = n_list_flag.empty() ? mf.n_list : n_list_flag;
    ensure_directory(mf.output_dir);
    const auto rows = run_convergence_sweep(mf, n_list, mf.output_dir, &std::cerr);
    const std::string csv = sweep_csv(rows);
    write_text_file(mf.output_dir + "/sweep.csv", csv);
    std::cout << csv;
    std::vector<nlohmann::json> failures;
    for (const auto& row : rows) {
        if (!row.converged) {
            failures.push_back({{"n", row.n}, {"error", row.failure.empty() ? "not converged" : row.failure}});
        }
    }
    if (!failures.empty()) {
        print_failure("sweep", failures);
        return kRunFailed;
    }
    return kOk;
}

int cmd_gen_points(std::size_t n, const std::string& out, const std::string& format) {
    PointFormat f;
    if (format == "xyz") {
        f = PointFormat::PlainXyz;
    } else if (format == "lonlat") {
        f = PointFormat::PlainLonLat;
    } else {
        throw ConfigError("format", "unknown point format '" + format + "' (valid: xyz, lonlat)");
    }
    const PointSet ps = generate_phyllotaxis(n);
    save_point_set(ps, out, f);
    std::cerr << "wrote " << ps.size() << " points to " << out << '\n';
    return kOk;
}

int cmd_validate(const ManifestArgs& args) {
    std::cout << manifest_to_text(args.resolve());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meshless GMLS/MKLS transport solver on the unit sphere"};
    app.require_subcommand(1);

    ManifestArgs run_args, sweep_args, validate_args;
    auto* run = app.add_subcommand("run", "integrate one configuration to its final time");
    run_args.attach(run);

    auto* sweep = app.add_subcommand("sweep", "convergence study over several point counts");
    sweep_args.attach(sweep);
    std::vector<std::size_t> n_list;
    sweep->add_option("--n-list", n_list, "point counts, e.g. --n-list 400 1600")->delimiter(',');

    auto* gen = app.add_subcommand("gen-points", "write a phyllotaxis point set");
    std::size_t gen_n = 0;
    std::string gen_out, gen_format = "xyz";
    gen->add_option("-n,--n", gen_n, "number of points")->required();
    gen->add_option("-o,--out", gen_out, "output file")->required();
    gen->add_option("--format", gen_format, "xyz | lonlat");

    auto* validate = app.add_subcommand("validate-config", "check a configuration and print it resolved");
    validate_args.attach(validate);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_args);
        if (*sweep) return cmd_sweep(sweep_args, n_list);
        if (*gen) return cmd_gen_points(gen_n, gen_out, gen_format);
        if (*validate) return cmd_validate(validate_args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        print_failure(app.get_subcommands().front()->get_name(), {{{"key", e.key()}, {"error", e.what()}}});
        return kBadInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        print_failure(app.get_subcommands().front()->get_name(), {{{"error", e.what()}}});
        return kBadInput;
    }
    return kOk;
}
