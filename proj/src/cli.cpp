#include "fitchoice/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "fitchoice/analysis.hpp"
#include "fitchoice/ensemble.hpp"
#include "fitchoice/io.hpp"
#include "fitchoice/rng.hpp"
#include "fitchoice/simulation.hpp"

namespace fitchoice::cli {

namespace {

struct Flags {
    std::optional<std::string> config;
    io::RunConfig values;
    std::optional<std::string> format;
};

void add_model_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("--config", f.config, "JSON config file; flags override its values");
    cmd.add_option("--beta", f.values.beta, "weight offset beta > -1");
    cmd.add_option("--d", f.values.d, "sample size d >= 2");
}

void add_run_flags(CLI::App& cmd, Flags& f) {
    add_model_flags(cmd, f);
    cmd.add_option("--lambda", f.values.lambda, "high fitness value lambda >= 1");
    cmd.add_option("--p-lambda", f.values.p_lambda, "probability of fitness lambda, in (0,1)");
    cmd.add_option("--steps", f.values.steps, "final edge count");
    cmd.add_option("--seed", f.values.seed, "master seed");
    cmd.add_option("--schedule-ratio", f.values.schedule_ratio, "geometric checkpoint ratio > 1");
    cmd.add_option("--out", f.values.out, "output directory");
    cmd.add_option("--format", f.format, "comma-separated subset of jsonl,csv");
}

io::RunConfig resolve(const Flags& f) {
    io::RunConfig cfg;
    if (f.config) {
        cfg = io::load_config(*f.config);
    }
    io::RunConfig flags = f.values;
    if (f.format) {
        flags.formats = io::parse_formats(*f.format);
    }
    cfg.override_with(flags);
    return cfg;
}

int cmd_solve_xstar(const Flags& f, std::ostream& out) {
    const auto cfg = resolve(f);
    if (!cfg.beta || !cfg.d) {
        throw ValidationError("solve-xstar needs --beta and --d");
    }
    // lambda and p_lambda do not enter x*; validate beta and d alone.
    const ModelParams params(*cfg.beta, *cfg.d, 1.0, 0.5);
    if (const auto x = solve_xstar(params)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12f", *x);
        out << buf << '\n';
    } else {
        out << "none: d <= 2+beta\n";
    }
    return kExitOk;
}

int cmd_run(const Flags& f, std::ostream& out) {
    auto cfg = resolve(f);
    cfg.replicas = 1;
    cfg.parallelism = 1;
    const EnsembleSpec spec = cfg.ensemble_spec();
    const auto stream = run_replica(spec, 0);
    if (cfg.out) {
        std::filesystem::create_directories(*cfg.out);
        std::ofstream os(std::filesystem::path(*cfg.out) / "trajectory.jsonl", std::ios::binary);
        if (!os) {
            throw std::runtime_error("cannot write to " + *cfg.out);
        }
        io::write_jsonl(os, stream);
    } else {
        io::write_jsonl(out, stream);
    }
    return kExitOk;
}

int cmd_ensemble(const Flags& f, std::ostream& out) {
    const auto cfg = resolve(f);
    const EnsembleSpec spec = cfg.ensemble_spec();
    if (!cfg.out) {
        throw ValidationError("ensemble needs --out");
    }
    const auto formats = cfg.formats.value_or(std::set{io::Format::Jsonl, io::Format::Csv});
    const auto result = run_ensemble(spec);
    io::write_ensemble_output(*cfg.out, spec, result, formats);
    out << io::report_to_json(result.report, result.replicas).dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Preferential attachment with fitness-dependent choice: simulation and analysis",
                 "fitchoice"};
    app.require_subcommand(1);

    Flags flags;
    auto* run = app.add_subcommand("run", "simulate one trajectory, JSONL checkpoints");
    add_run_flags(*run, flags);

    auto* ens = app.add_subcommand("ensemble", "simulate seeded replicas, write stats and report");
    add_run_flags(*ens, flags);
    ens->add_option("--replicas", flags.values.replicas, "number of replicas");
    ens->add_option("--parallelism", flags.values.parallelism,
                    "worker threads (default FITCHOICE_THREADS or all cores)");

    auto* xstar = app.add_subcommand("solve-xstar", "print the linear-regime constant x*");
    add_model_flags(*xstar, flags);

    std::string analyze_dir;
    auto* analyze = app.add_subcommand("analyze", "recompute the report of an ensemble directory");
    analyze->add_option("dir", analyze_dir, "ensemble output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    try {
        if (*run) return cmd_run(flags, out);
        if (*ens) return cmd_ensemble(flags, out);
        if (*xstar) return cmd_solve_xstar(flags, out);
        if (*analyze) {
            out << io::analyze_directory(analyze_dir).dump(2) << '\n';
            return kExitOk;
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitInvalid;
}

}  // namespace fitchoice::cli
