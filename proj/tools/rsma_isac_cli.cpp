#include <iostream>

#include <CLI11.hpp>

#include "cli_app.hpp"

using namespace rsma_isac;
using namespace rsma_isac::cli;

namespace {

void add_common(CLI::App* sub, CommonOptions& o) {
    auto* scen = sub->add_option("--scenario", o.scenario_path, "scenario JSON file");
    sub->add_option("--preset", o.preset, "scenario preset (S1, S2, S3)")
        ->check(CLI::IsMember({"S1", "S2", "S3"}))
        ->excludes(scen);
    sub->add_option("--seed", o.seed, "override the scenario seed");
    sub->add_option("--set", o.overrides, "key=value override (repeatable)")->take_all()->allow_extra_args(false);
    sub->add_option("--out", o.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RSMA/SDMA ISAC link-level simulator"};
    app.require_subcommand(1);

    CommonOptions sweep_opts;
    double step = 0.1;
    std::string family = "both";
    std::string metric = "g0";
    int trials = 0;
    std::string case_filter = "all";
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep the parameter grid and extract the Pareto boundary");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--step", step, "grid step (1/step must be an integer)");
    sweep_cmd->add_option("--family", family, "private-stream precoder")->check(CLI::IsMember({"mrt", "zf", "both"}));
    sweep_cmd->add_option("--metric", metric, "sensing axis")->check(CLI::IsMember({"g0", "snr"}));
    sweep_cmd->add_option("--trials", trials, "Monte Carlo trials per point (snr metric)");
    sweep_cmd->add_option("--case", case_filter, "boundary_params filter: all, sdma, rsma-nosense or a case tag");

    CommonOptions heat_opts;
    std::string params_path;
    int heat_trials = 100;
    std::vector<int> n0s{1, 2, 3};
    double beta_step = 0.5;
    bool subtract = false;
    auto* heat_cmd = app.add_subcommand("radar-heatmap", "range-profile SNR heatmap for a boundary parameter table");
    add_common(heat_cmd, heat_opts);
    heat_cmd->add_option("--params", params_path, "boundary_params.csv from a sweep")->required();
    heat_cmd->add_option("--trials", heat_trials, "Monte Carlo trials per (point, target bin)");
    heat_cmd->add_option("--n0", n0s, "target delay bins")->take_all();
    heat_cmd->add_option("--beta-step", beta_step, "echo amplitude factor per extra delay bin");
    heat_cmd->add_flag("--background-subtraction", subtract, "add clutter and remove it with a second capture");

    CommonOptions point_opts;
    auto* point_cmd = app.add_subcommand("point-eval", "evaluate one parameter point (give t_comms, t_p, alpha_c, alpha_p via --set)");
    add_common(point_cmd, point_opts);

    CommonOptions cal_opts;
    double offset = 0.3;
    double jitter = 0.0;
    auto* cal_cmd = app.add_subcommand("calibrate-demo", "estimate and correct a TX chain phase offset");
    add_common(cal_cmd, cal_opts);
    cal_cmd->add_option("--offset", offset, "phase offset of element 1 in radians");
    cal_cmd->add_option("--jitter", jitter, "per-subcarrier phase jitter std in radians");

    std::string run_path;
    std::string repro_out = "reproduce";
    auto* repro_cmd = app.add_subcommand("reproduce", "re-execute a run.json and compare output digests");
    repro_cmd->add_option("--run", run_path, "run.json written by an earlier command")->required();
    repro_cmd->add_option("--out", repro_out, "directory for the regenerated outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("config", e.what());
        return ConfigFailure;
    }

    return guarded([&]() -> int {
        if (*sweep_cmd) {
            const auto in = resolve_inputs(sweep_opts, false);
            json run{{"command", "sweep"},      {"scenario", in.scenario}, {"step", step},
                     {"family", family},        {"metric", metric},        {"trials", trials},
                     {"case", case_filter}};
            return run_and_record(run, sweep_opts.out_dir);
        }
        if (*heat_cmd) {
            const auto in = resolve_inputs(heat_opts, false);
            if (heat_trials < 0) throw ConfigError("--trials must be >= 0");
            if (n0s.empty()) throw ConfigError("--n0 needs at least one bin");
            json run{{"command", "radar-heatmap"},
                     {"scenario", in.scenario},
                     {"params_csv", read_file(params_path)},
                     {"trials", heat_trials},
                     {"n0", n0s},
                     {"beta_step", beta_step},
                     {"background_subtraction", subtract}};
            return run_and_record(run, heat_opts.out_dir);
        }
        if (*point_cmd) {
            const auto in = resolve_inputs(point_opts, true);
            point_from_json(in.point_overrides);  // validate before recording
            json run{{"command", "point-eval"}, {"scenario", in.scenario}, {"point", in.point_overrides}};
            return run_and_record(run, point_opts.out_dir);
        }
        if (*cal_cmd) {
            const auto in = resolve_inputs(cal_opts, false);
            json run{{"command", "calibrate-demo"},
                     {"scenario", in.scenario},
                     {"offset_rad", offset},
                     {"jitter_rad", jitter}};
            return run_and_record(run, cal_opts.out_dir);
        }
        return reproduce(run_path, repro_out, std::cout);
    });
}
