// cmpc: run, check and summarize closed-loop experiments.
//
// Exit codes: 0 success, 1 validation failure, 2 runtime abort.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "cmpc/export.hpp"
#include "cmpc/metrics.hpp"
#include "cmpc/plot.hpp"
#include "cmpc/simulation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kAbort = 2;

struct RunArgs {
  std::string scenario;
  std::string out;
  std::string format = "csv";
  bool plots = false;
  int steps = -1;
  double epsilon = 0.05;
};

int run(const RunArgs& args) {
  cmpc::Scenario s = cmpc::load_scenario(args.scenario);
  if (args.steps >= 0) s.sim_steps = args.steps;
  const std::string out = args.out.empty() ? s.out_dir : args.out;

  const cmpc::RunLog log = cmpc::run_closed_loop(s);
  if (args.format == "json") {
    cmpc::write_json(log, std::filesystem::path(out) / "run.json");
  } else {
    cmpc::write_csv(log, out);
  }
  if (args.plots) cmpc::write_plots(log, out);

  if (!log.steps.empty()) std::cout << cmpc::format_report(cmpc::metrics(log, args.epsilon));
  std::cout << "output written to " << out << '\n';
  if (log.aborted()) {
    std::cerr << "run aborted at " << *log.abort_reason << '\n';
    return kAbort;
  }
  return kOk;
}

int check(const std::string& path) {
  const cmpc::Scenario s = cmpc::load_scenario(path);
  const cmpc::UnicycleModel plant(s.dt);
  const auto x0 = cmpc::initial_measurements(s);
  const auto nominal = cmpc::zero_input_rollout(plant, std::span<const cmpc::Vec>(x0), s.control.config.horizon);
  const auto margins = cmpc::feasibility_margins(plant, nominal, s.control);

  std::cout << "scenario " << path << " is valid: " << s.n_agents() << " agents, " << s.control.obstacles.size()
            << " obstacles, T_p = " << s.control.config.horizon << '\n';
  std::cout << "input authority along the zero-input rollout (U_min >= F_max per step)\n";
  std::cout << "agent  constraint        steps  flagged  worst U_min-F_max  at step\n";

  std::map<std::pair<cmpc::Index, cmpc::Index>, std::vector<const cmpc::FeasibilityMargin*>> groups;
  for (const auto& m : margins) groups[{m.agent, m.instance}].push_back(&m);
  std::size_t flagged_total = 0;
  for (const auto& [key, rows] : groups) {
    const auto instances = cmpc::barrier_instances(s.control, key.first);
    const auto& inst = instances[static_cast<std::size_t>(key.second)];
    const std::string name = inst.kind == cmpc::BarrierInstance::Kind::Obstacle
                                 ? "obstacle " + std::to_string(inst.index + 1)
                                 : "neighbor " + std::to_string(inst.index + 1);
    std::size_t flagged = 0;
    const cmpc::FeasibilityMargin* worst = rows.front();
    for (const auto* m : rows) {
      if (!m->feasible()) ++flagged;
      if (m->u_min - m->f_max < worst->u_min - worst->f_max) worst = m;
    }
    flagged_total += flagged;
    char line[128];
    std::snprintf(line, sizeof line, "%5ld  %-16s %6zu  %7zu  %17.6g  %7ld\n", static_cast<long>(key.first + 1),
                  name.c_str(), rows.size(), flagged, worst->u_min - worst->f_max, static_cast<long>(worst->step));
    std::cout << line;
  }
  std::cout << flagged_total << " of " << margins.size() << " steps flagged\n";
  return kOk;
}

int show_metrics(const std::string& path, double epsilon, bool as_json) {
  const cmpc::RunLog log = cmpc::read_run_log(path);
  const cmpc::RunMetrics m = cmpc::metrics(log, epsilon);
  if (as_json) {
    std::cout << cmpc::to_json(m).dump(2) << '\n';
  } else {
    std::cout << cmpc::format_report(m);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe output consensus of networked agents with SQP-based convex MPC"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "simulate a scenario and write the run log");
  run_cmd->add_option("--scenario", run_args.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run_args.out, "output directory (default: sim.out_dir)");
  run_cmd->add_option("--format", run_args.format, "log format")->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_flag("--plots", run_args.plots, "also write SVG figures");
  run_cmd->add_option("--steps", run_args.steps, "override sim.steps")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--epsilon", run_args.epsilon, "consensus threshold for the printed summary");

  std::string check_path;
  auto* check_cmd = app.add_subcommand("check", "validate a scenario and print feasibility margins");
  check_cmd->add_option("--scenario", check_path, "scenario JSON file")->required()->check(CLI::ExistingFile);

  std::string log_path;
  double epsilon = 0.05;
  bool as_json = false;
  auto* metrics_cmd = app.add_subcommand("metrics", "summarize a JSON run log");
  metrics_cmd->add_option("--log", log_path, "run.json written by run --format json")->required();
  metrics_cmd->add_option("--epsilon", epsilon, "consensus threshold")->required()->check(CLI::PositiveNumber);
  metrics_cmd->add_flag("--json", as_json, "print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*check_cmd) return check(check_path);
    if (*metrics_cmd) return show_metrics(log_path, epsilon, as_json);
  } catch (const cmpc::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const cmpc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAbort;
  }
  return kOk;
}
