#pragma once

// Receding-horizon closed loop: solve, apply the first input of every agent
// through the true plant, shift, repeat.

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmpc/cmpc.hpp"
#include "cmpc/scenario.hpp"

namespace cmpc {

struct StepRecord {
  Index t = 0;
  std::vector<Vec> states;   // measured x_i(t)
  std::vector<Vec> inputs;   // applied u_i(t)
  std::vector<Vec> outputs;  // y_i(t) = C x_i(t)
  std::vector<double> h1;    // per edge, topology.edges() order
  std::vector<double> h2;    // agent-major, one entry per obstacle
  double cost = 0.0;         // J*(t)
  int sqp_iterations = 0;
  bool converged = false;
  bool infeasible = false;
  Index inside_nominal = 0;
  double saturation = 0.0;  // largest clip applied to the QP input, usually 0 or solver noise
  double wall_ms = 0.0;     // sqp_solve only
};

struct RunLog {
  std::vector<StepRecord> steps;
  std::vector<Vec> final_states;  // x_i(sim_steps), empty after an abort
  std::vector<std::pair<Index, Index>> edges;
  json scenario;
  std::string version = kVersion;
  std::optional<std::string> abort_reason;

  [[nodiscard]] bool aborted() const { return abort_reason.has_value(); }
};

namespace detail {

inline Vec2 planar(const Vec& x, const ControlProblem& c) { return {x(c.px), x(c.py)}; }

inline std::vector<double> edge_barriers(std::span<const Vec> x, const ControlProblem& c,
                                         const std::vector<std::pair<Index, Index>>& edges) {
  const double d2 = c.barrier.safe_distance * c.barrier.safe_distance;
  std::vector<double> out;
  for (const auto& [j, i] : edges) {
    out.push_back((planar(x[static_cast<std::size_t>(i)], c) - planar(x[static_cast<std::size_t>(j)], c)).squaredNorm() -
                  d2);
  }
  return out;
}

inline std::vector<double> obstacle_barriers(std::span<const Vec> x, const ControlProblem& c) {
  std::vector<double> out;
  for (const Vec& xi : x) {
    for (const auto& o : c.obstacles) out.push_back((planar(xi, c) - o.center).squaredNorm() - o.radius * o.radius);
  }
  return out;
}

}  // namespace detail

/// Initial measurements, with a pinned leader placed at its goal.
inline std::vector<Vec> initial_measurements(const Scenario& s) {
  std::vector<Vec> x = s.initial_states;
  for (Index i = 0; i < s.n_agents(); ++i) {
    if (s.control.pinned(i) && s.goal_state.size() != 0) x[static_cast<std::size_t>(i)] = s.goal_state;
  }
  return x;
}

template <PlantModel Plant>
RunLog run_closed_loop(const Plant& plant, const Scenario& scenario) {
  const ControlProblem& problem = scenario.control;
  const Mat C = plant.output_matrix();
  const Bounds& box = problem.bounds;

  RunLog log;
  log.scenario = to_json(scenario);
  log.edges = problem.topology.edges();

  std::vector<Vec> x = initial_measurements(scenario);
  std::optional<NominalTrajectory> previous;
  try {
    for (Index t = 0; t < scenario.sim_steps; ++t) {
      StepRecord rec;
      rec.t = t;
      rec.states = x;
      for (const Vec& xi : x) rec.outputs.push_back(C * xi);
      rec.h1 = detail::edge_barriers(x, problem, log.edges);
      rec.h2 = detail::obstacle_barriers(x, problem);

      NominalTrajectory guess = previous ? shift_warm_start(plant, *previous, std::span<const Vec>(x))
                                         : zero_input_rollout(plant, std::span<const Vec>(x), problem.config.horizon);
      const auto start = std::chrono::steady_clock::now();
      SqpTrace trace = sqp_solve(plant, std::span<const Vec>(x), std::move(guess), problem);
      const auto stop = std::chrono::steady_clock::now();
      rec.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();

      rec.cost = trace.cost;
      rec.sqp_iterations = trace.iterations_used();
      rec.converged = trace.converged;
      rec.infeasible = trace.infeasible;
      rec.inside_nominal = trace.inside_nominal;

      std::vector<Vec> next;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const Vec raw = trace.solution.inputs[i].col(0);
        const Vec u = raw.cwiseMax(box.u_min).cwiseMin(box.u_max);
        rec.saturation = std::max(rec.saturation, (raw - u).cwiseAbs().maxCoeff());
        rec.inputs.push_back(u);
        next.push_back(step(plant, x[i], u));
      }
      previous = std::move(trace.solution);
      x = std::move(next);
      log.steps.push_back(std::move(rec));
    }
    log.final_states = x;
  } catch (const Error& e) {
    log.abort_reason = "t=" + std::to_string(log.steps.size()) + ": " + e.what();
  }
  return log;
}

inline RunLog run_closed_loop(const Scenario& scenario) {
  if (scenario.model != "unicycle") throw ValidationError("unknown plant model '" + scenario.model + "'");
  return run_closed_loop(UnicycleModel(scenario.dt), scenario);
}

}  // namespace cmpc
