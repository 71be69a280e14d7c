#pragma once

// Summary statistics of a closed-loop run.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cmpc/simulation.hpp"

namespace cmpc {

inline constexpr double kCostIncreaseTol = 1e-6;
inline constexpr double kInputBoundTol = 1e-9;

struct RunMetrics {
  double epsilon = 0.0;
  Index steps = 0;
  std::vector<double> consensus_error;  // max over edges of |y_i - y_j| per step
  std::optional<Index> consensus_time;  // T(eps); empty if the last step is still above eps
  double min_h1 = std::numeric_limits<double>::infinity();
  double min_h2 = std::numeric_limits<double>::infinity();
  Index cost_increases = 0;
  Index cost_increases_after_10 = 0;
  Index input_violations = 0;
  double max_input_violation = 0.0;
  double mean_wall_ms = 0.0;
  double max_wall_ms = 0.0;
  double mean_iterations_after_10 = 0.0;
  int max_iterations_early = 0;  // over t <= 3
  double peak_cost = 0.0;
  double final_cost = 0.0;
  Index infeasible_steps = 0;
  Index unconverged_steps = 0;

  /// Largest consensus error over steps t >= from.
  [[nodiscard]] double max_consensus_error_from(Index from) const {
    double m = 0.0;
    for (Index t = std::max<Index>(from, 0); t < steps; ++t) m = std::max(m, consensus_error[static_cast<std::size_t>(t)]);
    return m;
  }
};

inline RunMetrics metrics(const RunLog& log, double epsilon) {
  if (log.steps.empty()) throw ValidationError("metrics: empty log");
  RunMetrics m;
  m.epsilon = epsilon;
  m.steps = static_cast<Index>(log.steps.size());

  const json& bounds = log.scenario.at("bounds");
  const Vec u_min = detail::vec_from_json(bounds.at("u_min"), "bounds.u_min");
  const Vec u_max = detail::vec_from_json(bounds.at("u_max"), "bounds.u_max");

  double wall_sum = 0.0;
  double iter_sum = 0.0;
  Index iter_count = 0;
  for (std::size_t t = 0; t < log.steps.size(); ++t) {
    const StepRecord& r = log.steps[t];
    double err = 0.0;
    for (const auto& [j, i] : log.edges) {
      err = std::max(err, (r.outputs[static_cast<std::size_t>(i)] - r.outputs[static_cast<std::size_t>(j)]).norm());
    }
    m.consensus_error.push_back(err);
    for (double h : r.h1) m.min_h1 = std::min(m.min_h1, h);
    for (double h : r.h2) m.min_h2 = std::min(m.min_h2, h);
    for (const Vec& u : r.inputs) {
      const double v = std::max((u - u_max).maxCoeff(), (u_min - u).maxCoeff());
      m.max_input_violation = std::max(m.max_input_violation, v);
      if (v > kInputBoundTol) ++m.input_violations;
    }
    if (t + 1 < log.steps.size() && log.steps[t + 1].cost > r.cost + kCostIncreaseTol) {
      ++m.cost_increases;
      if (t >= 10) ++m.cost_increases_after_10;
    }
    wall_sum += r.wall_ms;
    m.max_wall_ms = std::max(m.max_wall_ms, r.wall_ms);
    if (t >= 10) {
      iter_sum += r.sqp_iterations;
      ++iter_count;
    }
    if (t <= 3) m.max_iterations_early = std::max(m.max_iterations_early, r.sqp_iterations);
    m.peak_cost = std::max(m.peak_cost, r.cost);
    if (r.infeasible) ++m.infeasible_steps;
    if (!r.converged) ++m.unconverged_steps;
  }
  m.final_cost = log.steps.back().cost;
  m.mean_wall_ms = wall_sum / static_cast<double>(m.steps);
  m.mean_iterations_after_10 = iter_count > 0 ? iter_sum / static_cast<double>(iter_count) : 0.0;

  Index first = m.steps;
  while (first > 0 && m.consensus_error[static_cast<std::size_t>(first - 1)] <= epsilon) --first;
  if (first < m.steps) m.consensus_time = first;
  return m;
}

namespace detail {

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

inline json to_json(const RunMetrics& m) {
  return {{"epsilon", m.epsilon},
          {"steps", m.steps},
          {"consensus_time", m.consensus_time ? json(*m.consensus_time) : json(nullptr)},
          {"final_consensus_error", m.consensus_error.back()},
          {"min_h1", detail::finite_or_null(m.min_h1)},
          {"min_h2", detail::finite_or_null(m.min_h2)},
          {"cost_increases", m.cost_increases},
          {"cost_increases_after_10", m.cost_increases_after_10},
          {"input_violations", m.input_violations},
          {"max_input_violation", m.max_input_violation},
          {"mean_wall_ms", m.mean_wall_ms},
          {"max_wall_ms", m.max_wall_ms},
          {"mean_iterations_after_10", m.mean_iterations_after_10},
          {"max_iterations_early", m.max_iterations_early},
          {"peak_cost", m.peak_cost},
          {"final_cost", m.final_cost},
          {"infeasible_steps", m.infeasible_steps},
          {"unconverged_steps", m.unconverged_steps}};
}

inline std::string format_report(const RunMetrics& m) {
  std::ostringstream os;
  os << "steps                      " << m.steps << '\n';
  os << "consensus time T(" << m.epsilon << ")    ";
  if (m.consensus_time) {
    os << *m.consensus_time << '\n';
  } else {
    os << "not reached\n";
  }
  os << "final consensus error      " << m.consensus_error.back() << '\n';
  os << "min h1 (agent pairs)       " << m.min_h1 << '\n';
  os << "min h2 (obstacles)         " << m.min_h2 << '\n';
  os << "cost increases             " << m.cost_increases << " (" << m.cost_increases_after_10 << " after t=10)\n";
  os << "input bound violations     " << m.input_violations << '\n';
  os << "wall time per step [ms]    mean " << m.mean_wall_ms << ", max " << m.max_wall_ms << '\n';
  os << "SQP iterations             max " << m.max_iterations_early << " at t<=3, mean "
     << m.mean_iterations_after_10 << " for t>=10\n";
  os << "cost J*                    peak " << m.peak_cost << ", final " << m.final_cost << '\n';
  os << "infeasible QP steps        " << m.infeasible_steps << '\n';
  os << "steps not converged        " << m.unconverged_steps << '\n';
  return os.str();
}

}  // namespace cmpc
