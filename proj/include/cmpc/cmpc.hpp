#pragma once

// SQP-based convex MPC over a network of agents.
//
// Each iteration linearizes every agent's dynamics along the current nominal
// trajectory, replaces the keep-out discs by tangent halfplanes at the
// nominal positions, solves one centralized QP over z = [U; X; Omega] and
// takes the QP solution as the next nominal. Iteration stops on the
// absolute/relative output-change test or at s_max.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmpc/barrier.hpp"
#include "cmpc/dynamics.hpp"
#include "cmpc/graph.hpp"
#include "cmpc/layout.hpp"
#include "cmpc/qp.hpp"
#include "cmpc/types.hpp"

namespace cmpc {

enum class LeaderMode { Track, Pinned };

inline const char* to_string(LeaderMode mode) { return mode == LeaderMode::Track ? "track" : "pinned"; }

struct Bounds {
  Vec x_min;
  Vec x_max;
  Vec u_min;
  Vec u_max;

  void validate(Index n, Index m) const {
    detail::require_size(x_min, n, "bounds.x_min");
    detail::require_size(x_max, n, "bounds.x_max");
    detail::require_size(u_min, m, "bounds.u_min");
    detail::require_size(u_max, m, "bounds.u_max");
    if ((x_min.array() > x_max.array()).any()) throw ValidationError("state box is empty");
    if ((u_min.array() > u_max.array()).any()) throw ValidationError("input box is empty");
  }

  [[nodiscard]] bool contains_state(const Vec& x) const {
    return (x.array() >= x_min.array()).all() && (x.array() <= x_max.array()).all();
  }
};

struct CmpcConfig {
  Index horizon = 10;
  Mat Q;
  Mat R;
  Mat P;
  double R_w = 1000.0;
  double eps_abs = 1e-4;
  double eps_rel = 1e-2;
  int s_max = 30;
  std::optional<double> trust_region;  // box radius on (x - x_nom, u - u_nom)
  Vec goal_output;                     // empty: agents without in-neighbors only pay input cost
  LeaderMode leader_mode = LeaderMode::Track;

  void validate(Index p, Index m) const {
    if (horizon < 1) throw ValidationError("cmpc.T_p must be >= 1");
    if (s_max < 1) throw ValidationError("cmpc.s_max must be >= 1");
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) throw ValidationError("convergence thresholds must be positive");
    if (!(R_w > 0.0)) throw ValidationError("cmpc.R_w must be positive");
    if (trust_region && !(*trust_region > 0.0)) throw ValidationError("trust region radius must be positive");
    require_pd(Q, p, "cmpc.Q");
    require_pd(R, m, "cmpc.R");
    require_pd(P, p, "cmpc.P");
    if (goal_output.size() != 0) detail::require_size(goal_output, p, "leader goal output");
  }

 private:
  static void require_pd(const Mat& W, Index dim, const char* what) {
    detail::require_shape(W, dim, dim, what);
    if (!W.isApprox(W.transpose(), 1e-12)) throw ValidationError(std::string(what) + " must be symmetric");
    Eigen::LLT<Mat> llt(W);
    if (llt.info() != Eigen::Success) throw ValidationError(std::string(what) + " must be positive definite");
  }
};

/// Everything the controller needs besides the plant and the measurements.
struct ControlProblem {
  Topology topology;
  std::vector<CircularObstacle> obstacles;
  BarrierParams barrier;
  Bounds bounds;
  CmpcConfig config;
  QpSettings solver;
  Index px = 0;  // planar position components of the state
  Index py = 1;
  bool neighbor_barriers = true;  // keep-out disc of radius d around each in-neighbor

  [[nodiscard]] Index n_agents() const { return topology.size(); }

  template <PlantModel Plant>
  void validate(const Plant& plant) const {
    const Index n = plant.state_dim();
    if (px < 0 || py < 0 || px >= n || py >= n || px == py) throw ValidationError("bad position indices");
    for (const auto& o : obstacles) o.validate();
    barrier.validate();
    bounds.validate(n, plant.input_dim());
    config.validate(plant.output_dim(), plant.input_dim());
    if (config.horizon < barrier.relative_degree - 1) {
      throw ValidationError("horizon shorter than relative degree - 1");
    }
  }

  [[nodiscard]] bool tracks_goal(Index agent) const {
    return config.goal_output.size() != 0 && config.leader_mode == LeaderMode::Track &&
           topology.in_neighbors(agent).empty();
  }

  [[nodiscard]] bool pinned(Index agent) const {
    return config.goal_output.size() != 0 && config.leader_mode == LeaderMode::Pinned &&
           topology.in_neighbors(agent).empty();
  }
};

/// One keep-out constraint of an agent: an obstacle, or a disc of radius d
/// around a neighbor.
struct BarrierInstance {
  enum class Kind { Obstacle, Neighbor } kind = Kind::Obstacle;
  Index index = 0;  // obstacle index or neighbor agent
};

/// Obstacles first, then in-neighbors in ascending order.
inline std::vector<BarrierInstance> barrier_instances(const ControlProblem& problem, Index agent) {
  std::vector<BarrierInstance> out;
  for (std::size_t o = 0; o < problem.obstacles.size(); ++o) {
    out.push_back({BarrierInstance::Kind::Obstacle, static_cast<Index>(o)});
  }
  if (!problem.neighbor_barriers) return out;
  for (Index j : problem.topology.in_neighbors(agent)) out.push_back({BarrierInstance::Kind::Neighbor, j});
  return out;
}

template <PlantModel Plant>
DecisionLayout make_layout(const Plant& plant, const ControlProblem& problem) {
  std::vector<Index> counts;
  for (Index i = 0; i < problem.n_agents(); ++i) {
    counts.push_back(static_cast<Index>(barrier_instances(problem, i).size()));
  }
  return DecisionLayout(problem.n_agents(), problem.config.horizon, plant.state_dim(), plant.input_dim(),
                        std::move(counts), problem.barrier.relative_degree);
}

/// Per agent: states n x (T+1) with column 0 the measured state, inputs m x T.
struct NominalTrajectory {
  std::vector<Mat> states;
  std::vector<Mat> inputs;

  [[nodiscard]] Index n_agents() const { return static_cast<Index>(states.size()); }
  [[nodiscard]] Index horizon() const { return inputs.empty() ? 0 : inputs.front().cols(); }

  void validate(Index n_agents, Index horizon, Index n, Index m) const {
    if (static_cast<Index>(states.size()) != n_agents || static_cast<Index>(inputs.size()) != n_agents) {
      throw DimensionError("nominal: one trajectory per agent required");
    }
    for (Index i = 0; i < n_agents; ++i) {
      detail::require_shape(states[static_cast<std::size_t>(i)], n, horizon + 1, "nominal states");
      detail::require_shape(inputs[static_cast<std::size_t>(i)], m, horizon, "nominal inputs");
    }
  }
};

template <PlantModel Plant>
NominalTrajectory rollout(const Plant& plant, std::span<const Vec> x0, std::vector<Mat> inputs) {
  if (x0.size() != inputs.size()) throw DimensionError("rollout: one input sequence per agent required");
  NominalTrajectory out;
  out.inputs = std::move(inputs);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const Mat& u = out.inputs[i];
    Mat x(plant.state_dim(), u.cols() + 1);
    x.col(0) = x0[i];
    for (Index k = 0; k < u.cols(); ++k) x.col(k + 1) = step(plant, Vec(x.col(k)), Vec(u.col(k)));
    out.states.push_back(std::move(x));
  }
  return out;
}

template <PlantModel Plant>
NominalTrajectory zero_input_rollout(const Plant& plant, std::span<const Vec> x0, Index horizon) {
  std::vector<Mat> inputs(x0.size(), Mat::Zero(plant.input_dim(), horizon));
  return rollout(plant, x0, std::move(inputs));
}

/// Drops the first input, repeats the last one and re-rolls the states from
/// the new measurements through the plant.
template <PlantModel Plant>
NominalTrajectory shift_warm_start(const Plant& plant, const NominalTrajectory& previous, std::span<const Vec> x0) {
  std::vector<Mat> inputs;
  for (const Mat& u : previous.inputs) {
    const Index T = u.cols();
    Mat shifted(u.rows(), T);
    if (T > 1) shifted.leftCols(T - 1) = u.rightCols(T - 1);
    shifted.col(T - 1) = u.col(T - 1);
    inputs.push_back(std::move(shifted));
  }
  return rollout(plant, x0, std::move(inputs));
}

/// [agent][k] local models along the nominal.
template <PlantModel Plant>
std::vector<std::vector<StepLinearization>> linearize_along(const Plant& plant, const NominalTrajectory& nominal) {
  std::vector<std::vector<StepLinearization>> out;
  for (std::size_t i = 0; i < nominal.states.size(); ++i) {
    const Mat& xs = nominal.states[i];
    const Mat& us = nominal.inputs[i];
    std::vector<StepLinearization> agent;
    for (Index k = 0; k < us.cols(); ++k) {
      const Vec x = xs.col(k);
      const Vec u = us.col(k);
      auto [A, B] = jacobians(plant, x, u);
      agent.push_back({std::move(A), std::move(B), x, u, step(plant, x, u)});
    }
    out.push_back(std::move(agent));
  }
  return out;
}

struct HalfplaneSequence {
  std::vector<AffineBarrier> barriers;  // h_0 lifted to the state, one per step
  Index inside = 0;                     // steps whose nominal lies in the disc
};

/// Tangent halfplanes of one barrier instance at steps 0..count-1. Neighbor
/// discs follow the neighbor's nominal positions.
inline HalfplaneSequence halfplanes_along(const NominalTrajectory& nominal, const ControlProblem& problem,
                                          Index agent, const BarrierInstance& instance, Index count) {
  HalfplaneSequence out;
  const Mat& xs = nominal.states[static_cast<std::size_t>(agent)];
  const Index n = xs.rows();
  for (Index v = 0; v < count; ++v) {
    const Vec2 p(xs(problem.px, v), xs(problem.py, v));
    Vec2 center;
    double radius = 0.0;
    if (instance.kind == BarrierInstance::Kind::Obstacle) {
      const auto& o = problem.obstacles[static_cast<std::size_t>(instance.index)];
      center = o.center;
      radius = o.radius;
    } else {
      const Mat& xj = nominal.states[static_cast<std::size_t>(instance.index)];
      center = Vec2(xj(problem.px, v), xj(problem.py, v));
      radius = problem.barrier.safe_distance;
    }
    auto h = separating_halfplane(p, center, radius);
    if (h.nominal_inside) ++out.inside;
    out.barriers.push_back(embed_planar(h.barrier, n, problem.px, problem.py));
  }
  return out;
}

struct AssembledQp {
  QpProblem qp;
  double cost_constant = 0.0;  // J = qp.objective(z) + cost_constant
  std::vector<SafetyRowSpec> safety_rows;  // row r of A_in
  Index inside_nominal = 0;
};

/// Builds the QP of one SQP iteration. `x0` holds the measured states; the
/// nominal must be anchored at them.
template <PlantModel Plant>
AssembledQp assemble_qp(const Plant& plant, std::span<const Vec> x0, const NominalTrajectory& nominal,
                        const std::vector<std::vector<StepLinearization>>& lin, const ControlProblem& problem,
                        const DecisionLayout& layout) {
  const Index N = problem.n_agents();
  const Index T = problem.config.horizon;
  const Index n = plant.state_dim();
  const Index m = plant.input_dim();
  const Index d = layout.dim();
  nominal.validate(N, T, n, m);
  if (static_cast<Index>(x0.size()) != N) throw DimensionError("assemble_qp: one measured state per agent");

  const CmpcConfig& cfg = problem.config;
  const Mat C = plant.output_matrix();
  const Mat CtQC = C.transpose() * cfg.Q * C;
  const Mat CtPC = C.transpose() * cfg.P * C;

  AssembledQp out;
  QpProblem& qp = out.qp;
  qp.H = Mat::Zero(d, d);
  qp.f = Vec::Zero(d);
  double& cst = out.cost_constant;

  // Inputs.
  for (Index i = 0; i < N; ++i)
    for (Index k = 0; k < T; ++k) {
      const Index a = layout.input_index(i, k);
      qp.H.block(a, a, m, m) += 2.0 * cfg.R;
    }

  // Output disagreement along edges; k = 0 is a constant.
  for (const auto& [j, i] : problem.topology.edges()) {
    const double w = problem.topology.weight(i, j);
    const Vec y0 = C * (x0[static_cast<std::size_t>(i)] - x0[static_cast<std::size_t>(j)]);
    cst += w * y0.dot(cfg.Q * y0);
    for (Index k = 1; k <= T; ++k) {
      const Mat& W = (k == T) ? CtPC : CtQC;
      const Index a = layout.state_index(i, k);
      const Index b = layout.state_index(j, k);
      qp.H.block(a, a, n, n) += 2.0 * w * W;
      qp.H.block(b, b, n, n) += 2.0 * w * W;
      qp.H.block(a, b, n, n) -= 2.0 * w * W;
      qp.H.block(b, a, n, n) -= 2.0 * w * W;
    }
  }

  // Goal tracking for leaders.
  for (Index i = 0; i < N; ++i) {
    if (!problem.tracks_goal(i)) continue;
    const Vec& g = cfg.goal_output;
    const Vec e0 = C * x0[static_cast<std::size_t>(i)] - g;
    cst += e0.dot(cfg.Q * e0);
    for (Index k = 1; k <= T; ++k) {
      const Mat& Wy = (k == T) ? cfg.P : cfg.Q;
      const Index a = layout.state_index(i, k);
      qp.H.block(a, a, n, n) += 2.0 * C.transpose() * Wy * C;
      qp.f.segment(a, n) -= 2.0 * C.transpose() * (Wy * g);
      cst += g.dot(Wy * g);
    }
  }

  // Slacks pulled toward 1.
  for (Index s = layout.num_inputs() + layout.num_states(); s < d; ++s) {
    qp.H(s, s) += 2.0 * cfg.R_w;
    qp.f(s) -= 2.0 * cfg.R_w;
    cst += cfg.R_w;
  }

  // Dynamics: x(k+1) - A x(k) - B u(k) = f(x_nom, u_nom) - A x_nom - B u_nom.
  qp.A_eq = Mat::Zero(N * T * n, d);
  qp.b_eq = Vec::Zero(N * T * n);
  for (Index i = 0; i < N; ++i) {
    for (Index k = 0; k < T; ++k) {
      const StepLinearization& L = lin[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      const Index r = (k * N + i) * n;
      qp.A_eq.block(r, layout.state_index(i, k + 1), n, n) = Mat::Identity(n, n);
      qp.A_eq.block(r, layout.input_index(i, k), n, m) = -L.B;
      Vec rhs = L.offset();
      if (k == 0) {
        rhs += L.A * x0[static_cast<std::size_t>(i)];
      } else {
        qp.A_eq.block(r, layout.state_index(i, k), n, n) = -L.A;
      }
      qp.b_eq.segment(r, n) = rhs;
    }
  }

  // Boxes, optionally intersected with the trust region.
  qp.lb = Vec::Constant(d, -kInf);
  qp.ub = Vec::Constant(d, kInf);
  const auto set_box = [&](Index at, const Vec& lo, const Vec& hi, const Vec& center) {
    Vec l = lo;
    Vec u = hi;
    if (cfg.trust_region) {
      const Vec tl = l.cwiseMax((center.array() - *cfg.trust_region).matrix());
      const Vec tu = u.cwiseMin((center.array() + *cfg.trust_region).matrix());
      if ((tl.array() <= tu.array()).all()) {
        l = tl;
        u = tu;
      }
    }
    qp.lb.segment(at, lo.size()) = l;
    qp.ub.segment(at, hi.size()) = u;
  };
  for (Index i = 0; i < N; ++i) {
    const Mat& xs = nominal.states[static_cast<std::size_t>(i)];
    const Mat& us = nominal.inputs[static_cast<std::size_t>(i)];
    const bool fixed = problem.pinned(i);
    for (Index k = 0; k < T; ++k) {
      if (fixed) {
        qp.lb.segment(layout.input_index(i, k), m).setZero();
        qp.ub.segment(layout.input_index(i, k), m).setZero();
      } else {
        set_box(layout.input_index(i, k), problem.bounds.u_min, problem.bounds.u_max, us.col(k));
      }
      set_box(layout.state_index(i, k + 1), problem.bounds.x_min, problem.bounds.x_max, xs.col(k + 1));
    }
  }

  // Safety rows, coeffs . z >= rhs, stored as -coeffs . z <= -rhs.
  const Index r = problem.barrier.relative_degree;
  const std::span<const double> gammas(problem.barrier.gammas);
  std::vector<Vec> rows;
  std::vector<double> rhs;
  for (Index i = 0; i < N; ++i) {
    const auto instances = barrier_instances(problem, i);
    for (std::size_t q = 0; q < instances.size(); ++q) {
      const auto seq = halfplanes_along(nominal, problem, i, instances[q], std::max(T, r));
      out.inside_nominal += seq.inside;
      for (Index l = 1; l <= r; ++l) {
        for (Index k = 0; k < T; ++k) {
          const SafetyRowSpec spec{i, static_cast<Index>(q), l, k};
          const SafetyRow row = build_safety_row(spec, seq.barriers, lin[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                                 gammas, x0[static_cast<std::size_t>(i)], layout);
          rows.push_back(-row.coeffs);
          rhs.push_back(-row.rhs);
          out.safety_rows.push_back(spec);
        }
      }
    }
  }
  qp.A_in = Mat(static_cast<Index>(rows.size()), d);
  qp.b_in = Vec(static_cast<Index>(rows.size()));
  for (std::size_t q = 0; q < rows.size(); ++q) {
    qp.A_in.row(static_cast<Index>(q)) = rows[q].transpose();
    qp.b_in(static_cast<Index>(q)) = rhs[q];
  }
  return out;
}

/// Reads the (U, X) blocks of z into a trajectory anchored at x0.
inline NominalTrajectory unpack(const Vec& z, std::span<const Vec> x0, const DecisionLayout& layout) {
  NominalTrajectory out;
  const Index T = layout.horizon();
  const Index n = layout.state_dim();
  const Index m = layout.input_dim();
  for (Index i = 0; i < layout.n_agents(); ++i) {
    Mat xs(n, T + 1);
    Mat us(m, T);
    xs.col(0) = x0[static_cast<std::size_t>(i)];
    for (Index k = 0; k < T; ++k) {
      us.col(k) = z.segment(layout.input_index(i, k), m);
      xs.col(k + 1) = z.segment(layout.state_index(i, k + 1), n);
    }
    out.states.push_back(std::move(xs));
    out.inputs.push_back(std::move(us));
  }
  return out;
}

inline Vec pack(const NominalTrajectory& nominal, const Vec& slacks, const DecisionLayout& layout) {
  Vec z(layout.dim());
  const Index T = layout.horizon();
  const Index n = layout.state_dim();
  const Index m = layout.input_dim();
  for (Index i = 0; i < layout.n_agents(); ++i) {
    for (Index k = 0; k < T; ++k) {
      z.segment(layout.input_index(i, k), m) = nominal.inputs[static_cast<std::size_t>(i)].col(k);
      z.segment(layout.state_index(i, k + 1), n) = nominal.states[static_cast<std::size_t>(i)].col(k + 1);
    }
  }
  z.tail(layout.num_slacks()) = slacks;
  return z;
}

/// Outputs of all agents for k = 0..T-1, step-major.
template <PlantModel Plant>
Vec stacked_outputs(const Plant& plant, const NominalTrajectory& nominal) {
  const Mat C = plant.output_matrix();
  const Index p = C.rows();
  const Index N = nominal.n_agents();
  const Index T = nominal.horizon();
  Vec y(N * T * p);
  for (Index k = 0; k < T; ++k)
    for (Index i = 0; i < N; ++i) y.segment((k * N + i) * p, p) = C * nominal.states[static_cast<std::size_t>(i)].col(k);
  return y;
}

/// Stage and terminal cost of a trajectory, evaluated term by term.
template <PlantModel Plant>
double trajectory_cost(const Plant& plant, const ControlProblem& problem, const NominalTrajectory& traj,
                       const Vec& slacks) {
  const CmpcConfig& cfg = problem.config;
  const Mat C = plant.output_matrix();
  const Index T = cfg.horizon;
  double J = 0.0;
  for (Index k = 0; k <= T; ++k) {
    const Mat& W = (k == T) ? cfg.P : cfg.Q;
    for (const auto& [j, i] : problem.topology.edges()) {
      const Vec e = C * (traj.states[static_cast<std::size_t>(i)].col(k) - traj.states[static_cast<std::size_t>(j)].col(k));
      J += problem.topology.weight(i, j) * e.dot(W * e);
    }
    for (Index i = 0; i < problem.n_agents(); ++i) {
      if (problem.tracks_goal(i)) {
        const Vec e = C * traj.states[static_cast<std::size_t>(i)].col(k) - cfg.goal_output;
        J += e.dot(W * e);
      }
      if (k < T) {
        const Vec u = traj.inputs[static_cast<std::size_t>(i)].col(k);
        J += u.dot(cfg.R * u);
      }
    }
  }
  J += cfg.R_w * (slacks.array() - 1.0).square().sum();
  return J;
}

struct SqpIteration {
  double e_abs = 0.0;
  double e_rel = 0.0;
  QpStatus status = QpStatus::Optimal;
  int qp_iterations = 0;
};

struct SqpTrace {
  std::vector<SqpIteration> iterations;
  bool converged = false;
  bool infeasible = false;
  NominalTrajectory solution;  // U*, X*
  Vec slacks;                  // Omega*
  double cost = 0.0;           // J* of the returned iterate
  Index inside_nominal = 0;    // halfplanes built from inside a disc, summed over iterations

  [[nodiscard]] int iterations_used() const { return static_cast<int>(iterations.size()); }
};

/// Iterates linearize -> assemble -> solve until the output change passes
/// the absolute or relative test, or s_max QPs have been solved.
template <PlantModel Plant>
SqpTrace sqp_solve(const Plant& plant, std::span<const Vec> x0, NominalTrajectory nominal,
                   const ControlProblem& problem) {
  const DecisionLayout layout = make_layout(plant, problem);
  const CmpcConfig& cfg = problem.config;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    nominal.states.at(i).col(0) = x0[i];
  }

  SqpTrace trace;
  trace.solution = nominal;
  trace.slacks = Vec::Ones(layout.num_slacks());
  QpSolver solver(problem.solver);
  std::optional<QpDuals> duals;
  Vec y_prev = stacked_outputs(plant, nominal);

  for (int s = 1; s <= cfg.s_max; ++s) {
    const auto lin = linearize_along(plant, trace.solution);
    const AssembledQp assembled = assemble_qp(plant, x0, trace.solution, lin, problem, layout);
    trace.inside_nominal += assembled.inside_nominal;
    const QpSolution sol = solver.solve(assembled.qp, QpWarmStart{pack(trace.solution, trace.slacks, layout), duals});

    SqpIteration it;
    it.status = sol.status;
    it.qp_iterations = sol.iterations;
    if (sol.status == QpStatus::PrimalInfeasible) {
      trace.infeasible = true;
      trace.iterations.push_back(it);
      break;
    }
    duals = sol.duals;
    trace.solution = unpack(sol.z, x0, layout);
    trace.slacks = sol.z.tail(layout.num_slacks());

    const Vec y = stacked_outputs(plant, trace.solution);
    const double ref = y_prev.norm();
    it.e_abs = (y - y_prev).norm();
    it.e_rel = ref < 1e-12 ? 0.0 : it.e_abs / ref;
    trace.iterations.push_back(it);
    y_prev = y;
    if (it.e_abs <= cfg.eps_abs || it.e_rel <= cfg.eps_rel) {
      trace.converged = true;
      break;
    }
  }
  trace.cost = trajectory_cost(plant, problem, trace.solution, trace.slacks);
  return trace;
}

/// b + max over lo <= x <= hi of a . x; the maximizing vertex takes hi
/// where a > 0 and lo elsewhere.
inline double affine_sup_over_box(const Vec& a, double b, const Vec& lo, const Vec& hi) {
  double s = b;
  for (Index i = 0; i < a.size(); ++i) s += a(i) > 0.0 ? a(i) * hi(i) : a(i) * lo(i);
  return s;
}

struct InputRange {
  double lo = 0.0;  // U_min
  double hi = 0.0;  // U_max
};

/// Range of eta . u over the input box.
inline InputRange input_range(const Vec& eta, const Vec& u_min, const Vec& u_max) {
  const Vec pos = eta.cwiseMax(0.0);
  const Vec neg = eta.cwiseMin(0.0);
  return {neg.dot(u_max) + pos.dot(u_min), pos.dot(u_max) + neg.dot(u_min)};
}

struct FeasibilityMargin {
  Index agent = 0;
  Index instance = 0;
  Index step = 0;
  Vec eta;
  double u_min = 0.0;
  double u_max = 0.0;
  double f_max = 0.0;
  [[nodiscard]] bool feasible() const { return u_min >= f_max; }
};

/// Input authority against the worst-case decay terms of the highest-order
/// row, for every (agent, instance, step) along the nominal.
template <PlantModel Plant>
std::vector<FeasibilityMargin> feasibility_margins(const Plant& plant, const NominalTrajectory& nominal,
                                                   const ControlProblem& problem) {
  const Index T = problem.config.horizon;
  const Index r = problem.barrier.relative_degree;
  const std::span<const double> gammas(problem.barrier.gammas);
  const auto c = margin_coefficients(r, gammas);
  const auto lin = linearize_along(plant, nominal);
  const Bounds& box = problem.bounds;

  std::vector<FeasibilityMargin> out;
  for (Index i = 0; i < problem.n_agents(); ++i) {
    const auto instances = barrier_instances(problem, i);
    for (std::size_t q = 0; q < instances.size(); ++q) {
      const auto seq = halfplanes_along(nominal, problem, i, instances[q], std::max(T, r));
      for (Index k = 0; k < T; ++k) {
        FeasibilityMargin fm;
        fm.agent = i;
        fm.instance = static_cast<Index>(q);
        fm.step = k;
        const auto form = dhcbf_affine(seq.barriers[static_cast<std::size_t>(k)],
                                       lin[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], gammas, r - 1);
        fm.eta = form.u_coef;
        const auto range = input_range(fm.eta, box.u_min, box.u_max);
        fm.u_min = range.lo;
        fm.u_max = range.hi;
        const double decay = std::pow(1.0 - gammas[static_cast<std::size_t>(r - 1)], static_cast<double>(k));
        const AffineBarrier& h0 = seq.barriers[0];
        fm.f_max = affine_sup_over_box(c[0] * decay * h0.a, c[0] * decay * h0.b, box.x_min, box.x_max);
        for (Index v = 1; v <= r - 1; ++v) {
          const AffineBarrier& hv = seq.barriers[static_cast<std::size_t>(v)];
          const double w = -decay * c[static_cast<std::size_t>(v)];
          fm.f_max += affine_sup_over_box(w * hv.a, w * hv.b, box.x_min, box.x_max);
        }
        out.push_back(std::move(fm));
      }
    }
  }
  return out;
}

}  // namespace cmpc
