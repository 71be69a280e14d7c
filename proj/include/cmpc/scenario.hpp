#pragma once

// Scenario files: a JSON description of one closed-loop experiment.
//
// Weight matrices may be written as a scalar s (meaning s I), a list
// (diagonal) or a nested list (full matrix). Box bounds accept a scalar or
// a list.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "cmpc/cmpc.hpp"
#include "json.hpp"

namespace cmpc {

using json = nlohmann::json;

struct Scenario {
  std::string model = "unicycle";
  double dt = 0.1;
  ControlProblem control;
  std::vector<Vec> initial_states;
  Vec goal_state;  // leader goal; empty when no agent tracks a goal
  Index sim_steps = 200;
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  [[nodiscard]] Index n_agents() const { return static_cast<Index>(initial_states.size()); }

  /// Checks everything that can be checked without running the controller.
  template <PlantModel Plant>
  void validate(const Plant& plant) const {
    try {
      validate_impl(plant);
    } catch (const DimensionError& e) {
      throw ValidationError(e.what());
    }
  }

 private:
  template <PlantModel Plant>
  void validate_impl(const Plant& plant) const {
    control.validate(plant);
    if (n_agents() != control.n_agents()) {
      throw ValidationError("agents: " + std::to_string(n_agents()) + " initial states for a " +
                            std::to_string(control.n_agents()) + "-node topology");
    }
    if (sim_steps < 0) throw ValidationError("sim.steps must be non-negative");
    if (goal_state.size() != 0) detail::require_size(goal_state, plant.state_dim(), "leader.goal");
    for (Index i = 0; i < n_agents(); ++i) {
      const Vec& x = initial_states[static_cast<std::size_t>(i)];
      detail::require_size(x, plant.state_dim(), "agents: initial state");
      if (!control.bounds.contains_state(x)) {
        throw ValidationError("agent " + std::to_string(i) + " starts outside the state box");
      }
      const Vec2 p(x(control.px), x(control.py));
      for (std::size_t o = 0; o < control.obstacles.size(); ++o) {
        const auto& obs = control.obstacles[o];
        if ((p - obs.center).norm() <= obs.radius) {
          throw ValidationError("agent " + std::to_string(i) + " starts inside obstacle " + std::to_string(o));
        }
      }
    }
  }
};

namespace detail {

inline std::string join(const std::string& ctx, const std::string& key) { return ctx.empty() ? key : ctx + "." + key; }

inline Vec vec_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ValidationError(ctx + ": expected a list of numbers");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(ctx + ": expected a list of numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

/// Scalar broadcast or explicit list.
inline Vec box_from_json(const json& j, Index n, const std::string& ctx) {
  if (j.is_number()) return Vec::Constant(n, j.get<double>());
  Vec v = vec_from_json(j, ctx);
  require_size(v, n, ctx.c_str());
  return v;
}

inline Mat mat_from_json(const json& j, Index n, const std::string& ctx) {
  if (j.is_number()) return j.get<double>() * Mat::Identity(n, n);
  if (!j.is_array() || j.empty()) throw ValidationError(ctx + ": expected a number or a matrix");
  if (!j[0].is_array()) {
    const Vec d = vec_from_json(j, ctx);
    require_size(d, n, ctx.c_str());
    return d.asDiagonal();
  }
  Mat m(static_cast<Index>(j.size()), static_cast<Index>(j[0].size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vec row = vec_from_json(j[r], ctx);
    if (row.size() != m.cols()) throw ValidationError(ctx + ": ragged matrix");
    m.row(static_cast<Index>(r)) = row.transpose();
  }
  require_shape(m, n, n, ctx.c_str());
  return m;
}

inline json to_json_vec(const Vec& v) {
  json j = json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

inline json to_json_mat(const Mat& m) {
  json j = json::array();
  for (Index r = 0; r < m.rows(); ++r) j.push_back(to_json_vec(m.row(r).transpose()));
  return j;
}

inline const json& require_key(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError("missing " + join(ctx, key));
  return j.at(key);
}

template <typename T>
T value_or(const json& j, const char* key, T fallback, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(join(ctx, key) + ": " + e.what());
  }
}

inline Mat adjacency_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("topology.adjacency: expected a square matrix");
  Mat a(static_cast<Index>(j.size()), static_cast<Index>(j.size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vec row = vec_from_json(j[r], "topology.adjacency");
    if (row.size() != a.cols()) throw ValidationError("topology.adjacency: expected a square matrix");
    a.row(static_cast<Index>(r)) = row.transpose();
  }
  return a;
}

}  // namespace detail

inline QpSettings solver_from_json(const json& j) {
  QpSettings s;
  const std::string ctx = "solver";
  s.rho = detail::value_or(j, "rho", s.rho, ctx);
  s.sigma = detail::value_or(j, "sigma", s.sigma, ctx);
  s.alpha = detail::value_or(j, "alpha", s.alpha, ctx);
  s.eps_pri = detail::value_or(j, "eps_pri", s.eps_pri, ctx);
  s.eps_dual = detail::value_or(j, "eps_dual", s.eps_dual, ctx);
  s.max_iter = detail::value_or(j, "max_iter", s.max_iter, ctx);
  s.check_interval = detail::value_or(j, "check_interval", s.check_interval, ctx);
  s.adaptive_rho = detail::value_or(j, "adaptive_rho", s.adaptive_rho, ctx);
  s.adaptive_rho_ratio = detail::value_or(j, "adaptive_rho_ratio", s.adaptive_rho_ratio, ctx);
  s.scaling_iter = detail::value_or(j, "scaling_iter", s.scaling_iter, ctx);
  s.polish = detail::value_or(j, "polish", s.polish, ctx);
  s.polish_trigger = detail::value_or(j, "polish_trigger", s.polish_trigger, ctx);
  s.eps_pinf = detail::value_or(j, "eps_pinf", s.eps_pinf, ctx);
  s.infeasibility_window = detail::value_or(j, "infeasibility_window", s.infeasibility_window, ctx);
  if (!(s.rho > 0) || !(s.sigma > 0) || !(s.alpha > 0 && s.alpha < 2) || !(s.eps_pri > 0) || !(s.eps_dual > 0) ||
      s.max_iter < 1 || s.check_interval < 1) {
    throw ValidationError("solver: settings out of range");
  }
  return s;
}

inline json to_json(const QpSettings& s) {
  return {{"rho", s.rho},
          {"sigma", s.sigma},
          {"alpha", s.alpha},
          {"eps_pri", s.eps_pri},
          {"eps_dual", s.eps_dual},
          {"max_iter", s.max_iter},
          {"check_interval", s.check_interval},
          {"adaptive_rho", s.adaptive_rho},
          {"adaptive_rho_ratio", s.adaptive_rho_ratio},
          {"scaling_iter", s.scaling_iter},
          {"polish", s.polish},
          {"polish_trigger", s.polish_trigger},
          {"eps_pinf", s.eps_pinf},
          {"infeasibility_window", s.infeasibility_window}};
}

/// Parses without validating against a plant; call Scenario::validate next.
inline Scenario scenario_from_json(const json& j) {
  using detail::require_key;
  using detail::value_or;
  Scenario s;
  try {
    const json& plant = require_key(j, "plant", "");
    s.model = value_or<std::string>(plant, "model", "unicycle", "plant");
    s.dt = require_key(plant, "dt", "plant").get<double>();
    if (s.model != "unicycle") throw ValidationError("plant.model: unknown model '" + s.model + "'");
    const UnicycleModel model(s.dt);
    const Index n = model.state_dim();
    const Index m = model.input_dim();
    const Index p = model.output_dim();

    ControlProblem& c = s.control;
    c.topology = Topology(detail::adjacency_from_json(require_key(require_key(j, "topology", ""), "adjacency", "topology")));

    const json& agents = require_key(j, "agents", "");
    if (!agents.is_array()) throw ValidationError("agents: expected a list of initial states");
    for (const auto& a : agents) s.initial_states.push_back(detail::vec_from_json(a, "agents"));

    if (j.contains("leader") && !j.at("leader").is_null()) {
      const json& leader = j.at("leader");
      s.goal_state = detail::vec_from_json(require_key(leader, "goal", "leader"), "leader.goal");
      detail::require_size(s.goal_state, n, "leader.goal");
      c.config.goal_output = model.output_matrix() * s.goal_state;
      const auto mode = value_or<std::string>(leader, "mode", "track", "leader");
      if (mode == "track") {
        c.config.leader_mode = LeaderMode::Track;
      } else if (mode == "pinned") {
        c.config.leader_mode = LeaderMode::Pinned;
      } else {
        throw ValidationError("leader.mode: expected 'track' or 'pinned'");
      }
    }

    if (j.contains("obstacles")) {
      for (const auto& o : j.at("obstacles")) {
        CircularObstacle obs;
        const Vec center = detail::vec_from_json(require_key(o, "center", "obstacles"), "obstacles.center");
        detail::require_size(center, 2, "obstacles.center");
        obs.center = center;
        obs.radius = require_key(o, "radius", "obstacles").get<double>();
        c.obstacles.push_back(obs);
      }
    }

    const json& bounds = require_key(j, "bounds", "");
    c.bounds.x_min = detail::box_from_json(require_key(bounds, "x_min", "bounds"), n, "bounds.x_min");
    c.bounds.x_max = detail::box_from_json(require_key(bounds, "x_max", "bounds"), n, "bounds.x_max");
    c.bounds.u_min = detail::box_from_json(require_key(bounds, "u_min", "bounds"), m, "bounds.u_min");
    c.bounds.u_max = detail::box_from_json(require_key(bounds, "u_max", "bounds"), m, "bounds.u_max");

    const json& barrier = require_key(j, "barrier", "");
    c.barrier.safe_distance = require_key(barrier, "d", "barrier").get<double>();
    c.barrier.relative_degree = value_or<Index>(barrier, "r", 2, "barrier");
    c.barrier.gammas = require_key(barrier, "gammas", "barrier").get<std::vector<double>>();
    c.neighbor_barriers = value_or(barrier, "neighbors", true, "barrier");

    const json& cmpc = require_key(j, "cmpc", "");
    CmpcConfig& cfg = c.config;
    cfg.horizon = value_or<Index>(cmpc, "T_p", 10, "cmpc");
    cfg.Q = detail::mat_from_json(require_key(cmpc, "Q", "cmpc"), p, "cmpc.Q");
    cfg.R = detail::mat_from_json(require_key(cmpc, "R", "cmpc"), m, "cmpc.R");
    cfg.P = detail::mat_from_json(require_key(cmpc, "P", "cmpc"), p, "cmpc.P");
    cfg.R_w = require_key(cmpc, "R_w", "cmpc").get<double>();
    cfg.eps_abs = value_or(cmpc, "eps_abs", cfg.eps_abs, "cmpc");
    cfg.eps_rel = value_or(cmpc, "eps_rel", cfg.eps_rel, "cmpc");
    cfg.s_max = value_or(cmpc, "s_max", cfg.s_max, "cmpc");
    if (cmpc.contains("trust_region") && !cmpc.at("trust_region").is_null()) {
      const json& tr = cmpc.at("trust_region");
      if (tr.is_boolean()) {
        if (tr.get<bool>()) cfg.trust_region = 1.0;
      } else {
        cfg.trust_region = tr.get<double>();
      }
    }

    c.solver = solver_from_json(j.contains("solver") ? j.at("solver") : json::object());

    const json sim = j.contains("sim") ? j.at("sim") : json::object();
    s.sim_steps = value_or<Index>(sim, "steps", 200, "sim");
    s.out_dir = value_or<std::string>(sim, "out_dir", "out", "sim");
    s.seed = value_or<std::uint64_t>(j, "seed", 0, "");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  } catch (const DimensionError& e) {
    throw ValidationError(e.what());
  }
  return s;
}

inline json to_json(const Scenario& s) {
  const ControlProblem& c = s.control;
  json j;
  j["plant"] = {{"model", s.model}, {"dt", s.dt}};
  j["topology"] = {{"adjacency", detail::to_json_mat(c.topology.adjacency())}};
  j["agents"] = json::array();
  for (const Vec& x : s.initial_states) j["agents"].push_back(detail::to_json_vec(x));
  if (s.goal_state.size() != 0) {
    j["leader"] = {{"goal", detail::to_json_vec(s.goal_state)}, {"mode", to_string(c.config.leader_mode)}};
  }
  j["obstacles"] = json::array();
  for (const auto& o : c.obstacles) {
    j["obstacles"].push_back({{"center", {o.center.x(), o.center.y()}}, {"radius", o.radius}});
  }
  j["bounds"] = {{"x_min", detail::to_json_vec(c.bounds.x_min)},
                 {"x_max", detail::to_json_vec(c.bounds.x_max)},
                 {"u_min", detail::to_json_vec(c.bounds.u_min)},
                 {"u_max", detail::to_json_vec(c.bounds.u_max)}};
  j["barrier"] = {{"d", c.barrier.safe_distance},
                  {"r", c.barrier.relative_degree},
                  {"gammas", c.barrier.gammas},
                  {"neighbors", c.neighbor_barriers}};
  const CmpcConfig& cfg = c.config;
  j["cmpc"] = {{"T_p", cfg.horizon},
               {"Q", detail::to_json_mat(cfg.Q)},
               {"R", detail::to_json_mat(cfg.R)},
               {"R_w", cfg.R_w},
               {"P", detail::to_json_mat(cfg.P)},
               {"eps_abs", cfg.eps_abs},
               {"eps_rel", cfg.eps_rel},
               {"s_max", cfg.s_max},
               {"trust_region", cfg.trust_region ? json(*cfg.trust_region) : json(nullptr)}};
  j["solver"] = to_json(c.solver);
  j["sim"] = {{"steps", s.sim_steps}, {"out_dir", s.out_dir}};
  j["seed"] = s.seed;
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline Scenario load_scenario(const std::string& path) {
  Scenario s = scenario_from_json(read_json_file(path));
  s.validate(UnicycleModel(s.dt));
  return s;
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_json(s).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace cmpc
