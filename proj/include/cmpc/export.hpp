#pragma once

// Run-log persistence: per-agent and per-step CSV tables and a lossless JSON
// document.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <string>
#include <vector>

#include "cmpc/simulation.hpp"

namespace cmpc {

namespace detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<Vec> vecs_from_json(const json& j, const std::string& ctx) {
  std::vector<Vec> out;
  for (const auto& v : j) out.push_back(vec_from_json(v, ctx));
  return out;
}

inline json to_json_vecs(const std::vector<Vec>& vs) {
  json j = json::array();
  for (const Vec& v : vs) j.push_back(to_json_vec(v));
  return j;
}

}  // namespace detail

/// Columns t, agent, p_x, p_y, theta, v, u1, u2, h2_min; h2_min is blank
/// without obstacles.
inline void write_states_csv(const RunLog& log, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "t,agent,p_x,p_y,theta,v,u1,u2,h2_min\n";
  for (const StepRecord& r : log.steps) {
    const std::size_t agents = r.states.size();
    const std::size_t per_agent = agents == 0 ? 0 : r.h2.size() / agents;
    for (std::size_t i = 0; i < agents; ++i) {
      out << r.t << ',' << i;
      for (Index k = 0; k < r.states[i].size(); ++k) out << ',' << r.states[i](k);
      for (Index k = 0; k < r.inputs[i].size(); ++k) out << ',' << r.inputs[i](k);
      out << ',';
      if (per_agent > 0) {
        const auto first = r.h2.begin() + static_cast<std::ptrdiff_t>(i * per_agent);
        out << *std::min_element(first, first + static_cast<std::ptrdiff_t>(per_agent));
      }
      out << '\n';
    }
  }
  detail::finish(out, path);
}

/// Columns t, J, sqp_iters, wall_ms.
inline void write_summary_csv(const RunLog& log, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "t,J,sqp_iters,wall_ms\n";
  for (const StepRecord& r : log.steps) {
    out << r.t << ',' << r.cost << ',' << r.sqp_iterations << ',' << r.wall_ms << '\n';
  }
  detail::finish(out, path);
}

/// Writes states.csv and summary.csv into `dir`.
inline void write_csv(const RunLog& log, const std::filesystem::path& dir) {
  detail::ensure_dir(dir);
  write_states_csv(log, dir / "states.csv");
  write_summary_csv(log, dir / "summary.csv");
}

inline json to_json(const StepRecord& r) {
  return {{"t", r.t},
          {"states", detail::to_json_vecs(r.states)},
          {"inputs", detail::to_json_vecs(r.inputs)},
          {"outputs", detail::to_json_vecs(r.outputs)},
          {"h1", r.h1},
          {"h2", r.h2},
          {"cost", r.cost},
          {"sqp_iterations", r.sqp_iterations},
          {"converged", r.converged},
          {"infeasible", r.infeasible},
          {"inside_nominal", r.inside_nominal},
          {"saturation", r.saturation},
          {"wall_ms", r.wall_ms}};
}

inline StepRecord step_record_from_json(const json& j) {
  StepRecord r;
  r.t = j.at("t").get<Index>();
  r.states = detail::vecs_from_json(j.at("states"), "states");
  r.inputs = detail::vecs_from_json(j.at("inputs"), "inputs");
  r.outputs = detail::vecs_from_json(j.at("outputs"), "outputs");
  r.h1 = j.at("h1").get<std::vector<double>>();
  r.h2 = j.at("h2").get<std::vector<double>>();
  r.cost = j.at("cost").get<double>();
  r.sqp_iterations = j.at("sqp_iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.infeasible = j.at("infeasible").get<bool>();
  r.inside_nominal = j.at("inside_nominal").get<Index>();
  r.saturation = j.at("saturation").get<double>();
  r.wall_ms = j.at("wall_ms").get<double>();
  return r;
}

inline json to_json(const RunLog& log) {
  json j;
  j["version"] = log.version;
  j["scenario"] = log.scenario;
  j["edges"] = json::array();
  for (const auto& [from, to] : log.edges) j["edges"].push_back({from, to});
  j["steps"] = json::array();
  for (const StepRecord& r : log.steps) j["steps"].push_back(to_json(r));
  j["final_states"] = detail::to_json_vecs(log.final_states);
  j["abort_reason"] = log.abort_reason ? json(*log.abort_reason) : json(nullptr);
  return j;
}

inline RunLog run_log_from_json(const json& j) {
  RunLog log;
  try {
    log.version = j.at("version").get<std::string>();
    log.scenario = j.at("scenario");
    for (const auto& e : j.at("edges")) log.edges.emplace_back(e.at(0).get<Index>(), e.at(1).get<Index>());
    for (const auto& s : j.at("steps")) log.steps.push_back(step_record_from_json(s));
    log.final_states = detail::vecs_from_json(j.at("final_states"), "final_states");
    if (!j.at("abort_reason").is_null()) log.abort_reason = j.at("abort_reason").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("run log: ") + e.what());
  }
  return log;
}

inline void write_json(const RunLog& log, const std::filesystem::path& path) {
  if (path.has_parent_path()) detail::ensure_dir(path.parent_path());
  auto out = detail::open_for_write(path);
  out << to_json(log).dump() << '\n';
  detail::finish(out, path);
}

inline RunLog read_run_log(const std::filesystem::path& path) { return run_log_from_json(read_json_file(path.string())); }

}  // namespace cmpc
