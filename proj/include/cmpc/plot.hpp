#pragma once

// Static SVG figures of a run: planar trajectories, output traces, obstacle
// barrier values, cost and SQP iteration counts.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cmpc/export.hpp"

namespace cmpc {

namespace svg {

inline constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                      "#9467bd", "#8c564b", "#e377c2", "#17becf"};

inline const char* color(std::size_t i) { return kPalette[i % kPalette.size()]; }

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  std::string color;
  bool dashed = false;
};

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void pad() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

inline Range range_of(const std::vector<Series>& series, bool use_x) {
  Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : series) {
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v)) continue;
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
  }
  if (!std::isfinite(r.lo)) r = {0.0, 0.0};
  r.pad();
  return r;
}

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

/// One axes box at (left, top) of size w x h.
struct Panel {
  double left = 70.0;
  double top = 40.0;
  double w = 560.0;
  double h = 300.0;
  Range xr;
  Range yr;
  std::string title;
  std::string xlabel;
  std::string ylabel;

  [[nodiscard]] double px(double x) const { return left + (x - xr.lo) / (xr.hi - xr.lo) * w; }
  [[nodiscard]] double py(double y) const { return top + h - (y - yr.lo) / (yr.hi - yr.lo) * h; }

  void frame(std::ostream& os) const {
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
       << "\" fill=\"none\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << left + w / 2 << "\" y=\"" << top - 12 << "\" text-anchor=\"middle\" font-size=\"14\">"
       << title << "</text>\n";
    os << "<text x=\"" << left + w / 2 << "\" y=\"" << top + h + 34 << "\" text-anchor=\"middle\" font-size=\"12\">"
       << xlabel << "</text>\n";
    os << "<text x=\"" << left - 50 << "\" y=\"" << top + h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
       << "transform=\"rotate(-90 " << left - 50 << ' ' << top + h / 2 << ")\">" << ylabel << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
      const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0;
      const double fy = yr.lo + (yr.hi - yr.lo) * k / 4.0;
      os << "<text x=\"" << px(fx) << "\" y=\"" << top + h + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
         << num(fx) << "</text>\n";
      os << "<text x=\"" << left - 6 << "\" y=\"" << py(fy) + 3 << "\" text-anchor=\"end\" font-size=\"10\">"
         << num(fy) << "</text>\n";
    }
  }

  void polyline(std::ostream& os, const Series& s) const {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) os << px(s.x[k]) << ',' << py(s.y[k]) << ' ';
    os << "\"/>\n";
  }

  void legend(std::ostream& os, const std::vector<Series>& series) const {
    double y = top + 14;
    for (const auto& s : series) {
      if (s.label.empty()) continue;
      os << "<line x1=\"" << left + w - 110 << "\" y1=\"" << y - 4 << "\" x2=\"" << left + w - 90 << "\" y2=\"" << y - 4
         << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << left + w - 84 << "\" y=\"" << y << "\" font-size=\"11\">" << s.label << "</text>\n";
      y += 15;
    }
  }

  void draw(std::ostream& os, const std::vector<Series>& series) const {
    frame(os);
    for (const auto& s : series) polyline(os, s);
    legend(os, series);
  }
};

inline void write(const std::filesystem::path& path, double width, double height, const std::string& body) {
  auto out = detail::open_for_write(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body << "</svg>\n";
  detail::finish(out, path);
}

/// Single-panel figure with auto-scaled axes.
inline void line_chart(const std::filesystem::path& path, std::vector<Series> series, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel) {
  Panel p;
  p.xr = range_of(series, true);
  p.yr = range_of(series, false);
  p.title = title;
  p.xlabel = xlabel;
  p.ylabel = ylabel;
  std::ostringstream os;
  p.draw(os, series);
  write(path, p.left + p.w + 30, p.top + p.h + 50, os.str());
}

}  // namespace svg

/// Writes trajectories.svg, outputs.svg, h2.svg, cost.svg and
/// iterations.svg into `dir`; returns their paths.
inline std::vector<std::filesystem::path> write_plots(const RunLog& log, const std::filesystem::path& dir) {
  using svg::Series;
  detail::ensure_dir(dir);
  const double dt = log.scenario.at("plant").at("dt").get<double>();
  const std::size_t agents = log.steps.empty() ? 0 : log.steps.front().states.size();
  const auto agent_label = [](std::size_t i) { return "agent " + std::to_string(i + 1); };
  std::vector<double> time;
  for (const auto& r : log.steps) time.push_back(static_cast<double>(r.t) * dt);
  std::vector<std::filesystem::path> written;

  // Planar paths, including the final state.
  {
    std::vector<Series> paths;
    for (std::size_t i = 0; i < agents; ++i) {
      Series s{{}, {}, agent_label(i), svg::color(i)};
      for (const auto& r : log.steps) {
        s.x.push_back(r.states[i](0));
        s.y.push_back(r.states[i](1));
      }
      if (i < log.final_states.size()) {
        s.x.push_back(log.final_states[i](0));
        s.y.push_back(log.final_states[i](1));
      }
      paths.push_back(std::move(s));
    }
    svg::Panel p;
    p.h = 400;
    p.xr = svg::range_of(paths, true);
    p.yr = svg::range_of(paths, false);
    const json& obstacles = log.scenario.at("obstacles");
    for (const auto& o : obstacles) {
      const double cx = o.at("center").at(0).get<double>();
      const double cy = o.at("center").at(1).get<double>();
      const double rad = o.at("radius").get<double>();
      p.xr.lo = std::min(p.xr.lo, cx - rad);
      p.xr.hi = std::max(p.xr.hi, cx + rad);
      p.yr.lo = std::min(p.yr.lo, cy - rad);
      p.yr.hi = std::max(p.yr.hi, cy + rad);
    }
    // Equal scale on both axes so the obstacle stays a disc.
    const double sx = (p.xr.hi - p.xr.lo) / p.w;
    const double sy = (p.yr.hi - p.yr.lo) / p.h;
    if (sx > sy) {
      const double mid = 0.5 * (p.yr.lo + p.yr.hi);
      p.yr = {mid - 0.5 * sx * p.h, mid + 0.5 * sx * p.h};
    } else {
      const double mid = 0.5 * (p.xr.lo + p.xr.hi);
      p.xr = {mid - 0.5 * sy * p.w, mid + 0.5 * sy * p.w};
    }
    p.title = "Agent trajectories";
    p.xlabel = "p_x [m]";
    p.ylabel = "p_y [m]";
    std::ostringstream os;
    for (const auto& o : obstacles) {
      const double cx = o.at("center").at(0).get<double>();
      const double cy = o.at("center").at(1).get<double>();
      const double rad = o.at("radius").get<double>();
      os << "<circle cx=\"" << p.px(cx) << "\" cy=\"" << p.py(cy) << "\" r=\"" << rad / (p.xr.hi - p.xr.lo) * p.w
         << "\" fill=\"#bbbbbb\" stroke=\"#555\"/>\n";
    }
    p.draw(os, paths);
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (paths[i].x.empty()) continue;
      os << "<circle cx=\"" << p.px(paths[i].x.front()) << "\" cy=\"" << p.py(paths[i].y.front())
         << "\" r=\"3\" fill=\"" << paths[i].color << "\"/>\n";
    }
    written.push_back(dir / "trajectories.svg");
    svg::write(written.back(), p.left + p.w + 30, p.top + p.h + 50, os.str());
  }

  // One panel per output component.
  {
    const std::array<const char*, 3> names{"p_x [m]", "theta [rad]", "v [m/s]"};
    const std::size_t outs = agents == 0 ? 0 : static_cast<std::size_t>(log.steps.front().outputs[0].size());
    std::ostringstream os;
    svg::Panel p;
    p.h = 180;
    for (std::size_t c = 0; c < outs; ++c) {
      std::vector<Series> traces;
      for (std::size_t i = 0; i < agents; ++i) {
        Series s{time, {}, agent_label(i), svg::color(i)};
        for (const auto& r : log.steps) s.y.push_back(r.outputs[i](static_cast<Index>(c)));
        traces.push_back(std::move(s));
      }
      p.top = 40 + static_cast<double>(c) * (p.h + 70);
      p.xr = svg::range_of(traces, true);
      p.yr = svg::range_of(traces, false);
      const std::string name = c < names.size() ? names[c] : "y" + std::to_string(c + 1);
      p.title = "Output " + name;
      p.xlabel = "t [s]";
      p.ylabel = name;
      p.draw(os, traces);
    }
    written.push_back(dir / "outputs.svg");
    svg::write(written.back(), p.left + p.w + 30, 40 + static_cast<double>(outs) * (p.h + 70), os.str());
  }

  // Obstacle barrier values with the safety boundary.
  {
    std::vector<Series> traces;
    const std::size_t per_agent = agents == 0 ? 0 : log.steps.front().h2.size() / agents;
    for (std::size_t i = 0; i < agents; ++i) {
      for (std::size_t o = 0; o < per_agent; ++o) {
        Series s{time, {}, per_agent > 1 ? agent_label(i) + ", obstacle " + std::to_string(o + 1) : agent_label(i),
                 svg::color(i)};
        for (const auto& r : log.steps) s.y.push_back(r.h2[i * per_agent + o]);
        traces.push_back(std::move(s));
      }
    }
    if (!time.empty()) traces.push_back({{time.front(), time.back()}, {0.0, 0.0}, "h2 = 0", "#000000", true});
    written.push_back(dir / "h2.svg");
    svg::line_chart(written.back(), std::move(traces), "Obstacle barrier h2", "t [s]", "h2 [m^2]");
  }

  {
    Series s{time, {}, "", svg::color(0)};
    for (const auto& r : log.steps) s.y.push_back(r.cost);
    written.push_back(dir / "cost.svg");
    svg::line_chart(written.back(), {std::move(s)}, "Optimal cost J*", "t [s]", "J* [-]");
  }

  {
    Series s{time, {}, "", svg::color(0)};
    for (const auto& r : log.steps) s.y.push_back(static_cast<double>(r.sqp_iterations));
    written.push_back(dir / "iterations.svg");
    svg::line_chart(written.back(), {std::move(s)}, "SQP iterations per step", "t [s]", "iterations [-]");
  }
  return written;
}

}  // namespace cmpc
