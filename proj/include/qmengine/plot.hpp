// Copyright 2026 The qmengine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Deterministic SVG line plots of sweep tables.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qmengine/cycle.hpp"

namespace qme {

enum class PlotKind { EntropyVsP, HeatWorkVsP, EtaPowerVsP };

inline std::string_view to_string(PlotKind k) {
  switch (k) {
    case PlotKind::EntropyVsP: return "entropy-vs-p";
    case PlotKind::HeatWorkVsP: return "heat-work-vs-p";
    case PlotKind::EtaPowerVsP: return "eta-power-vs-p";
  }
  return "";
}

inline PlotKind plot_kind_from_string(std::string_view s) {
  if (s == "entropy-vs-p") return PlotKind::EntropyVsP;
  if (s == "heat-work-vs-p") return PlotKind::HeatWorkVsP;
  if (s == "eta-power-vs-p") return PlotKind::EtaPowerVsP;
  throw Error(ErrorCode::ConfigError, "unknown plot kind '" + std::string(s) + "'");
}

namespace plot_detail {

struct Panel {
  std::string title;
  std::string y_label;
  std::function<double(const CycleReport&)> value;
};

inline std::array<Panel, 2> panels_for(PlotKind kind) {
  switch (kind) {
    case PlotKind::EntropyVsP:
      return {Panel{"(a) entropy change, heating channel", "dS^a (nats)", [](const CycleReport& r) { return r.dS_a; }},
              Panel{"(b) entropy change, work channel", "dS^b (nats)", [](const CycleReport& r) { return r.dS_b; }}};
    case PlotKind::HeatWorkVsP:
      return {Panel{"(a) absorbed heat", "Q^p (peV)", [](const CycleReport& r) { return r.heat_p; }},
              Panel{"(b) extracted work", "W_ext (peV)", [](const CycleReport& r) { return r.work_ext; }}};
    case PlotKind::EtaPowerVsP:
      return {Panel{"(a) efficiency", "eta", [](const CycleReport& r) { return r.efficiency; }},
              Panel{"(b) extracted power", "P_ext (peV/s)", [](const CycleReport& r) { return r.power_ext; }}};
  }
  return {};
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

inline Range padded(double lo, double hi) {
  if (!(hi > lo)) return {lo - 1.0, hi + 1.0};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

inline std::string num(double v) { return fmt::format("{:.2f}", v); }

constexpr std::array<const char*, 6> kPalette = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace plot_detail

/// Two-panel plot, one curve per temperature. Ideal-backend curves are
/// dashed; simulated ones are solid with markers. `metadata` is embedded
/// verbatim in an XML comment.
inline std::string emit_plot(const std::vector<SweepRow>& rows, PlotKind kind, std::string_view metadata = {}) {
  using namespace plot_detail;
  std::vector<const CycleReport*> reports;
  for (const auto& row : rows) {
    if (row.report) reports.push_back(&*row.report);
  }
  if (reports.empty()) throw Error(ErrorCode::NothingToPlot, "no successful sweep rows to plot");

  std::vector<double> temps;
  for (const auto* r : reports) {
    if (std::find(temps.begin(), temps.end(), r->kbt_pev) == temps.end()) temps.push_back(r->kbt_pev);
  }

  constexpr double kPanelW = 440, kPanelH = 340, kLeft = 70, kTop = 40, kPlotW = 340, kPlotH = 240;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      2 * kPanelW, kPanelH + 40, 2 * kPanelW, kPanelH + 40);
  if (!metadata.empty()) {
    std::string safe(metadata);
    for (std::size_t pos = 0; (pos = safe.find("--", pos)) != std::string::npos;) safe.replace(pos, 2, "- -");
    svg += fmt::format("<!-- {} -->\n", safe);
  }
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", 2 * kPanelW, kPanelH + 40);

  const auto panels = panels_for(kind);
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& panel = panels[pi];
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto* r : reports) {
      const double y = panel.value(*r);
      if (!std::isfinite(y)) continue;
      xmin = std::min(xmin, r->p);
      xmax = std::max(xmax, r->p);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    if (!std::isfinite(xmin)) xmin = xmax = ymin = ymax = 0.0;
    const Range xr = padded(xmin, xmax);
    const Range yr = padded(ymin, ymax);
    const double ox = pi * kPanelW + kLeft;
    auto sx = [&](double x) { return ox + (x - xr.lo) / (xr.hi - xr.lo) * kPlotW; };
    auto sy = [&](double y) { return kTop + kPlotH - (y - yr.lo) / (yr.hi - yr.lo) * kPlotH; };

    svg += fmt::format("<g font-family=\"sans-serif\" font-size=\"11\">\n");
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"13\">{}</text>\n", num(ox), num(kTop - 14), panel.title);
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                       num(ox), num(kTop), num(kPlotW), num(kPlotH));
    for (int t = 0; t <= 4; ++t) {
      const double xv = xr.lo + (xr.hi - xr.lo) * t / 4.0;
      const double yv = yr.lo + (yr.hi - yr.lo) * t / 4.0;
      svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{:.3g}</text>\n", num(sx(xv)),
                         num(kTop + kPlotH + 16), xv);
      svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3g}</text>\n", num(ox - 6),
                         num(sy(yv) + 4), yv);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">measurement strength p</text>\n",
                       num(ox + kPlotW / 2), num(kTop + kPlotH + 34));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{}</text>\n",
                       num(ox - 48), num(kTop + kPlotH / 2), num(ox - 48), num(kTop + kPlotH / 2), panel.y_label);

    for (std::size_t ti = 0; ti < temps.size(); ++ti) {
      const char* color = kPalette[ti % kPalette.size()];
      std::vector<std::pair<double, double>> pts;
      bool ideal = true;
      for (const auto* r : reports) {
        if (r->kbt_pev != temps[ti]) continue;
        const double y = panel.value(*r);
        if (!std::isfinite(y)) continue;
        ideal = ideal && r->backend == Backend::IdealKraus;
        pts.emplace_back(sx(r->p), sy(y));
      }
      if (pts.size() > 1) {
        std::string path;
        for (const auto& [x, y] : pts) path += fmt::format("{}{},{}", path.empty() ? "" : " ", num(x), num(y));
        svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n", path,
                           color, ideal ? " stroke-dasharray=\"6 4\"" : "");
      }
      if (!ideal || pts.size() == 1) {
        for (const auto& [x, y] : pts) {
          if (ti % 2 == 0) {
            svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"6\" height=\"6\" fill=\"{}\"/>\n", num(x - 3),
                               num(y - 3), color);
          } else {
            svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{}\"/>\n", num(x), num(y), color);
          }
        }
      }
      const double ly = kTop + 14 + 14 * static_cast<double>(ti);
      svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n",
                         num(ox + 8), num(ly - 4), num(ox + 30), num(ly - 4), color,
                         ideal ? " stroke-dasharray=\"6 4\"" : "");
      svg += fmt::format("<text x=\"{}\" y=\"{}\">kBT = {:.3g} peV</text>\n", num(ox + 34), num(ly), temps[ti]);
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace qme
