/*
 * Copyright 2026 The panellime Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "panellime/svg.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace panellime {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << v;
  return os.str();
}

void open(std::ostringstream& os, int width, int height) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string explanation_svg(const Explanation& e) {
  constexpr int kLabel = 220;
  constexpr int kBar = 400;
  constexpr int kRow = 24;
  const int n = static_cast<int>(e.features.size());
  const int height = 50 + kRow * std::max(n, 1);
  std::ostringstream os;
  open(os, kLabel + kBar + 40, height);
  os << "<text x=\"10\" y=\"20\" font-weight=\"bold\">" << escape(e.label.empty() ? std::to_string(e.instance_id) : e.label)
     << "</text>\n";
  double max_abs = 0.0;
  for (const auto& f : e.features) max_abs = std::max(max_abs, std::abs(f.weight));
  if (max_abs == 0.0) max_abs = 1.0;
  const double mid = kLabel + kBar / 2.0;
  os << "<line x1=\"" << num(mid) << "\" y1=\"30\" x2=\"" << num(mid) << "\" y2=\"" << height - 10
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i < n; ++i) {
    const auto& f = e.features[static_cast<std::size_t>(i)];
    const double len = std::abs(f.weight) / max_abs * (kBar / 2.0 - 10);
    const double x = f.weight < 0 ? mid - len : mid;
    const int y = 36 + kRow * i;
    os << "<text x=\"10\" y=\"" << y + 14 << "\">" << escape(f.name) << "</text>\n"
       << "<rect x=\"" << num(x) << "\" y=\"" << y << "\" width=\"" << num(len) << "\" height=\"" << kRow - 6
       << "\" fill=\"" << (f.weight < 0 ? "#d62728" : "#2ca02c") << "\"><title>" << num(f.weight)
       << "</title></rect>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string ice_svg(const IceCurve& curve) {
  constexpr int kW = 640;
  constexpr int kH = 420;
  constexpr int kPad = 50;
  std::ostringstream os;
  open(os, kW, kH);
  os << "<text x=\"" << kPad << "\" y=\"20\" font-weight=\"bold\">ICE: " << escape(curve.name) << "</text>\n";
  const double x0 = curve.grid.minCoeff();
  const double x1 = curve.grid.maxCoeff();
  double y0 = curve.predictions.size() ? curve.predictions.minCoeff() : 0.0;
  double y1 = curve.predictions.size() ? curve.predictions.maxCoeff() : 1.0;
  if (y1 <= y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const auto px = [&](double x) { return kPad + (x - x0) / (x1 > x0 ? x1 - x0 : 1.0) * (kW - 2 * kPad); };
  const auto py = [&](double y) { return kH - kPad - (y - y0) / (y1 - y0) * (kH - 2 * kPad); };
  const auto polyline = [&](const Eigen::VectorXd& ys, const char* style) {
    os << "<polyline fill=\"none\" " << style << " points=\"";
    for (Eigen::Index g = 0; g < curve.grid.size(); ++g) os << num(px(curve.grid(g))) << ',' << num(py(ys(g))) << ' ';
    os << "\"/>\n";
  };
  for (Eigen::Index i = 0; i < curve.predictions.rows(); ++i) {
    polyline(curve.predictions.row(i).transpose(), "stroke=\"#1f77b4\" stroke-opacity=\"0.3\"");
  }
  if (curve.pdp.size() == curve.grid.size()) polyline(curve.pdp, "stroke=\"#ff7f0e\" stroke-width=\"3\"");
  os << "<text x=\"" << kPad << "\" y=\"" << kH - 15 << "\">" << num(x0) << "</text>\n"
     << "<text x=\"" << kW - kPad << "\" y=\"" << kH - 15 << "\" text-anchor=\"end\">" << num(x1) << "</text>\n"
     << "<text x=\"5\" y=\"" << kPad << "\">" << num(y1) << "</text>\n"
     << "<text x=\"5\" y=\"" << kH - kPad << "\">" << num(y0) << "</text>\n"
     << "</svg>\n";
  return os.str();
}

std::string eval_svg(const EvalReport& report) {
  constexpr int kH = 360;
  constexpr int kPad = 50;
  constexpr int kGroup = 70;
  const int n = static_cast<int>(report.runs.size());
  const int width = 2 * kPad + kGroup * std::max(n, 1);
  double lo = std::min(0.0, report.r2_full_model);
  for (const auto& r : report.runs) lo = std::min({lo, r.r2_lime, r.r2_random});
  const double hi = 1.0;
  const auto py = [&](double y) { return kH - kPad - (y - lo) / (hi - lo) * (kH - 2 * kPad); };
  std::ostringstream os;
  open(os, width, kH);
  os << "<text x=\"" << kPad << "\" y=\"20\" font-weight=\"bold\">R^2 with k=" << report.k_columns
     << " columns: LIME (blue) vs random (grey)</text>\n";
  for (int i = 0; i < n; ++i) {
    const auto& r = report.runs[static_cast<std::size_t>(i)];
    const int x = kPad + kGroup * i + 10;
    const auto bar = [&](int bx, double v, const char* colour) {
      const double top = std::min(py(v), py(0.0));
      os << "<rect x=\"" << bx << "\" y=\"" << num(top) << "\" width=\"24\" height=\""
         << num(std::abs(py(v) - py(0.0))) << "\" fill=\"" << colour << "\"><title>" << num(v) << "</title></rect>\n";
    };
    bar(x, r.r2_lime, "#1f77b4");
    bar(x + 26, r.r2_random, "#7f7f7f");
    os << "<text x=\"" << x + 25 << "\" y=\"" << kH - kPad + 16 << "\" text-anchor=\"middle\">run " << i + 1
       << "</text>\n";
  }
  os << "<line x1=\"" << kPad << "\" x2=\"" << width - kPad << "\" y1=\"" << num(py(0.0)) << "\" y2=\""
     << num(py(0.0)) << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << kPad << "\" x2=\"" << width - kPad << "\" y1=\"" << num(py(report.r2_full_model))
     << "\" y2=\"" << num(py(report.r2_full_model)) << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n"
     << "</svg>\n";
  return os.str();
}

}  // namespace panellime
