#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace curvlab::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Canvas {
 public:
  Canvas(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {}

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }
  bool inside(double x, double y) const {
    return std::isfinite(x) && std::isfinite(y) && x >= x0_ && x <= x1_ && y >= y0_ && y <= y1_;
  }

  /// Polyline split wherever it leaves the window.
  void curve(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
    std::string run;
    int count = 0;
    auto flush = [&] {
      if (count >= 2) body_ += "<polyline fill=\"none\" " + style + " points=\"" + run + "\"/>\n";
      run.clear();
      count = 0;
    };
    for (auto [x, y] : pts) {
      if (!inside(x, y)) {
        flush();
        continue;
      }
      run += num(px(x)) + "," + num(py(y)) + " ";
      ++count;
    }
    flush();
  }

  void text(double x, double y, const std::string& s, const char* anchor = "middle") {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor +
             "\" font-family=\"sans-serif\" font-size=\"12\">" + s + "</text>\n";
  }

  void frame(const std::string& xlabel, const std::string& ylabel, const std::string& title) {
    body_ += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kWidth - kLeft - kRight) +
             "\" height=\"" + num(kHeight - kTop - kBottom) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double x = x0_ + (x1_ - x0_) * i / 4.0, y = y0_ + (y1_ - y0_) * i / 4.0;
      text(px(x), kHeight - kBottom + 16, label(x));
      text(kLeft - 6, py(y) + 4, label(y), "end");
    }
    if (x0_ < 0 && x1_ > 0) curve({{0.0, y0_}, {0.0, y1_}}, "stroke=\"#bbbbbb\"");
    if (y0_ < 0 && y1_ > 0) curve({{x0_, 0.0}, {x1_, 0.0}}, "stroke=\"#bbbbbb\"");
    text((kLeft + kWidth - kRight) / 2, kHeight - 8, xlabel);
    text(14, (kTop + kHeight - kBottom) / 2, ylabel);
    text(kWidth / 2, 18, title);
  }

  void write(std::ostream& out) const {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_ << "</svg>\n";
  }

 private:
  static constexpr double kWidth = 640, kHeight = 480, kLeft = 60, kRight = 20, kTop = 30, kBottom = 40;
  double x0_, x1_, y0_, y1_;
  std::string body_;
};

// Both branches y = +-sqrt(E - x^3/6) for x up to the turning point, as one curve.
std::vector<std::pair<double, double>> level_set(double E, double xlo, double xhi) {
  const double turn = std::cbrt(6.0 * E);
  const double top = std::min(xhi, turn);
  std::vector<std::pair<double, double>> upper;
  if (top <= xlo) return upper;
  const int samples = 400;
  for (int i = 0; i <= samples; ++i) {
    // cluster samples near the turning point where the branch is vertical
    const double s = static_cast<double>(i) / samples;
    const double x = top - (top - xlo) * s * s;
    upper.emplace_back(x, std::sqrt(std::max(0.0, E - x * x * x / 6.0)));
  }
  std::reverse(upper.begin(), upper.end());
  std::vector<std::pair<double, double>> pts = upper;
  for (auto it = upper.rbegin(); it != upper.rend(); ++it) pts.emplace_back(it->first, -it->second);
  return pts;
}

}  // namespace

void write_phase_portrait(std::ostream& out, const OdeSolution& sol) {
  double fmax = std::abs(sol.initial.f);
  if (sol.critical) fmax = std::max(fmax, std::abs(sol.critical->f));
  const double X = std::max(3.0, 1.5 * fmax);
  const double Y = std::max({3.0, 1.5 * std::abs(sol.initial.fp), std::sqrt(std::max(0.0, sol.energy))});
  Canvas c(-X, X, -Y, Y);
  c.frame("f", "f'", "phase portrait, E = " + label(sol.energy));

  const double scale = std::max(1.0, std::abs(sol.energy));
  for (int k = -3; k <= 3; ++k) {
    const double E = sol.energy + 0.5 * k * scale;
    if (std::abs(E) < 1e-12 * scale) continue;
    c.curve(level_set(E, -X, X), "stroke=\"#9ecae1\"");
  }
  c.curve(level_set(0.0, -X, X), "stroke=\"#555555\" stroke-dasharray=\"6,4\"");

  std::vector<std::pair<double, double>> traj;
  for (const auto& s : sol.samples) traj.emplace_back(s.f, s.fp);
  c.curve(traj, "stroke=\"#d62728\" stroke-width=\"2\"");
  c.write(out);
}

void write_flow_trace(std::ostream& out, const FlowTrace& trace) {
  std::vector<std::pair<double, double>> value, residual;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  auto add = [&](std::vector<std::pair<double, double>>& v, double step, double y) {
    if (!(y > 0.0)) return;
    const double ly = std::log10(y);
    v.emplace_back(step, ly);
    lo = first ? ly : std::min(lo, ly);
    hi = first ? ly : std::max(hi, ly);
    first = false;
  };
  for (const auto& r : trace.records) {
    add(value, r.step, std::abs(r.value));
    add(residual, r.step, r.grad_sup);
  }
  if (first) lo = -1.0, hi = 1.0;
  if (hi - lo < 1.0) hi = lo + 1.0;
  const double steps = std::max(1, trace.records.empty() ? 1 : trace.records.back().step);
  Canvas c(0.0, steps, std::floor(lo), std::ceil(hi));
  c.frame("step", "log10", "value (blue), gradient sup (red)");
  c.curve(value, "stroke=\"#1f77b4\" stroke-width=\"2\"");
  c.curve(residual, "stroke=\"#d62728\" stroke-width=\"2\"");
  c.write(out);
}

}  // namespace curvlab::cli
