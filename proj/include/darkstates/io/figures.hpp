#pragma once

// Static SVG figures rendered purely from stored result files.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "darkstates/analysis.hpp"
#include "darkstates/errors.hpp"
#include "darkstates/io/results.hpp"

namespace darkstates::io {

enum class FigureKind { pr_vs_n, pr_vs_layers, pr_vs_shell, pr_vs_sigma, pr_vs_lz, dispersion };

inline const char* to_string(FigureKind k) {
  switch (k) {
    case FigureKind::pr_vs_n: return "pr_vs_n";
    case FigureKind::pr_vs_layers: return "pr_vs_layers";
    case FigureKind::pr_vs_shell: return "pr_vs_shell";
    case FigureKind::pr_vs_sigma: return "pr_vs_sigma";
    case FigureKind::pr_vs_lz: return "pr_vs_lz";
    case FigureKind::dispersion: return "dispersion";
  }
  return "unknown";
}

inline std::optional<FigureKind> parse_figure_kind(const std::string& s) {
  for (auto k : {FigureKind::pr_vs_n, FigureKind::pr_vs_layers, FigureKind::pr_vs_shell,
                 FigureKind::pr_vs_sigma, FigureKind::pr_vs_lz, FigureKind::dispersion})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

/// Result kind each figure is drawn from.
inline const char* required_result_kind(FigureKind k) {
  switch (k) {
    case FigureKind::pr_vs_n: return "size_sweep";
    case FigureKind::pr_vs_layers: return "layer_sweep";
    case FigureKind::pr_vs_shell: return "shell_sweep";
    case FigureKind::pr_vs_sigma: return "disorder_sweep";
    case FigureKind::pr_vs_lz: return "cavity_length_sweep";
    case FigureKind::dispersion: return "dispersion";
  }
  return "";
}

/// Ensemble statistics regrouped from stored rows.
struct StoredGroup {
  double axis_value = 0.0;
  int n_side = 0;
  std::size_t n_molecules = 0;
  EnsembleStat stat;
  double shell_e_min = std::numeric_limits<double>::quiet_NaN();
  double shell_e_max = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<StoredGroup> regroup(const std::vector<ResultRow>& rows) {
  std::vector<StoredGroup> groups;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<std::size_t>> counts;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const StoredGroup& g) {
      return g.axis_value == r.axis_value && g.n_side == r.n_side;
    });
    if (it == groups.end()) {
      groups.push_back({r.axis_value, r.n_side, r.n_molecules, {}, r.shell_e_min, r.shell_e_max});
      means.emplace_back();
      counts.emplace_back();
      it = groups.end() - 1;
    }
    const auto idx = static_cast<std::size_t>(it - groups.begin());
    if (!r.ok) continue;
    means[idx].push_back(r.dark_pr_mean);
    counts[idx].push_back(r.dark_count);
    if (std::isnan(it->shell_e_min)) {
      it->shell_e_min = r.shell_e_min;
      it->shell_e_max = r.shell_e_max;
    }
  }
  for (std::size_t i = 0; i < groups.size(); ++i) groups[i].stat = ensemble_stat(means[i], counts[i]);
  return groups;
}

namespace svg {

inline std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline std::vector<double> ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

/// Colour for t in [0, 1] on a perceptual blue-green-yellow ramp.
inline std::string ramp(double t) {
  static const double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return colors[i % 6];
}

class Canvas {
 public:
  Canvas(double xmin, double xmax, double ymin, double ymax) {
    const auto pad = [](double& lo, double& hi) {
      if (!(hi > lo)) {
        const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        lo -= d;
        hi += d;
      }
      const double m = 0.06 * (hi - lo);
      lo -= m;
      hi += m;
    };
    pad(xmin, xmax);
    pad(ymin, ymax);
    x0_ = xmin, x1_ = xmax, y0_ = ymin, y1_ = ymax;
  }

  double px(double x) const { return left_ + (x - x0_) / (x1_ - x0_) * (width_ - left_ - right_); }
  double py(double y) const { return height_ - bottom_ - (y - y0_) / (y1_ - y0_) * (height_ - top_ - bottom_); }
  double right_edge() const { return width_ - right_; }
  double top_edge() const { return top_; }

  void axes(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
    const double xl = left_, xr = width_ - right_, yt = top_, yb = height_ - bottom_;
    body_ << "<rect x=\"" << num(xl) << "\" y=\"" << num(yt) << "\" width=\"" << num(xr - xl)
          << "\" height=\"" << num(yb - yt) << "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (double t : ticks(x0_, x1_)) {
      body_ << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(yb) << "\" x2=\"" << num(px(t))
            << "\" y2=\"" << num(yb + 5) << "\" stroke=\"#000\"/>\n"
            << "<text x=\"" << num(px(t)) << "\" y=\"" << num(yb + 18)
            << "\" text-anchor=\"middle\" font-size=\"12\">" << num(t) << "</text>\n";
    }
    for (double t : ticks(y0_, y1_)) {
      body_ << "<line x1=\"" << num(xl - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(xl)
            << "\" y2=\"" << num(py(t)) << "\" stroke=\"#000\"/>\n"
            << "<text x=\"" << num(xl - 8) << "\" y=\"" << num(py(t) + 4)
            << "\" text-anchor=\"end\" font-size=\"12\">" << num(t) << "</text>\n";
    }
    body_ << "<text x=\"" << num((xl + xr) / 2) << "\" y=\"" << num(top_ / 2 + 6)
          << "\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n"
          << "<text x=\"" << num((xl + xr) / 2) << "\" y=\"" << num(height_ - 12)
          << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(xlabel) << "</text>\n"
          << "<text transform=\"translate(18," << num((yt + yb) / 2)
          << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(ylabel)
          << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                const std::string& extra = "") {
    if (pts.empty()) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" " << extra << " points=\"";
    for (const auto& [x, y] : pts) body_ << num(px(x)) << ',' << num(py(y)) << ' ';
    body_ << "\"/>\n";
  }

  void point(double x, double y, const std::string& color, double r = 3.5) {
    body_ << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"" << num(r)
          << "\" fill=\"" << color << "\"/>\n";
  }

  void error_bar(double x, double lo, double hi, const std::string& color) {
    body_ << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(px(x))
          << "\" y2=\"" << num(py(hi)) << "\" stroke=\"" << color << "\"/>\n";
    for (double y : {lo, hi})
      body_ << "<line x1=\"" << num(px(x) - 4) << "\" y1=\"" << num(py(y)) << "\" x2=\""
            << num(px(x) + 4) << "\" y2=\"" << num(py(y)) << "\" stroke=\"" << color << "\"/>\n";
  }

  void text(double x_px, double y_px, const std::string& s, const std::string& color = "#000",
            const std::string& anchor = "start") {
    body_ << "<text x=\"" << num(x_px) << "\" y=\"" << num(y_px) << "\" font-size=\"12\" fill=\""
          << color << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
  }

  void raw(const std::string& s) { body_ << s; }

  std::string str() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
       << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
       << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
  double width_ = 720, height_ = 480, left_ = 80, right_ = 90, top_ = 40, bottom_ = 55;
  std::ostringstream body_;
};

}  // namespace svg

namespace detail {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<const StoredGroup*> groups;
};

inline std::string pr_plot(const std::vector<Series>& series, const std::string& title,
                           const std::string& xlabel, double fit_min,
                           const std::vector<StoredGroup>* shell_groups = nullptr) {
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const auto& st = s.groups[i]->stat;
      if (st.n_realizations == 0) continue;
      const double err = std::isfinite(st.std) ? st.std : 0.0;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, st.mean - err);
      ymax = std::max(ymax, st.mean + err);
    }
  if (!std::isfinite(xmin)) throw DomainError("figure: no successful cells to plot");
  svg::Canvas canvas(xmin, xmax, std::min(0.0, ymin), ymax);
  canvas.axes(title, xlabel, "dark-state PR (mean +/- std over realizations)");

  if (shell_groups) {
    double emin = INFINITY, emax = -INFINITY;
    for (const auto& g : *shell_groups) {
      emin = std::min(emin, g.shell_e_min);
      emax = std::max(emax, g.shell_e_max);
    }
    if (std::isfinite(emin)) {
      const double span = emax > emin ? emax - emin : 1.0;
      const double lo = emin - 0.05 * span, hi = emax + 0.05 * span;
      const auto ey = [&](double e) {
        const double y0 = canvas.py(std::min(0.0, ymin)), y1 = canvas.top_edge();
        return y0 + (e - lo) / (hi - lo) * (y1 - y0);
      };
      for (const auto& g : *shell_groups) {
        const double x = canvas.px(g.axis_value);
        std::ostringstream os;
        os << "<rect x=\"" << svg::num(x - 4) << "\" y=\"" << svg::num(ey(g.shell_e_max))
           << "\" width=\"8\" height=\"" << svg::num(std::max(1.0, ey(g.shell_e_min) - ey(g.shell_e_max)))
           << "\" fill=\"#d62728\" fill-opacity=\"0.45\"/>\n";
        canvas.raw(os.str());
      }
      for (double t : svg::ticks(lo, hi, 5))
        canvas.text(canvas.right_edge() + 8, ey(t) + 4, svg::num(t), "#d62728");
      canvas.text(canvas.right_edge() + 8, canvas.top_edge() - 8, "shell energy (eV)", "#d62728");
    }
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color = svg::palette(si);
    std::vector<std::pair<double, double>> line;
    std::vector<FitPoint> pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const auto& st = s.groups[i]->stat;
      if (st.n_realizations == 0) continue;
      line.emplace_back(s.x[i], st.mean);
      if (std::isfinite(st.std)) canvas.error_bar(s.x[i], st.mean - st.std, st.mean + st.std, color);
      canvas.point(s.x[i], st.mean, color);
      pts.push_back({static_cast<double>(s.groups[i]->n_molecules), st.mean});
    }
    canvas.polyline(line, color, "stroke-opacity=\"0.35\"");
    std::string label = s.label;
    if (fit_min > 0.0) {
      try {
        const auto fit = linear_fit(pts, fit_min);
        std::vector<std::pair<double, double>> fl;
        for (double x : {fit_min, xmax}) fl.emplace_back(x, fit.intercept + fit.slope * x);
        canvas.polyline(fl, color, "stroke-dasharray=\"6,4\"");
        std::ostringstream os;
        os << (label.empty() ? "" : label + ": ") << "slope " << std::setprecision(4) << fit.slope
           << " (N >= " << fit_min << ")";
        label = os.str();
      } catch (const DomainError&) {
      }
    }
    if (!label.empty()) canvas.text(95, 62 + 16.0 * si, label, color);
  }
  return canvas.str();
}

inline std::string dispersion_plot(const StoredDispersion& d) {
  double kmax = 0.0, emin = d.exciton_energy, emax = d.exciton_energy;
  for (const auto& r : d.rows) {
    kmax = std::max(kmax, r.k);
    emin = std::min(emin, r.energy);
    emax = std::max(emax, r.energy);
  }
  svg::Canvas canvas(0.0, kmax > 0 ? kmax : 1.0, emin, emax);
  canvas.axes("Energy spectrum vs |k|", "|k| (1/nm)", "energy (eV)");
  std::vector<std::pair<double, double>> bare;
  for (const auto& [k, e] : d.bare)
    if (k <= kmax && e <= emax + 0.1 * (emax - emin)) bare.emplace_back(k, e);
  canvas.polyline(bare, "#555", "stroke-dasharray=\"2,0\"");
  canvas.polyline({{0.0, d.exciton_energy}, {kmax > 0 ? kmax : 1.0, d.exciton_energy}}, "#000",
                  "stroke-dasharray=\"2,3\"");
  for (const auto& r : d.rows) canvas.point(r.k, r.energy, svg::ramp(r.photon_fraction), 3.0);
  // colour bar
  const double x = canvas.right_edge() + 20, y0 = canvas.top_edge() + 10;
  for (int i = 0; i < 50; ++i) {
    std::ostringstream os;
    os << "<rect x=\"" << x << "\" y=\"" << svg::num(y0 + (49 - i) * 4) << "\" width=\"14\" height=\"4\" fill=\""
       << svg::ramp(i / 49.0) << "\"/>\n";
    canvas.raw(os.str());
  }
  canvas.text(x + 18, y0 + 8, "1");
  canvas.text(x + 18, y0 + 200, "0");
  canvas.text(x - 6, y0 - 2, "photon fraction");
  canvas.text(95, 62, "grey: bare cavity modes; dotted: mean exciton energy");
  return canvas.str();
}

}  // namespace detail

inline double stored_fit_min(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json")) return 2000.0;
  const auto m = json::parse(read_text(dir / "manifest.json"), nullptr, false);
  if (m.is_discarded() || !m.contains("plan") || !m["plan"].contains("fit_min_molecules")) return 2000.0;
  return m["plan"]["fit_min_molecules"].get<double>();
}

/// Renders one figure from a results directory. Mismatched figure/result kinds are errors.
inline std::string render_figure(const StoredResults& stored, FigureKind kind, double fit_min = 2000.0) {
  if (stored.kind != required_result_kind(kind))
    throw ConfigError(std::string("figure kind '") + to_string(kind) + "' needs a " +
                      required_result_kind(kind) + " result, got '" + stored.kind + "'");
  if (kind == FigureKind::dispersion) {
    if (!stored.dispersion) throw IoError("dispersion result lacks dispersion.csv");
    return detail::dispersion_plot(*stored.dispersion);
  }
  const auto groups = regroup(stored.rows);
  std::set<int> sides;
  for (const auto& g : groups) sides.insert(g.n_side);
  std::vector<detail::Series> series;

  if (kind == FigureKind::pr_vs_n) {
    detail::Series s;
    for (const auto& g : groups) {
      s.x.push_back(static_cast<double>(g.n_molecules));
      s.groups.push_back(&g);
    }
    series.push_back(std::move(s));
    return detail::pr_plot(series, "Dark-state PR vs number of molecules", "N (molecules)", fit_min);
  }

  const bool across_sizes = sides.size() > 1 && (kind == FigureKind::pr_vs_sigma || kind == FigureKind::pr_vs_lz);
  if (across_sizes) {
    // one PR(N) curve per axis value
    std::vector<double> values;
    for (const auto& g : groups)
      if (std::find(values.begin(), values.end(), g.axis_value) == values.end()) values.push_back(g.axis_value);
    for (double v : values) {
      detail::Series s;
      std::ostringstream label;
      label << (kind == FigureKind::pr_vs_sigma ? "sigma_e = " : "L_z = ") << v
            << (kind == FigureKind::pr_vs_sigma ? " eV" : " nm");
      s.label = label.str();
      for (const auto& g : groups)
        if (g.axis_value == v) {
          s.x.push_back(static_cast<double>(g.n_molecules));
          s.groups.push_back(&g);
        }
      series.push_back(std::move(s));
    }
    return detail::pr_plot(series, "Dark-state PR vs number of molecules", "N (molecules)", fit_min);
  }

  for (int side : sides) {
    detail::Series s;
    if (sides.size() > 1) s.label = std::to_string(side) + "x" + std::to_string(side);
    for (const auto& g : groups)
      if (g.n_side == side) {
        s.x.push_back(g.axis_value);
        s.groups.push_back(&g);
      }
    series.push_back(std::move(s));
  }
  switch (kind) {
    case FigureKind::pr_vs_layers:
      return detail::pr_plot(series, "Dark-state PR vs number of layers", "N_z (layers)", 0.0);
    case FigureKind::pr_vs_shell:
      return detail::pr_plot(series, "Dark-state PR per photon-mode shell", "m_max", 0.0, &groups);
    case FigureKind::pr_vs_sigma:
      return detail::pr_plot(series, "Dark-state PR vs energetic disorder", "sigma_e (eV)", 0.0);
    case FigureKind::pr_vs_lz:
      return detail::pr_plot(series, "Dark-state PR vs cavity length", "L_z (nm)", 0.0);
    default: break;
  }
  throw ConfigError("unsupported figure kind");
}

inline void emit_figure(const fs::path& results_dir, FigureKind kind, const fs::path& out) {
  const auto stored = read_results(results_dir);
  write_text(out, render_figure(stored, kind, stored_fit_min(results_dir)));
}

}  // namespace darkstates::io
