#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "bfm/errors.hpp"
#include "bfm/sim.hpp"

namespace bfm {

namespace detail {

inline std::string fmt_svg(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct SvgFrame {
  double x0, x1, y0, y1;           // data range
  double px0, px1, py0, py1;       // pixel range (py0 is the top)
  double sx(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
  double sy(double y) const { return py1 - (y - y0) / (y1 - y0) * (py1 - py0); }
};

inline void pad_range(double& lo, double& hi, double frac) {
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = (hi - lo) * frac;
  lo -= pad;
  hi += pad;
}

inline const char* k_palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                  "#bcbd22", "#17becf", "#aec7e8", "#ffbb78"};

inline void svg_open(std::ofstream& out, int w, int h, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"15\">" << title << "</text>\n";
}

inline void svg_frame(std::ofstream& out, const SvgFrame& f, const std::string& xlab,
                      const std::string& ylab) {
  out << "<rect x=\"" << fmt_svg(f.px0) << "\" y=\"" << fmt_svg(f.py0) << "\" width=\""
      << fmt_svg(f.px1 - f.px0) << "\" height=\"" << fmt_svg(f.py1 - f.py0)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  out << "<text x=\"" << fmt_svg((f.px0 + f.px1) / 2) << "\" y=\"" << fmt_svg(f.py1 + 32)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlab
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << fmt_svg((f.py0 + f.py1) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 "
      << fmt_svg((f.py0 + f.py1) / 2) << ")\">" << ylab << "</text>\n";
  // corner tick labels
  out << "<text x=\"" << fmt_svg(f.px0) << "\" y=\"" << fmt_svg(f.py1 + 16)
      << "\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_svg(f.x0) << "</text>\n";
  out << "<text x=\"" << fmt_svg(f.px1) << "\" y=\"" << fmt_svg(f.py1 + 16)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_svg(f.x1)
      << "</text>\n";
  out << "<text x=\"" << fmt_svg(f.px0 - 4) << "\" y=\"" << fmt_svg(f.py1)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_svg(f.y0)
      << "</text>\n";
  out << "<text x=\"" << fmt_svg(f.px0 - 4) << "\" y=\"" << fmt_svg(f.py0 + 10)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_svg(f.y1)
      << "</text>\n";
}

}  // namespace detail

// Planar trajectory plot; 3D runs are projected onto the xy plane. Leaders are
// blue, followers orange, the tracked target (if any) dashed gray, and the
// obstacle's activation disc is drawn to scale.
inline void write_trajectory_svg(const SimTrace& tr, const std::string& path) {
  const TraceMeta& m = tr.meta;
  std::ofstream out(path);
  if (!out) throw Error(Fault::IoError, "cannot open " + path + " for writing");

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  auto grow = [&](double x, double y) {
    x0 = std::min(x0, x); x1 = std::max(x1, x);
    y0 = std::min(y0, y); y1 = std::max(y1, y);
  };
  for (int s = 0; s < tr.samples(); ++s) {
    for (int a = 0; a < m.n; ++a) grow(tr.pos(s, a, 0), tr.pos(s, a, 1));
    for (int e = 0; e < m.est_count; ++e) grow(tr.est(s, e, 0), tr.est(s, e, 1));
  }
  if (m.has_obstacle) {
    grow(m.obs_x - m.obs_d, m.obs_y - m.obs_d);
    grow(m.obs_x + m.obs_d, m.obs_y + m.obs_d);
  }
  if (tr.samples() == 0) { x0 = y0 = -1.0; x1 = y1 = 1.0; }
  detail::pad_range(x0, x1, 0.06);
  detail::pad_range(y0, y1, 0.06);

  // equal aspect: widen the shorter axis
  const int w = 760, hpx = 560;
  const double plot_w = w - 110.0, plot_h = hpx - 90.0;
  const double need = (x1 - x0) / (y1 - y0), have = plot_w / plot_h;
  if (need < have) {
    const double cx = (x0 + x1) / 2, half = (y1 - y0) * have / 2;
    x0 = cx - half; x1 = cx + half;
  } else {
    const double cy = (y0 + y1) / 2, half = (x1 - x0) / have / 2;
    y0 = cy - half; y1 = cy + half;
  }
  detail::SvgFrame f{x0, x1, y0, y1, 70, 70 + plot_w, 40, 40 + plot_h};

  detail::svg_open(out, w, hpx, m.name + ": trajectories");
  detail::svg_frame(out, f, "x", "y");

  if (m.has_obstacle) {
    out << "<circle cx=\"" << detail::fmt_svg(f.sx(m.obs_x)) << "\" cy=\""
        << detail::fmt_svg(f.sy(m.obs_y)) << "\" r=\""
        << detail::fmt_svg(m.obs_d / (x1 - x0) * plot_w)
        << "\" fill=\"#eee\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    out << "<circle cx=\"" << detail::fmt_svg(f.sx(m.obs_x)) << "\" cy=\""
        << detail::fmt_svg(f.sy(m.obs_y)) << "\" r=\"3\" fill=\"#666\"/>\n";
  }

  auto polyline = [&](auto coord, const std::string& style) {
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (int s = 0; s < tr.samples(); ++s) {
      const auto [px, py] = coord(s);
      out << detail::fmt_svg(f.sx(px)) << ',' << detail::fmt_svg(f.sy(py));
      if (s + 1 < tr.samples()) out << ' ';
    }
    out << "\"/>\n";
  };

  if (m.est_count == 1 && m.l == 0)
    polyline([&](int s) { return std::pair{tr.est(s, 0, 0), tr.est(s, 0, 1)}; },
             "stroke=\"#555\" stroke-width=\"1\" stroke-dasharray=\"5 4\"");
  for (int a = 0; a < m.n; ++a) {
    const bool leader = a < m.l;
    polyline([&](int s) { return std::pair{tr.pos(s, a, 0), tr.pos(s, a, 1)}; },
             std::string("stroke=\"") + (leader ? "#4682b4" : "#ff8c00") + "\" stroke-width=\"" +
                 (leader ? "1.6" : "1.1") + "\"");
  }
  // start and end markers
  for (int a = 0; a < m.n && tr.samples() > 0; ++a) {
    const bool leader = a < m.l;
    const char* color = leader ? "#4682b4" : "#ff8c00";
    out << "<circle cx=\"" << detail::fmt_svg(f.sx(tr.pos(0, a, 0))) << "\" cy=\""
        << detail::fmt_svg(f.sy(tr.pos(0, a, 1))) << "\" r=\"3\" fill=\"white\" stroke=\"" << color
        << "\"/>\n";
    const int last = tr.samples() - 1;
    out << "<rect x=\"" << detail::fmt_svg(f.sx(tr.pos(last, a, 0)) - 3) << "\" y=\""
        << detail::fmt_svg(f.sy(tr.pos(last, a, 1)) - 3) << "\" width=\"6\" height=\"6\" fill=\""
        << color << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw Error(Fault::IoError, "write failed for " + path);
}

// Position-error magnitudes over time on a log scale, one curve per follower
// (or per agent for target tracking), clamped below at 1e-9.
inline void write_error_svg(const SimTrace& tr, const std::string& path) {
  const TraceMeta& m = tr.meta;
  std::ofstream out(path);
  if (!out) throw Error(Fault::IoError, "cannot open " + path + " for writing");

  const int nf = m.err_count();
  const double floor_err = 1e-9;
  double top = 10.0 * floor_err;
  for (int s = 0; s < tr.samples(); ++s)
    for (int i = 0; i < nf; ++i) top = std::max(top, tr.pos_err(s, i));

  const int w = 760, hpx = 480;
  const double plot_w = w - 110.0, plot_h = hpx - 90.0;
  const double t0 = 0.0, t1 = tr.samples() > 0 ? std::max(tr.times.back(), m.h) : 1.0;
  const double ly0 = std::log10(floor_err), ly1 = std::ceil(std::log10(top));
  detail::SvgFrame f{t0, t1, ly0, ly1, 70, 70 + plot_w, 40, 40 + plot_h};

  detail::svg_open(out, w, hpx, m.name + ": position error");
  detail::svg_frame(out, f, "t", "log10 |error|");

  if (m.threshold > 0.0) {
    const double ty = f.sy(std::log10(std::max(m.threshold, floor_err)));
    out << "<line x1=\"" << detail::fmt_svg(f.px0) << "\" y1=\"" << detail::fmt_svg(ty)
        << "\" x2=\"" << detail::fmt_svg(f.px1) << "\" y2=\"" << detail::fmt_svg(ty)
        << "\" stroke=\"#bbb\" stroke-dasharray=\"3 3\"/>\n";
  }

  for (int i = 0; i < nf; ++i) {
    out << "<polyline fill=\"none\" stroke=\""
        << detail::k_palette[static_cast<size_t>(i) % 12] << "\" stroke-width=\"1.2\" points=\"";
    for (int s = 0; s < tr.samples(); ++s) {
      const double e = std::max(tr.pos_err(s, i), floor_err);
      out << detail::fmt_svg(f.sx(tr.times[static_cast<size_t>(s)])) << ','
          << detail::fmt_svg(f.sy(std::log10(e)));
      if (s + 1 < tr.samples()) out << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw Error(Fault::IoError, "write failed for " + path);
}

}  // namespace bfm
