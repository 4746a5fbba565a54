#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dnls/harness.hpp"

namespace dnls {

namespace fs = std::filesystem;

namespace {

std::string num(double v, const char* fmt = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Series {
  std::string name;
  std::string color;
  const std::vector<double>* x;
  std::vector<double> y;
};

constexpr std::array<const char*, 4> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

class Svg {
 public:
  Svg(double w, double h) : w_(w), h_(h) {}

  void text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 12) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size << "\" text-anchor=\""
          << anchor << "\">" << s << "</text>\n";
  }
  void line(double x0, double y0, double x1, double y1, const char* stroke = "#000") {
    body_ << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y1)
          << "\" stroke=\"" << stroke << "\" stroke-width=\"1\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    if (pts.size() < 2) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      body_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
    }
    body_ << "\"/>\n";
  }
  std::string str() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_, "%.0f") << "\" height=\""
       << num(h_, "%.0f") << "\" viewBox=\"0 0 " << num(w_, "%.0f") << ' ' << num(h_, "%.0f")
       << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
       << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  double w_, h_;
  std::ostringstream body_;
};

// One axes box at (x0, y0) of size (w, h). Non-finite points break lines;
// with log_y non-positive values are dropped too.
void panel(Svg& svg, double x0, double y0, double w, double h, const std::string& title, const std::string& xlabel,
           const std::vector<Series>& series, bool log_y) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double v) { return std::isfinite(v) && (!log_y || v > 0.0); };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      if (!usable(s.y[i]) || !std::isfinite((*s.x)[i])) continue;
      xmin = std::min(xmin, (*s.x)[i]);
      xmax = std::max(xmax, (*s.x)[i]);
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  } else if (!log_y) {
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
  }
  const double ml = 62, mr = 12, mt = 24, mb = 36;
  const double px0 = x0 + ml, px1 = x0 + w - mr, py0 = y0 + mt, py1 = y0 + h - mb;
  auto X = [&](double v) { return px0 + (v - xmin) / (xmax - xmin) * (px1 - px0); };
  auto Y = [&](double v) { return py1 - (v - ymin) / (ymax - ymin) * (py1 - py0); };

  svg.line(px0, py1, px1, py1);
  svg.line(px0, py0, px0, py1);
  svg.line(px0, py0, px1, py0, "#bbb");
  svg.line(px1, py0, px1, py1, "#bbb");
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + i * (xmax - xmin) / 4.0;
    svg.line(X(xv), py1, X(xv), py1 + 4);
    svg.text(X(xv), py1 + 16, label(xv), "middle", 10);
    const double yv = ymin + i * (ymax - ymin) / 4.0;
    svg.line(px0 - 4, Y(yv), px0, Y(yv));
    svg.text(px0 - 6, Y(yv) + 3, log_y ? "1e" + label(yv) : label(yv), "end", 10);
  }
  svg.text(0.5 * (px0 + px1), y0 + 16, title, "middle", 13);
  svg.text(0.5 * (px0 + px1), py1 + 30, xlabel, "middle", 11);

  double legend_y = py0 + 14;
  for (const auto& s : series) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      if (!usable(s.y[i]) || !std::isfinite((*s.x)[i])) {
        svg.polyline(pts, s.color);
        pts.clear();
        continue;
      }
      pts.emplace_back(X((*s.x)[i]), Y(ty(s.y[i])));
    }
    svg.polyline(pts, s.color);
    if (series.size() > 1) {
      svg.line(px1 - 90, legend_y - 4, px1 - 72, legend_y - 4, s.color.c_str());
      svg.text(px1 - 68, legend_y, s.name, "start", 10);
      legend_y += 14;
    }
  }
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << s;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

std::vector<double> absolute(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::abs(x); });
  return out;
}

}  // namespace

std::vector<fs::path> emit_plots(const PlotData& data, const fs::path& dir, const PlotOptions& options) {
  fs::create_directories(dir);
  std::vector<fs::path> written;

  std::vector<ProfileCurve> profiles = data.profiles;
  std::stable_sort(profiles.begin(), profiles.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  if (static_cast<int>(profiles.size()) > options.panels) profiles.resize(options.panels);

  {
    const int cols = 2;
    const int rows = std::max(1, (static_cast<int>(profiles.size()) + cols - 1) / cols);
    Svg svg(cols * 360.0, rows * 260.0 + 20.0);
    svg.text(cols * 180.0, 16, data.title + ": |psi_j| profiles", "middle", 14);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const auto& p = profiles[i];
      const double px = static_cast<double>(i % cols) * 360.0;
      const double py = 20.0 + static_cast<double>(i / cols) * 260.0;
      panel(svg, px, py, 360.0, 260.0, "t = " + label(p.t), "x", {{"|psi|", kColors[0], &p.x, p.abs}}, false);
    }
    written.push_back(dir / "profiles.svg");
    write_text(written.back(), svg.str());
  }
  {
    Svg svg(640, 360);
    panel(svg, 0, 0, 640, 360, data.title + ": orbital distance", "t", {{"dist", kColors[0], &data.t, data.dist}},
          false);
    written.push_back(dir / "dist.svg");
    write_text(written.back(), svg.str());
  }
  {
    Svg svg(640, 360);
    const std::vector<Series> series = {{"|dN|", kColors[0], &data.t, absolute(data.dN)},
                                        {"|dH|", kColors[1], &data.t, absolute(data.dH)},
                                        {"|dHmod|", kColors[2], &data.t, absolute(data.dHmod)}};
    panel(svg, 0, 0, 640, 360, data.title + ": invariant drift", "t", series, options.log_drift);
    written.push_back(dir / "drift.svg");
    write_text(written.back(), svg.str());
  }
  {
    std::ostringstream dat;
    dat << "# t dist dN dH dHmod\n";
    for (std::size_t i = 0; i < data.t.size(); ++i) {
      dat << num(data.t[i], "%.10g") << ' ' << num(data.dist[i], "%.10g") << ' ' << num(data.dN[i], "%.10g") << ' '
          << num(data.dH[i], "%.10g") << ' ' << num(data.dHmod[i], "%.10g") << '\n';
    }
    written.push_back(dir / "series.dat");
    write_text(written.back(), dat.str());

    std::ostringstream gp;
    gp << "# gnuplot script; run inside this directory\nset terminal pngcairo size 900,600\n";
    gp << "set output 'dist.png'\nset xlabel 't'\nplot 'series.dat' using 1:2 with lines title 'dist'\n";
    gp << "set output 'drift.png'\n" << (options.log_drift ? "set logscale y\n" : "")
       << "plot 'series.dat' using 1:(abs($3)) with lines title '|dN|', '' using 1:(abs($4)) with lines title "
          "'|dH|', '' using 1:(abs($5)) with lines title '|dHmod|'\n";
    if (options.log_drift) gp << "unset logscale y\n";
    if (!profiles.empty()) {
      gp << "set output 'profiles.png'\nset multiplot layout 2,2\nset xlabel 'x'\n";
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        const std::string name = "profile_" + std::to_string(i) + ".dat";
        std::ostringstream pd;
        pd << "# x abs t=" << num(profiles[i].t, "%.10g") << '\n';
        for (std::size_t k = 0; k < profiles[i].x.size(); ++k) {
          pd << num(profiles[i].x[k], "%.10g") << ' ' << num(profiles[i].abs[k], "%.10g") << '\n';
        }
        written.push_back(dir / name);
        write_text(written.back(), pd.str());
        gp << "set title 't = " << label(profiles[i].t) << "'\nplot '" << name << "' using 1:2 with lines notitle\n";
      }
      gp << "unset multiplot\n";
    }
    written.push_back(dir / "plot.gp");
    write_text(written.back(), gp.str());
  }
  return written;
}

}  // namespace dnls
