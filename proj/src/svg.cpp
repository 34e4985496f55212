#include "mispar/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "mispar/errors.hpp"

namespace mispar {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr int kMarginLeft = 70, kMarginRight = 150, kMarginTop = 40, kMarginBottom = 50;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double pix_lo = 0.0, pix_hi = 1.0;

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double t(double v) const { return log ? std::log10(v) : v; }
  double map(double v) const {
    const double a = t(lo), b = t(hi);
    return pix_lo + (t(v) - a) / (b - a) * (pix_hi - pix_lo);
  }

  void fit(const std::vector<double>& vals) {
    bool any = false;
    double mn = 0.0, mx = 0.0;
    for (double v : vals) {
      if (!usable(v)) continue;
      if (!any) mn = mx = v;
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      any = true;
    }
    if (!any) {
      lo = log ? 0.1 : 0.0;
      hi = log ? 10.0 : 1.0;
      return;
    }
    if (log) {
      lo = std::pow(10.0, std::floor(std::log10(mn)));
      hi = std::pow(10.0, std::ceil(std::log10(mx)));
      if (hi <= lo) hi = lo * 10.0;
    } else {
      const double pad = mx > mn ? 0.03 * (mx - mn) : std::max(1.0, std::fabs(mx)) * 0.5;
      lo = mn - pad;
      hi = mx + pad;
    }
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::ceil(std::log10(lo) - 1e-9); e <= std::log10(hi) + 1e-9; e += 1.0)
        out.push_back(std::pow(10.0, e));
      return out;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
      out.push_back(std::fabs(v) < 1e-12 * step ? 0.0 : v);
    return out;
  }
};

struct Series {
  std::string name;
  std::vector<double> y;
  std::vector<double> err;  // empty for lines
};

std::vector<std::string> resolve_errbar(const Table& t, const std::string& name,
                                        const std::vector<std::string>& ys) {
  if (t.has_column(name)) {
    if (!t.has_column(name + "_stderr")) throw MissingColumn("no column named '" + name + "_stderr'");
    return {name};
  }
  const bool all_ge = std::all_of(ys.begin(), ys.end(), [](auto& s) { return s.rfind("ge", 0) == 0; });
  const bool all_te = std::all_of(ys.begin(), ys.end(), [](auto& s) { return s.rfind("te", 0) == 0; });
  std::vector<std::string> out;
  for (const char* q : {"_te", "_ge"}) {
    const std::string c = name + q;
    if ((all_ge && std::string(q) == "_te") || (all_te && std::string(q) == "_ge")) continue;
    if (t.has_column(c) && t.has_column(c + "_stderr")) out.push_back(c);
  }
  if (out.empty()) throw MissingColumn("no error-bar columns for '" + name + "'");
  return out;
}

void frame(std::ostringstream& os, const PlotSpec& spec, const Axis& ax, const Axis& ay,
           const std::string& ylabel) {
  const double x0 = ax.pix_lo, x1 = ax.pix_hi, y0 = ay.pix_lo, y1 = ay.pix_hi;
  os << "<rect x=\"" << fmt("%.2f", x0) << "\" y=\"" << fmt("%.2f", y1) << "\" width=\""
     << fmt("%.2f", x1 - x0) << "\" height=\"" << fmt("%.2f", y0 - y1)
     << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (double v : ax.ticks()) {
    const double px = ax.map(v);
    os << "<line x1=\"" << fmt("%.2f", px) << "\" y1=\"" << fmt("%.2f", y0) << "\" x2=\""
       << fmt("%.2f", px) << "\" y2=\"" << fmt("%.2f", y0 + 5) << "\" stroke=\"#000\"/>\n";
    os << "<text x=\"" << fmt("%.2f", px) << "\" y=\"" << fmt("%.2f", y0 + 18)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt("%g", v) << "</text>\n";
  }
  for (double v : ay.ticks()) {
    const double py = ay.map(v);
    os << "<line x1=\"" << fmt("%.2f", x0 - 5) << "\" y1=\"" << fmt("%.2f", py) << "\" x2=\""
       << fmt("%.2f", x0) << "\" y2=\"" << fmt("%.2f", py) << "\" stroke=\"#000\"/>\n";
    os << "<text x=\"" << fmt("%.2f", x0 - 8) << "\" y=\"" << fmt("%.2f", py + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << fmt("%g", v) << "</text>\n";
  }
  os << "<text x=\"" << fmt("%.2f", (x0 + x1) / 2) << "\" y=\"" << spec.height - 10
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(spec.x) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fmt("%.2f", (y0 + y1) / 2) << "\" text-anchor=\"middle\" "
     << "font-size=\"13\" transform=\"rotate(-90 16 " << fmt("%.2f", (y0 + y1) / 2) << ")\">"
     << escape(ylabel) << "</text>\n";
  if (!spec.title.empty())
    os << "<text x=\"" << fmt("%.2f", (x0 + x1) / 2) << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-size=\"15\">" << escape(spec.title) << "</text>\n";
}

std::string heat_colour(double v, double zmax) {
  // Dark blue (0) through teal to yellow (zmax and above).
  const double t = std::clamp(zmax > 0.0 ? v / zmax : 0.0, 0.0, 1.0);
  const double r = 68 + t * (253 - 68), g = 1 + t * (231 - 1), b = 84 + t * (37 - 84);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(r), static_cast<int>(g),
                static_cast<int>(b));
  return buf;
}

std::string render_heatmap(const Table& table, const PlotSpec& spec) {
  if (spec.y.size() != 1) throw DomainError("heatmap needs exactly one y column");
  const auto xi = table.column_index(spec.x), yi = table.column_index(spec.y[0]),
             zi = table.column_index(spec.z);
  const auto xs = table.numeric(spec.x), ys = table.numeric(spec.y[0]), zs = table.numeric(spec.z);

  std::vector<double> ux = xs, uy = ys;
  std::sort(ux.begin(), ux.end());
  ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
  std::sort(uy.begin(), uy.end());
  uy.erase(std::unique(uy.begin(), uy.end()), uy.end());

  double zmax = spec.zmax;
  if (!(zmax > 0.0)) {
    std::vector<double> fin;
    for (double z : zs)
      if (std::isfinite(z)) fin.push_back(z);
    std::sort(fin.begin(), fin.end());
    zmax = fin.empty() ? 1.0 : fin[static_cast<std::size_t>(0.95 * (fin.size() - 1))];
  }

  auto edges = [](const std::vector<double>& u) {
    std::vector<double> e(u.size() + 1);
    if (u.size() == 1) return std::vector<double>{u[0] - 0.5, u[0] + 0.5};
    for (std::size_t i = 1; i < u.size(); ++i) e[i] = 0.5 * (u[i - 1] + u[i]);
    e.front() = u.front() - (e[1] - u.front());
    e.back() = u.back() + (u.back() - e[u.size() - 1]);
    return e;
  };
  const auto ex = edges(ux), ey = edges(uy);

  Axis ax, ay;
  ax.lo = ex.front();
  ax.hi = ex.back();
  ay.lo = ey.front();
  ay.hi = ey.back();
  ax.pix_lo = kMarginLeft;
  ax.pix_hi = spec.width - kMarginRight;
  ay.pix_lo = spec.height - kMarginBottom;
  ay.pix_hi = kMarginTop;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
     << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (!std::isfinite(zs[r])) continue;  // left white
    const auto ix = std::lower_bound(ux.begin(), ux.end(), xs[r]) - ux.begin();
    const auto iy = std::lower_bound(uy.begin(), uy.end(), ys[r]) - uy.begin();
    const double px0 = ax.map(ex[ix]), px1 = ax.map(ex[ix + 1]);
    const double py0 = ay.map(ey[iy + 1]), py1 = ay.map(ey[iy]);
    os << "<rect x=\"" << fmt("%.2f", px0) << "\" y=\"" << fmt("%.2f", py0) << "\" width=\""
       << fmt("%.2f", px1 - px0) << "\" height=\"" << fmt("%.2f", py1 - py0) << "\" fill=\""
       << heat_colour(zs[r], zmax) << "\"><title>" << escape(table.cell(r, xi)) << ", "
       << escape(table.cell(r, yi)) << ": " << escape(table.cell(r, zi)) << "</title></rect>\n";
  }
  frame(os, spec, ax, ay, spec.y[0]);
  const double lx = spec.width - kMarginRight + 20;
  for (int k = 0; k <= 10; ++k) {
    const double py = ay.map(ay.lo) + (ay.map(ay.hi) - ay.map(ay.lo)) * k / 10.0;
    os << "<rect x=\"" << fmt("%.2f", lx) << "\" y=\"" << fmt("%.2f", py - 8) << "\" width=\"16\" "
       << "height=\"16\" fill=\"" << heat_colour(zmax * k / 10.0, zmax) << "\"/>\n";
    if (k % 5 == 0)
      os << "<text x=\"" << fmt("%.2f", lx + 22) << "\" y=\"" << fmt("%.2f", py + 4)
         << "\" font-size=\"11\">" << fmt("%g", zmax * k / 10.0) << (k == 10 ? "+" : "")
         << "</text>\n";
  }
  os << "<text x=\"" << fmt("%.2f", lx) << "\" y=\"" << kMarginTop - 10 << "\" font-size=\"12\">"
     << escape(spec.z) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string render_svg(const Table& table, const PlotSpec& spec) {
  if (!spec.z.empty()) return render_heatmap(table, spec);
  const auto xi = table.column_index(spec.x);
  const auto xs = table.numeric(spec.x);

  std::vector<std::pair<Series, std::size_t>> lines, bars;
  for (const auto& name : spec.y) lines.push_back({{name, table.numeric(name), {}}, table.column_index(name)});
  for (const auto& e : spec.errbars)
    for (const auto& c : resolve_errbar(table, e, spec.y))
      bars.push_back({{c, table.numeric(c), table.numeric(c + "_stderr")}, table.column_index(c)});

  Axis ax, ay;
  ax.log = spec.logx;
  ay.log = spec.logy;
  ax.fit(xs);
  std::vector<double> all_y;
  for (const auto& [s, _] : lines) all_y.insert(all_y.end(), s.y.begin(), s.y.end());
  for (const auto& [s, _] : bars)
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      all_y.push_back(s.y[i]);
      if (std::isfinite(s.err[i])) {
        all_y.push_back(s.y[i] + s.err[i]);
        if (!ay.log || s.y[i] - s.err[i] > 0.0) all_y.push_back(s.y[i] - s.err[i]);
      }
    }
  ay.fit(all_y);
  ax.pix_lo = kMarginLeft;
  ax.pix_hi = spec.width - kMarginRight;
  ay.pix_lo = spec.height - kMarginBottom;
  ay.pix_hi = kMarginTop;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
     << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";

  std::string ylabel;
  for (const auto& n : spec.y) ylabel += (ylabel.empty() ? "" : ", ") + n;
  frame(os, spec, ax, ay, ylabel);

  os << "<clipPath id=\"plot\"><rect x=\"" << fmt("%.2f", ax.pix_lo) << "\" y=\""
     << fmt("%.2f", ay.pix_hi) << "\" width=\"" << fmt("%.2f", ax.pix_hi - ax.pix_lo)
     << "\" height=\"" << fmt("%.2f", ay.pix_lo - ay.pix_hi) << "\"/></clipPath>\n"
     << "<g clip-path=\"url(#plot)\">\n";

  int colour = 0;
  std::vector<std::pair<std::string, std::string>> legend;
  for (const auto& [s, col] : lines) {
    const char* c = kPalette[colour++ % 8];
    legend.push_back({s.name, c});
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\""
           << pts << "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!ax.usable(xs[i]) || !ay.usable(s.y[i])) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += fmt("%.2f", ax.map(xs[i])) + "," + fmt("%.2f", ay.map(s.y[i]));
    }
    flush();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!ax.usable(xs[i]) || !ay.usable(s.y[i])) continue;
      os << "<circle cx=\"" << fmt("%.2f", ax.map(xs[i])) << "\" cy=\"" << fmt("%.2f", ay.map(s.y[i]))
         << "\" r=\"1.2\" fill=\"" << c << "\"><title>" << escape(table.cell(i, xi)) << ", "
         << escape(table.cell(i, col)) << "</title></circle>\n";
    }
  }
  for (const auto& [s, col] : bars) {
    const char* c = kPalette[colour++ % 8];
    legend.push_back({s.name, c});
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!ax.usable(xs[i]) || !ay.usable(s.y[i])) continue;
      const double px = ax.map(xs[i]);
      if (std::isfinite(s.err[i])) {
        const double top = s.y[i] + s.err[i];
        const double bot = s.y[i] - s.err[i];
        const double ptop = ay.map(top);
        const double pbot = ay.usable(bot) ? ay.map(bot) : ay.pix_lo;
        os << "<line x1=\"" << fmt("%.2f", px) << "\" y1=\"" << fmt("%.2f", pbot) << "\" x2=\""
           << fmt("%.2f", px) << "\" y2=\"" << fmt("%.2f", ptop) << "\" stroke=\"" << c << "\"/>\n";
      }
      os << "<circle cx=\"" << fmt("%.2f", px) << "\" cy=\"" << fmt("%.2f", ay.map(s.y[i]))
         << "\" r=\"2.5\" fill=\"none\" stroke=\"" << c << "\"><title>" << escape(table.cell(i, xi))
         << ", " << escape(table.cell(i, col)) << "</title></circle>\n";
    }
  }
  os << "</g>\n";

  const double lx = spec.width - kMarginRight + 12;
  for (std::size_t k = 0; k < legend.size(); ++k) {
    const double ly = kMarginTop + 10 + 18.0 * k;
    os << "<line x1=\"" << fmt("%.2f", lx) << "\" y1=\"" << fmt("%.2f", ly) << "\" x2=\""
       << fmt("%.2f", lx + 18) << "\" y2=\"" << fmt("%.2f", ly) << "\" stroke=\"" << legend[k].second
       << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << fmt("%.2f", lx + 24) << "\" y=\"" << fmt("%.2f", ly + 4)
       << "\" font-size=\"11\">" << escape(legend[k].first) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace mispar
