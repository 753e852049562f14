#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "biasamp/experiments.hpp"

namespace biasamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kQuantities = {"R1j", "R2j", "R1s", "R2s", "ODD", "EDD", "ADD", "signed_ODD", "signed_EDD"};

std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  if (s.empty() || s == "nan") return kNaN;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  return end && *end == '\0' ? v : kNaN;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::vector<std::string> csv_columns(const std::string& scenario) {
  std::vector<std::string> cols = {"scenario", "phi", "psi", "gamma", "lambda", "c"};
  if (scenario == "regularization-path") cols.push_back("t");
  for (const char* c : {"d", "m", "phi_eff", "psi_eff", "gamma_eff"}) cols.push_back(c);
  for (const auto& q : kQuantities) cols.push_back("theory_" + q);
  for (const auto& q : kQuantities) {
    cols.push_back("emp_" + q + "_mean");
    cols.push_back("emp_" + q + "_std");
  }
  for (const char* c : {"emp_count", "residual", "iters", "flags"}) cols.push_back(c);
  return cols;
}

Table to_table(const SweepResult& r) {
  Table t;
  t.header = csv_columns(r.scenario);
  const bool reg_path = r.scenario == "regularization-path";
  for (const auto& row : r.rows) {
    std::vector<std::string> cells = {r.scenario,
                                      format_number(row.phi),
                                      format_number(row.psi),
                                      format_number(row.gamma),
                                      format_number(row.lambda),
                                      format_number(row.c)};
    if (reg_path) cells.push_back(format_number(row.lambda > 0 ? 1.0 / row.lambda : kNaN));
    cells.push_back(std::to_string(row.d));
    cells.push_back(std::to_string(row.m));
    cells.push_back(format_number(row.phi_eff));
    cells.push_back(format_number(row.psi_eff));
    cells.push_back(format_number(row.gamma_eff));
    const auto& th = row.theory;
    for (double v : {row.r1j, row.r2j, row.r1s, row.r2s, th.odd, th.edd, th.add, th.signed_odd, th.signed_edd})
      cells.push_back(format_number(v));
    const auto& mc = row.mc;
    for (const QuantityStats* q :
         {&mc.r1j, &mc.r2j, &mc.r1s, &mc.r2s, &mc.odd, &mc.edd, &mc.add, &mc.signed_odd, &mc.signed_edd}) {
      cells.push_back(format_number(row.has_mc ? q->mean : kNaN));
      cells.push_back(format_number(row.has_mc ? q->std : kNaN));
    }
    cells.push_back(std::to_string(row.has_mc ? mc.replicates : 0));
    cells.push_back(format_number(row.residual));
    cells.push_back(std::to_string(row.iters));
    cells.push_back(join(row.flags, ';'));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

long Table::column_index(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<long>(it - header.begin());
}

std::vector<double> Table::numeric_column(const std::string& name) const {
  const long j = column_index(name);
  if (j < 0) fail(ErrorCode::InvalidArgument, "missing column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(j < static_cast<long>(r.size()) ? parse_double(r[j]) : kNaN);
  return out;
}

void write_csv(const Table& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << join(t.header, ',') << '\n';
  for (const auto& r : t.rows) out << join(r, ',') << '\n';
  out.flush();
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

void emit_csv(const SweepResult& r, const std::string& path) { write_csv(to_table(r), path); }

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Parse, "'" + path + "' is empty");
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != t.header.size()) fail(ErrorCode::Parse, "'" + path + "': ragged row");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

// ---- SVG ----

namespace {

struct Series {
  std::string label;
  bool dashed = false;
  std::string color;
  std::vector<double> x, y, err;  // err may be empty
};

std::string esc(const std::string& s) {
  std::string o;
  for (char ch : s) {
    switch (ch) {
      case '&':
        o += "&amp;";
        break;
      case '<':
        o += "&lt;";
        break;
      case '>':
        o += "&gt;";
        break;
      case '"':
        o += "&quot;";
        break;
      default:
        o += ch;
    }
  }
  return o;
}

std::string fmt(double v, const char* f = "%.2f") {
  char b[64];
  std::snprintf(b, sizeof b, f, v);
  return b;
}

struct Axis {
  double lo, hi;
  bool log;
  double pix0, pix1;
  double map(double v) const {
    const double a = log ? std::log10(v) : v, l = log ? std::log10(lo) : lo, h = log ? std::log10(hi) : hi;
    return pix0 + (a - l) / (h - l) * (pix1 - pix0);
  }
  bool ok(double v) const { return std::isfinite(v) && (!log || v > 0); }
};

void widen(double& lo, double& hi, bool log) {
  if (lo < hi) return;
  if (log) {
    lo /= 2;
    hi *= 2;
  } else {
    const double pad = lo == 0 ? 1.0 : std::abs(lo) * 0.5;
    lo -= pad;
    hi += pad;
  }
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::vector<double> ticks(double lo, double hi, bool log) {
  std::vector<double> t;
  if (log) {
    for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1) {
      const double v = std::pow(10.0, e);
      if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) t.push_back(v);
    }
    if (t.size() >= 3) return t;
    // less than a couple of decades: 1-2-5 ticks
    t.clear();
    for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1)
      for (double m : {1.0, 2.0, 5.0}) {
        const double v = m * std::pow(10.0, e);
        if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) t.push_back(v);
      }
    if (t.size() < 2) t = {lo, hi};
    return t;
  }
  const double raw = (hi - lo) / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

}  // namespace

std::string render_svg(const Table& t, const PlotSpec& spec) {
  require(!spec.y.empty(), "plot: no y series requested");
  const auto xs = t.numeric_column(spec.x);
  std::vector<double> gvals(t.rows.size(), kNaN);
  if (!spec.group_by.empty()) gvals = t.numeric_column(spec.group_by);

  std::vector<double> groups;
  for (double g : gvals)
    if (std::find_if(groups.begin(), groups.end(), [&](double h) { return h == g || (std::isnan(h) && std::isnan(g)); }) ==
        groups.end())
      groups.push_back(g);

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::vector<Series> series;
  int color = 0;
  bool add_ref = false;
  for (const auto& y : spec.y) {
    const bool direct = t.column_index(y) >= 0;
    const std::string th = "theory_" + y, em = "emp_" + y + "_mean", es = "emp_" + y + "_std";
    if (!direct && t.column_index(th) < 0 && t.column_index(em) < 0)
      fail(ErrorCode::InvalidArgument, "plot: missing column for series '" + y + "'");
    if (y == "ADD" || y == "theory_ADD" || y == "emp_ADD_mean") add_ref = true;
    for (double g : groups) {
      const std::string suffix = spec.group_by.empty() ? "" : " " + spec.group_by + "=" + short_number(g);
      const std::string col = palette[color++ % 8];
      auto pick = [&](const std::string& name, const std::string& label, bool dashed, const std::string& errcol) {
        if (t.column_index(name) < 0) return;
        const auto ys = t.numeric_column(name);
        std::vector<double> err;
        if (!errcol.empty() && t.column_index(errcol) >= 0) err = t.numeric_column(errcol);
        Series s{label, dashed, col, {}, {}, {}};
        for (std::size_t i = 0; i < ys.size(); ++i) {
          const bool same = spec.group_by.empty() || gvals[i] == g || (std::isnan(g) && std::isnan(gvals[i]));
          if (!same) continue;
          s.x.push_back(xs[i]);
          s.y.push_back(ys[i]);
          s.err.push_back(err.empty() ? kNaN : err[i]);
        }
        series.push_back(std::move(s));
      };
      if (direct) {
        pick(y, y + suffix, false, "");
      } else {
        pick(th, y + suffix + " theory", true, "");
        pick(em, y + suffix + " empirical", false, es);
      }
    }
  }

  // drop points that cannot be drawn; keep x order
  for (auto& s : series) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]) && (!spec.log_x || s.x[i] > 0) && (!spec.log_y || s.y[i] > 0))
        idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.x[a] < s.x[b]; });
    Series k{s.label, s.dashed, s.color, {}, {}, {}};
    for (auto i : idx) {
      k.x.push_back(s.x[i]);
      k.y.push_back(s.y[i]);
      k.err.push_back(s.err[i]);
    }
    s = std::move(k);
  }
  series.erase(std::remove_if(series.begin(), series.end(), [](const Series& s) { return s.x.empty(); }), series.end());
  if (series.empty()) fail(ErrorCode::InvalidArgument, "plot: every requested series is empty");

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      double a = s.y[i], b = s.y[i];
      if (std::isfinite(s.err[i])) {
        a -= s.err[i];
        b += s.err[i];
        if (spec.log_y && a <= 0) a = s.y[i];
      }
      ylo = std::min(ylo, a);
      yhi = std::max(yhi, b);
    }
  if (add_ref) {
    ylo = std::min(ylo, 1.0);
    yhi = std::max(yhi, 1.0);
  }
  widen(xlo, xhi, spec.log_x);
  widen(ylo, yhi, spec.log_y);
  if (!spec.log_y) {
    const double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }

  const double W = 860, H = 480, L = 75, R = 600, T = 40, B = 420;
  const Axis ax{xlo, xhi, spec.log_x, L, R}, ay{ylo, yhi, spec.log_y, B, T};
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty())
    o << "<text x=\"" << (L + R) / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(spec.title)
      << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << R - L << "\" height=\"" << B - T
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double v : ticks(xlo, xhi, spec.log_x)) {
    const double px = ax.map(v);
    o << "<line x1=\"" << fmt(px) << "\" y1=\"" << B << "\" x2=\"" << fmt(px) << "\" y2=\"" << B + 5
      << "\" stroke=\"black\"/>\n<text x=\"" << fmt(px) << "\" y=\"" << B + 18 << "\" text-anchor=\"middle\">"
      << fmt(v, "%g") << "</text>\n";
  }
  for (double v : ticks(ylo, yhi, spec.log_y)) {
    const double py = ay.map(v);
    o << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(py) << "\" x2=\"" << L << "\" y2=\"" << fmt(py)
      << "\" stroke=\"black\"/>\n<text x=\"" << L - 8 << "\" y=\"" << fmt(py + 4) << "\" text-anchor=\"end\">"
      << fmt(v, "%g") << "</text>\n";
  }
  o << "<text x=\"" << (L + R) / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\">" << esc(spec.x)
    << (spec.log_x ? " (log)" : "") << "</text>\n";
  if (add_ref && ay.ok(1.0)) {
    const double py = ay.map(1.0);
    o << "<line x1=\"" << L << "\" y1=\"" << fmt(py) << "\" x2=\"" << R << "\" y2=\"" << fmt(py)
      << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
  }
  for (const auto& s : series) {
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) o << " stroke-dasharray=\"6,4\" stroke-opacity=\"0.55\"";
    o << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) o << (i ? " " : "") << fmt(ax.map(s.x[i])) << ',' << fmt(ay.map(s.y[i]));
    o << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.err[i])) continue;
      double a = s.y[i] - s.err[i], b = s.y[i] + s.err[i];
      if (!ay.ok(a)) a = s.y[i];
      a = std::max(a, ylo);
      b = std::min(b, yhi);
      const double px = ax.map(s.x[i]);
      o << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(ay.map(a)) << "\" x2=\"" << fmt(px) << "\" y2=\""
        << fmt(ay.map(b)) << "\" stroke=\"" << s.color << "\"/>\n";
    }
  }
  double ly = T + 10;
  for (const auto& s : series) {
    o << "<line x1=\"" << R + 15 << "\" y1=\"" << ly << "\" x2=\"" << R + 45 << "\" y2=\"" << ly << "\" stroke=\""
      << s.color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\" stroke-opacity=\"0.55\"" : "")
      << "/>\n<text x=\"" << R + 50 << "\" y=\"" << ly + 4 << "\">" << esc(s.label) << "</text>\n";
    ly += 18;
  }
  o << "</svg>\n";
  return o.str();
}

void emit_svg(const Table& t, const std::string& path, const PlotSpec& spec) {
  const std::string doc = render_svg(t, spec);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << doc;
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

void emit_svg(const SweepResult& r, const std::string& path, const PlotSpec& spec) { emit_svg(to_table(r), path, spec); }

}  // namespace biasamp
