#include "oee/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oee/io.hpp"

namespace oee {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

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

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

class Canvas {
 public:
  Canvas(const std::string& title, const std::string& x_label, const std::string& y_label) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
         << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
         << "</text>\n"
         << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + kPlotH << "\" x2=\"" << kLeft + kPlotW << "\" y2=\""
         << kTop + kPlotH << "\" stroke=\"black\"/>\n"
         << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + kPlotH
         << "\" stroke=\"black\"/>\n"
         << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
         << escape(x_label) << "</text>\n"
         << "<text x=\"16\" y=\"" << kTop + kPlotH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
         << kTop + kPlotH / 2 << ")\">" << escape(y_label) << "</text>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill, const std::string& stroke = "none") {
    out_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(std::max(w, 0.0)) << "\" height=\""
         << num(std::max(h, 0.0)) << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2, const std::string& stroke = "black") {
    out_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
         << "\" stroke=\"" << stroke << "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& fill) {
    out_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << r << "\" fill=\"" << fill
         << "\" fill-opacity=\"0.4\"/>\n";
  }
  void text(double x, double y, const std::string& s, const std::string& anchor = "middle") {
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\">" << escape(s)
         << "</text>\n";
  }
  void y_ticks(double lo, double hi) {
    for (int i = 0; i <= 4; ++i) {
      const double v = lo + (hi - lo) * i / 4.0;
      const double y = kTop + kPlotH - kPlotH * i / 4.0;
      line(kLeft - 4, y, kLeft, y);
      text(kLeft - 6, y + 4, num(v), "end");
    }
  }
  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

const char* class_colour(WolframClass c) {
  switch (c) {
    case WolframClass::I: return "#4575b4";
    case WolframClass::II: return "#91bfdb";
    case WolframClass::III: return "#fc8d59";
    case WolframClass::IV: return "#d73027";
  }
  return "gray";
}

}  // namespace

std::string svg_log_histogram(const LogHistogram& hist, const std::string& title, const std::string& x_label) {
  Canvas c(title, x_label, "count");
  std::vector<std::pair<std::string, std::uint64_t>> bars;
  if (hist.zeros) bars.emplace_back("0", hist.zeros);
  for (const auto& [b, n] : hist.bins) bars.emplace_back("2^" + std::to_string(b), n);
  std::uint64_t peak = 1;
  for (const auto& [label, n] : bars) peak = std::max(peak, n);
  c.y_ticks(0, static_cast<double>(peak));
  const double bw = bars.empty() ? kPlotW : kPlotW / static_cast<double>(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double h = kPlotH * static_cast<double>(bars[i].second) / static_cast<double>(peak);
    const double x = kLeft + bw * static_cast<double>(i);
    c.rect(x + 1, kTop + kPlotH - h, bw - 2, h, "#4575b4");
    c.text(x + bw / 2, kTop + kPlotH + 14, bars[i].first);
  }
  return c.finish();
}

std::string svg_box_plot(const std::vector<std::pair<std::string, BoxStats>>& boxes, const std::string& title) {
  Canvas c(title, "", "log2(value)");
  const auto lg = [](double v) { return std::log2(std::max(v, 1e-6)); };
  double lo = 0, hi = 1;
  bool first = true;
  for (const auto& [label, b] : boxes) {
    if (b.n == 0) continue;
    lo = first ? lg(b.min) : std::min(lo, lg(b.min));
    hi = first ? lg(b.max) : std::max(hi, lg(b.max));
    first = false;
  }
  if (hi <= lo) hi = lo + 1;
  c.y_ticks(lo, hi);
  const auto y = [&](double v) { return kTop + kPlotH - kPlotH * (lg(v) - lo) / (hi - lo); };
  const double slot = boxes.empty() ? kPlotW : kPlotW / static_cast<double>(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& [label, b] = boxes[i];
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    c.text(cx, kTop + kPlotH + 14, label);
    if (b.n == 0) continue;
    const double half = std::min(slot * 0.3, 40.0);
    c.line(cx, y(b.whisker_low), cx, y(b.q1));
    c.line(cx, y(b.q3), cx, y(b.whisker_high));
    c.line(cx - half / 2, y(b.whisker_low), cx + half / 2, y(b.whisker_low));
    c.line(cx - half / 2, y(b.whisker_high), cx + half / 2, y(b.whisker_high));
    c.rect(cx - half, y(b.q3), 2 * half, y(b.q1) - y(b.q3), "#91bfdb", "black");
    c.line(cx - half, y(b.median), cx + half, y(b.median), "#d73027");
  }
  return c.finish();
}

std::string svg_scatter(const std::vector<std::pair<double, double>>& points, const std::string& title,
                        const std::string& x_label, const std::string& y_label) {
  Canvas c(title, x_label, y_label);
  double x_hi = 1, y_hi = 1;
  for (const auto& [x, y] : points) {
    x_hi = std::max(x_hi, x);
    y_hi = std::max(y_hi, y);
  }
  c.y_ticks(0, y_hi);
  for (int i = 0; i <= 4; ++i) c.text(kLeft + kPlotW * i / 4.0, kTop + kPlotH + 14, num(x_hi * i / 4.0));
  for (const auto& [x, y] : points) c.circle(kLeft + kPlotW * x / x_hi, kTop + kPlotH - kPlotH * y / y_hi, 2, "#4575b4");
  return c.finish();
}

std::string svg_heat_grid(const HeatGrid& grid, const std::string& title) {
  Canvas c(title, "k", "C");
  std::uint64_t peak = 1;
  for (const auto& row : grid.counts)
    for (auto n : row) peak = std::max(peak, n);
  const double cw = kPlotW / HeatGrid::kBins;
  const double ch = kPlotH / HeatGrid::kBins;
  for (std::size_t ci = 0; ci < HeatGrid::kBins; ++ci) {
    for (std::size_t ki = 0; ki < HeatGrid::kBins; ++ki) {
      const auto n = grid.counts[ci][ki];
      if (!n) continue;
      const int shade = 255 - static_cast<int>(std::lround(255.0 * static_cast<double>(n) / static_cast<double>(peak)));
      const std::string fill = "rgb(" + std::to_string(shade) + "," + std::to_string(shade) + "," + std::to_string(shade) + ")";
      c.rect(kLeft + cw * static_cast<double>(ki), kTop + kPlotH - ch * static_cast<double>(ci + 1), cw, ch, fill);
    }
  }
  c.y_ticks(HeatGrid::kCMin, HeatGrid::kCMax);
  for (int i = 0; i <= 4; ++i)
    c.text(kLeft + kPlotW * i / 4.0, kTop + kPlotH + 14, num(HeatGrid::kKMin + (HeatGrid::kKMax - HeatGrid::kKMin) * i / 4.0));
  return c.finish();
}

std::string svg_metagenome(const Metagenome& m, const std::string& title) {
  Canvas c(title, "rank", "frequency");
  double peak = 0;
  for (const auto& e : m.entries) peak = std::max(peak, e.frequency);
  if (peak <= 0) peak = 1;
  c.y_ticks(0, peak);
  const double bw = m.entries.empty() ? kPlotW : kPlotW / static_cast<double>(m.entries.size());
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const auto& e = m.entries[i];
    const double h = kPlotH * e.frequency / peak;
    c.rect(kLeft + bw * static_cast<double>(i), kTop + kPlotH - h, std::max(bw - 0.5, 0.5), h, class_colour(e.wolfram_class));
  }
  double lx = kLeft + kPlotW - 160;
  for (WolframClass k : {WolframClass::I, WolframClass::II, WolframClass::III, WolframClass::IV}) {
    c.rect(lx, kTop + 4, 10, 10, class_colour(k));
    c.text(lx + 14, kTop + 13, std::string(to_string(k)), "start");
    lx += 40;
  }
  return c.finish();
}

void write_svg(const std::filesystem::path& path, const std::string& svg) {
  write_file_atomic(path, [&](std::ostream& out) { out << svg; });
}

}  // namespace oee
