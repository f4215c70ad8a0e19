#pragma once

// Self-contained SVG charts: frequency bars, Zipf log-log scatter with fit
// line, u-matrix heatmap, t-SNE scatter. No external assets, all numbers
// formatted canonically so regenerated plots are byte-identical.

#include <string>
#include <vector>

#include "passport/common.hpp"

namespace passport {
namespace svg {

inline std::string num(double v) { return format_double(v); }

inline std::string escape_text(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

class Document {
 public:
  Document(double width, double height) : width_(width), height_(height) {
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
             "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) +
             " " + num(height) + "\">\n";
    body_ += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" +
             num(height) + "\" fill=\"white\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& extra = "") {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"" + extra + "/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
             "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             num(width) + "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" fill=\"" + fill + "\"/>\n";
  }

  void text(double x, double y, const std::string& content, double size = 12.0,
            const std::string& anchor = "start", const std::string& extra = "") {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
             num(size) + "\" font-family=\"monospace\" text-anchor=\"" + anchor +
             "\"" + extra + ">" + escape_text(content) + "</text>\n";
  }

  std::string finish() const { return body_ + "</svg>\n"; }

  double width() const { return width_; }
  double height() const { return height_; }

 private:
  double width_;
  double height_;
  std::string body_;
};

// Axis range with the documented 5% padding rule.
struct Range {
  double lo = 0.0;
  double hi = 1.0;

  static Range of(const std::vector<double>& values) {
    Range r;
    if (values.empty()) return r;
    r.lo = r.hi = values[0];
    for (double v : values) {
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
    const double pad = (r.hi - r.lo) * 0.05;
    if (pad > 0.0) {
      r.lo -= pad;
      r.hi += pad;
    } else {
      r.lo -= 0.5;
      r.hi += 0.5;
    }
    return r;
  }

  double scale(double v, double out_lo, double out_hi) const {
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
  }
};

// Vertical bars in entry order with labels below.
inline std::string bar_chart(
    const std::vector<std::pair<std::string, std::int64_t>>& entries,
    const std::string& title) {
  const double width = 900, height = 480;
  const double left = 60, right = 20, top = 40, bottom = 110;
  Document doc(width, height);
  doc.text(width / 2, 24, title, 16, "middle");
  if (entries.empty()) return doc.finish();

  double max_count = 0.0;
  for (const auto& [term, count] : entries)
    max_count = std::max(max_count, static_cast<double>(count));
  max_count *= 1.05;  // 5% headroom

  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double slot = plot_w / static_cast<double>(entries.size());

  doc.line(left, top + plot_h, left + plot_w, top + plot_h, "black");
  doc.line(left, top, left, top + plot_h, "black");
  doc.text(8, top + 12, format_double(max_count / 1.05), 10);

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double h =
        static_cast<double>(entries[i].second) / max_count * plot_h;
    const double x = left + slot * static_cast<double>(i) + slot * 0.125;
    doc.rect(x, top + plot_h - h, slot * 0.75, h, "#4878a8");
    const double lx = left + slot * (static_cast<double>(i) + 0.5);
    doc.text(lx, top + plot_h + 12, entries[i].first, 10, "end",
             " transform=\"rotate(-60 " + num(lx) + " " + num(top + plot_h + 12) +
                 ")\"");
  }
  return doc.finish();
}

// Rank-frequency scatter in log10-log10 space with the fitted line overlaid.
inline std::string zipf_plot(const std::vector<std::int64_t>& counts_by_rank,
                             double slope, double intercept,
                             const std::string& title) {
  const double width = 720, height = 540;
  const double left = 70, right = 30, top = 50, bottom = 60;
  Document doc(width, height);
  doc.text(width / 2, 24, title, 16, "middle");
  if (counts_by_rank.size() < 2) return doc.finish();

  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < counts_by_rank.size(); ++r) {
    xs.push_back(std::log10(static_cast<double>(r + 1)));
    ys.push_back(std::log10(static_cast<double>(counts_by_rank[r])));
  }
  const Range rx = Range::of(xs);
  const Range ry = Range::of(ys);
  const double x0 = left, x1 = width - right;
  const double y0 = height - bottom, y1 = top;

  doc.line(x0, y0, x1, y0, "black");
  doc.line(x0, y0, x0, y1, "black");
  doc.text(width / 2, height - 16, "log10 rank", 12, "middle");
  doc.text(18, height / 2, "log10 count", 12, "middle",
           " transform=\"rotate(-90 18 " + num(height / 2) + ")\"");

  for (std::size_t i = 0; i < xs.size(); ++i)
    doc.circle(rx.scale(xs[i], x0, x1), ry.scale(ys[i], y0, y1), 2, "#4878a8");

  const double fit_y_lo = intercept + slope * rx.lo;
  const double fit_y_hi = intercept + slope * rx.hi;
  doc.line(rx.scale(rx.lo, x0, x1), ry.scale(fit_y_lo, y0, y1),
           rx.scale(rx.hi, x0, x1), ry.scale(fit_y_hi, y0, y1), "#c04040", 1.5);
  doc.text(x1 - 6, y1 + 14, "slope " + format_double(slope), 12, "end");
  return doc.finish();
}

// Monotone grayscale ramp: value 0 renders white, the maximum renders black.
inline std::string heatmap(const std::vector<double>& values, int rows, int cols,
                           const std::string& title) {
  const double cell = std::max(6.0, std::min(28.0, 560.0 / std::max(rows, cols)));
  const double left = 40, top = 50;
  const double width = left + cell * cols + 40;
  const double height = top + cell * rows + 40;
  Document doc(width, height);
  doc.text(width / 2, 24, title, 14, "middle");

  double lo = values.empty() ? 0.0 : values[0];
  double hi = lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = values[static_cast<std::size_t>(r) * cols + c];
      const double unit = span > 0.0 ? (v - lo) / span : 0.0;
      const int gray = 255 - static_cast<int>(std::lround(unit * 255.0));
      const std::string fill =
          "rgb(" + std::to_string(gray) + "," + std::to_string(gray) + "," +
          std::to_string(gray) + ")";
      doc.rect(left + cell * c, top + cell * r, cell, cell, fill);
    }
  }
  doc.text(left, height - 14,
           "min " + format_double(lo) + "  max " + format_double(hi), 11);
  return doc.finish();
}

// Labeled 2D scatter; the first point (the query term, when present) is
// drawn in a distinct color.
inline std::string scatter_plot(const std::vector<double>& xs,
                                const std::vector<double>& ys,
                                const std::vector<std::string>& labels,
                                const std::string& title,
                                bool highlight_first = false) {
  const double width = 720, height = 560;
  const double left = 50, right = 50, top = 50, bottom = 40;
  Document doc(width, height);
  doc.text(width / 2, 24, title, 16, "middle");
  if (xs.empty()) return doc.finish();

  const Range rx = Range::of(xs);
  const Range ry = Range::of(ys);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double px = rx.scale(xs[i], left, width - right);
    const double py = ry.scale(ys[i], height - bottom, top);
    const bool is_query = highlight_first && i == 0;
    doc.circle(px, py, is_query ? 5 : 3, is_query ? "#c04040" : "#4878a8");
    if (i < labels.size()) doc.text(px + 6, py + 4, labels[i], 10);
  }
  return doc.finish();
}

}  // namespace svg
}  // namespace passport
