#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "ntkgauss/errors.hpp"

namespace ntkgauss {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal rendering; bit-identical inputs give
/// byte-identical text, which the deterministic CSV contract rides on.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// RFC-4180 CSV with a header row, CRLF line endings.
class CsvWriter {
public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open output file: " + path);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(cells[i]);
    }
    out_ << "\r\n";
  }

private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    q += '"';
    return q;
  }

  std::ofstream out_;
};

/// Static SVG plots: a scatter with an optional fitted line (log-log), and
/// a band overlay. Data values ride along in comments so plots stay
/// self-describing and diffable.
class SvgPlot {
public:
  SvgPlot(const std::string& path, double x_lo, double x_hi, double y_lo,
          double y_hi, bool log_x = false, bool log_y = false)
      : out_(path, std::ios::binary),
        x_lo_(tf(x_lo, log_x)), x_hi_(tf(x_hi, log_x)),
        y_lo_(tf(y_lo, log_y)), y_hi_(tf(y_hi, log_y)),
        log_x_(log_x), log_y_(log_y) {
    if (!out_) throw ConfigError("cannot open output file: " + path);
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
         << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    out_ << "<!-- generator: ntkgauss " << kVersion << " -->\n";
    out_ << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    // axes
    line(kMargin, kH - kMargin, kW - kMargin, kH - kMargin, "black", 1.0);
    line(kMargin, kMargin, kMargin, kH - kMargin, "black", 1.0);
  }

  ~SvgPlot() { close(); }

  void comment(const std::string& text) { out_ << "<!-- " << text << " -->\n"; }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color, double width, double opacity = 1.0) {
    out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
         << width << "\" opacity=\"" << opacity << "\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      out_ << px(xs[i]) << ',' << py(ys[i]) << ' ';
    out_ << "\"/>\n";
  }

  void band(const std::vector<double>& xs, const std::vector<double>& lo,
            const std::vector<double>& hi, const std::string& color) {
    out_ << "<polygon fill=\"" << color << "\" opacity=\"0.35\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) out_ << px(xs[i]) << ',' << py(hi[i]) << ' ';
    for (std::size_t i = xs.size(); i-- > 0;) out_ << px(xs[i]) << ',' << py(lo[i]) << ' ';
    out_ << "\"/>\n";
  }

  void scatter(const std::vector<double>& xs, const std::vector<double>& ys,
               const std::string& color, double radius) {
    for (std::size_t i = 0; i < xs.size(); ++i)
      out_ << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(ys[i]) << "\" r=\""
           << radius << "\" fill=\"" << color << "\"/>\n";
  }

  void label(const std::string& text) {
    out_ << "<text x=\"" << kMargin + 8 << "\" y=\"" << kMargin - 8
         << "\" font-family=\"sans-serif\" font-size=\"12\">" << text << "</text>\n";
  }

  void close() {
    if (out_.is_open()) {
      out_ << "</svg>\n";
      out_.close();
    }
  }

private:
  static constexpr int kW = 640, kH = 480, kMargin = 48;

  static double tf(double v, bool log) { return log ? std::log10(v) : v; }

  double px(double x) const {
    const double t = (tf(x, log_x_) - x_lo_) / (x_hi_ - x_lo_);
    return kMargin + t * (kW - 2 * kMargin);
  }
  double py(double y) const {
    const double t = (tf(y, log_y_) - y_lo_) / (y_hi_ - y_lo_);
    return kH - kMargin - t * (kH - 2 * kMargin);
  }

  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double width) {
    out_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\""
         << y2 << "\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"/>\n";
  }

  std::ofstream out_;
  double x_lo_, x_hi_, y_lo_, y_hi_;
  bool log_x_, log_y_;
};

}  // namespace ntkgauss
