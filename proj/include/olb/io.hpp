#pragma once

// Deterministic text output: shortest round-trip float formatting, CSV rows,
// and a small SVG scene writer for orbits and center clouds.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "olb/core.hpp"
#include "olb/geom.hpp"

namespace olb {

// Shortest decimal that round-trips the double.
inline std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(Point2 p) { return fmt(p.x) + "," + fmt(p.y); }

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) fail(errc::invalid_argument, "cannot open " + path);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

// ---------------------------------------------------------------------------
// SVG scenes (y axis flipped so the plane reads the usual way)

class SvgScene {
 public:
  SvgScene(Point2 lo, Point2 hi, int pixels = 900)
      : lo_(lo), hi_(hi), pixels_(pixels) {}

  void polygon(const std::vector<Point2>& pts, const std::string& stroke,
               const std::string& fill = "none", double width = 1.5) {
    std::ostringstream s;
    s << "<polygon points=\"";
    for (auto& p : pts) s << fmt(tx(p).x) << "," << fmt(tx(p).y) << " ";
    s << "\" fill=\"" << fill << "\" stroke=\"" << stroke
      << "\" stroke-width=\"" << fmt(width * unit()) << "\"/>";
    body_.push_back(s.str());
  }

  void polyline(const std::vector<Point2>& pts, const std::string& stroke,
                double width = 1.0) {
    if (pts.empty()) return;
    std::ostringstream s;
    s << "<polyline points=\"";
    for (auto& p : pts) s << fmt(tx(p).x) << "," << fmt(tx(p).y) << " ";
    s << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
      << fmt(width * unit()) << "\"/>";
    body_.push_back(s.str());
  }

  void dots(const std::vector<Point2>& pts, const std::string& fill,
            double radius = 1.6) {
    for (auto& p : pts) {
      std::ostringstream s;
      s << "<circle cx=\"" << fmt(tx(p).x) << "\" cy=\"" << fmt(tx(p).y)
        << "\" r=\"" << fmt(radius * unit()) << "\" fill=\"" << fill << "\"/>";
      body_.push_back(s.str());
    }
  }

  void circle(const Circle& c, const std::string& stroke, double width = 0.7) {
    std::ostringstream s;
    s << "<circle cx=\"" << fmt(tx(c.center).x) << "\" cy=\""
      << fmt(tx(c.center).y) << "\" r=\"" << fmt(c.radius)
      << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
      << fmt(width * unit()) << "\"/>";
    body_.push_back(s.str());
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(errc::invalid_argument, "cannot open " + path);
    double w = hi_.x - lo_.x, h = hi_.y - lo_.y;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels_
        << "\" height=\"" << int(pixels_ * h / w) << "\" viewBox=\""
        << fmt(lo_.x) << " " << fmt(-hi_.y) << " " << fmt(w) << " " << fmt(h)
        << "\">\n";
    out << "<rect x=\"" << fmt(lo_.x) << "\" y=\"" << fmt(-hi_.y)
        << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
        << "\" fill=\"white\"/>\n";
    for (auto& b : body_) out << b << "\n";
    out << "</svg>\n";
  }

 private:
  // flip y so the scene reads like the plane
  Point2 tx(Point2 p) const { return {p.x, -p.y}; }
  double unit() const { return (hi_.x - lo_.x) / pixels_; }

  Point2 lo_, hi_;
  int pixels_;
  std::vector<std::string> body_;
};

}  // namespace olb
