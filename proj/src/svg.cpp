#include "rumorlens/svg.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace rumorlens {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

struct Point {
  double x, y;
};

// theta clockwise from 12 o'clock, screen y pointing down
Point polar(double cx, double cy, double r, double theta) { return {cx + r * std::sin(theta), cy - r * std::cos(theta)}; }

// Closed annular sector between radii r0 < r1 and angles t0 < t1.
std::string annular_path(double cx, double cy, double r0, double r1, double t0, double t1) {
  const int large = t1 - t0 > std::numbers::pi ? 1 : 0;
  const Point a = polar(cx, cy, r1, t0), b = polar(cx, cy, r1, t1);
  const Point c = polar(cx, cy, r0, t1), d = polar(cx, cy, r0, t0);
  std::ostringstream p;
  p << "M" << num(a.x) << ' ' << num(a.y) << " A" << num(r1) << ' ' << num(r1) << " 0 " << large << " 1 " << num(b.x)
    << ' ' << num(b.y) << " L" << num(c.x) << ' ' << num(c.y);
  if (r0 > 0.0)
    p << " A" << num(r0) << ' ' << num(r0) << " 0 " << large << " 0 " << num(d.x) << ' ' << num(d.y);
  p << " Z";
  return p.str();
}

const std::string& sentiment_color(Polarity p, const ColorConfig& colors) {
  switch (p) {
    case Polarity::negative: return colors.negative;
    case Polarity::positive: return colors.positive;
    case Polarity::neutral: break;
  }
  return colors.neutral;
}

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string propagation_svg(const PropagationLayout& layout, const ColorConfig& colors) {
  const double margin = 10.0;
  const double size = 2.0 * (layout.total_radius + margin);
  const double cx = size / 2.0, cy = size / 2.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size) << "\" height=\"" << num(size)
     << "\" viewBox=\"0 0 " << num(size) << ' ' << num(size) << "\" data-case-id=\"" << xml_escape(layout.case_id)
     << "\">\n";

  for (const auto& ring : layout.rings) {
    for (const auto& sector : ring.sectors) {
      for (const auto& cell : sector.cells) {
        os << "<path class=\"cell\" data-post-id=\"" << xml_escape(cell.post_id) << "\" data-day=\""
           << format_day(sector.day) << "\" fill=\"" << sentiment_color(cell.sentiment, colors) << "\" d=\""
           << annular_path(cx, cy, cell.r0, cell.r1, cell.theta0, cell.theta1) << "\"/>\n";
      }
    }
  }
  for (const auto& ring : layout.rings) {
    os << "<circle class=\"ring-boundary\" data-depth=\"" << ring.depth << "\" cx=\"" << num(cx) << "\" cy=\""
       << num(cy) << "\" r=\"" << num(ring.r_outer) << "\" fill=\"none\" stroke=\"" << colors.ring_stroke
       << "\" stroke-width=\"2\"/>\n";
  }
  for (const auto& ring : layout.rings) {
    for (const auto& sector : ring.sectors) {
      for (const auto& cell : sector.cells) {
        if (!cell.keyword) continue;
        const Point at = polar(cx, cy, 0.5 * (cell.r0 + cell.r1), 0.5 * (cell.theta0 + cell.theta1));
        os << "<text class=\"keyword\" x=\"" << num(at.x) << "\" y=\"" << num(at.y)
           << "\" text-anchor=\"middle\" dominant-baseline=\"central\" font-size=\"9\">" << xml_escape(*cell.keyword)
           << "</text>\n";
      }
    }
  }
  os << "<circle class=\"center\" data-post-id=\"" << xml_escape(layout.case_id) << "\" cx=\"" << num(cx)
     << "\" cy=\"" << num(cy) << "\" r=\"" << num(layout.center_radius) << "\" fill=\"" << colors.center << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

std::string projection_svg(std::span<const GlyphSpec> glyphs, const GlyphConfig& glyph_cfg, const ColorConfig& colors,
                           double canvas) {
  const double margin = glyph_cfg.r_max * 2.0;
  const double size = canvas + 2.0 * margin;
  const double band = glyph_cfg.r_max * 0.5;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size) << "\" height=\"" << num(size)
     << "\" viewBox=\"0 0 " << num(size) << ' ' << num(size) << "\">\n";
  for (const auto& g : glyphs) {
    const double cx = margin + g.x * canvas;
    // y grows upward in the embedding
    const double cy = margin + (1.0 - g.y) * canvas;
    os << "<g class=\"glyph\" data-case-id=\"" << xml_escape(g.case_id) << "\">\n";
    os << "  <circle class=\"inner\" cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(g.inner_radius)
       << "\" fill=\"" << colors.topic(g.topic_color_index) << "\"/>\n";
    const double r0 = g.inner_radius + 1.5;
    for (const auto& arc : g.arcs) {
      os << "  <path class=\"arc\" data-metric=\"" << to_string(arc.metric) << "\" data-fraction=\""
         << num(arc.fraction) << "\" fill=\"#444444\" d=\""
         << annular_path(cx, cy, r0, r0 + band, arc.start, arc.start + arc.extent) << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace rumorlens
