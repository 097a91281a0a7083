#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "derivroots/errors.hpp"

namespace derivroots::cli {

namespace {

std::string fixed(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  std::string s = buf;
  if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string layer_label(std::size_t order) {
  switch (order) {
    case 0: return "zeros of P";
    case 1: return "zeros of P'";
    default: return "zeros of P^(" + std::to_string(order) + ")";
  }
}

}  // namespace

ScatterStyle style_from_json(const Json& j) {
  ScatterStyle style;
  if (!j.is_object()) throw ValidationError("style", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "style." + key;
    if (key == "width" || key == "height" || key == "margin") {
      if (!value.is_number_integer() || value.get<int>() <= 0) throw ValidationError(path, "expected a positive integer");
      (key == "width" ? style.width : key == "height" ? style.height : style.margin) = value.get<int>();
    } else if (key == "marker_radius") {
      if (!value.is_number() || !(value.get<double>() > 0.0)) throw ValidationError(path, "expected a positive number");
      style.marker_radius = value.get<double>();
    } else if (key == "title") {
      if (!value.is_string()) throw ValidationError(path, "expected a string");
      style.title = value.get<std::string>();
    } else if (key == "colors") {
      if (!value.is_object()) throw ValidationError(path, "expected an object keyed by derivative order");
      for (const auto& [order, color] : value.items()) {
        std::size_t used = 0;
        unsigned long parsed = 0;
        try {
          parsed = std::stoul(order, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != order.size() || !color.is_string()) {
          throw ValidationError(path + "." + order, "expected order -> colour string");
        }
        style.colors[parsed] = color.get<std::string>();
      }
    } else {
      throw ValidationError(path, "unknown field");
    }
  }
  if (2 * style.margin >= std::min(style.width, style.height)) {
    throw ValidationError("style.margin", "leaves no room for the plot");
  }
  return style;
}

std::string render_scatter(const std::vector<ScatterPoint>& points, const ScatterStyle& style) {
  if (points.empty()) throw ValidationError("layers", "nothing to plot");

  std::set<std::size_t> orders;
  double x0 = points[0].z.real(), x1 = x0, y0 = points[0].z.imag(), y1 = y0;
  for (const auto& p : points) {
    orders.insert(p.order);
    x0 = std::min(x0, p.z.real());
    x1 = std::max(x1, p.z.real());
    y0 = std::min(y0, p.z.imag());
    y1 = std::max(y1, p.z.imag());
  }
  // Square data window around the bounding box, padded by 5%.
  const double span = std::max({x1 - x0, y1 - y0, 1e-9}) * 1.1;
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const double left = cx - span / 2, bottom = cy - span / 2;
  const double legend_width = 150.0;
  const double plot = std::min(style.width - 2.0 * style.margin - legend_width, style.height - 2.0 * style.margin);
  const double scale = plot / span;
  const auto px = [&](double x) { return style.margin + (x - left) * scale; };
  const auto py = [&](double y) { return style.margin + plot - (y - bottom) * scale; };

  std::map<std::size_t, std::string> color;
  std::size_t next = 0;
  for (std::size_t o : orders) {
    const auto it = style.colors.find(o);
    color[o] = it != style.colors.end() ? it->second : style.palette[next++ % style.palette.size()];
  }

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) + "\" height=\"" +
       std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
       std::to_string(style.height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!style.title.empty()) {
    s += "<text x=\"" + fixed(style.margin + plot / 2) + "\" y=\"" + fixed(style.margin / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + escape(style.title) + "</text>\n";
  }
  s += "<g class=\"axes\" stroke=\"#888\" stroke-width=\"1\" fill=\"none\">\n";
  s += "<rect x=\"" + fixed(px(left)) + "\" y=\"" + fixed(py(bottom + span)) + "\" width=\"" + fixed(plot) +
       "\" height=\"" + fixed(plot) + "\"/>\n";
  if (left < 0 && left + span > 0) {
    s += "<line x1=\"" + fixed(px(0)) + "\" y1=\"" + fixed(py(bottom)) + "\" x2=\"" + fixed(px(0)) + "\" y2=\"" +
         fixed(py(bottom + span)) + "\" stroke-dasharray=\"4 3\"/>\n";
  }
  if (bottom < 0 && bottom + span > 0) {
    s += "<line x1=\"" + fixed(px(left)) + "\" y1=\"" + fixed(py(0)) + "\" x2=\"" + fixed(px(left + span)) +
         "\" y2=\"" + fixed(py(0)) + "\" stroke-dasharray=\"4 3\"/>\n";
  }
  s += "</g>\n";
  s += "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#444\">\n";
  s += "<text x=\"" + fixed(px(left)) + "\" y=\"" + fixed(py(bottom) + 14) + "\">" + fixed(left, 3) + "</text>\n";
  s += "<text x=\"" + fixed(px(left + span)) + "\" y=\"" + fixed(py(bottom) + 14) + "\" text-anchor=\"end\">" +
       fixed(left + span, 3) + "</text>\n";
  s += "<text x=\"" + fixed(px(left) - 4) + "\" y=\"" + fixed(py(bottom)) + "\" text-anchor=\"end\">" +
       fixed(bottom, 3) + "</text>\n";
  s += "<text x=\"" + fixed(px(left) - 4) + "\" y=\"" + fixed(py(bottom + span) + 8) + "\" text-anchor=\"end\">" +
       fixed(bottom + span, 3) + "</text>\n";
  s += "</g>\n";

  for (std::size_t o : orders) {
    s += "<g class=\"layer\" data-order=\"" + std::to_string(o) + "\" fill=\"" + escape(color[o]) + "\">\n";
    for (const auto& p : points) {
      if (p.order != o) continue;
      s += "<circle class=\"marker\" cx=\"" + fixed(px(p.z.real())) + "\" cy=\"" + fixed(py(p.z.imag())) +
           "\" r=\"" + fixed(style.marker_radius) + "\"/>\n";
    }
    s += "</g>\n";
  }

  s += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  double ly = style.margin + 12.0;
  const double lx = style.margin + plot + 16.0;
  for (std::size_t o : orders) {
    s += "<rect class=\"legend-swatch\" x=\"" + fixed(lx) + "\" y=\"" + fixed(ly - 9) +
         "\" width=\"10\" height=\"10\" fill=\"" + escape(color[o]) + "\"/>\n";
    s += "<text class=\"legend-entry\" x=\"" + fixed(lx + 16) + "\" y=\"" + fixed(ly) + "\">" +
         escape(layer_label(o)) + "</text>\n";
    ly += 18.0;
  }
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace derivroots::cli
