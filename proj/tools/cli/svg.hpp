#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "derivroots/experiments.hpp"
#include "derivroots/serialization.hpp"

namespace derivroots::cli {

struct ScatterStyle {
  int width = 640;
  int height = 640;
  int margin = 48;
  double marker_radius = 2.2;
  std::string title;
  // Colour per derivative order; orders not listed cycle through `palette`.
  std::map<std::size_t, std::string> colors{{0, "black"}, {1, "blue"}};
  std::vector<std::string> palette{"red", "darkorange", "green", "purple"};
};

ScatterStyle style_from_json(const Json& j);

// One SVG with a frame, axes through the origin when visible, equal-aspect
// scaling, a marker per point and a legend per layer. Output depends only
// on the arguments. Throws ValidationError for an empty point set.
std::string render_scatter(const std::vector<ScatterPoint>& points, const ScatterStyle& style = {});

}  // namespace derivroots::cli
