#pragma once

#include <span>
#include <string>
#include <string_view>

#include "rumorlens/config.hpp"
#include "rumorlens/layout.hpp"
#include "rumorlens/projection.hpp"

namespace rumorlens {

/// Propagation view: one `circle.center`, one `circle.ring-boundary` per
/// ring (its outer edge), one `path.cell` per cell, plus keyword labels.
std::string propagation_svg(const PropagationLayout& layout, const ColorConfig& colors);

/// Projection view: one `g.glyph` per case holding `circle.inner` and four
/// `path.arc` elements. Glyph centers map [0,1]^2 onto the canvas.
std::string projection_svg(std::span<const GlyphSpec> glyphs, const GlyphConfig& glyph_cfg, const ColorConfig& colors,
                           double canvas = 800.0);

std::string xml_escape(std::string_view text);

}  // namespace rumorlens
