#pragma once

#include "fmd/outliers.hpp"

#include <string>

namespace fmd {

/// SVG 1.1 rendering of a functional boxplot: every curve in a light
/// depth-colored stroke, shaded central band, whisker envelopes, emphasized
/// median, outliers in a distinct stroke. Byte-deterministic for fixed input.
std::string render_boxplot_svg(const FunctionalSample& sample, const BoxplotSummary& box,
                               int width = 900, int height = 600);

}  // namespace fmd
