#pragma once

#include "speckle/grid.hpp"

namespace speckle {

/// Synthetic test scene in display units (0-255): a horizontal ramp with a
/// disk, an ellipse and two rectangles of distinct intensity.
RealGrid make_phantom(int height, int width);

}  // namespace speckle
