#include "speckle/phantom.hpp"

namespace speckle {

RealGrid make_phantom(int height, int width) {
    RealGrid x(height, width);
    for (int h = 0; h < height; ++h) {
        for (int w = 0; w < width; ++w) {
            const double u = static_cast<double>(h) / height;
            const double v = static_cast<double>(w) / width;
            double value = 60.0 + 80.0 * v;
            if ((u - 0.3) * (u - 0.3) + (v - 0.3) * (v - 0.3) < 0.04) value = 210.0;
            if (u > 0.55 && u < 0.85 && v > 0.15 && v < 0.45) value = 30.0;
            if ((u - 0.65) * (u - 0.65) / 0.02 + (v - 0.7) * (v - 0.7) / 0.05 < 1.0) value = 170.0;
            if (u > 0.1 && u < 0.2 && v > 0.55 && v < 0.9) value = 240.0;
            x(h, w) = value;
        }
    }
    return x;
}

}  // namespace speckle
