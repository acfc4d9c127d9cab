#pragma once

#include "speckle/grid.hpp"

namespace speckle {

// Unitary 2-D DFT: both directions scale by 1/sqrt(H*W), frequency origin at
// index (0, 0). Backed by FFTW; plans are cached per shape and shared across
// threads.

ComplexField dft2(const ComplexField& field);
ComplexField idft2(const ComplexField& field);

void dft2_inplace(ComplexField& field);
void idft2_inplace(ComplexField& field);

/// Moves the zero frequency from (0, 0) to (floor(H/2), floor(W/2)).
template <typename T>
Grid<T> fftshift(const Grid<T>& g) {
    const int H = g.height(), W = g.width();
    Grid<T> out(H, W);
    for (int h = 0; h < H; ++h)
        for (int w = 0; w < W; ++w) out((h + H / 2) % H, (w + W / 2) % W) = g(h, w);
    return out;
}

/// Inverse of fftshift.
template <typename T>
Grid<T> ifftshift(const Grid<T>& g) {
    const int H = g.height(), W = g.width();
    Grid<T> out(H, W);
    for (int h = 0; h < H; ++h)
        for (int w = 0; w < W; ++w) out(h, w) = g((h + H / 2) % H, (w + W / 2) % W);
    return out;
}

}  // namespace speckle
