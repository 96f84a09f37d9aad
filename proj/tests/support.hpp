#pragma once

#include <memory>

#include "magdirac/spectrum.hpp"

namespace magdirac::test {

/// K = L = 8 basis on its default grid, built once per process.
const ModeBasis& small_basis();

/// The reference K = L = 24 basis (R = 20.5, Nr = 512, Ntheta = 128).
const ModeBasis& reference_basis();

std::shared_ptr<const PolarGrid> default_grid(double B0, int K, int L, int Nr, int Ntheta);

}  // namespace magdirac::test
