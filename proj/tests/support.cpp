#include "support.hpp"

namespace magdirac::test {

std::shared_ptr<const PolarGrid> default_grid(double B0, int K, int L, int Nr, int Ntheta) {
  return std::make_shared<const PolarGrid>(
      build_polar_grid(default_radius(B0, K, L), Nr, effective_ntheta(Ntheta, K)));
}

const ModeBasis& small_basis() {
  static const ModeBasis b = ModeBasis::build({}, 8, 8, default_grid(1.0, 8, 8, 256, 64));
  return b;
}

const ModeBasis& reference_basis() {
  static const ModeBasis b = ModeBasis::build({}, 24, 24, default_grid(1.0, 24, 24, 512, 64));
  return b;
}

}  // namespace magdirac::test
