#pragma once

#include <array>

#include "vesseltop/grid.hpp"

namespace vesseltop {

/// Topology-preserving thinning to a one-element-wide curve skeleton.
///
/// Border elements are peeled in directional subiterations (4 in 2D, 6 in
/// 3D). Within a subiteration, candidates are removed one at a time and each
/// removal re-checks that the element is still simple in the current image,
/// so every deletion preserves the Betti numbers of the foreground (8/4
/// connectivity in 2D, 26/6 in 3D). Curve endpoints (exactly one neighbour)
/// are kept. Elements outside the grid count as background.
BinaryField skeletonize(const BinaryField& mask);

namespace thinning_detail {

/// 3x3 (z = 1) or 3x3x3 neighbourhood, index `dx+1 + 3*(dy+1) + 9*(dz+1)`.
using Neighborhood = std::array<bool, 27>;

/// Simple-point test for the centre of `n` (centre value ignored).
bool is_simple_2d(const Neighborhood& n);
bool is_simple_3d(const Neighborhood& n);

}  // namespace thinning_detail

}  // namespace vesseltop
