#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vesseltop/grid.hpp"

namespace vesseltop {

/// Squared Euclidean distance from every element to the nearest seed element
/// (`seeds[i] != 0`), computed exactly with the separable lower-envelope
/// transform. With `physical` set, axis steps are scaled by the shape's
/// spacing; otherwise one voxel is one unit. Elements get +infinity when
/// there are no seeds.
std::vector<double> squared_distance_to_seeds(const GridShape& shape, std::span<const std::uint8_t> seeds,
                                              bool physical = false);

/// Exact Euclidean distance (voxel units) from each foreground element to the
/// nearest background element. The grid is surrounded by a one-element layer
/// of virtual background, so foreground touching the grid edge (including an
/// all-foreground grid) measures 1 there. Background elements are 0.
ScalarField edt(const BinaryField& mask);

/// Squared form of `edt`, exact for integer lattices.
std::vector<double> edt_squared(const BinaryField& mask);

}  // namespace vesseltop
