#pragma once

#include "vesseltop/grid.hpp"

namespace vesseltop {

/// Betti numbers of a binary mask viewed as a union of closed pixels/voxels.
/// Foreground uses 8-connectivity (2D) / 26-connectivity (3D); background
/// uses the complementary 4 / 6. `b2` is always 0 in 2D.
struct BettiNumbers {
    int b0 = 0;
    int b1 = 0;
    int b2 = 0;

    bool operator==(const BettiNumbers&) const = default;
};

/// b0: foreground components. 2D b1: bounded background components.
/// 3D b2: bounded background cavities, b1 = b0 + b2 - euler_characteristic.
BettiNumbers betti_numbers(const BinaryField& mask);

/// Euler characteristic of the closed cubical complex covered by the mask.
int euler_characteristic(const BinaryField& mask);

/// Foreground component count under the foreground connectivity.
int count_components(const BinaryField& mask);

/// Sum over i of |b_i(pred) - b_i(ref)|.
int betti_err(const BinaryField& pred, const BinaryField& ref);

}  // namespace vesseltop
