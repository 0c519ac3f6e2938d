#pragma once

#include <optional>
#include <utility>

#include "vesseltop/edt.hpp"
#include "vesseltop/grid.hpp"
#include "vesseltop/thinning.hpp"

namespace vesseltop {

/// A mask together with its skeleton and the distance-derived fields used by
/// the centerline metrics.
///
/// - `dist`: EDT of the mask clamped above at `r_max` (1 on boundary voxels).
/// - `radius`: `dist` restricted to the skeleton.
/// - `inv_radius`: 1 / radius on the skeleton, 0 elsewhere.
/// - `r_max`: normalisation anchor; the skeleton's largest radius unless an
///   override was supplied. `i_min` is its reciprocal.
/// - `own_r_max`: the unclamped largest skeleton radius of this mask alone,
///   used to agree on a joint anchor with another bundle.
struct SkeletonBundle {
    BinaryField mask;
    BinaryField skeleton;
    ScalarField dist;
    ScalarField radius;
    ScalarField inv_radius;
    double r_max = 1.0;
    double i_min = 1.0;
    double own_r_max = 1.0;

    const GridShape& shape() const { return mask.shape(); }
};

/// Builds all fields for `mask`. An empty mask yields empty fields and
/// `r_max == 1`.
SkeletonBundle build_bundle(const BinaryField& mask, std::optional<double> r_max_override = std::nullopt);

/// Same, but with a caller-supplied skeleton (must be a subset of `mask`).
SkeletonBundle build_bundle(const BinaryField& mask, const BinaryField& skeleton,
                            std::optional<double> r_max_override = std::nullopt);

/// Re-anchors an existing bundle at a new r_max without re-running thinning.
SkeletonBundle rescale_bundle(const SkeletonBundle& bundle, double r_max);

/// Prediction and reference bundles sharing one r_max: the larger of the two
/// skeletons' own maxima.
std::pair<SkeletonBundle, SkeletonBundle> build_joint_bundles(const BinaryField& pred, const BinaryField& ref);

struct NormalizedFields {
    ScalarField radius;      // R / r_max, in (0, 1] on the skeleton
    ScalarField inv_radius;  // I / i_min = r_max / R, in [1, r_max] on the skeleton
    ScalarField dist;        // D / r_max, in (0, 1] on the mask
};

NormalizedFields normalized_fields(const SkeletonBundle& bundle);

}  // namespace vesseltop
