#include "vesseltop/morphology.hpp"

#include <algorithm>
#include <cmath>

namespace vesseltop {

namespace {

SkeletonBundle assemble(const BinaryField& mask, const BinaryField& skeleton, const std::vector<double>& raw_dist,
                        std::optional<double> r_max_override) {
    const std::size_t n = mask.size();
    double own = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (skeleton[i]) own = std::max(own, raw_dist[i]);
    }
    if (own == 0.0) own = 1.0;

    double r_max = own;
    if (r_max_override) {
        if (!(*r_max_override > 0.0)) throw GridError("r_max override must be positive");
        r_max = *r_max_override;
    }

    std::vector<double> dist(n, 0.0), radius(n, 0.0), inv(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        dist[i] = std::min(raw_dist[i], r_max);
        if (skeleton[i]) {
            radius[i] = dist[i];
            inv[i] = 1.0 / dist[i];
        }
    }
    SkeletonBundle b;
    b.mask = mask;
    b.skeleton = skeleton;
    b.dist = ScalarField(mask.shape(), std::move(dist));
    b.radius = ScalarField(mask.shape(), std::move(radius));
    b.inv_radius = ScalarField(mask.shape(), std::move(inv));
    b.r_max = r_max;
    b.i_min = 1.0 / r_max;
    b.own_r_max = own;
    return b;
}

}  // namespace

SkeletonBundle build_bundle(const BinaryField& mask, std::optional<double> r_max_override) {
    return build_bundle(mask, skeletonize(mask), r_max_override);
}

SkeletonBundle build_bundle(const BinaryField& mask, const BinaryField& skeleton,
                            std::optional<double> r_max_override) {
    require_same_shape(mask.shape(), skeleton.shape(), "build_bundle");
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (skeleton[i] && !mask[i]) throw GridError("skeleton element outside mask");
    }
    auto sq = edt_squared(mask);
    for (double& v : sq) v = std::sqrt(v);
    return assemble(mask, skeleton, sq, r_max_override);
}

SkeletonBundle rescale_bundle(const SkeletonBundle& bundle, double r_max) {
    if (r_max == bundle.r_max) return bundle;
    return build_bundle(bundle.mask, bundle.skeleton, r_max);
}

std::pair<SkeletonBundle, SkeletonBundle> build_joint_bundles(const BinaryField& pred, const BinaryField& ref) {
    require_same_shape(pred.shape(), ref.shape(), "build_joint_bundles");
    auto p = build_bundle(pred);
    auto l = build_bundle(ref);
    const double joint = std::max(p.own_r_max, l.own_r_max);
    return {rescale_bundle(p, joint), rescale_bundle(l, joint)};
}

NormalizedFields normalized_fields(const SkeletonBundle& b) {
    const std::size_t n = b.mask.size();
    std::vector<double> rn(n, 0.0), in(n, 0.0), dn(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        dn[i] = b.dist[i] / b.r_max;
        if (b.skeleton[i]) {
            rn[i] = b.radius[i] / b.r_max;
            in[i] = b.inv_radius[i] / b.i_min;
        }
    }
    return {ScalarField(b.shape(), std::move(rn)), ScalarField(b.shape(), std::move(in)),
            ScalarField(b.shape(), std::move(dn))};
}

}  // namespace vesseltop
