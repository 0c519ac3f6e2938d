#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vesseltop/grid.hpp"
#include "vesseltop/morphology.hpp"
#include "vesseltop/variant.hpp"

namespace vesseltop {

/// Per-element foreground probability. Values are clamped into [0, 1] on
/// construction; NaN is rejected.
class ProbField : public Field<double> {
public:
    ProbField() = default;
    ProbField(GridShape shape, std::vector<double> values);

    static ProbField constant(const GridShape& shape, double value);
    static ProbField from_mask(const BinaryField& mask);

    /// Hard mask `p >= 0.5`.
    BinaryField threshold() const;
};

/// Iterative min/max soft skeleton with plus-shaped (face-adjacent)
/// erosion and dilation; neighbours outside the grid are ignored.
///
///     skel = relu(p - open(p))
///     repeat iters: p = erode(p); delta = relu(p - open(p));
///                   skel += relu(delta - skel * delta)
ProbField soft_skeleton(const ProbField& p, int iters);

/// Loss value with its gradient with respect to every element of p.
struct LossValue {
    double value = 0.0;
    std::vector<double> grad;
};

/// 1 - 2 sum(p g) / (sum p + sum g); 0 when both sums vanish.
double soft_dice_loss(const ProbField& p, const BinaryField& ref);
LossValue soft_dice_loss_grad(const ProbField& p, const BinaryField& ref);

/// Mean binary cross-entropy with p clamped to [1e-7, 1 - 1e-7].
double cross_entropy(const ProbField& p, const BinaryField& ref);
LossValue cross_entropy_grad(const ProbField& p, const BinaryField& ref);

/// 1 - cl-X-Dice with soft prediction fields. S_P is soft_skeleton(p, iters)
/// and V_P is p. The distance map of the thresholded prediction scales the
/// radius-type fields and carries no gradient. `ref_bundle` must come from
/// `ref`; it is re-anchored when the prediction needs a larger r_max.
double soft_cl_x_loss(const VariantSpec& spec, const ProbField& p, const BinaryField& ref,
                      const SkeletonBundle& ref_bundle, int iters);
LossValue soft_cl_x_loss_grad(const VariantSpec& spec, const ProbField& p, const BinaryField& ref,
                              const SkeletonBundle& ref_bundle, int iters);

/// 0.5 CE + a/(2(a+b)) softDice + b/(2(a+b)) softX. Both weights are 0 when
/// a + b == 0. `variant == "none"` drops the X term and requires beta == 0.
struct CombinedLossSpec {
    double alpha = 1.0;
    double beta = 1.0;
    std::string variant = "cbDice";
    std::optional<int> soft_skel_iters;  // default: ceil(reference r_max)
};

/// Iteration count used when the spec leaves it unset.
int default_soft_skel_iters(const SkeletonBundle& ref_bundle);

double combined_loss(const CombinedLossSpec& spec, const ProbField& p, const BinaryField& ref);
LossValue combined_loss_grad(const CombinedLossSpec& spec, const ProbField& p, const BinaryField& ref);

using LossFunction = std::function<LossValue(const ProbField&)>;

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    std::size_t sites = 0;
};

/// Compares the analytic gradient against central differences
/// (f(p + eps e_i) - f(p - eps e_i)) / 2eps at the given sites (all elements
/// when `sites` is empty). Error per site is
/// |analytic - cd| / max(|analytic|, |cd|, 1e-8).
GradCheckResult grad_check(const LossFunction& loss, const ProbField& p, double eps,
                           const std::vector<std::size_t>& sites = {});

/// Probe instance for gradient checks: every element gets a distinct level
/// in [0.02, 0.98], shuffled, with none near 0.5. Distinct, well separated
/// values keep min/max selections and the 0.5 threshold stable under small
/// perturbations.
ProbField random_probe_field(const GridShape& shape, std::uint64_t seed);

/// Bernoulli(0.5) mask drawn from `seed`.
BinaryField random_mask(const GridShape& shape, std::uint64_t seed);

}  // namespace vesseltop
