#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vesseltop/betti.hpp"
#include "vesseltop/grid.hpp"
#include "vesseltop/morphology.hpp"
#include "vesseltop/variant.hpp"

namespace vesseltop {

class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Topology precision / sensitivity pair and their harmonic mean.
struct CenterlineScore {
    double tprec = 0.0;
    double tsens = 0.0;
    double value = 0.0;
};

/// num/den with the empty conventions: 0/0 -> 1, x/0 -> 0.
double safe_ratio(double num, double den);
/// 2ab/(a+b), or 0 when a + b == 0.
double harmonic_mean(double a, double b);

/// 2|P n L| / (|P| + |L|); 1 when both are empty.
double dice(const BinaryField& pred, const BinaryField& ref);

/// Classic centerline Dice from skeleton/mask overlap counts.
CenterlineScore cl_dice_score(const SkeletonBundle& pred, const SkeletonBundle& ref);
double cl_dice(const SkeletonBundle& pred, const SkeletonBundle& ref);

/// Generic centerline-Dice variant. Normalised variants require both
/// bundles to share r_max (see build_joint_bundles).
CenterlineScore cl_x_dice_score(const VariantSpec& spec, const SkeletonBundle& pred, const SkeletonBundle& ref);
double cl_x_dice(const VariantSpec& spec, const SkeletonBundle& pred, const SkeletonBundle& ref);

/// Boundary elements: foreground with at least one face neighbour in the
/// background (outside the grid counts as background).
BinaryField boundary(const BinaryField& mask);

/// Normalised surface distance at `tolerance` physical units.
double nsd(const BinaryField& pred, const BinaryField& ref, double tolerance = 1.0);

struct ClassMetrics {
    int class_id = 0;
    double dice = 0.0;
    std::vector<std::pair<std::string, double>> centerline;  // variant name -> value, request order
    int betti_err = 0;
    double nsd = 0.0;
    double r_max = 1.0;
};

/// Unweighted means over a set of classes.
struct MetricSummary {
    std::vector<int> class_ids;
    double dice = 0.0;
    std::vector<std::pair<std::string, double>> centerline;
    double betti_err = 0.0;
    double nsd = 0.0;
};

struct MetricReport {
    GridShape shape;
    double tolerance = 1.0;
    std::vector<std::string> variants;
    std::vector<ClassMetrics> per_class;
    MetricSummary aggregate;
    std::vector<std::pair<std::string, MetricSummary>> groups;
};

struct EvaluateOptions {
    std::vector<std::string> variants = {"clDice", "cbDice"};
    double tolerance = 1.0;
    /// Named class subsets, e.g. {"L", {1, 2}}; reported as group means.
    std::vector<std::pair<std::string, std::vector<int>>> groups;
};

/// Per-class metrics for every class 1..class_count-1. Both grids must share
/// shape and class count.
MetricReport evaluate(const LabelGrid& pred, const LabelGrid& ref, const EvaluateOptions& options = {});

}  // namespace vesseltop
