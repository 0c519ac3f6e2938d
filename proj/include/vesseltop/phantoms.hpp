#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vesseltop/grid.hpp"

namespace vesseltop {

class PhantomError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PhantomKind { tube, ybranch, ring, multi_tube };

PhantomKind parse_phantom_kind(const std::string& name);

/// Synthetic vessel description. Every phantom is centred on the grid centre
/// `floor((dim - 1) / 2)` per axis.
///
/// - tube: one capsule, `radii[0]`, `lengths[0]`, axis along `orientation`.
/// - ybranch: trunk plus two branches from a junction at the centre, 120
///   degrees apart. `radii` is {branch1, branch2} (trunk = the larger) or
///   {trunk, branch1, branch2}; `lengths` is one shared value or three.
/// - ring: annulus `radii = {inner, outer}` (2D) or a torus in the z-centre
///   plane with tube radius (outer - inner) / 2 (3D).
/// - multi_tube: parallel capsules along x, one per radius, stacked along y.
///
/// Rasterisation keeps elements whose centre lies strictly closer than r to
/// the centreline, so an axis-aligned tube of integer radius r has EDT r on
/// its centreline.
struct PhantomSpec {
    PhantomKind kind = PhantomKind::tube;
    std::vector<int> dims = {64, 48};
    std::vector<double> radii = {3.0};
    std::vector<double> lengths = {20.0};
    std::vector<double> orientation = {1.0, 0.0};
    double jitter = 0.0;  // uniform endpoint perturbation, voxels
    std::uint64_t seed = 0;
    int margin = 2;       // required background border
};

/// Centreline segment with radius; phantoms other than rings are unions.
struct Capsule {
    std::array<double, 3> a{};
    std::array<double, 3> b{};
    double radius = 1.0;
};

std::vector<Capsule> phantom_capsules(const PhantomSpec& spec);

BinaryField generate(const PhantomSpec& spec);

/// Rasterisation of a single branch (capsule index) on the spec's grid.
BinaryField branch_mask(const PhantomSpec& spec, int branch_id);

/// `mask` minus the elements covered only by branch `branch_id`; elements
/// shared with other branches (the junction) stay.
BinaryField delete_branch(const PhantomSpec& spec, const BinaryField& mask, int branch_id);

/// Lattice shift, vacated elements become 0. Throws if foreground would
/// leave the grid.
BinaryField translate(const BinaryField& mask, const std::vector<int>& offset);

/// Nearest-neighbour resampling about the grid centre. Throws if scaled
/// foreground would leave the grid.
BinaryField scale(const BinaryField& mask, double factor);

// Sensitivity sweeps -------------------------------------------------------

enum class Experiment { translation, scaling, imbalance };

Experiment parse_experiment(const std::string& name);

struct SweepRow {
    std::string param;
    std::string metric;
    double value = 0.0;
};

/// Runs one experiment. Rows cover Dice, each requested centerline variant
/// and the paired scores "Dice+X" = 0.5 Dice + 0.5 X. The imbalance sweep
/// also emits `gap` rows holding |drop(thin) - drop(thick)| per metric.
std::vector<SweepRow> sweep(Experiment experiment,
                            const std::vector<std::string>& variants = {"clDice", "cl-M-D", "cbDice"});

/// CSV with header `param,metric,value`, LF endings, 6 significant digits.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Fixed phantom setups used by the sweeps.
PhantomSpec translation_phantom();
PhantomSpec scaling_phantom();
PhantomSpec imbalance_phantom();
std::vector<int> translation_offsets();
std::vector<double> scaling_factors();

}  // namespace vesseltop
