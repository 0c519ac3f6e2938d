#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace vesseltop {

/// Per-element field a recipe slot draws from. Prediction or reference side
/// is implied by the slot.
enum class FieldKind {
    skeleton,        // S
    radius,          // R
    inv_radius,      // I
    norm_radius,     // R_N = R / r_max
    norm_inv_radius, // I_N = I / i_min
    mask,            // V
    dist,            // D
    norm_dist,       // D_N = D / r_max
};

struct Weight {
    FieldKind kind = FieldKind::skeleton;
    int exponent = 1;

    bool operator==(const Weight&) const = default;
};

enum class VariantKind { cl_d, cl_s_d, cl_m_d, cl_ms_d, cl_mi_d, cl_msn_d, cl_min_d };

/// The six Q-field selectors of one centerline-Dice variant.
///
/// Tprec = <sp*vl> / (<sp*spvp*(1-S_L)> + <sp*slvl>)
/// Tsens = <sl*vp> / (<sl*slvl*(1-S_P)> + <sl*spvp>)
/// where <.> sums elementwise products over the grid.
struct Recipe {
    Weight sl, sp;
    FieldKind vl = FieldKind::mask, vp = FieldKind::mask;
    FieldKind slvl = FieldKind::skeleton, spvp = FieldKind::skeleton;

    bool operator==(const Recipe&) const = default;
};

struct VariantSpec {
    std::string name;  // as requested, e.g. "cbDice" or "cl-MIN-D"
    VariantKind kind = VariantKind::cl_d;
    int dim = 2;
    Recipe recipe;

    /// True when the recipe uses r_max-normalised fields.
    bool normalized() const;

    /// Resolves a variant name for a 2D or 3D grid. Accepted names:
    /// cl-D (alias clDice), cl-S-D, cl-M-D, cl-MS-D, cl-MI-D, cl-MSN-D,
    /// cl-MIN-D (alias cbDice). Throws std::invalid_argument otherwise.
    static VariantSpec make(std::string_view name, int dim);
};

Recipe recipe_for(VariantKind kind, int dim);
std::string_view canonical_name(VariantKind kind);
VariantKind parse_variant_kind(std::string_view name);
bool is_variant_name(std::string_view name);
const std::vector<std::string>& variant_names();

}  // namespace vesseltop
