#include "vesseltop/variant.hpp"

#include <stdexcept>

namespace vesseltop {

namespace {

struct NamedKind {
    std::string_view name;
    VariantKind kind;
};

constexpr std::array<NamedKind, 9> kNames = {{
    {"cl-D", VariantKind::cl_d},
    {"clDice", VariantKind::cl_d},
    {"cl-S-D", VariantKind::cl_s_d},
    {"cl-M-D", VariantKind::cl_m_d},
    {"cl-MS-D", VariantKind::cl_ms_d},
    {"cl-MI-D", VariantKind::cl_mi_d},
    {"cl-MSN-D", VariantKind::cl_msn_d},
    {"cl-MIN-D", VariantKind::cl_min_d},
    {"cbDice", VariantKind::cl_min_d},
}};

}  // namespace

Recipe recipe_for(VariantKind kind, int dim) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("variant dimension must be 2 or 3");
    // Skeleton weights built from R or I are squared in 3D (cross-section area).
    const int e = dim == 3 ? 2 : 1;
    using F = FieldKind;
    auto weights = [](Weight w, F vol, F skel_vol) {
        Recipe r;
        r.sl = r.sp = w;
        r.vl = r.vp = vol;
        r.slvl = r.spvp = skel_vol;
        return r;
    };
    switch (kind) {
        case VariantKind::cl_d: return weights({F::skeleton, 1}, F::mask, F::skeleton);
        case VariantKind::cl_s_d: return weights({F::radius, e}, F::mask, F::skeleton);
        case VariantKind::cl_m_d: return weights({F::skeleton, 1}, F::dist, F::radius);
        case VariantKind::cl_ms_d: return weights({F::radius, e}, F::dist, F::radius);
        case VariantKind::cl_mi_d: return weights({F::inv_radius, e}, F::dist, F::radius);
        case VariantKind::cl_msn_d: return weights({F::norm_radius, e}, F::norm_dist, F::norm_radius);
        case VariantKind::cl_min_d: return weights({F::norm_inv_radius, e}, F::norm_dist, F::norm_radius);
    }
    throw std::invalid_argument("unknown variant kind");
}

std::string_view canonical_name(VariantKind kind) {
    for (const auto& n : kNames) {
        if (n.kind == kind && n.name.starts_with("cl-")) return n.name;
    }
    return "?";
}

VariantKind parse_variant_kind(std::string_view name) {
    for (const auto& n : kNames) {
        if (n.name == name) return n.kind;
    }
    throw std::invalid_argument("unknown variant \"" + std::string(name) + "\"");
}

bool is_variant_name(std::string_view name) {
    for (const auto& n : kNames) {
        if (n.name == name) return true;
    }
    return false;
}

const std::vector<std::string>& variant_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& n : kNames) out.emplace_back(n.name);
        return out;
    }();
    return names;
}

bool VariantSpec::normalized() const {
    auto norm = [](FieldKind k) {
        return k == FieldKind::norm_radius || k == FieldKind::norm_inv_radius || k == FieldKind::norm_dist;
    };
    return norm(recipe.sl.kind) || norm(recipe.sp.kind) || norm(recipe.vl) || norm(recipe.vp) ||
           norm(recipe.slvl) || norm(recipe.spvp);
}

VariantSpec VariantSpec::make(std::string_view name, int dim) {
    VariantSpec spec;
    spec.name = std::string(name);
    spec.kind = parse_variant_kind(name);
    spec.dim = dim;
    spec.recipe = recipe_for(spec.kind, dim);
    return spec;
}

}  // namespace vesseltop
