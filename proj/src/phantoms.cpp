#include "vesseltop/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "vesseltop/format.hpp"
#include "vesseltop/metrics.hpp"
#include "vesseltop/morphology.hpp"

namespace vesseltop {

namespace {

using Vec3 = std::array<double, 3>;

GridShape spec_shape(const PhantomSpec& spec) {
    try {
        return GridShape(spec.dims);
    } catch (const GridError& e) {
        throw PhantomError(e.what());
    }
}

Vec3 grid_center(const GridShape& s) {
    return {std::floor((s.width() - 1) / 2.0), std::floor((s.height() - 1) / 2.0),
            std::floor((s.depth() - 1) / 2.0)};
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 ab{}, ap{};
    double len2 = 0.0, t = 0.0;
    for (int k = 0; k < 3; ++k) {
        ab[k] = b[k] - a[k];
        ap[k] = p[k] - a[k];
        len2 += ab[k] * ab[k];
        t += ab[k] * ap[k];
    }
    t = len2 > 0.0 ? std::clamp(t / len2, 0.0, 1.0) : 0.0;
    double d2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double d = ap[k] - t * ab[k];
        d2 += d * d;
    }
    return std::sqrt(d2);
}

double length_at(const PhantomSpec& spec, std::size_t i) {
    if (spec.lengths.empty()) throw PhantomError("phantom needs at least one length");
    const double l = i < spec.lengths.size() ? spec.lengths[i] : spec.lengths.back();
    if (!(l >= 0.0)) throw PhantomError("phantom lengths must be >= 0");
    return l;
}

void require_radii(const PhantomSpec& spec, std::size_t min_count) {
    if (spec.radii.size() < min_count) {
        throw PhantomError("phantom kind needs at least " + std::to_string(min_count) + " radii");
    }
    for (double r : spec.radii) {
        if (!(r > 0.0)) throw PhantomError("phantom radii must be positive");
    }
}

// Deterministic uniform draws in [-1, 1] from a fixed-width engine, so
// jittered phantoms do not depend on the standard library's distributions.
class Jitter {
public:
    Jitter(std::uint64_t seed, double amplitude) : rng_(seed), amplitude_(amplitude) {}
    double next() {
        if (amplitude_ == 0.0) return 0.0;
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        return amplitude_ * (2.0 * u - 1.0);
    }
    void perturb(Vec3& p, int rank) {
        for (int k = 0; k < rank; ++k) p[static_cast<std::size_t>(k)] += next();
    }

private:
    std::mt19937_64 rng_;
    double amplitude_;
};

BinaryField rasterize(const GridShape& shape, const std::vector<Capsule>& caps) {
    std::vector<std::uint8_t> out(shape.size(), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto c = shape.coords(i);
        const Vec3 p{static_cast<double>(c[0]), static_cast<double>(c[1]), static_cast<double>(c[2])};
        for (const auto& cap : caps) {
            if (point_segment_distance(p, cap.a, cap.b) < cap.radius) {
                out[i] = 1;
                break;
            }
        }
    }
    return {shape, std::move(out)};
}

BinaryField rasterize_ring(const PhantomSpec& spec, const GridShape& shape) {
    require_radii(spec, 2);
    const double inner = spec.radii[0], outer = spec.radii[1];
    if (!(outer > inner)) throw PhantomError("ring needs outer radius > inner radius");
    Vec3 c = grid_center(shape);
    Jitter jitter(spec.seed, spec.jitter);
    jitter.perturb(c, shape.rank());
    std::vector<std::uint8_t> out(shape.size(), 0);
    const double mid = 0.5 * (inner + outer), half = 0.5 * (outer - inner);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto g = shape.coords(i);
        const double dx = g[0] - c[0], dy = g[1] - c[1], dz = g[2] - c[2];
        const double planar = std::hypot(dx, dy);
        if (shape.rank() == 2) {
            out[i] = planar >= inner && planar < outer;
        } else {
            out[i] = std::hypot(planar - mid, dz) < half;
        }
    }
    return {shape, std::move(out)};
}

void check_margin(const PhantomSpec& spec, const BinaryField& mask) {
    const GridShape& s = mask.shape();
    const int m = spec.margin;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const auto c = s.coords(i);
        for (int k = 0; k < s.rank(); ++k) {
            const int v = c[static_cast<std::size_t>(k)];
            if (v < m || v > s.dim(k) - 1 - m) {
                throw PhantomError("phantom exceeds grid " + s.describe() + " (needs a " + std::to_string(m) +
                                   "-voxel background margin)");
            }
        }
    }
}

}  // namespace

PhantomKind parse_phantom_kind(const std::string& name) {
    if (name == "tube") return PhantomKind::tube;
    if (name == "ybranch") return PhantomKind::ybranch;
    if (name == "ring") return PhantomKind::ring;
    if (name == "multi_tube") return PhantomKind::multi_tube;
    throw PhantomError("unknown phantom kind \"" + name + "\"");
}

std::vector<Capsule> phantom_capsules(const PhantomSpec& spec) {
    const GridShape shape = spec_shape(spec);
    const int rank = shape.rank();
    const Vec3 center = grid_center(shape);
    Jitter jitter(spec.seed, spec.jitter);
    std::vector<Capsule> caps;

    switch (spec.kind) {
        case PhantomKind::tube: {
            require_radii(spec, 1);
            Vec3 u{};
            double norm = 0.0;
            for (int k = 0; k < rank && k < static_cast<int>(spec.orientation.size()); ++k) {
                u[static_cast<std::size_t>(k)] = spec.orientation[static_cast<std::size_t>(k)];
                norm += u[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(k)];
            }
            if (!(norm > 0.0)) throw PhantomError("tube orientation must be a nonzero vector");
            norm = std::sqrt(norm);
            const double half = 0.5 * length_at(spec, 0);
            Capsule c;
            for (std::size_t k = 0; k < 3; ++k) {
                c.a[k] = center[k] - half * u[k] / norm;
                c.b[k] = center[k] + half * u[k] / norm;
            }
            c.radius = spec.radii[0];
            caps.push_back(c);
            break;
        }
        case PhantomKind::ybranch: {
            require_radii(spec, 2);
            const bool explicit_trunk = spec.radii.size() >= 3;
            const double r1 = explicit_trunk ? spec.radii[1] : spec.radii[0];
            const double r2 = explicit_trunk ? spec.radii[2] : spec.radii[1];
            const double trunk = explicit_trunk ? spec.radii[0] : std::max(r1, r2);
            const double s = std::sin(std::numbers::pi / 3.0);
            const std::array<Vec3, 3> dirs = {Vec3{-1.0, 0.0, 0.0}, Vec3{0.5, -s, 0.0}, Vec3{0.5, s, 0.0}};
            const std::array<double, 3> radii = {trunk, r1, r2};
            for (std::size_t k = 0; k < 3; ++k) {
                Capsule c;
                c.a = center;
                const double len = length_at(spec, k);
                for (std::size_t j = 0; j < 3; ++j) c.b[j] = center[j] + len * dirs[k][j];
                c.radius = radii[k];
                caps.push_back(c);
            }
            break;
        }
        case PhantomKind::multi_tube: {
            require_radii(spec, 1);
            const double gap = 3.0;
            double extent = 0.0;
            for (std::size_t k = 0; k < spec.radii.size(); ++k) {
                extent += 2.0 * spec.radii[k] + (k ? gap : 0.0);
            }
            double y = std::round(center[1] - 0.5 * extent);
            for (std::size_t k = 0; k < spec.radii.size(); ++k) {
                const double r = spec.radii[k];
                const double cy = std::round(y + r);
                const double half = 0.5 * length_at(spec, k);
                Capsule c;
                c.a = {center[0] - half, cy, center[2]};
                c.b = {center[0] + half, cy, center[2]};
                c.radius = r;
                caps.push_back(c);
                y = cy + r + gap;
            }
            break;
        }
        case PhantomKind::ring:
            return {};
    }
    for (auto& c : caps) {
        jitter.perturb(c.a, rank);
        jitter.perturb(c.b, rank);
    }
    return caps;
}

BinaryField generate(const PhantomSpec& spec) {
    const GridShape shape = spec_shape(spec);
    BinaryField mask = spec.kind == PhantomKind::ring ? rasterize_ring(spec, shape)
                                                      : rasterize(shape, phantom_capsules(spec));
    check_margin(spec, mask);
    return mask;
}

BinaryField branch_mask(const PhantomSpec& spec, int branch_id) {
    const auto caps = phantom_capsules(spec);
    if (branch_id < 0 || branch_id >= static_cast<int>(caps.size())) {
        throw PhantomError("unknown branch id " + std::to_string(branch_id));
    }
    return rasterize(spec_shape(spec), {caps[static_cast<std::size_t>(branch_id)]});
}

BinaryField delete_branch(const PhantomSpec& spec, const BinaryField& mask, int branch_id) {
    auto caps = phantom_capsules(spec);
    if (branch_id < 0 || branch_id >= static_cast<int>(caps.size())) {
        throw PhantomError("unknown branch id " + std::to_string(branch_id));
    }
    const GridShape shape = spec_shape(spec);
    require_same_shape(shape, mask.shape(), "delete_branch");
    const BinaryField branch = rasterize(shape, {caps[static_cast<std::size_t>(branch_id)]});
    caps.erase(caps.begin() + branch_id);
    const BinaryField others = rasterize(shape, caps);
    std::vector<std::uint8_t> out(mask.values().begin(), mask.values().end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (branch[i] && !others[i]) out[i] = 0;
    }
    return {shape, std::move(out)};
}

BinaryField translate(const BinaryField& mask, const std::vector<int>& offset) {
    const GridShape& s = mask.shape();
    if (static_cast<int>(offset.size()) != s.rank()) {
        throw PhantomError("translation offset needs " + std::to_string(s.rank()) + " components");
    }
    const int ox = offset[0], oy = offset[1], oz = s.rank() == 3 ? offset[2] : 0;
    std::vector<std::uint8_t> out(mask.size(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const auto c = s.coords(i);
        if (!s.contains(c[0] + ox, c[1] + oy, c[2] + oz)) {
            throw PhantomError("translation moves foreground outside the grid");
        }
        out[s.index(c[0] + ox, c[1] + oy, c[2] + oz)] = 1;
    }
    return {s, std::move(out)};
}

BinaryField scale(const BinaryField& mask, double factor) {
    if (!(factor > 0.0)) throw PhantomError("scale factor must be positive");
    const GridShape& s = mask.shape();
    const Vec3 c = grid_center(s);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const auto g = s.coords(i);
        std::array<int, 3> dst{};
        for (std::size_t k = 0; k < 3; ++k) {
            dst[k] = static_cast<int>(std::floor(c[k] + (g[k] - c[k]) * factor + 0.5));
        }
        if (!s.contains(dst[0], dst[1], dst[2])) throw PhantomError("scaling moves foreground outside the grid");
    }
    std::vector<std::uint8_t> out(mask.size(), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto g = s.coords(i);
        std::array<int, 3> src{};
        for (std::size_t k = 0; k < 3; ++k) {
            src[k] = static_cast<int>(std::floor(c[k] + (g[k] - c[k]) / factor + 0.5));
        }
        if (s.rank() == 2) src[2] = 0;
        if (s.contains(src[0], src[1], src[2])) out[i] = mask.at(src[0], src[1], src[2]);
    }
    return {s, std::move(out)};
}

Experiment parse_experiment(const std::string& name) {
    if (name == "translation") return Experiment::translation;
    if (name == "scaling") return Experiment::scaling;
    if (name == "imbalance") return Experiment::imbalance;
    throw PhantomError("unknown experiment \"" + name + "\"");
}

PhantomSpec translation_phantom() {
    PhantomSpec s;
    s.kind = PhantomKind::tube;
    s.dims = {64, 40};
    s.radii = {4.0};
    s.lengths = {40.0};
    return s;
}

PhantomSpec scaling_phantom() {
    PhantomSpec s;
    s.kind = PhantomKind::tube;
    s.dims = {96, 48};
    s.radii = {4.0};
    s.lengths = {40.0};
    return s;
}

PhantomSpec imbalance_phantom() {
    PhantomSpec s;
    // Volumetric on purpose: the squared 3D weights are what couple branch
    // importance to radius. In 2D the per-point weight I_N * D_N is ~1.
    s.kind = PhantomKind::ybranch;
    s.dims = {64, 64, 16};
    s.orientation = {1.0, 0.0, 0.0};
    s.radii = {1.0, 4.0};
    s.lengths = {20.0};
    return s;
}

std::vector<int> translation_offsets() { return {0, 1, 2, 3}; }

std::vector<double> scaling_factors() { return {0.5, 0.75, 1.0, 1.25, 1.5}; }

namespace {

struct Scores {
    std::vector<std::pair<std::string, double>> values;  // Dice, variants, pairings
};

Scores score_pair(const BinaryField& pred, const BinaryField& ref, const std::vector<std::string>& variants) {
    Scores out;
    const double d = dice(pred, ref);
    out.values.emplace_back("Dice", d);
    const auto [pb, lb] = build_joint_bundles(pred, ref);
    std::vector<std::pair<std::string, double>> cl;
    for (const auto& name : variants) {
        const double v = name == "clDice" ? cl_dice(pb, lb)
                                          : cl_x_dice(VariantSpec::make(name, pred.shape().rank()), pb, lb);
        cl.emplace_back(name, v);
    }
    for (const auto& kv : cl) out.values.push_back(kv);
    for (const auto& [name, v] : cl) out.values.emplace_back("Dice+" + name, 0.5 * d + 0.5 * v);
    return out;
}

void append(std::vector<SweepRow>& rows, const std::string& param, const Scores& s) {
    for (const auto& [metric, v] : s.values) rows.push_back({param, metric, v});
}

}  // namespace

std::vector<SweepRow> sweep(Experiment experiment, const std::vector<std::string>& variants) {
    for (const auto& v : variants) {
        if (!is_variant_name(v)) throw PhantomError("unknown variant \"" + v + "\"");
    }
    std::vector<SweepRow> rows;
    switch (experiment) {
        case Experiment::translation: {
            const BinaryField ref = generate(translation_phantom());
            for (int t : translation_offsets()) {
                const BinaryField pred = translate(ref, {0, t});
                append(rows, std::to_string(t), score_pair(pred, ref, variants));
            }
            break;
        }
        case Experiment::scaling: {
            const BinaryField ref = generate(scaling_phantom());
            for (double f : scaling_factors()) {
                append(rows, format_number(f), score_pair(scale(ref, f), ref, variants));
            }
            break;
        }
        case Experiment::imbalance: {
            const PhantomSpec spec = imbalance_phantom();
            const BinaryField ref = generate(spec);
            // Branch 1 is the thin one (radius 1), branch 2 the thick one.
            const Scores full = score_pair(ref, ref, variants);
            const Scores thin = score_pair(delete_branch(spec, ref, 1), ref, variants);
            const Scores thick = score_pair(delete_branch(spec, ref, 2), ref, variants);
            append(rows, "full", full);
            append(rows, "delete_thin", thin);
            append(rows, "delete_thick", thick);
            for (std::size_t k = 0; k < full.values.size(); ++k) {
                const double drop_thin = full.values[k].second - thin.values[k].second;
                const double drop_thick = full.values[k].second - thick.values[k].second;
                rows.push_back({"gap", full.values[k].first, std::abs(drop_thin - drop_thick)});
            }
            break;
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "param,metric,value\n";
    for (const auto& r : rows) out << r.param << ',' << r.metric << ',' << format_number(r.value) << '\n';
}

}  // namespace vesseltop
