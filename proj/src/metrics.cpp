#include "vesseltop/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "vesseltop/edt.hpp"

namespace vesseltop {

double safe_ratio(double num, double den) {
    if (den == 0.0) return num == 0.0 ? 1.0 : 0.0;
    return num / den;
}

double harmonic_mean(double a, double b) {
    const double s = a + b;
    return s == 0.0 ? 0.0 : 2.0 * a * b / s;
}

double dice(const BinaryField& pred, const BinaryField& ref) {
    require_same_shape(pred.shape(), ref.shape(), "dice");
    std::size_t overlap = 0, np = 0, nl = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        np += pred[i];
        nl += ref[i];
        overlap += pred[i] & ref[i];
    }
    if (np + nl == 0) return 1.0;
    return 2.0 * static_cast<double>(overlap) / static_cast<double>(np + nl);
}

CenterlineScore cl_dice_score(const SkeletonBundle& pred, const SkeletonBundle& ref) {
    require_same_shape(pred.shape(), ref.shape(), "cl_dice");
    std::size_t sp_in_vl = 0, sp = 0, sl_in_vp = 0, sl = 0;
    for (std::size_t i = 0; i < pred.mask.size(); ++i) {
        if (pred.skeleton[i]) {
            ++sp;
            sp_in_vl += ref.mask[i];
        }
        if (ref.skeleton[i]) {
            ++sl;
            sl_in_vp += pred.mask[i];
        }
    }
    CenterlineScore s;
    s.tprec = safe_ratio(static_cast<double>(sp_in_vl), static_cast<double>(sp));
    s.tsens = safe_ratio(static_cast<double>(sl_in_vp), static_cast<double>(sl));
    s.value = harmonic_mean(s.tprec, s.tsens);
    return s;
}

double cl_dice(const SkeletonBundle& pred, const SkeletonBundle& ref) {
    return cl_dice_score(pred, ref).value;
}

namespace {

double field_value(const SkeletonBundle& b, FieldKind kind, std::size_t i) {
    switch (kind) {
        case FieldKind::skeleton: return b.skeleton[i];
        case FieldKind::radius: return b.radius[i];
        case FieldKind::inv_radius: return b.inv_radius[i];
        case FieldKind::norm_radius: return b.radius[i] / b.r_max;
        case FieldKind::norm_inv_radius: return b.inv_radius[i] / b.i_min;
        case FieldKind::mask: return b.mask[i];
        case FieldKind::dist: return b.dist[i];
        case FieldKind::norm_dist: return b.dist[i] / b.r_max;
    }
    return 0.0;
}

double weight_value(const SkeletonBundle& b, const Weight& w, std::size_t i) {
    const double v = field_value(b, w.kind, i);
    return w.exponent == 2 ? v * v : v;
}

}  // namespace

CenterlineScore cl_x_dice_score(const VariantSpec& spec, const SkeletonBundle& pred, const SkeletonBundle& ref) {
    require_same_shape(pred.shape(), ref.shape(), "cl_x_dice");
    if (spec.normalized() && pred.r_max != ref.r_max) {
        throw MetricError(spec.name + ": normalised variant needs a shared r_max (prediction " +
                          std::to_string(pred.r_max) + ", reference " + std::to_string(ref.r_max) + ")");
    }
    const Recipe& r = spec.recipe;
    double prec_num = 0.0, prec_den = 0.0, sens_num = 0.0, sens_den = 0.0;
    for (std::size_t i = 0; i < pred.mask.size(); ++i) {
        // Skeleton weights are supported on skeletons; skip everything else.
        if (!pred.skeleton[i] && !ref.skeleton[i]) continue;
        if (pred.skeleton[i]) {
            const double sp = weight_value(pred, r.sp, i);
            prec_num += sp * field_value(ref, r.vl, i);
            prec_den += sp * field_value(pred, r.spvp, i) * (1.0 - ref.skeleton[i]);
            prec_den += sp * field_value(ref, r.slvl, i);
        }
        if (ref.skeleton[i]) {
            const double sl = weight_value(ref, r.sl, i);
            sens_num += sl * field_value(pred, r.vp, i);
            sens_den += sl * field_value(ref, r.slvl, i) * (1.0 - pred.skeleton[i]);
            sens_den += sl * field_value(pred, r.spvp, i);
        }
    }
    CenterlineScore s;
    s.tprec = safe_ratio(prec_num, prec_den);
    s.tsens = safe_ratio(sens_num, sens_den);
    s.value = harmonic_mean(s.tprec, s.tsens);
    return s;
}

double cl_x_dice(const VariantSpec& spec, const SkeletonBundle& pred, const SkeletonBundle& ref) {
    return cl_x_dice_score(spec, pred, ref).value;
}

BinaryField boundary(const BinaryField& mask) {
    const GridShape& s = mask.shape();
    std::vector<std::uint8_t> out(mask.size(), 0);
    const int zr = s.rank() == 3 ? 1 : 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        const auto c = s.coords(i);
        bool edge = false;
        for (int axis = 0; axis < 2 + zr && !edge; ++axis) {
            for (int step : {-1, 1}) {
                auto n = c;
                n[static_cast<std::size_t>(axis)] += step;
                if (!s.contains(n[0], n[1], n[2]) || !mask.at(n[0], n[1], n[2])) {
                    edge = true;
                    break;
                }
            }
        }
        out[i] = edge;
    }
    return {s, std::move(out)};
}

double nsd(const BinaryField& pred, const BinaryField& ref, double tolerance) {
    require_same_shape(pred.shape(), ref.shape(), "nsd");
    if (!(tolerance > 0.0)) throw MetricError("NSD tolerance must be positive");
    const BinaryField bp = boundary(pred);
    const BinaryField bl = boundary(ref);
    const std::size_t np = bp.count(), nl = bl.count();
    if (np + nl == 0) return 1.0;
    if (np == 0 || nl == 0) return 0.0;

    const auto to_l = squared_distance_to_seeds(ref.shape(), bl.values(), true);
    const auto to_p = squared_distance_to_seeds(pred.shape(), bp.values(), true);
    // Squared physical distances carry rounding from the spacing products.
    const double tol2 = tolerance * tolerance * (1.0 + 1e-12);
    std::size_t close = 0;
    for (std::size_t i = 0; i < bp.size(); ++i) {
        if (bp[i] && to_l[i] <= tol2) ++close;
        if (bl[i] && to_p[i] <= tol2) ++close;
    }
    return static_cast<double>(close) / static_cast<double>(np + nl);
}

namespace {

MetricSummary summarize(const std::vector<ClassMetrics>& classes, const std::vector<int>& ids,
                        const std::vector<std::string>& variants) {
    MetricSummary s;
    s.class_ids = ids;
    for (const auto& v : variants) s.centerline.emplace_back(v, 0.0);
    if (ids.empty()) return s;
    for (int id : ids) {
        const auto& c = classes[static_cast<std::size_t>(id - 1)];
        s.dice += c.dice;
        s.betti_err += c.betti_err;
        s.nsd += c.nsd;
        for (std::size_t k = 0; k < variants.size(); ++k) s.centerline[k].second += c.centerline[k].second;
    }
    const double n = static_cast<double>(ids.size());
    s.dice /= n;
    s.betti_err /= n;
    s.nsd /= n;
    for (auto& kv : s.centerline) kv.second /= n;
    return s;
}

}  // namespace

MetricReport evaluate(const LabelGrid& pred, const LabelGrid& ref, const EvaluateOptions& options) {
    require_same_shape(pred.shape(), ref.shape(), "evaluate");
    if (pred.class_count() != ref.class_count()) {
        throw MetricError("class vocabulary mismatch: prediction has " + std::to_string(pred.class_count()) +
                          " classes, reference " + std::to_string(ref.class_count()));
    }
    const int dim = pred.shape().rank();
    std::vector<VariantSpec> specs;
    for (const auto& name : options.variants) {
        try {
            specs.push_back(VariantSpec::make(name, dim));
        } catch (const std::invalid_argument& e) {
            throw MetricError(e.what());
        }
    }
    for (const auto& [name, ids] : options.groups) {
        for (int id : ids) {
            if (id < 1 || id >= pred.class_count()) {
                throw MetricError("group " + name + " names unknown class " + std::to_string(id));
            }
        }
    }

    MetricReport report;
    report.shape = pred.shape();
    report.tolerance = options.tolerance;
    report.variants = options.variants;

    std::vector<int> all_ids;
    for (int c = 1; c < pred.class_count(); ++c) {
        all_ids.push_back(c);
        const BinaryField p = binarize(pred, c);
        const BinaryField l = binarize(ref, c);
        const auto [pb, lb] = build_joint_bundles(p, l);

        ClassMetrics m;
        m.class_id = c;
        m.dice = dice(p, l);
        m.r_max = pb.r_max;
        for (const auto& spec : specs) {
            // The plain clDice name reports the direct overlap-count form.
            const double v = spec.name == "clDice" ? cl_dice(pb, lb) : cl_x_dice(spec, pb, lb);
            m.centerline.emplace_back(spec.name, v);
        }
        m.betti_err = betti_err(p, l);
        m.nsd = nsd(p, l, options.tolerance);
        report.per_class.push_back(std::move(m));
    }
    report.aggregate = summarize(report.per_class, all_ids, options.variants);
    for (const auto& [name, ids] : options.groups) {
        report.groups.emplace_back(name, summarize(report.per_class, ids, options.variants));
    }
    return report;
}

}  // namespace vesseltop
