#include "vesseltop/softloss.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "vesseltop/metrics.hpp"

namespace vesseltop {

ProbField::ProbField(GridShape shape, std::vector<double> values) : Field(std::move(shape), std::move(values)) {
    for (double& v : values_) {
        if (std::isnan(v)) throw GridError("probability field contains NaN");
        v = std::clamp(v, 0.0, 1.0);
    }
}

ProbField ProbField::constant(const GridShape& shape, double value) {
    return {shape, std::vector<double>(shape.size(), value)};
}

ProbField ProbField::from_mask(const BinaryField& mask) {
    std::vector<double> v(mask.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = mask[i];
    return {mask.shape(), std::move(v)};
}

BinaryField ProbField::threshold() const {
    std::vector<std::uint8_t> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] >= 0.5;
    return {shape_, std::move(out)};
}

namespace {

using Vec = std::vector<double>;
using Arg = std::vector<std::size_t>;

/// Face-adjacent neighbour lists, self first.
class PlusStencil {
public:
    explicit PlusStencil(const GridShape& s) : offsets_(s.size() + 1, 0) {
        const int axes = s.rank();
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto c = s.coords(i);
            nbrs_.push_back(i);
            for (int a = 0; a < axes; ++a) {
                for (int step : {-1, 1}) {
                    auto n = c;
                    n[static_cast<std::size_t>(a)] += step;
                    if (s.contains(n[0], n[1], n[2])) nbrs_.push_back(s.index(n[0], n[1], n[2]));
                }
            }
            offsets_[i + 1] = nbrs_.size();
        }
    }

    /// min (erode) or max (dilate) over the stencil; records the winner.
    void apply(const Vec& in, Vec& out, Arg& arg, bool take_max) const {
        const std::size_t n = offsets_.size() - 1;
        out.assign(n, 0.0);
        arg.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = nbrs_[offsets_[i]];
            for (std::size_t k = offsets_[i] + 1; k < offsets_[i + 1]; ++k) {
                const std::size_t j = nbrs_[k];
                if (take_max ? in[j] > in[best] : in[j] < in[best]) best = j;
            }
            out[i] = in[best];
            arg[i] = best;
        }
    }

private:
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> nbrs_;
};

/// Scatter g through a recorded min/max selection.
void scatter(const Vec& g, const Arg& arg, Vec& into) {
    for (std::size_t i = 0; i < g.size(); ++i) into[arg[i]] += g[i];
}

/// Forward pass of the soft skeleton with everything needed to run it
/// backwards.
struct SkeletonTape {
    struct Step {
        Arg erode_img;  // img_j = erode(img_{j-1}); unused for step 0
        Vec img;
        Arg erode_open, dilate_open;
        Vec opened;
        Vec delta;
        Vec skel_before;  // unused for step 0
    };
    std::vector<Step> steps;
    Vec skel;
};

SkeletonTape run_skeleton(const ProbField& p, int iters) {
    if (iters < 0) throw std::invalid_argument("soft skeleton iterations must be nonnegative");
    const PlusStencil stencil(p.shape());
    SkeletonTape tape;
    const std::size_t n = p.size();
    Vec img(p.values().begin(), p.values().end());
    Vec eroded;
    for (int j = 0; j <= iters; ++j) {
        SkeletonTape::Step st;
        if (j > 0) {
            stencil.apply(img, eroded, st.erode_img, false);
            img = eroded;
        }
        st.img = img;
        stencil.apply(img, eroded, st.erode_open, false);
        stencil.apply(eroded, st.opened, st.dilate_open, true);
        st.delta.resize(n);
        for (std::size_t i = 0; i < n; ++i) st.delta[i] = std::max(0.0, img[i] - st.opened[i]);
        if (j == 0) {
            tape.skel = st.delta;
        } else {
            st.skel_before = tape.skel;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = st.delta[i];
                tape.skel[i] += std::max(0.0, d - tape.skel[i] * d);
            }
        }
        tape.steps.push_back(std::move(st));
    }
    return tape;
}

/// Pulls a gradient with respect to the skeleton back onto p.
Vec backprop_skeleton(const SkeletonTape& tape, Vec g_skel) {
    const std::size_t n = g_skel.size();
    Vec g_img_next(n, 0.0);  // gradient reaching img_j from later steps
    for (std::size_t jj = tape.steps.size(); jj-- > 0;) {
        const auto& st = tape.steps[jj];
        Vec g_delta(n, 0.0);
        if (jj > 0) {
            for (std::size_t i = 0; i < n; ++i) {
                const double d = st.delta[i], s = st.skel_before[i];
                if (d - s * d > 0.0) {
                    g_delta[i] = g_skel[i] * (1.0 - s);
                    g_skel[i] *= 1.0 - d;
                }
            }
        } else {
            g_delta = g_skel;
        }
        Vec g_img = g_img_next;
        Vec g_opened(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (st.img[i] - st.opened[i] > 0.0) {
                g_img[i] += g_delta[i];
                g_opened[i] = -g_delta[i];
            }
        }
        Vec g_eroded(n, 0.0);
        scatter(g_opened, st.dilate_open, g_eroded);
        scatter(g_eroded, st.erode_open, g_img);
        if (jj > 0) {
            g_img_next.assign(n, 0.0);
            scatter(g_img, st.erode_img, g_img_next);
        } else {
            g_img_next = std::move(g_img);
        }
    }
    return g_img_next;
}

}  // namespace

ProbField soft_skeleton(const ProbField& p, int iters) {
    return {p.shape(), run_skeleton(p, iters).skel};
}

// Dice and CE -------------------------------------------------------------

LossValue soft_dice_loss_grad(const ProbField& p, const BinaryField& ref) {
    require_same_shape(p.shape(), ref.shape(), "soft_dice_loss");
    double inter = 0.0, sp = 0.0, sg = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        inter += p[i] * ref[i];
        sp += p[i];
        sg += ref[i];
    }
    LossValue out;
    out.grad.assign(p.size(), 0.0);
    const double den = sp + sg;
    if (den == 0.0) return out;
    out.value = 1.0 - 2.0 * inter / den;
    for (std::size_t i = 0; i < p.size(); ++i) {
        out.grad[i] = -2.0 * (ref[i] * den - inter) / (den * den);
    }
    return out;
}

double soft_dice_loss(const ProbField& p, const BinaryField& ref) { return soft_dice_loss_grad(p, ref).value; }

LossValue cross_entropy_grad(const ProbField& p, const BinaryField& ref) {
    require_same_shape(p.shape(), ref.shape(), "cross_entropy");
    constexpr double lo = 1e-7, hi = 1.0 - 1e-7;
    const double n = static_cast<double>(p.size());
    LossValue out;
    out.grad.assign(p.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = std::clamp(p[i], lo, hi);
        const bool inside = p[i] > lo && p[i] < hi;
        if (ref[i]) {
            sum -= std::log(q);
            if (inside) out.grad[i] = -1.0 / (q * n);
        } else {
            sum -= std::log1p(-q);
            if (inside) out.grad[i] = 1.0 / ((1.0 - q) * n);
        }
    }
    out.value = sum / n;
    return out;
}

double cross_entropy(const ProbField& p, const BinaryField& ref) { return cross_entropy_grad(p, ref).value; }

// Soft cl-X-Dice ----------------------------------------------------------

namespace {

/// A prediction field is `coef * s` (skeleton-type) or `coef * p`
/// (mask-type), with coef built from the constant distance map.
struct PredTerm {
    double coef = 0.0;
    bool on_skeleton = true;
};

PredTerm pred_term(FieldKind kind, double dp, double r_max) {
    switch (kind) {
        case FieldKind::skeleton: return {1.0, true};
        case FieldKind::radius: return {dp, true};
        case FieldKind::inv_radius: return {dp > 0.0 ? 1.0 / dp : 0.0, true};
        case FieldKind::norm_radius: return {dp / r_max, true};
        case FieldKind::norm_inv_radius: return {dp > 0.0 ? r_max / dp : 0.0, true};
        case FieldKind::mask: return {1.0, false};
        case FieldKind::dist: return {dp, false};
        case FieldKind::norm_dist: return {dp / r_max, false};
    }
    return {};
}

double ref_value(const SkeletonBundle& b, FieldKind kind, std::size_t i) {
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

double power(double v, int exponent) { return exponent == 2 ? v * v : v; }

/// Value and derivative of `coef * x` raised to the weight exponent.
std::pair<double, double> weighted(double coef, double x, int exponent) {
    if (exponent == 2) return {coef * coef * x * x, 2.0 * coef * coef * x};
    return {coef * x, coef};
}

/// Running sum together with its partials w.r.t. s_i and p_i.
struct Accum {
    double value = 0.0;
    Vec ds, dp;

    explicit Accum(std::size_t n) : ds(n, 0.0), dp(n, 0.0) {}
};

/// Gradient of safe_ratio(num, den) given the accumulators.
void ratio_grad(const Accum& num, const Accum& den, double scale, Vec& gs, Vec& gp) {
    if (den.value == 0.0 || scale == 0.0) return;
    const double inv = 1.0 / den.value;
    const double q = num.value * inv * inv;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        gs[i] += scale * (num.ds[i] * inv - den.ds[i] * q);
        gp[i] += scale * (num.dp[i] * inv - den.dp[i] * q);
    }
}

LossValue cl_x_impl(const VariantSpec& spec, const ProbField& p, const BinaryField& ref,
                    const SkeletonBundle& ref_bundle, int iters, bool want_grad) {
    require_same_shape(p.shape(), ref.shape(), "soft_cl_x_loss");
    require_same_shape(ref_bundle.shape(), ref.shape(), "soft_cl_x_loss");
    const std::size_t n = p.size();

    const SkeletonBundle hard = build_bundle(p.threshold());
    const double r_max = std::max(ref_bundle.r_max, hard.own_r_max);
    const SkeletonBundle refb = r_max == ref_bundle.r_max ? ref_bundle : rescale_bundle(ref_bundle, r_max);
    const SkeletonBundle predb = rescale_bundle(hard, r_max);

    const SkeletonTape tape = run_skeleton(p, iters);
    const Vec& s = tape.skel;
    const Recipe& rc = spec.recipe;

    Accum pn(n), pd(n), sn(n), sd(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dpv = predb.dist[i];
        const double xs = s[i], xp = p[i];
        auto var = [&](const PredTerm& t) { return t.on_skeleton ? xs : xp; };

        // Precision terms, weighted by the prediction skeleton.
        const PredTerm wsp = pred_term(rc.sp.kind, dpv, r_max);
        const auto [w, dw] = weighted(wsp.coef, var(wsp), rc.sp.exponent);
        if (w != 0.0 || dw != 0.0) {
            const double vl = ref_value(refb, rc.vl, i);
            const double slvl = ref_value(refb, rc.slvl, i);
            const PredTerm spvp = pred_term(rc.spvp, dpv, r_max);
            const double f = spvp.coef * var(spvp);
            const double keep = 1.0 - refb.skeleton[i];
            auto& gw = wsp.on_skeleton ? pn.ds : pn.dp;
            pn.value += w * vl;
            gw[i] += dw * vl;
            pd.value += w * f * keep + w * slvl;
            (wsp.on_skeleton ? pd.ds : pd.dp)[i] += dw * (f * keep + slvl);
            (spvp.on_skeleton ? pd.ds : pd.dp)[i] += w * spvp.coef * keep;
        }

        // Sensitivity terms, weighted by the reference skeleton.
        const double wl = power(ref_value(refb, rc.sl.kind, i), rc.sl.exponent);
        if (wl != 0.0) {
            const PredTerm vp = pred_term(rc.vp, dpv, r_max);
            const PredTerm spvp = pred_term(rc.spvp, dpv, r_max);
            const double slvl = ref_value(refb, rc.slvl, i);
            sn.value += wl * vp.coef * var(vp);
            (vp.on_skeleton ? sn.ds : sn.dp)[i] += wl * vp.coef;
            sd.value += wl * slvl * (1.0 - xs) + wl * spvp.coef * var(spvp);
            sd.ds[i] -= wl * slvl;
            (spvp.on_skeleton ? sd.ds : sd.dp)[i] += wl * spvp.coef;
        }
    }

    const double tprec = safe_ratio(pn.value, pd.value);
    const double tsens = safe_ratio(sn.value, sd.value);
    const double x = harmonic_mean(tprec, tsens);
    LossValue out;
    out.value = 1.0 - x;
    if (!want_grad) return out;

    out.grad.assign(n, 0.0);
    const double sum = tprec + tsens;
    if (sum == 0.0) return out;
    // d(loss)/d(tprec) and d(loss)/d(tsens) for loss = 1 - 2ab/(a+b).
    const double g_prec = -2.0 * tsens * tsens / (sum * sum);
    const double g_sens = -2.0 * tprec * tprec / (sum * sum);
    Vec gs(n, 0.0);
    ratio_grad(pn, pd, g_prec, gs, out.grad);
    ratio_grad(sn, sd, g_sens, gs, out.grad);
    const Vec gp_skel = backprop_skeleton(tape, std::move(gs));
    for (std::size_t i = 0; i < n; ++i) out.grad[i] += gp_skel[i];
    return out;
}

}  // namespace

double soft_cl_x_loss(const VariantSpec& spec, const ProbField& p, const BinaryField& ref,
                      const SkeletonBundle& ref_bundle, int iters) {
    return cl_x_impl(spec, p, ref, ref_bundle, iters, false).value;
}

LossValue soft_cl_x_loss_grad(const VariantSpec& spec, const ProbField& p, const BinaryField& ref,
                              const SkeletonBundle& ref_bundle, int iters) {
    return cl_x_impl(spec, p, ref, ref_bundle, iters, true);
}

// Combined loss -----------------------------------------------------------

int default_soft_skel_iters(const SkeletonBundle& ref_bundle) {
    return std::max(1, static_cast<int>(std::ceil(ref_bundle.own_r_max)));
}

namespace {

LossValue combined_impl(const CombinedLossSpec& spec, const ProbField& p, const BinaryField& ref, bool want_grad) {
    require_same_shape(p.shape(), ref.shape(), "combined_loss");
    if (!(spec.alpha >= 0.0) || !(spec.beta >= 0.0)) {
        throw std::invalid_argument("alpha and beta must be nonnegative");
    }
    const bool has_x = spec.variant != "none";
    if (!has_x && spec.beta != 0.0) throw std::invalid_argument("variant \"none\" requires beta == 0");
    if (spec.soft_skel_iters && *spec.soft_skel_iters < 1) {
        throw std::invalid_argument("soft_skel_iters must be positive");
    }

    const double total = spec.alpha + spec.beta;
    const double w_dice = total > 0.0 ? spec.alpha / (2.0 * total) : 0.0;
    const double w_x = total > 0.0 ? spec.beta / (2.0 * total) : 0.0;

    LossValue out = cross_entropy_grad(p, ref);
    out.value *= 0.5;
    for (double& g : out.grad) g *= 0.5;

    auto add = [&](const LossValue& term, double w) {
        out.value += w * term.value;
        if (!want_grad) return;
        for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += w * term.grad[i];
    };
    if (w_dice > 0.0) add(soft_dice_loss_grad(p, ref), w_dice);
    if (has_x && w_x > 0.0) {
        const VariantSpec vs = VariantSpec::make(spec.variant, p.shape().rank());
        const SkeletonBundle refb = build_bundle(ref);
        const int iters = spec.soft_skel_iters.value_or(default_soft_skel_iters(refb));
        add(cl_x_impl(vs, p, ref, refb, iters, want_grad), w_x);
    }
    if (!want_grad) out.grad.clear();
    return out;
}

}  // namespace

double combined_loss(const CombinedLossSpec& spec, const ProbField& p, const BinaryField& ref) {
    return combined_impl(spec, p, ref, false).value;
}

LossValue combined_loss_grad(const CombinedLossSpec& spec, const ProbField& p, const BinaryField& ref) {
    return combined_impl(spec, p, ref, true);
}

// Gradient check ----------------------------------------------------------

GradCheckResult grad_check(const LossFunction& loss, const ProbField& p, double eps,
                           const std::vector<std::size_t>& sites) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const LossValue base = loss(p);
    if (base.grad.size() != p.size()) throw std::logic_error("loss returned no gradient");

    std::vector<std::size_t> probe = sites;
    if (probe.empty()) {
        probe.resize(p.size());
        for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = i;
    }
    GradCheckResult result;
    result.sites = probe.size();
    std::vector<double> v(p.values().begin(), p.values().end());
    for (std::size_t i : probe) {
        if (i >= v.size()) throw std::out_of_range("grad_check site outside the field");
        const double keep = v[i];
        v[i] = keep + eps;
        const double up = loss(ProbField(p.shape(), v)).value;
        v[i] = keep - eps;
        const double down = loss(ProbField(p.shape(), v)).value;
        v[i] = keep;
        const double cd = (up - down) / (2.0 * eps);
        const double a = base.grad[i];
        const double err = std::abs(a - cd) / std::max({std::abs(a), std::abs(cd), 1e-8});
        if (err > result.max_rel_error) {
            result.max_rel_error = err;
            result.worst_index = i;
        }
    }
    return result;
}

namespace {

/// Portable uniform integer in [0, bound) (std distributions are not
/// specified bit-for-bit across standard libraries).
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace

ProbField random_probe_field(const GridShape& shape, std::uint64_t seed) {
    const std::size_t n = shape.size();
    // Levels on a regular ladder, skipping the rung nearest 0.5.
    std::vector<double> levels;
    const std::size_t rungs = n + 1;
    for (std::size_t k = 0; levels.size() < n; ++k) {
        const double v = 0.02 + 0.96 * static_cast<double>(k) / static_cast<double>(rungs);
        if (std::abs(v - 0.5) < 0.48 / static_cast<double>(rungs)) continue;
        levels.push_back(v);
    }
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(levels[i - 1], levels[draw_below(rng, i)]);
    }
    return {shape, std::move(levels)};
}

BinaryField random_mask(const GridShape& shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::uint8_t> v(shape.size());
    for (auto& x : v) x = static_cast<std::uint8_t>(rng() >> 63);
    return {shape, std::move(v)};
}

}  // namespace vesseltop
