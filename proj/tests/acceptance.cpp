// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "vesseltop/betti.hpp"
#include "vesseltop/cli.hpp"
#include "vesseltop/edt.hpp"
#include "vesseltop/format.hpp"
#include "vesseltop/metrics.hpp"
#include "vesseltop/phantoms.hpp"
#include "vesseltop/softloss.hpp"
#include "vesseltop/vgrid.hpp"

using namespace vesseltop;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// 200 random prediction/reference pairs: half 2D up to 24x24, half 3D up
/// to 12^3.
std::vector<std::pair<BinaryField, BinaryField>> corpus() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> fill(0.2, 0.8);
    std::vector<std::pair<BinaryField, BinaryField>> out;
    for (int k = 0; k < 200; ++k) {
        const int rank = k % 2 ? 3 : 2;
        const BinaryField p = oracle::random_mask(rng, rank, 2, rank == 2 ? 24 : 12, fill(rng));
        std::bernoulli_distribution on(fill(rng));
        std::vector<std::uint8_t> v(p.size());
        for (auto& x : v) x = on(rng);
        out.emplace_back(p, BinaryField(p.shape(), std::move(v)));
    }
    return out;
}

Outcome reduction_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const auto& [p, l] : corpus()) {
        const auto [pb, lb] = build_joint_bundles(p, l);
        const VariantSpec spec = VariantSpec::make("cl-D", p.shape().rank());
        worst = std::max(worst, std::abs(cl_x_dice(spec, pb, lb) - cl_dice(pb, lb)));
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-12 && t < 10.0, fmt("200 pairs, max |cl-D - clDice| = %.3g, %.2f s", worst, t)};
}

Outcome alias_identity() {
    int mismatches = 0;
    for (const auto& [p, l] : corpus()) {
        const auto [pb, lb] = build_joint_bundles(p, l);
        const int rank = p.shape().rank();
        const CenterlineScore a = cl_x_dice_score(VariantSpec::make("cbDice", rank), pb, lb);
        const CenterlineScore b = cl_x_dice_score(VariantSpec::make("cl-MIN-D", rank), pb, lb);
        if (a.value != b.value || a.tprec != b.tprec || a.tsens != b.tsens) ++mismatches;
    }
    return {mismatches == 0, fmt("200 pairs, %.0f bitwise mismatches", mismatches)};
}

double row(const std::vector<SweepRow>& rows, const std::string& param, const std::string& metric) {
    for (const auto& r : rows)
        if (r.param == param && r.metric == metric) return r.value;
    throw std::runtime_error("missing sweep row " + param + "/" + metric);
}

Outcome theorem1() {
    const auto rows = sweep(Experiment::translation);
    bool ok = true;
    double worst = 0.0, prev = INFINITY;
    std::string values;
    for (int t : translation_offsets()) {
        const std::string p = std::to_string(t);
        worst = std::max(worst, std::abs(row(rows, p, "clDice") - 1.0));
        const double m = row(rows, p, "cl-M-D");
        ok = ok && m < prev;
        prev = m;
        values += (values.empty() ? "" : ", ") + fmt("%.4g", m);
    }
    ok = ok && worst <= 1e-9;
    return {ok, fmt("max |clDice - 1| = %.3g; ", worst) + "cl-M-D over t=0..3: " + values};
}

BinaryField tube(double radius, double length) {
    PhantomSpec s;
    s.dims = {72, 40};
    s.radii = {radius};
    s.lengths = {length};
    return generate(s);
}

Outcome theorem2() {
    // Complete overlap: a radius-2 capsule's skeleton overhangs its segment
    // by one voxel, so it is two voxels shorter than the radius-4 reference.
    const BinaryField ref = tube(4, 40);
    const auto [cp, cl] = build_joint_bundles(tube(2, 38), ref);
    const bool same_skeleton = cp.skeleton == cl.skeleton;
    const double s_full = cl_x_dice(VariantSpec::make("cl-S-D", 2), cp, cl);
    const double cb_full = cl_x_dice(VariantSpec::make("cbDice", 2), cp, cl);

    // Partial overlap: the prediction centreline runs r+1 = 5 voxels past
    // each end of the reference, so its skeleton tips leave the reference
    // mask while the reference skeleton stays covered.
    const auto [p2, l2] = build_joint_bundles(tube(2, 50), ref);
    const auto [p3, l3] = build_joint_bundles(tube(3, 50), ref);
    const bool fixed_skeleton = p2.skeleton == p3.skeleton;
    const double ds = std::abs(cl_x_dice(VariantSpec::make("cl-S-D", 2), p3, l3) -
                               cl_x_dice(VariantSpec::make("cl-S-D", 2), p2, l2));
    const double dd = std::abs(cl_dice(p3, l3) - cl_dice(p2, l2));

    const bool ok = same_skeleton && fixed_skeleton && std::abs(s_full - 1.0) <= 1e-6 &&
                    std::abs(cb_full - 1.0) <= 1e-6 && ds > 1e-3 && dd < 1e-9;
    return {ok, fmt("concentric cl-S-D = %.7g, cbDice = %.7g; partial |d cl-S-D| = %.4g, |d cl-D| = %.3g",
                    s_full, cb_full, ds, dd)};
}

Outcome fig3b() {
    const auto rows = sweep(Experiment::scaling, {"clDice", "cbDice"});
    auto spread = [&](const std::string& metric) {
        double lo = INFINITY, hi = -INFINITY;
        for (double f : {0.5, 0.75, 1.25, 1.5}) {
            const double v = row(rows, format_number(f), metric);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return hi - lo;
    };
    const double cb = spread("Dice+cbDice"), cl = spread("Dice+clDice");
    return {cb < cl, fmt("spread Dice+cbDice = %.4f, Dice+clDice = %.4f", cb, cl)};
}

Outcome fig3c() {
    const auto rows = sweep(Experiment::imbalance, {"clDice", "cbDice"});
    const double cb = row(rows, "gap", "Dice+cbDice"), cl = row(rows, "gap", "Dice+clDice");
    return {cb < cl, fmt("|d_thin - d_thick| Dice+cbDice = %.4f, Dice+clDice = %.4f", cb, cl)};
}

Outcome edt_oracle() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> fill(0.05, 0.95);
    std::uniform_int_distribution<int> ext(1, 16), zext(1, 8), rank(2, 3);
    int bad = 0;
    for (int k = 0; k < 500; ++k) {
        std::vector<int> dims = {ext(rng), ext(rng)};
        if (rank(rng) == 3) dims.push_back(zext(rng));
        const GridShape s(dims);
        std::bernoulli_distribution on(fill(rng));
        std::vector<std::uint8_t> v(s.size());
        for (auto& x : v) x = on(rng);
        const BinaryField m(s, v);
        if (edt_squared(m) != oracle::edt_squared(m)) ++bad;
    }
    return {bad == 0, fmt("500 grids, %.0f mismatches", bad)};
}

Outcome betti_oracle() {
    std::vector<BinaryField> cases;
    {
        PhantomSpec d;
        d.kind = PhantomKind::tube;
        d.dims = {16, 16};
        d.radii = {5.0};
        d.lengths = {0.0};
        cases.push_back(generate(d));  // disk
        PhantomSpec r;
        r.kind = PhantomKind::ring;
        r.dims = {20, 20};
        r.radii = {3.0, 6.0};
        cases.push_back(generate(r));  // annulus
        PhantomSpec two;
        two.kind = PhantomKind::multi_tube;
        two.dims = {24, 16};
        two.radii = {1.0, 2.0};
        two.lengths = {10.0};
        cases.push_back(generate(two));  // two components
        const GridShape s = GridShape::make3d(10, 10, 10);
        std::vector<std::uint8_t> v(s.size(), 0);
        for (int z = 1; z < 9; ++z)
            for (int y = 1; y < 9; ++y)
                for (int x = 1; x < 9; ++x) v[s.index(x, y, z)] = !(x > 2 && y > 2 && z > 2 && x < 7 && y < 7 && z < 7);
        cases.push_back(BinaryField(s, v));  // hollow shell
    }
    const std::vector<BettiNumbers> expected = {{1, 0, 0}, {1, 1, 0}, {2, 0, 0}, {1, 0, 1}};
    bool named_ok = true;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        named_ok = named_ok && betti_numbers(cases[k]) == expected[k] && oracle::betti(cases[k]) == expected[k];
    }
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> fill(0.1, 0.9);
    int bad = 0;
    for (int k = 0; k < 200; ++k) {
        const BinaryField m = oracle::random_mask(rng, 3, 1, 12, fill(rng));
        if (betti_numbers(m) != oracle::betti(m)) ++bad;
    }
    return {named_ok && bad == 0, std::string("named phantoms ") + (named_ok ? "agree" : "DISAGREE") +
                                      fmt("; 200 random grids, %.0f mismatches", bad)};
}

Outcome gradient_checks() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string worst_name;
    for (const GridShape& shape : {GridShape::make2d(8, 8), GridShape::make3d(6, 6, 6)}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const ProbField p = random_probe_field(shape, seed);
            const BinaryField ref = random_mask(shape, seed);
            const SkeletonBundle rb = build_bundle(ref);
            const int iters = default_soft_skel_iters(rb);
            const int rank = shape.rank();
            const VariantSpec cl = VariantSpec::make("clDice", rank), cb = VariantSpec::make("cbDice", rank);
            const CombinedLossSpec combined;  // alpha = beta = 1, cbDice
            const std::vector<std::pair<std::string, LossFunction>> losses = {
                {"soft Dice", [&](const ProbField& q) { return soft_dice_loss_grad(q, ref); }},
                {"soft clDice", [&](const ProbField& q) { return soft_cl_x_loss_grad(cl, q, ref, rb, iters); }},
                {"soft cbDice", [&](const ProbField& q) { return soft_cl_x_loss_grad(cb, q, ref, rb, iters); }},
                {"combined", [&](const ProbField& q) { return combined_loss_grad(combined, q, ref); }},
            };
            for (const auto& [name, fn] : losses) {
                const double e = grad_check(fn, p, 1e-4).max_rel_error;
                if (e >= worst) {
                    worst = e;
                    worst_name = name;
                }
            }
        }
    }
    const double t = seconds_since(t0);
    return {worst < 1e-3 && t < 60.0,
            fmt("160 checks, max rel error %.3g", worst) + " (" + worst_name + ")" + fmt(", %.1f s", t)};
}

Outcome combined_degeneracy() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GridShape s = seed % 2 ? GridShape::make3d(6, 6, 6) : GridShape::make2d(8, 8);
        const ProbField p = random_probe_field(s, 100 + seed);
        const BinaryField ref = random_mask(s, 100 + seed);
        CombinedLossSpec spec;
        spec.alpha = 0.0;
        spec.beta = 0.0;
        worst = std::max(worst, std::abs(combined_loss(spec, p, ref) - 0.5 * cross_entropy(p, ref)));
    }
    return {worst <= 1e-12, fmt("10 instances, max |L - 0.5 CE| = %.3g", worst)};
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("vesseltop_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    PhantomSpec y;
    y.kind = PhantomKind::ybranch;
    y.dims = {64, 64};
    y.radii = {1.0, 4.0};
    const BinaryField ref = generate(y);
    const std::string pred_path = (dir / "pred.vgrid").string(), ref_path = (dir / "ref.vgrid").string();
    write_vgrid(fs::path(ref_path), ref);
    write_vgrid(fs::path(pred_path), translate(delete_branch(y, ref, 1), {1, 0}));

    auto run = [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return std::to_string(code) + "\n" + out.str();
    };
    const std::vector<std::vector<std::string>> commands = {
        {"vesseltop", "metrics", "--pred", pred_path, "--ref", ref_path, "--variants",
         "clDice,cl-S-D,cl-M-D,cl-MS-D,cl-MI-D,cl-MSN-D,cbDice", "--groups", "all:1"},
        {"vesseltop", "metrics", "--pred", pred_path, "--ref", ref_path, "--format", "csv"},
        {"vesseltop", "experiment", "--name", "translation"},
        {"vesseltop", "experiment", "--name", "scaling"},
        {"vesseltop", "experiment", "--name", "imbalance"},
    };
    int differing = 0, failed = 0;
    for (const auto& c : commands) {
        const std::string a = run(c), b = run(c);
        if (a != b) ++differing;
        if (a.rfind("0\n", 0) != 0) ++failed;
    }
    fs::remove_all(dir);
    return {differing == 0 && failed == 0,
            fmt("5 commands run twice, %.0f differing, %.0f failed", differing, failed)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"reduction identity", reduction_identity},
        {"alias identity", alias_identity},
        {"translation invariance of clDice", theorem1},
        {"radius sensitivity of cl-S-Dice", theorem2},
        {"scaling consistency", fig3b},
        {"diameter balance", fig3c},
        {"EDT oracle", edt_oracle},
        {"Betti oracle", betti_oracle},
        {"gradient checks", gradient_checks},
        {"combined-loss degeneracy", combined_degeneracy},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
