#include <doctest.h>

#include <cmath>
#include <sstream>

#include "vesseltop/betti.hpp"
#include "vesseltop/phantoms.hpp"

using namespace vesseltop;

TEST_CASE("tube count matches a brute-force capsule test") {
    PhantomSpec s;
    s.dims = {32, 32};
    s.radii = {3.0};
    s.lengths = {20.0};
    const BinaryField m = generate(s);
    // Segment from (5,15) to (25,15); keep points strictly closer than 3.
    std::size_t expect = 0;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            const double t = std::clamp((x - 5.0) / 20.0, 0.0, 1.0);
            const double dx = x - (5.0 + 20.0 * t), dy = y - 15.0;
            expect += dx * dx + dy * dy < 9.0;
        }
    CHECK(m.count() == expect);
    CHECK(betti_numbers(m) == BettiNumbers{1, 0, 0});
}

TEST_CASE("ring topology") {
    PhantomSpec s;
    s.kind = PhantomKind::ring;
    s.dims = {24, 24};
    s.radii = {4.0, 6.0};
    CHECK(betti_numbers(generate(s)) == BettiNumbers{1, 1, 0});
    s.radii = {6.0};
    CHECK_THROWS_AS(generate(s), PhantomError);
}

TEST_CASE("ybranch splits into two branches once the junction and trunk go") {
    PhantomSpec s;
    s.kind = PhantomKind::ybranch;
    s.dims = {64, 64};
    s.radii = {1.0, 4.0};
    const BinaryField y = generate(s);
    CHECK(betti_numbers(y) == BettiNumbers{1, 0, 0});
    const BinaryField arms = delete_branch(s, y, 0);
    std::vector<std::uint8_t> v(arms.values().begin(), arms.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto c = arms.shape().coords(i);
        const double dx = c[0] - 31.0, dy = c[1] - 31.0;
        if (dx * dx + dy * dy < 36.0) v[i] = 0;
    }
    CHECK(count_components(BinaryField(arms.shape(), v)) == 2);
}

TEST_CASE("deleting the thin branch removes exactly its private voxels") {
    PhantomSpec s;
    s.kind = PhantomKind::ybranch;
    s.dims = {64, 64};
    s.radii = {1.0, 4.0};
    const BinaryField y = generate(s);
    const BinaryField thin = branch_mask(s, 1);
    const BinaryField gone = delete_branch(s, y, 1);
    std::size_t shared = 0;
    for (std::size_t i = 0; i < y.size(); ++i) shared += thin[i] && gone[i];
    CHECK(y.count() - gone.count() == thin.count() - shared);
    CHECK(shared > 0);  // the junction stays
    CHECK_THROWS_AS(delete_branch(s, y, 3), PhantomError);
    CHECK_THROWS_AS(branch_mask(s, -1), PhantomError);
}

TEST_CASE("identity perturbations") {
    PhantomSpec s;
    s.dims = {40, 30};
    const BinaryField m = generate(s);
    CHECK(translate(m, {0, 0}) == m);
    CHECK(scale(m, 1.0) == m);
    CHECK_THROWS_AS(translate(m, {30, 0}), PhantomError);
    CHECK_THROWS_AS(translate(m, {1}), PhantomError);
    CHECK_THROWS_AS(scale(m, 0.0), PhantomError);
    CHECK_THROWS_AS(scale(m, 4.0), PhantomError);
}

TEST_CASE("property: translations compose") {
    PhantomSpec s;
    s.dims = {40, 30, 20};
    s.orientation = {1.0, 1.0, 0.0};
    s.radii = {2.0};
    s.lengths = {10.0};
    const BinaryField m = generate(s);
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            const std::vector<int> u{a, b, 1}, w{b, -a, -1}, sum{a + b, b - a, 0};
            CHECK(translate(translate(m, u), w) == translate(m, sum));
        }
}

TEST_CASE("generation is deterministic and seeded") {
    PhantomSpec s;
    s.kind = PhantomKind::ybranch;
    s.dims = {64, 64};
    s.radii = {2.0, 3.0};
    s.jitter = 1.5;
    s.seed = 42;
    const BinaryField a = generate(s);
    CHECK(generate(s) == a);
    s.seed = 43;
    CHECK_FALSE(generate(s) == a);
}

TEST_CASE("margin is enforced") {
    PhantomSpec s;
    s.dims = {20, 20};
    s.radii = {3.0};
    s.lengths = {16.0};
    CHECK_THROWS_AS(generate(s), PhantomError);
    s.lengths = {8.0};
    CHECK_NOTHROW(generate(s));
}

TEST_CASE("multi-tube stacks separate components") {
    PhantomSpec s;
    s.kind = PhantomKind::multi_tube;
    s.dims = {48, 48};
    s.radii = {1.0, 2.0, 4.0};
    CHECK(count_components(generate(s)) == 3);
}

TEST_CASE("name parsing") {
    CHECK(parse_phantom_kind("ring") == PhantomKind::ring);
    CHECK(parse_experiment("scaling") == Experiment::scaling);
    CHECK_THROWS_AS(parse_phantom_kind("spiral"), PhantomError);
    CHECK_THROWS_AS(parse_experiment("rotation"), PhantomError);
}

namespace {

double value(const std::vector<SweepRow>& rows, const std::string& param, const std::string& metric) {
    for (const auto& r : rows)
        if (r.param == param && r.metric == metric) return r.value;
    FAIL("missing row " << param << ' ' << metric);
    return 0.0;
}

}  // namespace

TEST_CASE("translation sweep") {
    const auto rows = sweep(Experiment::translation);
    double prev = 2.0;
    for (int t : translation_offsets()) {
        const std::string p = std::to_string(t);
        CHECK(value(rows, p, "clDice") == 1.0);
        const double m = value(rows, p, "cl-M-D");
        CHECK(m < prev);
        prev = m;
        CHECK(value(rows, p, "Dice+cbDice") == doctest::Approx(0.5 * value(rows, p, "Dice") + 0.5 * value(rows, p, "cbDice")));
    }
}

TEST_CASE("imbalance sweep emits gap rows") {
    const auto rows = sweep(Experiment::imbalance, {"clDice"});
    const double full = value(rows, "full", "Dice+clDice");
    const double thin = value(rows, "delete_thin", "Dice+clDice");
    const double thick = value(rows, "delete_thick", "Dice+clDice");
    CHECK(value(rows, "gap", "Dice+clDice") == doctest::Approx(std::abs((full - thin) - (full - thick))));
}

TEST_CASE("sweep CSV is stable") {
    const auto rows = sweep(Experiment::translation, {"cbDice"});
    std::ostringstream a, b;
    write_sweep_csv(a, rows);
    write_sweep_csv(b, sweep(Experiment::translation, {"cbDice"}));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("param,metric,value\n", 0) == 0);
    CHECK(a.str().find('\r') == std::string::npos);
    CHECK_THROWS_AS(sweep(Experiment::translation, {"bogus"}), PhantomError);
}
