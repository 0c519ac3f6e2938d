#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vesseltop/betti.hpp"
#include "vesseltop/phantoms.hpp"

using namespace vesseltop;

namespace {

BinaryField disk(int n, double r) {
    const GridShape s = GridShape::make2d(n, n);
    std::vector<std::uint8_t> v(s.size());
    const double c = (n - 1) / 2.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) v[s.index(x, y)] = (x - c) * (x - c) + (y - c) * (y - c) < r * r;
    return {s, v};
}

BinaryField shell(int n) {
    const GridShape s = GridShape::make3d(n, n, n);
    std::vector<std::uint8_t> v(s.size(), 0);
    for (int z = 1; z < n - 1; ++z)
        for (int y = 1; y < n - 1; ++y)
            for (int x = 1; x < n - 1; ++x) {
                const bool inner = x > 2 && y > 2 && z > 2 && x < n - 3 && y < n - 3 && z < n - 3;
                v[s.index(x, y, z)] = !inner;
            }
    return {s, v};
}

}  // namespace

TEST_CASE("disk, annulus and shell") {
    CHECK(betti_numbers(disk(15, 5.0)) == BettiNumbers{1, 0, 0});
    PhantomSpec r;
    r.kind = PhantomKind::ring;
    r.dims = {24, 24};
    r.radii = {4.0, 6.0};
    CHECK(betti_numbers(generate(r)) == BettiNumbers{1, 1, 0});
    CHECK(betti_numbers(shell(9)) == BettiNumbers{1, 0, 1});
}

TEST_CASE("3D torus has one loop") {
    PhantomSpec r;
    r.kind = PhantomKind::ring;
    r.dims = {32, 32, 12};
    r.radii = {6.0, 10.0};
    CHECK(betti_numbers(generate(r)) == BettiNumbers{1, 1, 0});
}

TEST_CASE("connectivity pairing: diagonal pixels form one component") {
    const BinaryField m(GridShape::make2d(2, 2), {1, 0, 0, 1});
    CHECK(count_components(m) == 1);
    CHECK(betti_numbers(m) == BettiNumbers{1, 0, 0});
    // A diagonal ring of four pixels encloses one 4-connected hole.
    const BinaryField diamond(GridShape::make2d(3, 3), {0, 1, 0, 1, 0, 1, 0, 1, 0});
    CHECK(betti_numbers(diamond) == BettiNumbers{1, 1, 0});
}

TEST_CASE("betti error examples") {
    PhantomSpec r;
    r.kind = PhantomKind::ring;
    r.dims = {15, 15};
    r.radii = {3.0, 5.0};
    const BinaryField ring = generate(r);
    const BinaryField full = disk(15, 5.0);
    CHECK(betti_err(ring, full) == 1);
    CHECK(betti_err(ring, ring) == 0);
    const BinaryField two(GridShape::make2d(5, 1), {1, 0, 0, 0, 1});
    const BinaryField one(GridShape::make2d(5, 1), {1, 1, 0, 0, 0});
    CHECK(betti_err(two, one) == 1);
}

TEST_CASE("empty grid") {
    CHECK(betti_numbers(BinaryField::zeros(GridShape::make3d(3, 3, 3))) == BettiNumbers{0, 0, 0});
    CHECK(euler_characteristic(BinaryField::zeros(GridShape::make2d(3, 3))) == 0);
}

TEST_CASE("property: agrees with union-find and explicit Euler count") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 120; ++trial) {
        const int rank = trial % 3 == 0 ? 2 : 3;
        const BinaryField m = oracle::random_mask(rng, rank, 1, rank == 2 ? 12 : 8, 0.2 + 0.1 * (trial % 7));
        CHECK(euler_characteristic(m) == oracle::euler(m));
        CHECK(betti_numbers(m) == oracle::betti(m));
    }
}
