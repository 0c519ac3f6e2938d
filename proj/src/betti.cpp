#include "vesseltop/betti.hpp"

#include <array>
#include <cstdlib>
#include <vector>

namespace vesseltop {

namespace {

std::vector<std::array<int, 3>> neighbour_offsets(int rank, bool full) {
    std::vector<std::array<int, 3>> out;
    const int zr = rank == 3 ? 1 : 0;
    for (int dz = -zr; dz <= zr; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int l1 = std::abs(dx) + std::abs(dy) + std::abs(dz);
                if (l1 == 0) continue;
                if (!full && l1 != 1) continue;
                out.push_back({dx, dy, dz});
            }
        }
    }
    return out;
}

struct ComponentCount {
    int total = 0;
    int bounded = 0;  // components not touching the grid border
};

// Flood-fills elements equal to `value`.
ComponentCount components_of(const BinaryField& mask, std::uint8_t value, bool full_connectivity) {
    const GridShape& s = mask.shape();
    const auto offsets = neighbour_offsets(s.rank(), full_connectivity);
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<std::size_t> stack;
    ComponentCount out;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (seen[start] || mask[start] != value) continue;
        ++out.total;
        bool touches_border = false;
        seen[start] = 1;
        stack.assign(1, start);
        while (!stack.empty()) {
            const auto c = s.coords(stack.back());
            stack.pop_back();
            if (c[0] == 0 || c[1] == 0 || c[0] == s.width() - 1 || c[1] == s.height() - 1 ||
                (s.rank() == 3 && (c[2] == 0 || c[2] == s.depth() - 1))) {
                touches_border = true;
            }
            for (const auto& o : offsets) {
                const int x = c[0] + o[0], y = c[1] + o[1], z = c[2] + o[2];
                if (!s.contains(x, y, z)) continue;
                const std::size_t j = s.index(x, y, z);
                if (seen[j] || mask[j] != value) continue;
                seen[j] = 1;
                stack.push_back(j);
            }
        }
        if (!touches_border) ++out.bounded;
    }
    return out;
}

}  // namespace

int count_components(const BinaryField& mask) {
    return components_of(mask, 1, true).total;
}

int euler_characteristic(const BinaryField& mask) {
    // Cells live on the doubled lattice: voxel (x,y,z) is the cell at
    // (2x+1, 2y+1, 2z+1); a cell's dimension is its number of odd coordinates.
    const GridShape& s = mask.shape();
    const bool is3d = s.rank() == 3;
    const int W = 2 * s.width() + 1, H = 2 * s.height() + 1, D = is3d ? 2 * s.depth() + 1 : 1;

    auto span_of = [](int c, int extent, int& lo, int& hi) {
        if (c % 2 == 1) {
            lo = hi = (c - 1) / 2;
        } else {
            lo = c / 2 - 1;
            hi = c / 2;
        }
        if (lo < 0) lo = 0;
        if (hi > extent - 1) hi = extent - 1;
    };

    long chi = 0;
    for (int Z = 0; Z < D; ++Z) {
        int z0 = 0, z1 = 0;
        if (is3d) span_of(Z, s.depth(), z0, z1);
        for (int Y = 0; Y < H; ++Y) {
            int y0, y1;
            span_of(Y, s.height(), y0, y1);
            for (int X = 0; X < W; ++X) {
                int x0, x1;
                span_of(X, s.width(), x0, x1);
                bool present = false;
                for (int z = z0; z <= z1 && !present; ++z) {
                    for (int y = y0; y <= y1 && !present; ++y) {
                        for (int x = x0; x <= x1 && !present; ++x) present = mask.at(x, y, z) != 0;
                    }
                }
                if (!present) continue;
                const int dim = (X % 2) + (Y % 2) + (is3d ? Z % 2 : 0);
                chi += dim % 2 == 0 ? 1 : -1;
            }
        }
    }
    return static_cast<int>(chi);
}

BettiNumbers betti_numbers(const BinaryField& mask) {
    BettiNumbers b;
    b.b0 = count_components(mask);
    const auto background = components_of(mask, 0, false);
    if (mask.shape().rank() == 2) {
        b.b1 = background.bounded;
        return b;
    }
    b.b2 = background.bounded;
    b.b1 = b.b0 + b.b2 - euler_characteristic(mask);
    return b;
}

int betti_err(const BinaryField& pred, const BinaryField& ref) {
    require_same_shape(pred.shape(), ref.shape(), "betti_err");
    const auto p = betti_numbers(pred);
    const auto l = betti_numbers(ref);
    return std::abs(p.b0 - l.b0) + std::abs(p.b1 - l.b1) + std::abs(p.b2 - l.b2);
}

}  // namespace vesseltop
