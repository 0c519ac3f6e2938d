#include "vesseltop/thinning.hpp"

#include <algorithm>
#include <cstdlib>
#include <vector>

namespace vesseltop {

namespace thinning_detail {

namespace {

constexpr int kCenter2d = 1 + 3 * 1 + 9 * 1;  // centre of the z = 0 plane in the 27-layout
constexpr int kCenter3d = 13;

int offset(int dx, int dy, int dz) { return (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1); }

// Counts connected components among `cells` (neighbourhood indices with the
// selected value) under the given adjacency, returning component count and
// optionally only those touching a cell listed in `anchors`.
template <typename Adjacent>
int count_components(const std::vector<int>& cells, Adjacent adjacent, const std::vector<int>* anchors) {
    std::vector<int> label(cells.size(), -1);
    int components = 0;
    int anchored = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < cells.size(); ++s) {
        if (label[s] >= 0) continue;
        bool touches_anchor = false;
        label[s] = components;
        stack.assign(1, s);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            if (anchors && std::find(anchors->begin(), anchors->end(), cells[cur]) != anchors->end()) {
                touches_anchor = true;
            }
            for (std::size_t o = 0; o < cells.size(); ++o) {
                if (label[o] < 0 && adjacent(cells[cur], cells[o])) {
                    label[o] = components;
                    stack.push_back(o);
                }
            }
        }
        ++components;
        if (touches_anchor) ++anchored;
    }
    return anchors ? anchored : components;
}

std::array<int, 3> delta(int cell) { return {cell % 3 - 1, (cell / 3) % 3 - 1, cell / 9 - 1}; }

int manhattan(int a, int b) {
    const auto da = delta(a);
    const auto db = delta(b);
    return std::abs(da[0] - db[0]) + std::abs(da[1] - db[1]) + std::abs(da[2] - db[2]);
}

int chebyshev(int a, int b) {
    const auto da = delta(a);
    const auto db = delta(b);
    return std::max({std::abs(da[0] - db[0]), std::abs(da[1] - db[1]), std::abs(da[2] - db[2])});
}

}  // namespace

bool is_simple_2d(const Neighborhood& n) {
    std::vector<int> fg, bg;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            const int c = offset(dx, dy, 0);
            if (c == kCenter2d) continue;
            (n[static_cast<std::size_t>(c)] ? fg : bg).push_back(c);
        }
    }
    if (fg.empty() || bg.empty()) return false;
    const int fg_components = count_components(fg, [](int a, int b) { return chebyshev(a, b) == 1; }, nullptr);
    if (fg_components != 1) return false;
    const std::vector<int> face = {offset(0, -1, 0), offset(-1, 0, 0), offset(1, 0, 0), offset(0, 1, 0)};
    return count_components(bg, [](int a, int b) { return manhattan(a, b) == 1; }, &face) == 1;
}

bool is_simple_3d(const Neighborhood& n) {
    std::vector<int> fg, bg;
    for (int c = 0; c < 27; ++c) {
        if (c == kCenter3d) continue;
        if (n[static_cast<std::size_t>(c)]) {
            fg.push_back(c);
        } else if (manhattan(c, kCenter3d) <= 2) {
            // Background connectivity is evaluated inside the 18-neighbourhood.
            bg.push_back(c);
        }
    }
    if (fg.empty()) return false;
    const int fg_components = count_components(fg, [](int a, int b) { return chebyshev(a, b) == 1; }, nullptr);
    if (fg_components != 1) return false;
    const std::vector<int> face = {offset(0, 0, -1), offset(0, -1, 0), offset(-1, 0, 0),
                                   offset(1, 0, 0),  offset(0, 1, 0),  offset(0, 0, 1)};
    return count_components(bg, [](int a, int b) { return manhattan(a, b) == 1; }, &face) == 1;
}

}  // namespace thinning_detail

namespace {

using thinning_detail::Neighborhood;

class Thinner {
public:
    explicit Thinner(const BinaryField& mask)
        : shape_(mask.shape()), img_(mask.values().begin(), mask.values().end()), is3d_(shape_.rank() == 3) {
        if (is3d_) {
            lut_.clear();
        } else {
            // 2D decisions depend only on the 8 neighbours: tabulate them.
            lut_.assign(256, 0);
            for (int code = 0; code < 256; ++code) {
                Neighborhood n{};
                int bit = 0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        n[static_cast<std::size_t>((dx + 1) + 3 * (dy + 1) + 9)] = (code >> bit) & 1;
                        ++bit;
                    }
                }
                lut_[static_cast<std::size_t>(code)] = thinning_detail::is_simple_2d(n);
            }
        }
    }

    BinaryField run() {
        const std::vector<std::array<int, 3>> directions =
            is3d_ ? std::vector<std::array<int, 3>>{{0, -1, 0}, {0, 1, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 0, -1}, {0, 0, 1}}
                  : std::vector<std::array<int, 3>>{{0, -1, 0}, {0, 1, 0}, {1, 0, 0}, {-1, 0, 0}};
        bool changed = true;
        std::vector<std::size_t> candidates;
        while (changed) {
            changed = false;
            for (const auto& d : directions) {
                candidates.clear();
                for (std::size_t i = 0; i < img_.size(); ++i) {
                    if (!img_[i]) continue;
                    const auto c = shape_.coords(i);
                    if (value(c[0] + d[0], c[1] + d[1], c[2] + d[2])) continue;
                    if (deletable(c)) candidates.push_back(i);
                }
                for (std::size_t i : candidates) {
                    if (deletable(shape_.coords(i))) {
                        img_[i] = 0;
                        changed = true;
                    }
                }
            }
        }
        return {shape_, img_};
    }

private:
    bool value(int x, int y, int z) const { return shape_.contains(x, y, z) && img_[shape_.index(x, y, z)]; }

    bool deletable(const std::array<int, 3>& c) const {
        if (is3d_) {
            Neighborhood n{};
            int neighbours = 0;
            for (int dz = -1; dz <= 1; ++dz) {
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const bool v = value(c[0] + dx, c[1] + dy, c[2] + dz);
                        n[static_cast<std::size_t>((dx + 1) + 3 * (dy + 1) + 9 * (dz + 1))] = v;
                        if (v && (dx || dy || dz)) ++neighbours;
                    }
                }
            }
            return neighbours >= 2 && thinning_detail::is_simple_3d(n);
        }
        int code = 0;
        int bit = 0;
        int neighbours = 0;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                if (value(c[0] + dx, c[1] + dy, c[2])) {
                    code |= 1 << bit;
                    ++neighbours;
                }
                ++bit;
            }
        }
        return neighbours >= 2 && lut_[static_cast<std::size_t>(code)];
    }

    GridShape shape_;
    std::vector<std::uint8_t> img_;
    bool is3d_;
    std::vector<std::uint8_t> lut_;
};

}  // namespace

BinaryField skeletonize(const BinaryField& mask) {
    return Thinner(mask).run();
}

}  // namespace vesseltop
