#include "vesseltop/edt.hpp"

#include <cmath>
#include <limits>

namespace vesseltop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One line of the Felzenszwalb-Huttenlocher lower envelope. `f` holds the
// input squared distances sampled at positions i * step; the result
// replaces it in place. `v`, `z` and `tmp` are scratch buffers.
void envelope_1d(std::vector<double>& f, double step, std::vector<int>& v, std::vector<double>& z,
                 std::vector<double>& tmp) {
    const int n = static_cast<int>(f.size());
    v.resize(static_cast<std::size_t>(n));
    z.resize(static_cast<std::size_t>(n) + 1);
    tmp.assign(f.begin(), f.end());

    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (tmp[static_cast<std::size_t>(q)] == kInf) continue;
        const double xq = q * step;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s;
        while (true) {
            const int p = v[static_cast<std::size_t>(k)];
            const double xp = p * step;
            s = ((tmp[static_cast<std::size_t>(q)] + xq * xq) - (tmp[static_cast<std::size_t>(p)] + xp * xp)) /
                (2.0 * (xq - xp));
            if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
                --k;
                continue;
            }
            break;
        }
        if (s <= z[static_cast<std::size_t>(k)]) {
            // k == 0 and the new parabola dominates everywhere.
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = kInf;
    }
    if (k < 0) {
        std::fill(f.begin(), f.end(), kInf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        const double x = q * step;
        while (z[static_cast<std::size_t>(j) + 1] < x) ++j;
        const int p = v[static_cast<std::size_t>(j)];
        const double dx = x - p * step;
        f[static_cast<std::size_t>(q)] = dx * dx + tmp[static_cast<std::size_t>(p)];
    }
}

}  // namespace

std::vector<double> squared_distance_to_seeds(const GridShape& shape, std::span<const std::uint8_t> seeds,
                                              bool physical) {
    if (seeds.size() != shape.size()) throw GridError("seed buffer does not match grid shape");
    std::vector<double> dist(shape.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) dist[i] = seeds[i] ? 0.0 : kInf;

    const int dims[3] = {shape.width(), shape.height(), shape.depth()};
    const std::size_t strides[3] = {1, static_cast<std::size_t>(dims[0]),
                                    static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1])};
    std::vector<double> line, z, tmp;
    std::vector<int> v;
    for (int axis = 0; axis < shape.rank(); ++axis) {
        const int n = dims[axis];
        if (n == 1) continue;
        const double step = physical ? shape.spacing(axis) : 1.0;
        const std::size_t stride = strides[axis];
        line.resize(static_cast<std::size_t>(n));
        for (std::size_t start = 0; start < dist.size(); ++start) {
            // Visit each line once: its start has coordinate 0 along `axis`.
            if ((start / stride) % static_cast<std::size_t>(n) != 0) continue;
            for (int i = 0; i < n; ++i) line[static_cast<std::size_t>(i)] = dist[start + static_cast<std::size_t>(i) * stride];
            envelope_1d(line, step, v, z, tmp);
            for (int i = 0; i < n; ++i) dist[start + static_cast<std::size_t>(i) * stride] = line[static_cast<std::size_t>(i)];
        }
    }
    return dist;
}

std::vector<double> edt_squared(const BinaryField& mask) {
    const GridShape& shape = mask.shape();
    const int pad_z = shape.rank() == 3 ? 1 : 0;
    std::vector<int> padded_dims = {shape.width() + 2, shape.height() + 2};
    if (shape.rank() == 3) padded_dims.push_back(shape.depth() + 2);
    const GridShape padded(padded_dims);

    std::vector<std::uint8_t> background(padded.size(), 1);
    for (int z = 0; z < shape.depth(); ++z) {
        for (int y = 0; y < shape.height(); ++y) {
            for (int x = 0; x < shape.width(); ++x) {
                background[padded.index(x + 1, y + 1, z + pad_z)] = mask.at(x, y, z) ? 0 : 1;
            }
        }
    }
    const auto padded_dist = squared_distance_to_seeds(padded, background);
    std::vector<double> out(shape.size());
    for (int z = 0; z < shape.depth(); ++z) {
        for (int y = 0; y < shape.height(); ++y) {
            for (int x = 0; x < shape.width(); ++x) {
                out[shape.index(x, y, z)] = padded_dist[padded.index(x + 1, y + 1, z + pad_z)];
            }
        }
    }
    return out;
}

ScalarField edt(const BinaryField& mask) {
    auto sq = edt_squared(mask);
    for (double& v : sq) v = std::sqrt(v);
    return {mask.shape(), std::move(sq)};
}

}  // namespace vesseltop
