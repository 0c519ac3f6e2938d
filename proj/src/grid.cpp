#include "vesseltop/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace vesseltop {

GridShape::GridShape(std::vector<int> dims, std::vector<double> spacing) {
    if (dims.size() < 2 || dims.size() > 3) {
        throw GridError("grid must have 2 or 3 dimensions, got " + std::to_string(dims.size()));
    }
    if (spacing.empty()) spacing.assign(dims.size(), 1.0);
    if (spacing.size() != dims.size()) {
        throw GridError("spacing has " + std::to_string(spacing.size()) + " entries for a " +
                        std::to_string(dims.size()) + "D grid");
    }
    rank_ = static_cast<int>(dims.size());
    for (std::size_t a = 0; a < dims.size(); ++a) {
        if (dims[a] < 1) throw GridError("grid dimension " + std::to_string(a) + " must be >= 1");
        if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) {
            throw GridError("grid spacing " + std::to_string(a) + " must be positive");
        }
        dims_[a] = dims[a];
        spacing_[a] = spacing[a];
    }
}

std::vector<int> GridShape::dims() const {
    return {dims_.begin(), dims_.begin() + rank_};
}

std::vector<double> GridShape::spacings() const {
    return {spacing_.begin(), spacing_.begin() + rank_};
}

std::string GridShape::describe() const {
    std::ostringstream os;
    for (int a = 0; a < rank_; ++a) os << (a ? "x" : "") << dims_[static_cast<std::size_t>(a)];
    return os.str();
}

void require_same_shape(const GridShape& a, const GridShape& b, const char* what) {
    if (!(a == b)) {
        throw GridError(std::string(what) + ": shape mismatch " + a.describe() + " vs " + b.describe());
    }
}

BinaryField::BinaryField(GridShape shape, std::vector<std::uint8_t> values)
    : Field(std::move(shape), std::move(values)) {
    for (auto v : values_) {
        if (v > 1) throw GridError("binary field contains value " + std::to_string(v));
    }
}

BinaryField BinaryField::zeros(const GridShape& shape) {
    return {shape, std::vector<std::uint8_t>(shape.size(), 0)};
}

BinaryField BinaryField::ones(const GridShape& shape) {
    return {shape, std::vector<std::uint8_t>(shape.size(), 1)};
}

std::size_t BinaryField::count() const {
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

ScalarField::ScalarField(GridShape shape, std::vector<double> values)
    : Field(std::move(shape), std::move(values)) {
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw GridError("scalar field values must be finite and >= 0");
    }
}

ScalarField ScalarField::zeros(const GridShape& shape) {
    return {shape, std::vector<double>(shape.size(), 0.0)};
}

double ScalarField::max() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double ScalarField::sum() const {
    return std::accumulate(values_.begin(), values_.end(), 0.0);
}

LabelGrid::LabelGrid(GridShape shape, std::vector<std::uint16_t> labels, int class_count)
    : Field(std::move(shape), std::move(labels)) {
    const int top = values_.empty() ? 0 : *std::max_element(values_.begin(), values_.end());
    if (class_count == 0) class_count = std::max(2, top + 1);
    if (class_count < 2) throw GridError("class count must be >= 2");
    if (top >= class_count) {
        throw GridError("label " + std::to_string(top) + " exceeds declared class count " +
                        std::to_string(class_count));
    }
    class_count_ = class_count;
}

LabelGrid LabelGrid::with_class_count(int class_count) const {
    return {shape_, values_, class_count};
}

LabelGrid LabelGrid::from_mask(const BinaryField& mask) {
    std::vector<std::uint16_t> labels(mask.values().begin(), mask.values().end());
    return {mask.shape(), std::move(labels), 2};
}

BinaryField binarize(const LabelGrid& grid, int class_id) {
    if (class_id < 1 || class_id >= grid.class_count()) {
        throw GridError("unknown class id " + std::to_string(class_id) + " (class count " +
                        std::to_string(grid.class_count()) + ")");
    }
    std::vector<std::uint8_t> out(grid.size());
    const auto labels = grid.values();
    std::transform(labels.begin(), labels.end(), out.begin(),
                   [class_id](std::uint16_t l) { return static_cast<std::uint8_t>(l == class_id); });
    return {grid.shape(), std::move(out)};
}

}  // namespace vesseltop
