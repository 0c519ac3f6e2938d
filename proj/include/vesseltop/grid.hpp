#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vesseltop {

/// Error raised for invalid grid construction, shape mismatches and bad
/// class IDs. File-format problems use the more specific `VgridError`.
class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Extent and physical spacing of a 2D or 3D voxel lattice.
///
/// Elements are stored row-major with x fastest:
/// `index = x + w * (y + h * z)`. A 2D shape has `depth() == 1`.
class GridShape {
public:
    GridShape() = default;
    explicit GridShape(std::vector<int> dims, std::vector<double> spacing = {});

    static GridShape make2d(int w, int h) { return GridShape({w, h}); }
    static GridShape make3d(int w, int h, int d) { return GridShape({w, h, d}); }

    int rank() const { return rank_; }
    int width() const { return dims_[0]; }
    int height() const { return dims_[1]; }
    int depth() const { return dims_[2]; }
    int dim(int axis) const { return dims_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    std::vector<int> dims() const;
    std::vector<double> spacings() const;

    std::size_t size() const {
        return static_cast<std::size_t>(dims_[0]) * static_cast<std::size_t>(dims_[1]) *
               static_cast<std::size_t>(dims_[2]);
    }

    std::size_t index(int x, int y, int z = 0) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims_[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(z));
    }

    std::array<int, 3> coords(std::size_t i) const {
        const auto w = static_cast<std::size_t>(dims_[0]);
        const auto h = static_cast<std::size_t>(dims_[1]);
        return {static_cast<int>(i % w), static_cast<int>((i / w) % h), static_cast<int>(i / (w * h))};
    }

    bool contains(int x, int y, int z = 0) const {
        return x >= 0 && y >= 0 && z >= 0 && x < dims_[0] && y < dims_[1] && z < dims_[2];
    }

    /// Same lattice dimensions (spacing ignored).
    bool same_dims(const GridShape& other) const { return rank_ == other.rank_ && dims_ == other.dims_; }

    bool operator==(const GridShape& other) const = default;

    std::string describe() const;

private:
    int rank_ = 2;
    std::array<int, 3> dims_{1, 1, 1};
    std::array<double, 3> spacing_{1.0, 1.0, 1.0};
};

/// Throws GridError unless both shapes have identical dims and spacing.
void require_same_shape(const GridShape& a, const GridShape& b, const char* what);

/// Immutable value buffer bound to a GridShape.
template <typename T>
class Field {
public:
    using value_type = T;

    Field() = default;
    Field(GridShape shape, std::vector<T> values) : shape_(std::move(shape)), values_(std::move(values)) {
        if (values_.size() != shape_.size()) {
            throw GridError("field has " + std::to_string(values_.size()) + " elements but shape " +
                            shape_.describe() + " requires " + std::to_string(shape_.size()));
        }
    }

    const GridShape& shape() const { return shape_; }
    std::size_t size() const { return values_.size(); }
    std::span<const T> values() const { return values_; }
    T operator[](std::size_t i) const { return values_[i]; }
    T at(int x, int y, int z = 0) const { return values_[shape_.index(x, y, z)]; }

    bool operator==(const Field& other) const = default;

protected:
    GridShape shape_;
    std::vector<T> values_;
};

/// {0,1}-valued field: masks V and skeletons S.
class BinaryField : public Field<std::uint8_t> {
public:
    BinaryField() = default;
    BinaryField(GridShape shape, std::vector<std::uint8_t> values);

    static BinaryField zeros(const GridShape& shape);
    static BinaryField ones(const GridShape& shape);

    /// Number of foreground elements (q for a mask, n for a skeleton).
    std::size_t count() const;
    bool empty() const { return count() == 0; }
    bool contains(int x, int y, int z = 0) const { return at(x, y, z) != 0; }
};

/// Nonnegative real field: distance, radius and inverse-radius maps.
class ScalarField : public Field<double> {
public:
    ScalarField() = default;
    ScalarField(GridShape shape, std::vector<double> values);

    static ScalarField zeros(const GridShape& shape);

    double max() const;
    double sum() const;
};

/// Integer class labels, 0 = background.
class LabelGrid : public Field<std::uint16_t> {
public:
    LabelGrid() = default;
    /// `class_count` of 0 infers max label + 1 (at least 2).
    LabelGrid(GridShape shape, std::vector<std::uint16_t> labels, int class_count = 0);

    int class_count() const { return class_count_; }

    /// Same labels, different declared vocabulary size.
    LabelGrid with_class_count(int class_count) const;

    static LabelGrid from_mask(const BinaryField& mask);

private:
    int class_count_ = 2;
};

/// One-hot slice for `class_id`.
BinaryField binarize(const LabelGrid& grid, int class_id);

}  // namespace vesseltop
