#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>

#include "vesseltop/grid.hpp"

namespace vesseltop {

/// VGRID and PGM ingestion errors. Each failure mode has its own kind so
/// callers (and tests) can tell a bad header from a short payload.
class VgridError : public std::runtime_error {
public:
    enum class Kind {
        io,                // file cannot be opened / read / written
        malformed_header,  // header line missing, not JSON, or missing keys
        shape_mismatch,    // dims and spacing disagree, or dims invalid
        bad_dtype,         // dtype not one of u8/u16/f32
        truncated_payload, // fewer payload bytes than dims require
        trailing_data,     // more payload bytes than dims require
        bad_value,         // payload value invalid for the target field type
    };

    VgridError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

using VgridContent = std::variant<LabelGrid, ScalarField>;

// VGRID layout: one UTF-8 JSON header line
//   {"dims":[w,h(,d)],"spacing":[...],"dtype":"u8"|"u16"|"f32","order":"x-fastest"}\n
// followed by exactly N little-endian elements, x fastest.

VgridContent read_vgrid(std::istream& in);
VgridContent read_vgrid(const std::filesystem::path& path);

/// Labels are written as u8 when every label fits, else u16.
void write_vgrid(std::ostream& out, const LabelGrid& grid);
void write_vgrid(std::ostream& out, const BinaryField& mask);
/// Scalars are written as f32; values are rounded to float.
void write_vgrid(std::ostream& out, const ScalarField& field);

void write_vgrid(const std::filesystem::path& path, const LabelGrid& grid);
void write_vgrid(const std::filesystem::path& path, const BinaryField& mask);
void write_vgrid(const std::filesystem::path& path, const ScalarField& field);

/// Binary (P5) PGM, thresholded at >= 128 (of 255; scaled for other maxvals).
BinaryField read_pgm(std::istream& in);
BinaryField read_pgm(const std::filesystem::path& path);

/// Reads a label grid from either format, sniffing the "P5" magic.
/// Scalar VGRID files are rejected.
LabelGrid read_labels(const std::filesystem::path& path);

}  // namespace vesseltop
