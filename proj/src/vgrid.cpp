#include "vesseltop/vgrid.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include <json.hpp>

namespace vesseltop {

namespace {

using Kind = VgridError::Kind;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T from_le(const unsigned char* p) {
    std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>, std::uint32_t, T>> raw = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) raw |= static_cast<decltype(raw)>(p[b]) << (8 * b);
    T out;
    std::memcpy(&out, &raw, sizeof(T));
    return out;
}

template <typename T>
void to_le(T value, std::string& out) {
    std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>, std::uint32_t, T>> raw = 0;
    std::memcpy(&raw, &value, sizeof(T));
    for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<char>((raw >> (8 * b)) & 0xFF));
}

std::string header_line(const GridShape& shape, const char* dtype) {
    nlohmann::ordered_json h;
    h["dims"] = shape.dims();
    h["spacing"] = shape.spacings();
    h["dtype"] = dtype;
    h["order"] = "x-fastest";
    return h.dump() + "\n";
}

GridShape parse_header(const std::string& line, std::string& dtype) {
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw VgridError(Kind::malformed_header, std::string("VGRID header is not valid JSON: ") + e.what());
    }
    if (!h.is_object() || !h.contains("dims") || !h.contains("dtype") || !h["dims"].is_array() ||
        !h["dtype"].is_string()) {
        throw VgridError(Kind::malformed_header, "VGRID header requires \"dims\" array and \"dtype\" string");
    }
    if (h.contains("order") && h["order"] != "x-fastest") {
        throw VgridError(Kind::malformed_header, "VGRID order must be \"x-fastest\"");
    }
    std::vector<int> dims;
    std::vector<double> spacing;
    try {
        for (const auto& d : h["dims"]) {
            if (!d.is_number_integer()) throw VgridError(Kind::malformed_header, "VGRID dims must be integers");
            dims.push_back(d.get<int>());
        }
        if (h.contains("spacing")) {
            if (!h["spacing"].is_array()) throw VgridError(Kind::malformed_header, "VGRID spacing must be an array");
            for (const auto& s : h["spacing"]) {
                if (!s.is_number()) throw VgridError(Kind::malformed_header, "VGRID spacing must be numeric");
                spacing.push_back(s.get<double>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw VgridError(Kind::malformed_header, e.what());
    }
    if (!spacing.empty() && spacing.size() != dims.size()) {
        throw VgridError(Kind::shape_mismatch, "VGRID has " + std::to_string(dims.size()) + " dims but " +
                                                   std::to_string(spacing.size()) + " spacing entries");
    }
    dtype = h["dtype"].get<std::string>();
    try {
        return GridShape(dims, spacing);
    } catch (const GridError& e) {
        throw VgridError(Kind::shape_mismatch, e.what());
    }
}

std::size_t dtype_size(const std::string& dtype) {
    if (dtype == "u8") return 1;
    if (dtype == "u16") return 2;
    if (dtype == "f32") return 4;
    throw VgridError(Kind::bad_dtype, "unsupported VGRID dtype \"" + dtype + "\"");
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw VgridError(Kind::io, "cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ostream& out) {
    if (!out) throw VgridError(Kind::io, "write failed");
}

}  // namespace

VgridContent read_vgrid(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw VgridError(Kind::malformed_header, "VGRID header line missing");
    std::string dtype;
    const GridShape shape = parse_header(line, dtype);
    const std::size_t elem = dtype_size(dtype);
    const std::size_t n = shape.size();

    std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (payload.size() < n * elem) {
        throw VgridError(Kind::truncated_payload, "VGRID payload has " + std::to_string(payload.size() / elem) +
                                                      " elements, header requires " + std::to_string(n));
    }
    if (payload.size() > n * elem) {
        throw VgridError(Kind::trailing_data, "VGRID payload has " + std::to_string(payload.size() - n * elem) +
                                                  " bytes beyond the declared " + std::to_string(n) + " elements");
    }
    const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());

    if (dtype == "f32") {
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = static_cast<double>(from_le<float>(bytes + 4 * i));
        }
        try {
            return ScalarField(shape, std::move(values));
        } catch (const GridError& e) {
            throw VgridError(Kind::bad_value, e.what());
        }
    }
    std::vector<std::uint16_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = elem == 1 ? bytes[i] : from_le<std::uint16_t>(bytes + 2 * i);
    }
    return LabelGrid(shape, std::move(labels));
}

VgridContent read_vgrid(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw VgridError(Kind::io, "cannot open " + path.string());
    return read_vgrid(in);
}

void write_vgrid(std::ostream& out, const LabelGrid& grid) {
    const auto labels = grid.values();
    const bool narrow = std::all_of(labels.begin(), labels.end(), [](std::uint16_t l) { return l < 256; });
    std::string buf = header_line(grid.shape(), narrow ? "u8" : "u16");
    buf.reserve(buf.size() + labels.size() * (narrow ? 1 : 2));
    for (auto l : labels) {
        if (narrow) {
            buf.push_back(static_cast<char>(l));
        } else {
            to_le<std::uint16_t>(l, buf);
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    finish(out);
}

void write_vgrid(std::ostream& out, const BinaryField& mask) {
    write_vgrid(out, LabelGrid::from_mask(mask));
}

void write_vgrid(std::ostream& out, const ScalarField& field) {
    std::string buf = header_line(field.shape(), "f32");
    buf.reserve(buf.size() + field.size() * 4);
    for (double v : field.values()) to_le<float>(static_cast<float>(v), buf);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    finish(out);
}

void write_vgrid(const std::filesystem::path& path, const LabelGrid& grid) {
    auto out = open_out(path);
    write_vgrid(out, grid);
}

void write_vgrid(const std::filesystem::path& path, const BinaryField& mask) {
    auto out = open_out(path);
    write_vgrid(out, mask);
}

void write_vgrid(const std::filesystem::path& path, const ScalarField& field) {
    auto out = open_out(path);
    write_vgrid(out, field);
}

BinaryField read_pgm(std::istream& in) {
    auto next_token = [&in]() {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {
                while ((c = in.get()) != EOF && c != '\n') {
                }
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) break;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        return tok;
    };
    if (next_token() != "P5") throw VgridError(Kind::malformed_header, "not a binary PGM (P5) file");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_token());
        h = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::exception&) {
        throw VgridError(Kind::malformed_header, "PGM header fields are not integers");
    }
    if (w < 1 || h < 1) throw VgridError(Kind::shape_mismatch, "PGM dimensions must be positive");
    if (maxval < 1 || maxval > 65535) throw VgridError(Kind::malformed_header, "PGM maxval out of range");

    const GridShape shape = GridShape::make2d(w, h);
    const std::size_t elem = maxval < 256 ? 1 : 2;
    std::string payload(shape.size() * elem, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
        throw VgridError(Kind::truncated_payload, "PGM pixel data truncated");
    }
    // >= 128 of 255, scaled to the file's maxval.
    const double threshold = 128.0 * maxval / 255.0;
    std::vector<std::uint8_t> values(shape.size());
    const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const unsigned v = elem == 1 ? bytes[i] : (static_cast<unsigned>(bytes[2 * i]) << 8) | bytes[2 * i + 1];
        values[i] = static_cast<double>(v) >= threshold ? 1 : 0;
    }
    return {shape, std::move(values)};
}

BinaryField read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw VgridError(Kind::io, "cannot open " + path.string());
    return read_pgm(in);
}

LabelGrid read_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw VgridError(Kind::io, "cannot open " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.clear();
    in.seekg(0);
    if (magic[0] == 'P' && magic[1] == '5') return LabelGrid::from_mask(read_pgm(in));
    auto content = read_vgrid(in);
    if (auto* labels = std::get_if<LabelGrid>(&content)) return std::move(*labels);
    throw VgridError(Kind::bad_dtype, path.string() + " holds a scalar field, expected integer labels");
}

}  // namespace vesseltop
