#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "maseg/errors.hpp"
#include "maseg/volume.hpp"

namespace maseg {

static_assert(std::endian::native == std::endian::little,
              "raw payloads are little-endian; big-endian hosts are not supported");

enum class ElementType { UInt8, Int16, UInt16, Float32 };

inline const char* element_type_name(ElementType t) {
    switch (t) {
        case ElementType::UInt8: return "MET_UCHAR";
        case ElementType::Int16: return "MET_SHORT";
        case ElementType::UInt16: return "MET_USHORT";
        case ElementType::Float32: return "MET_FLOAT";
    }
    return "";
}

inline std::size_t element_size(ElementType t) {
    return t == ElementType::Float32 ? 4 : (t == ElementType::UInt8 ? 1 : 2);
}

struct MhdHeader {
    std::string object_type = "Image";
    int n_dims = 3;
    Index3 dim_size{1, 1, 1};
    ElementType element_type = ElementType::Float32;
    Vec3 element_spacing{1.0, 1.0, 1.0};
    Vec3 offset{0.0, 0.0, 0.0};
    std::string element_data_file;
};

namespace detail {

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline MhdHeader parse_mhd_header(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileMissingError("cannot open header file: " + path.string());

    MhdHeader h;
    bool saw_dims = false, saw_type = false, saw_data_file = false;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw HeaderParseError("malformed header line in " + path.string() + ": '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw HeaderParseError("malformed header line in " + path.string() + ": '" + line + "'");

        std::istringstream vs(value);
        if (key == "ObjectType") {
            h.object_type = value;
        } else if (key == "NDims") {
            if (!(vs >> h.n_dims) || h.n_dims != 3)
                throw HeaderParseError("NDims must be 3 in " + path.string());
        } else if (key == "DimSize") {
            if (!(vs >> h.dim_size[0] >> h.dim_size[1] >> h.dim_size[2]) || h.dim_size[0] < 1 ||
                h.dim_size[1] < 1 || h.dim_size[2] < 1)
                throw HeaderParseError("invalid DimSize in " + path.string());
            saw_dims = true;
        } else if (key == "ElementType") {
            if (value == "MET_UCHAR") h.element_type = ElementType::UInt8;
            else if (value == "MET_SHORT") h.element_type = ElementType::Int16;
            else if (value == "MET_USHORT") h.element_type = ElementType::UInt16;
            else if (value == "MET_FLOAT") h.element_type = ElementType::Float32;
            else throw ElementTypeError("unknown ElementType '" + value + "' in " + path.string());
            saw_type = true;
        } else if (key == "ElementSpacing") {
            if (!(vs >> h.element_spacing[0] >> h.element_spacing[1] >> h.element_spacing[2]) ||
                !(h.element_spacing[0] > 0) || !(h.element_spacing[1] > 0) || !(h.element_spacing[2] > 0))
                throw HeaderParseError("invalid ElementSpacing in " + path.string());
        } else if (key == "Offset") {
            if (!(vs >> h.offset[0] >> h.offset[1] >> h.offset[2]))
                throw HeaderParseError("invalid Offset in " + path.string());
        } else if (key == "ElementDataFile") {
            h.element_data_file = value;
            saw_data_file = true;
        } else if (key == "CompressedData") {
            if (value == "True" || value == "true" || value == "1")
                throw CompressedUnsupportedError("compressed MetaImage not supported: " + path.string());
        }
        // other keys are ignored on read
    }
    if (!saw_dims || !saw_type || !saw_data_file)
        throw HeaderParseError("header missing DimSize, ElementType or ElementDataFile: " + path.string());
    return h;
}

inline std::vector<std::uint8_t> read_payload(const std::filesystem::path& header_path, const MhdHeader& h) {
    std::filesystem::path raw_path(h.element_data_file);
    if (raw_path.is_relative()) raw_path = header_path.parent_path() / raw_path;
    std::ifstream raw(raw_path, std::ios::binary);
    if (!raw) throw FileMissingError("cannot open raw file: " + raw_path.string());

    raw.seekg(0, std::ios::end);
    const std::size_t actual = static_cast<std::size_t>(raw.tellg());
    raw.seekg(0, std::ios::beg);

    const std::size_t expected = static_cast<std::size_t>(h.dim_size[0]) * h.dim_size[1] * h.dim_size[2] *
                                 element_size(h.element_type);
    if (actual != expected)
        throw SizeMismatchError("raw payload size mismatch for " + raw_path.string() + ": expected " +
                                std::to_string(expected) + " bytes, found " + std::to_string(actual));

    std::vector<std::uint8_t> bytes(actual);
    raw.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(actual));
    if (!raw) throw SizeMismatchError("short read from raw file: " + raw_path.string());
    return bytes;
}

} // namespace detail

// Reads a MetaImage volume; integer payloads widen to float.
inline Volume read_mhd(const std::filesystem::path& path) {
    const MhdHeader h = detail::parse_mhd_header(path);
    const auto bytes = detail::read_payload(path, h);

    const Grid grid(h.dim_size, h.element_spacing, h.offset);
    std::vector<float> data(grid.num_voxels());
    switch (h.element_type) {
        case ElementType::UInt8:
            for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(bytes[i]);
            break;
        case ElementType::Int16: {
            for (std::size_t i = 0; i < data.size(); ++i) {
                std::int16_t v;
                std::memcpy(&v, bytes.data() + 2 * i, 2);
                data[i] = static_cast<float>(v);
            }
            break;
        }
        case ElementType::UInt16: {
            for (std::size_t i = 0; i < data.size(); ++i) {
                std::uint16_t v;
                std::memcpy(&v, bytes.data() + 2 * i, 2);
                data[i] = static_cast<float>(v);
            }
            break;
        }
        case ElementType::Float32: {
            for (std::size_t i = 0; i < data.size(); ++i) {
                float v;
                std::memcpy(&v, bytes.data() + 4 * i, 4);
                if (!std::isfinite(v)) throw DegenerateInputError("non-finite value in " + path.string());
                data[i] = v;
            }
            break;
        }
    }
    return Volume(grid, std::move(data));
}

// Reads a uint8 MetaImage whose values are all 0/1 as a label volume.
inline LabelVolume read_mhd_label(const std::filesystem::path& path) {
    const MhdHeader h = detail::parse_mhd_header(path);
    if (h.element_type != ElementType::UInt8)
        throw ElementTypeError("label volumes must be MET_UCHAR: " + path.string());
    const auto bytes = detail::read_payload(path, h);
    for (auto b : bytes)
        if (b > 1) throw LabelRangeError("label payload has values outside {0,1}: " + path.string());
    return LabelVolume(Grid(h.dim_size, h.element_spacing, h.offset), bytes);
}

namespace detail {

inline void write_mhd_files(const Grid& grid, const std::filesystem::path& path, ElementType type,
                            const std::vector<std::uint8_t>& payload) {
    std::filesystem::path raw_path = path;
    raw_path.replace_extension(".raw");

    // Header keys in fixed order so output is byte-for-byte deterministic.
    std::ofstream hdr(path, std::ios::binary);
    if (!hdr) throw FileMissingError("cannot write header file: " + path.string());
    hdr << "ObjectType = Image\n";
    hdr << "NDims = 3\n";
    hdr << "DimSize = " << grid.dims[0] << " " << grid.dims[1] << " " << grid.dims[2] << "\n";
    hdr << "ElementType = " << element_type_name(type) << "\n";
    hdr << "ElementSpacing = " << format_g17(grid.spacing[0]) << " " << format_g17(grid.spacing[1]) << " "
        << format_g17(grid.spacing[2]) << "\n";
    hdr << "Offset = " << format_g17(grid.origin[0]) << " " << format_g17(grid.origin[1]) << " "
        << format_g17(grid.origin[2]) << "\n";
    hdr << "ElementDataFile = " << raw_path.filename().string() << "\n";
    if (!hdr) throw FileMissingError("failed writing header file: " + path.string());
    hdr.close();

    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw) throw FileMissingError("cannot write raw file: " + raw_path.string());
    raw.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!raw) throw FileMissingError("failed writing raw file: " + raw_path.string());
}

} // namespace detail

// Writes `vol` as <path> (.mhd header) plus a .raw sidecar with the same stem.
// Integer element types round to nearest and fail on out-of-range values.
inline void write_mhd(const Volume& vol, const std::filesystem::path& path,
                      ElementType type = ElementType::Float32) {
    const std::size_t n = vol.data.size();
    std::vector<std::uint8_t> payload(n * element_size(type));
    auto range_check = [&](double v, double lo, double hi) {
        if (v < lo || v > hi)
            throw ValueOverflowError("value " + std::to_string(v) + " not representable as " +
                                     element_type_name(type));
    };
    switch (type) {
        case ElementType::UInt8:
            for (std::size_t i = 0; i < n; ++i) {
                const double r = std::nearbyint(static_cast<double>(vol.data[i]));
                range_check(r, 0.0, 255.0);
                payload[i] = static_cast<std::uint8_t>(r);
            }
            break;
        case ElementType::Int16:
            for (std::size_t i = 0; i < n; ++i) {
                const double r = std::nearbyint(static_cast<double>(vol.data[i]));
                range_check(r, -32768.0, 32767.0);
                const std::int16_t v = static_cast<std::int16_t>(r);
                std::memcpy(payload.data() + 2 * i, &v, 2);
            }
            break;
        case ElementType::UInt16:
            for (std::size_t i = 0; i < n; ++i) {
                const double r = std::nearbyint(static_cast<double>(vol.data[i]));
                range_check(r, 0.0, 65535.0);
                const std::uint16_t v = static_cast<std::uint16_t>(r);
                std::memcpy(payload.data() + 2 * i, &v, 2);
            }
            break;
        case ElementType::Float32:
            std::memcpy(payload.data(), vol.data.data(), 4 * n);
            break;
    }
    detail::write_mhd_files(vol.grid, path, type, payload);
}

inline void write_mhd(const LabelVolume& lab, const std::filesystem::path& path) {
    detail::write_mhd_files(lab.grid, path, ElementType::UInt8, lab.data);
}

} // namespace maseg
