#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "error.hpp"

// Little-endian binary primitives shared by the file formats.
namespace cfv::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
inline T byteswap_if_big(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char* p = reinterpret_cast<unsigned char*>(&v);
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
    }
    return v;
}

template <typename T>
inline void write_le(std::ostream& os, T v) {
    v = byteswap_if_big(v);
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

inline void write_f32(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_le(os, bits);
}

inline void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_le(os, bits);
}

template <typename T>
inline T read_le(std::istream& is, const char* what) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    require(is.gcount() == sizeof(T), ErrorCode::data,
            std::string("truncated file while reading ") + what);
    return byteswap_if_big(v);
}

inline float read_f32(std::istream& is, const char* what) {
    std::uint32_t bits = read_le<std::uint32_t>(is, what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

inline double read_f64(std::istream& is, const char* what) {
    std::uint64_t bits = read_le<std::uint64_t>(is, what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

inline void write_magic(std::ostream& os, const char magic[4]) { os.write(magic, 4); }

inline void expect_magic(std::istream& is, const char magic[4], const char* format_name) {
    char buf[4] = {0, 0, 0, 0};
    is.read(buf, 4);
    require(is.gcount() == 4 && std::memcmp(buf, magic, 4) == 0, ErrorCode::data,
            std::string("bad magic: not a ") + format_name + " file");
}

}  // namespace cfv::io
