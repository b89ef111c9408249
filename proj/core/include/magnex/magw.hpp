#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace magnex {

enum class MagwDtype : std::uint8_t { F32 = 0, ComplexF32 = 1 };

/// One named tensor. Complex data is interleaved (re, im), so `data` holds 2x the element count.
struct MagwTensor {
    std::string name;
    std::vector<std::uint64_t> dims;
    MagwDtype dtype = MagwDtype::F32;
    std::vector<float> data;

    std::uint64_t elements() const;
};

/// Reference input and expected output of the full inference pipeline, both stored as three
/// component planes of ny*nx values, x fastest.
struct MagwParity {
    std::uint32_t nx = 0, ny = 0;
    std::vector<float> input;
    std::vector<float> expected;
};

/// MAGW weight container (little-endian):
///   "MAGW", u16 version, u32 tensor count,
///   per tensor: u16 name length, name bytes, u8 rank, u64 dims[rank], u8 dtype, data,
///   optional trailer: "PRTY", u32 nx, u32 ny, f32 input[3*ny*nx], f32 expected[3*ny*nx].
struct MagwFile {
    std::uint16_t version = 1;
    std::vector<MagwTensor> tensors;
    std::optional<MagwParity> parity;

    const MagwTensor* find(const std::string& name) const;
};

inline constexpr std::uint16_t kMagwVersion = 1;

MagwFile read_magw(const std::filesystem::path& path);
void write_magw(const std::filesystem::path& path, const MagwFile& file);

}  // namespace magnex
