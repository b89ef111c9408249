#pragma once

#include <filesystem>
#include <vector>

#include "magnex/grid.hpp"

namespace magnex {

/// Contents of a MAGF field snapshot: a grid plus any number of scalar component planes.
///
/// Layout (all little-endian):
///   0..3   magic "MAGF"
///   4      version (1)
///   5      dtype code (1 = float64)
///   6..7   reserved, zero
///   u64 nx, ny, nz; f64 dx, dy, dz; f64 origin x, y, z; u64 component count
///   then each component plane in x-fastest order.
struct MagfData {
    GridSpec grid{};
    std::vector<std::vector<double>> components;
};

void write_magf(const std::filesystem::path& path, const MagfData& data);
MagfData read_magf(const std::filesystem::path& path);

void write_field(const std::filesystem::path& path, const VectorField3& field);
/// Reads a 3-component MAGF file into a vector field.
VectorField3 read_field(const std::filesystem::path& path);

}  // namespace magnex
