#include "magnex/magf.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "magnex/binary_io.hpp"
#include "magnex/error.hpp"

namespace magnex {

namespace {

constexpr std::array<char, 4> kMagic{'M', 'A', 'G', 'F'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kFloat64 = 1;

}  // namespace

void write_magf(const std::filesystem::path& path, const MagfData& data) {
    data.grid.validate();
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os.write(kMagic.data(), 4);
    io::put<std::uint8_t>(os, kVersion);
    io::put<std::uint8_t>(os, kFloat64);
    io::put<std::uint16_t>(os, 0);
    const GridSpec& g = data.grid;
    io::put<std::uint64_t>(os, static_cast<std::uint64_t>(g.nx));
    io::put<std::uint64_t>(os, static_cast<std::uint64_t>(g.ny));
    io::put<std::uint64_t>(os, static_cast<std::uint64_t>(g.nz));
    io::put(os, g.dx);
    io::put(os, g.dy);
    io::put(os, g.dz);
    io::put(os, g.origin.x);
    io::put(os, g.origin.y);
    io::put(os, g.origin.z);
    io::put<std::uint64_t>(os, data.components.size());
    for (const auto& comp : data.components) {
        if (comp.size() != g.cells()) throw Error("write_magf: component size does not match grid");
        io::put_array(os, comp.data(), comp.size());
    }
    if (!os) throw Error("write error on " + path.string());
}

MagfData read_magf(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), 4) || magic != kMagic) {
        throw Error(path.string() + ": not a MAGF file (bad magic)");
    }
    const auto version = io::get<std::uint8_t>(is, "version");
    if (version != kVersion) {
        throw Error(path.string() + ": unsupported MAGF version " + std::to_string(version));
    }
    const auto dtype = io::get<std::uint8_t>(is, "dtype");
    if (dtype != kFloat64) throw Error(path.string() + ": unsupported MAGF dtype code");
    (void)io::get<std::uint16_t>(is, "reserved");

    MagfData out;
    GridSpec& g = out.grid;
    g.nx = static_cast<std::int64_t>(io::get<std::uint64_t>(is, "nx"));
    g.ny = static_cast<std::int64_t>(io::get<std::uint64_t>(is, "ny"));
    g.nz = static_cast<std::int64_t>(io::get<std::uint64_t>(is, "nz"));
    g.dx = io::get<double>(is, "dx");
    g.dy = io::get<double>(is, "dy");
    g.dz = io::get<double>(is, "dz");
    g.origin.x = io::get<double>(is, "origin");
    g.origin.y = io::get<double>(is, "origin");
    g.origin.z = io::get<double>(is, "origin");
    g.validate();
    const auto ncomp = io::get<std::uint64_t>(is, "component count");
    if (ncomp > 64) throw Error(path.string() + ": implausible component count");
    out.components.resize(ncomp);
    for (std::uint64_t c = 0; c < ncomp; ++c) {
        out.components[c].resize(g.cells());
        io::get_array(is, out.components[c].data(), g.cells(), "component " + std::to_string(c));
    }
    return out;
}

void write_field(const std::filesystem::path& path, const VectorField3& field) {
    MagfData d;
    d.grid = field.grid();
    for (int c = 0; c < 3; ++c) {
        auto s = field.component(c);
        d.components.emplace_back(s.begin(), s.end());
    }
    write_magf(path, d);
}

VectorField3 read_field(const std::filesystem::path& path) {
    MagfData d = read_magf(path);
    if (d.components.size() != 3) {
        throw Error(path.string() + ": expected 3 components, found " +
                    std::to_string(d.components.size()));
    }
    VectorField3 f(d.grid);
    for (int c = 0; c < 3; ++c) std::ranges::copy(d.components[c], f.component(c).begin());
    return f;
}

}  // namespace magnex
