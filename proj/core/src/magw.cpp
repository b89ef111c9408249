#include "magnex/magw.hpp"

#include <fstream>

#include "magnex/binary_io.hpp"
#include "magnex/error.hpp"

namespace magnex {

std::uint64_t MagwTensor::elements() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

const MagwTensor* MagwFile::find(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

MagwFile read_magw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open weight file '" + path.string() + "'");
    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != "MAGW") {
        throw Error("'" + path.string() + "' is not a MAGW file (bad magic)");
    }
    MagwFile f;
    f.version = io::get<std::uint16_t>(in, "version");
    if (f.version != kMagwVersion) {
        throw Error("unsupported MAGW version " + std::to_string(f.version));
    }
    const auto count = io::get<std::uint32_t>(in, "tensor count");
    for (std::uint32_t t = 0; t < count; ++t) {
        const std::string label = "tensor #" + std::to_string(t);
        MagwTensor ten;
        const auto len = io::get<std::uint16_t>(in, label + " name length");
        ten.name.resize(len);
        if (!in.read(ten.name.data(), len)) throw Error("unexpected end of file while reading " + label + " name");
        const std::string what = "tensor '" + ten.name + "'";
        const auto rank = io::get<std::uint8_t>(in, what + " rank");
        for (int r = 0; r < rank; ++r) ten.dims.push_back(io::get<std::uint64_t>(in, what + " dims"));
        const auto dtype = io::get<std::uint8_t>(in, what + " dtype");
        if (dtype > 1) throw Error(what + ": unknown dtype code " + std::to_string(dtype));
        ten.dtype = static_cast<MagwDtype>(dtype);
        const std::uint64_t n = ten.elements() * (ten.dtype == MagwDtype::ComplexF32 ? 2 : 1);
        if (n > (1ull << 32)) throw Error(what + ": implausible size");
        ten.data.resize(n);
        io::get_array(in, ten.data.data(), n, what + " data");
        f.tensors.push_back(std::move(ten));
    }
    char trailer[4];
    if (in.read(trailer, 4)) {
        if (std::string(trailer, 4) != "PRTY") throw Error("MAGW: unexpected trailer after tensors");
        MagwParity p;
        p.nx = io::get<std::uint32_t>(in, "parity nx");
        p.ny = io::get<std::uint32_t>(in, "parity ny");
        const std::size_t n = 3ull * p.nx * p.ny;
        p.input.resize(n);
        p.expected.resize(n);
        io::get_array(in, p.input.data(), n, "parity input");
        io::get_array(in, p.expected.data(), n, "parity expected output");
        f.parity = std::move(p);
    } else if (in.gcount() != 0) {
        throw Error("unexpected end of file while reading the parity trailer");
    }
    return f;
}

void write_magw(const std::filesystem::path& path, const MagwFile& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out.write("MAGW", 4);
    io::put<std::uint16_t>(out, f.version);
    io::put<std::uint32_t>(out, static_cast<std::uint32_t>(f.tensors.size()));
    for (const auto& t : f.tensors) {
        io::put<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        io::put<std::uint8_t>(out, static_cast<std::uint8_t>(t.dims.size()));
        for (auto d : t.dims) io::put<std::uint64_t>(out, d);
        io::put<std::uint8_t>(out, static_cast<std::uint8_t>(t.dtype));
        io::put_array(out, t.data.data(), t.data.size());
    }
    if (f.parity) {
        out.write("PRTY", 4);
        io::put<std::uint32_t>(out, f.parity->nx);
        io::put<std::uint32_t>(out, f.parity->ny);
        io::put_array(out, f.parity->input.data(), f.parity->input.size());
        io::put_array(out, f.parity->expected.data(), f.parity->expected.size());
    }
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace magnex
