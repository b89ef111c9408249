#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "magnex/demag_tensor.hpp"
#include "magnex/grid.hpp"

namespace magnex {

struct DemagOptions {
    TensorFlavor flavor = TensorFlavor::Newell;
    double far_field_diagonals = kDefaultFarFieldDiagonals;
    /// Directory for the kernel cache; empty disables caching.
    std::filesystem::path cache_dir;
};

/// Padded extent along one axis: 2n for n > 1, 1 for a single layer.
std::int64_t padded_extent(std::int64_t n);

/// Real-space tensor blocks for every displacement with non-negative components
/// (0..nx-1, 0..ny-1, 0..nz-1), six planes in xx, yy, zz, xy, xz, yz order.
std::array<std::vector<double>, 6> tensor_octant(const GridSpec& grid, const DemagOptions& opt);

/// Tensor block for an arbitrary displacement, obtained from the octant by parity.
TensorElements octant_lookup(const std::array<std::vector<double>, 6>& octant,
                             const GridSpec& grid, std::int64_t I, std::int64_t J,
                             std::int64_t K);

/// Demag tensor spectrum on the zero-padded grid plus the FFT workspace.
/// Not shareable across concurrent calls; build one instance per thread.
class DemagKernel {
public:
    explicit DemagKernel(const GridSpec& grid, const DemagOptions& opt = {});
    ~DemagKernel();
    DemagKernel(const DemagKernel&) = delete;
    DemagKernel& operator=(const DemagKernel&) = delete;

    const GridSpec& grid() const { return grid_; }
    std::array<std::int64_t, 3> padded_dims() const { return {px_, py_, pz_}; }
    /// Real part of the kernel spectrum of component c; the imaginary part vanishes by symmetry.
    const std::vector<double>& spectrum(int c) const { return spectrum_[c]; }
    /// True when the real-space tensor came from the cache file.
    bool loaded_from_cache() const { return from_cache_; }

    /// H = N * M on the unpadded grid.
    void apply(const VectorField3& m, VectorField3& out);

private:
    struct Plans;

    GridSpec grid_;
    std::int64_t px_, py_, pz_, nc_;
    std::array<std::vector<double>, 6> spectrum_;
    std::unique_ptr<Plans> plans_;
    bool from_cache_ = false;
};

/// Brute-force O(N²) convolution with the same tensor. Refuses grids above 4096 cells.
VectorField3 demag_field_direct(const VectorField3& m, const DemagOptions& opt = {});

/// Applies an existing kernel to `m`.
VectorField3 demag_field_fft(const VectorField3& m, DemagKernel& kernel);

/// Source of the demagnetizing field inside the solver.
class DemagBackend {
public:
    virtual ~DemagBackend() = default;
    virtual void compute(const VectorField3& m, VectorField3& out) = 0;
    virtual std::string name() const = 0;
};

class FftDemagBackend final : public DemagBackend {
public:
    explicit FftDemagBackend(const GridSpec& grid, const DemagOptions& opt = {})
        : kernel_(grid, opt) {}
    void compute(const VectorField3& m, VectorField3& out) override { kernel_.apply(m, out); }
    std::string name() const override { return "fft"; }
    DemagKernel& kernel() { return kernel_; }

private:
    DemagKernel kernel_;
};

/// Thread count used by FFT plans created after this call.
void set_fft_threads(int n);

}  // namespace magnex
