#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <memory>
#include <vector>

#include "magnex/demag.hpp"
#include "magnex/grid.hpp"
#include "magnex/magw.hpp"

namespace magnex {

enum class Activation : int { Identity = 0, Gelu = 1, GeluTanh = 2, Relu = 3 };

double activate(Activation a, double x);

/// Per-channel affine normalization x' = (x - mean) / std.
struct ChannelNormalizer {
    std::array<double, 3> in_mean{}, in_std{1, 1, 1};
    std::array<double, 3> out_mean{}, out_std{1, 1, 1};

    void validate() const;
    double normalize(int c, double x) const { return (x - in_mean[c]) / in_std[c]; }
    double denormalize_input(int c, double x) const { return x * in_std[c] + in_mean[c]; }
    double denormalize(int c, double y) const { return y * out_std[c] + out_mean[c]; }
};

/// Filters of one spectral block: weights indexed (in, out, ky, kx), kx over the half-spectrum
/// axis (W = nx), rows 0..m1-1 of the H = ny axis in `low` and rows ny-m1..ny-1 in `high`.
struct SpectralWeights {
    int in = 0, out = 0, m1 = 0, m2 = 0;
    std::vector<std::complex<double>> low, high;

    std::complex<double>& at(std::vector<std::complex<double>>& w, int i, int o, int ky, int kx) {
        return w[((static_cast<std::size_t>(i) * out + o) * m1 + ky) * m2 + kx];
    }
    const std::complex<double>& at(const std::vector<std::complex<double>>& w, int i, int o, int ky,
                                   int kx) const {
        return w[((static_cast<std::size_t>(i) * out + o) * m1 + ky) * m2 + kx];
    }
};

/// Pointwise affine map y = W x + b with W stored (out, in).
struct PointwiseLinear {
    int in = 0, out = 0;
    std::vector<double> weight, bias;
};

struct FnoBlock {
    SpectralWeights spectral;
    PointwiseLinear local;
};

/// 2-D Fourier neural operator: lift -> blocks (spectral + local, activation between blocks)
/// -> projection.
struct FnoModel {
    int width = 0, modes1 = 0, modes2 = 0;
    Activation activation = Activation::Gelu;
    PointwiseLinear lift, proj;
    std::vector<FnoBlock> blocks;
    ChannelNormalizer normalizer;

    /// Throws on inconsistent shapes or non-finite weights.
    void validate() const;
    /// Throws if an ny x nx plane cannot hold the retained modes.
    void check_extent(std::int64_t nx, std::int64_t ny) const;
};

/// Converts between the solver layout (component planes, x fastest) and the model's
/// (batch = 1, H = ny, W = nx, C = 3) channel-last tensor.
struct LayoutAdapter {
    static std::vector<double> to_tensor(const VectorField3& f);
    static VectorField3 from_tensor(const std::vector<double>& t, const GridSpec& grid);
};

/// Latent tensor (C, H, W), row-major.
struct Latent {
    int channels = 0, h = 0, w = 0;
    std::vector<double> data;

    double& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * h + y) * w + x]; }
    double at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * h + y) * w + x]; }
};

/// FFT plans and scratch for one (channels, H, W) shape. Not shareable across threads.
class FnoWorkspace {
public:
    FnoWorkspace(int channels, int h, int w);
    ~FnoWorkspace();
    FnoWorkspace(const FnoWorkspace&) = delete;
    FnoWorkspace& operator=(const FnoWorkspace&) = delete;

    int channels() const { return channels_; }
    int h() const { return h_; }
    int w() const { return w_; }

    /// Truncated spectral convolution: rfft2, multiply retained modes, irfft2.
    void spectral_conv(const Latent& x, const SpectralWeights& weights, Latent& out);

private:
    struct Plans;
    int channels_, h_, w_;
    std::unique_ptr<Plans> plans_;
};

Latent spectral_conv(const Latent& x, const SpectralWeights& weights);

/// Builds the model from MAGW tensors; does not run the parity check.
FnoModel model_from_magw(const MagwFile& file);
/// Reads, validates and parity-checks a MAGW file (relative L∞ tolerance on the embedded pair).
FnoModel load_model(const std::filesystem::path& path, double parity_tol = 1e-5);
/// Relative L∞ error of the model against the embedded parity pair.
double parity_error(const FnoModel& model, const MagwParity& parity);

/// H_demag predicted from M (A/m in, A/m out). Requires nz == 1.
VectorField3 infer_demag(const VectorField3& m, const FnoModel& model);
void infer_demag(const VectorField3& m, const FnoModel& model, FnoWorkspace& ws, VectorField3& out);

/// Serializes a model (with an optional parity pair) to MAGW tensors.
MagwFile model_to_magw(const FnoModel& model);

class FnoDemagBackend final : public DemagBackend {
public:
    FnoDemagBackend(std::shared_ptr<const FnoModel> model, const GridSpec& grid);
    void compute(const VectorField3& m, VectorField3& out) override;
    std::string name() const override { return "nn"; }

private:
    std::shared_ptr<const FnoModel> model_;
    FnoWorkspace ws_;
};

}  // namespace magnex
