#include "magnex/fno.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "magnex/config.hpp"
#include "magnex/error.hpp"

namespace magnex {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::vector<double> real_tensor(const MagwFile& f, const std::string& name,
                                const std::vector<std::uint64_t>& dims) {
    const MagwTensor* t = f.find(name);
    if (!t) throw Error("weight file is missing tensor '" + name + "'");
    if (t->dtype != MagwDtype::F32) throw Error("tensor '" + name + "' must be f32");
    // Trailing unit dimensions (1x1 convolution kernels) are accepted.
    std::vector<std::uint64_t> got = t->dims;
    while (got.size() > dims.size() && got.back() == 1) got.pop_back();
    if (got != dims) {
        std::string want, have;
        for (auto d : dims) want += std::to_string(d) + " ";
        for (auto d : t->dims) have += std::to_string(d) + " ";
        throw Error("tensor '" + name + "' has shape [ " + have + "], expected [ " + want + "]");
    }
    return {t->data.begin(), t->data.end()};
}

std::vector<std::complex<double>> complex_tensor(const MagwFile& f, const std::string& name,
                                                 const std::vector<std::uint64_t>& dims) {
    const MagwTensor* t = f.find(name);
    if (!t) throw Error("weight file is missing tensor '" + name + "'");
    if (t->dtype != MagwDtype::ComplexF32) throw Error("tensor '" + name + "' must be complex f32");
    if (t->dims != dims) throw Error("tensor '" + name + "' has an unexpected shape");
    std::vector<std::complex<double>> out(t->elements());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {t->data[2 * i], t->data[2 * i + 1]};
    return out;
}

MagwTensor make_real(const std::string& name, std::vector<std::uint64_t> dims, const std::vector<double>& v) {
    MagwTensor t;
    t.name = name;
    t.dims = std::move(dims);
    t.data.assign(v.begin(), v.end());
    return t;
}

MagwTensor make_complex(const std::string& name, std::vector<std::uint64_t> dims,
                        const std::vector<std::complex<double>>& v) {
    MagwTensor t;
    t.name = name;
    t.dims = std::move(dims);
    t.dtype = MagwDtype::ComplexF32;
    t.data.reserve(2 * v.size());
    for (const auto& z : v) {
        t.data.push_back(static_cast<float>(z.real()));
        t.data.push_back(static_cast<float>(z.imag()));
    }
    return t;
}

void check_finite(const std::vector<double>& v, const std::string& what) {
    if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
        throw Error("non-finite weights in " + what);
    }
}

void pointwise(const PointwiseLinear& p, const Latent& x, Latent& out, bool accumulate) {
    const std::size_t hw = static_cast<std::size_t>(x.h) * x.w;
    if (!accumulate) {
        out.channels = p.out;
        out.h = x.h;
        out.w = x.w;
        out.data.assign(static_cast<std::size_t>(p.out) * hw, 0.0);
    }
#pragma omp parallel for schedule(static)
    for (int o = 0; o < p.out; ++o) {
        double* dst = out.data.data() + o * hw;
        const double b = p.bias[o];
        for (std::size_t k = 0; k < hw; ++k) dst[k] += b;
        for (int i = 0; i < p.in; ++i) {
            const double w = p.weight[static_cast<std::size_t>(o) * p.in + i];
            const double* src = x.data.data() + i * hw;
            for (std::size_t k = 0; k < hw; ++k) dst[k] += w * src[k];
        }
    }
}

}  // namespace

double activate(Activation a, double x) {
    switch (a) {
        case Activation::Identity: return x;
        case Activation::Gelu: return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
        case Activation::GeluTanh: {
            const double c = std::sqrt(2.0 / kPi);
            return 0.5 * x * (1.0 + std::tanh(c * (x + 0.044715 * x * x * x)));
        }
        case Activation::Relu: return x > 0.0 ? x : 0.0;
    }
    return x;
}

void ChannelNormalizer::validate() const {
    for (int c = 0; c < 3; ++c) {
        if (!(in_std[c] > 0.0) || !(out_std[c] > 0.0)) throw Error("normalizer: std must be positive");
        if (!std::isfinite(in_mean[c]) || !std::isfinite(out_mean[c]) || !std::isfinite(in_std[c]) ||
            !std::isfinite(out_std[c])) {
            throw Error("normalizer: non-finite statistics");
        }
    }
}

void FnoModel::validate() const {
    if (width <= 0 || modes1 <= 0 || modes2 <= 0 || blocks.empty()) throw Error("fno: empty model");
    if (lift.in != 3 || lift.out != width) throw Error("fno: lifting must map 3 -> width channels");
    if (proj.in != width || proj.out != 3) throw Error("fno: projection must map width -> 3 channels");
    check_finite(lift.weight, "lift");
    check_finite(lift.bias, "lift");
    check_finite(proj.weight, "proj");
    check_finite(proj.bias, "proj");
    for (std::size_t l = 0; l < blocks.size(); ++l) {
        const auto& b = blocks[l];
        const std::string tag = "block " + std::to_string(l);
        if (b.spectral.in != width || b.spectral.out != width || b.spectral.m1 != modes1 ||
            b.spectral.m2 != modes2) {
            throw Error("fno: spectral weights of " + tag + " have inconsistent shape");
        }
        if (b.local.in != width || b.local.out != width) throw Error("fno: local path of " + tag + " has inconsistent shape");
        for (const auto* w : {&b.spectral.low, &b.spectral.high}) {
            for (const auto& z : *w) {
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw Error("non-finite weights in " + tag);
            }
        }
        check_finite(b.local.weight, tag);
        check_finite(b.local.bias, tag);
    }
    normalizer.validate();
}

void FnoModel::check_extent(std::int64_t nx, std::int64_t ny) const {
    if (ny < 2 * modes1 || nx < 2 * modes2) {
        throw Error("fno: grid " + std::to_string(nx) + " x " + std::to_string(ny) +
                    " is too small for " + std::to_string(modes2) + " x " + std::to_string(modes1) +
                    " retained modes (need at least twice the mode count per axis)");
    }
}

std::vector<double> LayoutAdapter::to_tensor(const VectorField3& f) {
    const GridSpec& g = f.grid();
    if (g.nz != 1) throw Error("layout adapter: the 2-D model needs nz = 1");
    const std::size_t n = f.cells();
    std::vector<double> t(3 * n);
    for (int c = 0; c < 3; ++c) {
        const auto src = f.component(c);
        for (std::size_t p = 0; p < n; ++p) t[3 * p + c] = src[p];
    }
    return t;
}

VectorField3 LayoutAdapter::from_tensor(const std::vector<double>& t, const GridSpec& grid) {
    if (grid.nz != 1) throw Error("layout adapter: the 2-D model needs nz = 1");
    VectorField3 f(grid);
    const std::size_t n = f.cells();
    if (t.size() != 3 * n) throw Error("layout adapter: tensor size does not match the grid");
    for (int c = 0; c < 3; ++c) {
        auto dst = f.component(c);
        for (std::size_t p = 0; p < n; ++p) dst[p] = t[3 * p + c];
    }
    return f;
}

struct FnoWorkspace::Plans {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_complex* outspec = nullptr;
    fftw_plan r2c = nullptr, cols_fwd = nullptr, cols_bwd = nullptr, c2r = nullptr;
    int m2 = -1;

    ~Plans() {
        for (fftw_plan p : {r2c, cols_fwd, cols_bwd, c2r}) {
            if (p) fftw_destroy_plan(p);
        }
        fftw_free(real);
        fftw_free(spec);
        fftw_free(outspec);
    }
};

FnoWorkspace::FnoWorkspace(int channels, int h, int w)
    : channels_(channels), h_(h), w_(w), plans_(std::make_unique<Plans>()) {
    if (channels <= 0 || h <= 0 || w <= 0) throw Error("fno workspace: invalid shape");
    const int wc = w / 2 + 1;
    const std::size_t nreal = static_cast<std::size_t>(channels) * h * w;
    const std::size_t nspec = static_cast<std::size_t>(channels) * h * wc;
    plans_->real = fftw_alloc_real(nreal);
    plans_->spec = fftw_alloc_complex(nspec);
    plans_->outspec = fftw_alloc_complex(nspec);
    const int rows = channels * h;
    plans_->r2c = fftw_plan_many_dft_r2c(1, &w, rows, plans_->real, nullptr, 1, w, plans_->spec,
                                         nullptr, 1, wc, FFTW_ESTIMATE);
    plans_->c2r = fftw_plan_many_dft_c2r(1, &w, rows, plans_->outspec, nullptr, 1, wc, plans_->real,
                                         nullptr, 1, w, FFTW_ESTIMATE);
    if (!plans_->r2c || !plans_->c2r) throw Error("fno workspace: FFT plan creation failed");
}

FnoWorkspace::~FnoWorkspace() = default;

void FnoWorkspace::spectral_conv(const Latent& x, const SpectralWeights& wts, Latent& out) {
    if (x.channels != channels_ || x.h != h_ || x.w != w_) throw Error("spectral_conv: latent shape mismatch");
    if (wts.in != channels_ || wts.out != channels_) throw Error("spectral_conv: weight channels mismatch");
    const int wc = w_ / 2 + 1;
    const int m1 = wts.m1, m2 = wts.m2;
    if (2 * m1 > h_ || m2 > wc) throw Error("spectral_conv: retained modes exceed the grid spectrum");
    Plans& p = *plans_;
    if (p.m2 != m2) {
        // Column transforms along H only for the retained kx < m2 columns.
        for (fftw_plan* pl : {&p.cols_fwd, &p.cols_bwd}) {
            if (*pl) fftw_destroy_plan(*pl);
        }
        fftw_iodim dim{h_, wc, wc};
        fftw_iodim many[2] = {{channels_, h_ * wc, h_ * wc}, {m2, 1, 1}};
        p.cols_fwd = fftw_plan_guru_dft(1, &dim, 2, many, p.spec, p.spec, FFTW_FORWARD, FFTW_ESTIMATE);
        p.cols_bwd = fftw_plan_guru_dft(1, &dim, 2, many, p.outspec, p.outspec, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!p.cols_fwd || !p.cols_bwd) throw Error("fno workspace: FFT plan creation failed");
        p.m2 = m2;
    }

    std::copy(x.data.begin(), x.data.end(), p.real);
    fftw_execute(p.r2c);
    fftw_execute(p.cols_fwd);

    const std::size_t nspec = static_cast<std::size_t>(channels_) * h_ * wc;
    std::memset(p.outspec, 0, nspec * sizeof(fftw_complex));
    auto spec = reinterpret_cast<const std::complex<double>*>(p.spec);
    auto outspec = reinterpret_cast<std::complex<double>*>(p.outspec);
    const int C = channels_;
#pragma omp parallel for schedule(static)
    for (int o = 0; o < C; ++o) {
        for (int r = 0; r < 2 * m1; ++r) {
            const bool low = r < m1;
            const int ky = low ? r : h_ - 2 * m1 + r;
            const int wrow = low ? r : r - m1;
            const auto& w = low ? wts.low : wts.high;
            std::complex<double>* dst = outspec + (static_cast<std::size_t>(o) * h_ + ky) * wc;
            for (int i = 0; i < C; ++i) {
                const std::complex<double>* src = spec + (static_cast<std::size_t>(i) * h_ + ky) * wc;
                for (int kx = 0; kx < m2; ++kx) dst[kx] += src[kx] * wts.at(w, i, o, wrow, kx);
            }
        }
    }

    fftw_execute(p.cols_bwd);
    fftw_execute(p.c2r);
    out.channels = C;
    out.h = h_;
    out.w = w_;
    out.data.resize(static_cast<std::size_t>(C) * h_ * w_);
    const double scale = 1.0 / (static_cast<double>(h_) * w_);
    for (std::size_t k = 0; k < out.data.size(); ++k) out.data[k] = p.real[k] * scale;
}

Latent spectral_conv(const Latent& x, const SpectralWeights& weights) {
    FnoWorkspace ws(x.channels, x.h, x.w);
    Latent out;
    ws.spectral_conv(x, weights, out);
    return out;
}

FnoModel model_from_magw(const MagwFile& f) {
    FnoModel m;
    const MagwTensor* w1 = f.find("blocks.0.spectral.weights1");
    if (!w1) throw Error("weight file is missing tensor 'blocks.0.spectral.weights1'");
    if (w1->dims.size() != 4) throw Error("tensor 'blocks.0.spectral.weights1' must have rank 4");
    m.width = static_cast<int>(w1->dims[0]);
    m.modes1 = static_cast<int>(w1->dims[2]);
    m.modes2 = static_cast<int>(w1->dims[3]);
    const auto W = static_cast<std::uint64_t>(m.width);
    const auto M1 = static_cast<std::uint64_t>(m.modes1);
    const auto M2 = static_cast<std::uint64_t>(m.modes2);

    if (const MagwTensor* act = f.find("meta.activation")) {
        if (act->data.size() != 1) throw Error("tensor 'meta.activation' must hold one value");
        const int code = static_cast<int>(act->data[0]);
        if (code < 0 || code > 3) throw Error("unknown activation code " + std::to_string(code));
        m.activation = static_cast<Activation>(code);
    }
    m.lift = {3, m.width, real_tensor(f, "lift.weight", {W, 3}), real_tensor(f, "lift.bias", {W})};
    m.proj = {m.width, 3, real_tensor(f, "proj.weight", {3, W}), real_tensor(f, "proj.bias", {3})};

    int layers = 0;
    while (f.find("blocks." + std::to_string(layers) + ".spectral.weights1")) ++layers;
    for (int l = 0; l < layers; ++l) {
        const std::string pre = "blocks." + std::to_string(l) + ".";
        FnoBlock b;
        b.spectral.in = b.spectral.out = m.width;
        b.spectral.m1 = m.modes1;
        b.spectral.m2 = m.modes2;
        b.spectral.low = complex_tensor(f, pre + "spectral.weights1", {W, W, M1, M2});
        b.spectral.high = complex_tensor(f, pre + "spectral.weights2", {W, W, M1, M2});
        b.local = {m.width, m.width, real_tensor(f, pre + "local.weight", {W, W}),
                   real_tensor(f, pre + "local.bias", {W})};
        m.blocks.push_back(std::move(b));
    }
    auto stats = [&](const std::string& name) {
        const auto v = real_tensor(f, name, {3});
        return std::array<double, 3>{v[0], v[1], v[2]};
    };
    m.normalizer.in_mean = stats("norm.in.mean");
    m.normalizer.in_std = stats("norm.in.std");
    m.normalizer.out_mean = stats("norm.out.mean");
    m.normalizer.out_std = stats("norm.out.std");
    m.validate();
    return m;
}

MagwFile model_to_magw(const FnoModel& m) {
    MagwFile f;
    const auto W = static_cast<std::uint64_t>(m.width);
    const auto M1 = static_cast<std::uint64_t>(m.modes1);
    const auto M2 = static_cast<std::uint64_t>(m.modes2);
    f.tensors.push_back(make_real("meta.activation", {1}, {static_cast<double>(m.activation)}));
    f.tensors.push_back(make_real("lift.weight", {W, 3}, m.lift.weight));
    f.tensors.push_back(make_real("lift.bias", {W}, m.lift.bias));
    for (std::size_t l = 0; l < m.blocks.size(); ++l) {
        const std::string pre = "blocks." + std::to_string(l) + ".";
        f.tensors.push_back(make_complex(pre + "spectral.weights1", {W, W, M1, M2}, m.blocks[l].spectral.low));
        f.tensors.push_back(make_complex(pre + "spectral.weights2", {W, W, M1, M2}, m.blocks[l].spectral.high));
        f.tensors.push_back(make_real(pre + "local.weight", {W, W}, m.blocks[l].local.weight));
        f.tensors.push_back(make_real(pre + "local.bias", {W}, m.blocks[l].local.bias));
    }
    f.tensors.push_back(make_real("proj.weight", {3, W}, m.proj.weight));
    f.tensors.push_back(make_real("proj.bias", {3}, m.proj.bias));
    const auto& n = m.normalizer;
    f.tensors.push_back(make_real("norm.in.mean", {3}, {n.in_mean.begin(), n.in_mean.end()}));
    f.tensors.push_back(make_real("norm.in.std", {3}, {n.in_std.begin(), n.in_std.end()}));
    f.tensors.push_back(make_real("norm.out.mean", {3}, {n.out_mean.begin(), n.out_mean.end()}));
    f.tensors.push_back(make_real("norm.out.std", {3}, {n.out_std.begin(), n.out_std.end()}));
    return f;
}

void infer_demag(const VectorField3& m, const FnoModel& model, FnoWorkspace& ws, VectorField3& out) {
    const GridSpec& g = m.grid();
    if (g.nz != 1) throw Error("fno: the 2-D surrogate needs nz = 1, got nz = " + std::to_string(g.nz));
    model.check_extent(g.nx, g.ny);
    const int H = static_cast<int>(g.ny), W = static_cast<int>(g.nx);
    if (ws.channels() != model.width || ws.h() != H || ws.w() != W) throw Error("fno: workspace shape mismatch");

    const std::vector<double> in = LayoutAdapter::to_tensor(m);
    const std::size_t hw = static_cast<std::size_t>(H) * W;
    Latent x{3, H, W, std::vector<double>(3 * hw)};
    for (std::size_t p = 0; p < hw; ++p) {
        for (int c = 0; c < 3; ++c) x.data[c * hw + p] = model.normalizer.normalize(c, in[3 * p + c]);
    }
    Latent z, s;
    pointwise(model.lift, x, z, false);
    for (std::size_t l = 0; l < model.blocks.size(); ++l) {
        ws.spectral_conv(z, model.blocks[l].spectral, s);
        pointwise(model.blocks[l].local, z, s, true);
        if (l + 1 < model.blocks.size()) {
            for (double& v : s.data) v = activate(model.activation, v);
        }
        std::swap(z, s);
    }
    Latent y;
    pointwise(model.proj, z, y, false);
    std::vector<double> t(3 * hw);
    for (std::size_t p = 0; p < hw; ++p) {
        for (int c = 0; c < 3; ++c) t[3 * p + c] = model.normalizer.denormalize(c, y.data[c * hw + p]);
    }
    out = LayoutAdapter::from_tensor(t, g);
}

VectorField3 infer_demag(const VectorField3& m, const FnoModel& model) {
    FnoWorkspace ws(model.width, static_cast<int>(m.grid().ny), static_cast<int>(m.grid().nx));
    VectorField3 out;
    infer_demag(m, model, ws, out);
    return out;
}

double parity_error(const FnoModel& model, const MagwParity& p) {
    const GridSpec g(p.nx, p.ny, 1, 1.0, 1.0, 1.0);
    VectorField3 m(g);
    if (p.input.size() != m.data().size() || p.expected.size() != m.data().size()) {
        throw Error("parity pair size does not match its grid");
    }
    std::copy(p.input.begin(), p.input.end(), m.data().begin());
    const VectorField3 h = infer_demag(m, model);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < p.expected.size(); ++i) {
        diff = std::max(diff, std::abs(h.data()[i] - static_cast<double>(p.expected[i])));
        scale = std::max(scale, std::abs(static_cast<double>(p.expected[i])));
    }
    return scale > 0.0 ? diff / scale : diff;
}

FnoModel load_model(const std::filesystem::path& path, double parity_tol) {
    const MagwFile f = read_magw(path);
    FnoModel m = model_from_magw(f);
    if (!f.parity) throw Error("weight file '" + path.string() + "' has no embedded parity pair");
    const double err = parity_error(m, *f.parity);
    if (!(err <= parity_tol)) {
        throw Error("weight file '" + path.string() + "' fails its parity check: relative error " +
                    std::to_string(err) + " > " + std::to_string(parity_tol));
    }
    return m;
}

FnoDemagBackend::FnoDemagBackend(std::shared_ptr<const FnoModel> model, const GridSpec& grid)
    : model_(std::move(model)),
      ws_(model_->width, static_cast<int>(grid.ny), static_cast<int>(grid.nx)) {
    if (grid.nz != 1) throw Error("fno backend: the 2-D surrogate needs nz = 1");
    model_->check_extent(grid.nx, grid.ny);
}

void FnoDemagBackend::compute(const VectorField3& m, VectorField3& out) { infer_demag(m, *model_, ws_, out); }

std::unique_ptr<DemagBackend> make_demag_backend(const ScenarioConfig& cfg) {
    if (cfg.demag.backend == DemagBackendKind::Nn) {
        if (cfg.demag.model.empty()) throw Error("demag.backend = nn needs demag.model");
        auto model = std::make_shared<const FnoModel>(load_model(cfg.demag.model));
        return std::make_unique<FnoDemagBackend>(std::move(model), cfg.grid);
    }
    return std::make_unique<FftDemagBackend>(cfg.grid, cfg.demag.options);
}

}  // namespace magnex
