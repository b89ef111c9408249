#include "magnex/demag.hpp"

#include <fftw3.h>

#include <cstdio>
#include <functional>
#include <mutex>
#include <sstream>

#include "magnex/error.hpp"
#include "magnex/magf.hpp"

namespace magnex {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

int& fft_threads() {
    static int n = 1;
    return n;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwPtr = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwPtr<T> fftw_alloc(std::size_t n) {
    void* p = fftw_malloc(sizeof(T) * n);
    if (p == nullptr) throw Error("FFT buffer allocation failed");
    return FftwPtr<T>(static_cast<T*>(p));
}

std::string cache_key(const GridSpec& g, const DemagOptions& opt) {
    std::ostringstream os;
    os << (opt.flavor == TensorFlavor::Newell ? "newell" : "point") << ':' << g.nx << 'x' << g.ny
       << 'x' << g.nz << ':' << std::hexfloat << g.dx << ',' << g.dy << ',' << g.dz << ':'
       << opt.far_field_diagonals;
    std::ostringstream name;
    name << "demag_" << g.nx << 'x' << g.ny << 'x' << g.nz << '_' << std::hex
         << std::hash<std::string>{}(os.str()) << ".magf";
    return name.str();
}

std::int64_t wrap_displacement(std::int64_t p, std::int64_t n, std::int64_t P, bool* valid) {
    *valid = true;
    if (P == 1) return 0;
    if (p < n) return p;
    if (p == n) {
        *valid = false;
        return 0;
    }
    return p - P;
}

}  // namespace

std::int64_t padded_extent(std::int64_t n) { return n > 1 ? 2 * n : 1; }

void set_fft_threads(int n) {
    std::lock_guard lock(planner_mutex());
    static bool initialized = false;
    if (!initialized) {
        if (fftw_init_threads() == 0) throw Error("FFTW thread initialization failed");
        initialized = true;
    }
    fft_threads() = n < 1 ? 1 : n;
}

std::array<std::vector<double>, 6> tensor_octant(const GridSpec& g, const DemagOptions& opt) {
    std::array<std::vector<double>, 6> out;
    for (auto& v : out) v.assign(g.cells(), 0.0);
    const auto n = static_cast<std::int64_t>(g.cells());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t idx = 0; idx < n; ++idx) {
        const std::int64_t i = idx % g.nx;
        const std::int64_t j = (idx / g.nx) % g.ny;
        const std::int64_t k = idx / (g.nx * g.ny);
        const TensorElements t =
            tensor_elements(i, j, k, g.dx, g.dy, g.dz, opt.flavor, opt.far_field_diagonals);
        for (int c = 0; c < 6; ++c) out[c][static_cast<std::size_t>(idx)] = t[c];
    }
    return out;
}

TensorElements octant_lookup(const std::array<std::vector<double>, 6>& o, const GridSpec& g,
                             std::int64_t I, std::int64_t J, std::int64_t K) {
    const double sx = I < 0 ? -1.0 : 1.0;
    const double sy = J < 0 ? -1.0 : 1.0;
    const double sz = K < 0 ? -1.0 : 1.0;
    const std::size_t idx = g.index(I < 0 ? -I : I, J < 0 ? -J : J, K < 0 ? -K : K);
    TensorElements t;
    t.xx = o[0][idx];
    t.yy = o[1][idx];
    t.zz = o[2][idx];
    t.xy = sx * sy * o[3][idx];
    t.xz = sx * sz * o[4][idx];
    t.yz = sy * sz * o[5][idx];
    return t;
}

struct DemagKernel::Plans {
    FftwPtr<double> real[3];
    FftwPtr<fftw_complex> spec[3];
    fftw_plan forward[3]{};
    fftw_plan backward[3]{};

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        for (int c = 0; c < 3; ++c) {
            if (forward[c] != nullptr) fftw_destroy_plan(forward[c]);
            if (backward[c] != nullptr) fftw_destroy_plan(backward[c]);
        }
    }
};

DemagKernel::DemagKernel(const GridSpec& grid, const DemagOptions& opt)
    : grid_(grid),
      px_(padded_extent(grid.nx)),
      py_(padded_extent(grid.ny)),
      pz_(padded_extent(grid.nz)),
      nc_(padded_extent(grid.nx) / 2 + 1) {
    grid_.validate();
    const std::size_t nreal = static_cast<std::size_t>(px_ * py_ * pz_);
    const std::size_t nspec = static_cast<std::size_t>(nc_ * py_ * pz_);
    plans_ = std::make_unique<Plans>();
    {
        std::lock_guard lock(planner_mutex());
        fftw_plan_with_nthreads(fft_threads());
        for (int c = 0; c < 3; ++c) {
            plans_->real[c] = fftw_alloc<double>(nreal);
            plans_->spec[c] = fftw_alloc<fftw_complex>(nspec);
            plans_->forward[c] =
                fftw_plan_dft_r2c_3d(static_cast<int>(pz_), static_cast<int>(py_),
                                     static_cast<int>(px_), plans_->real[c].get(),
                                     plans_->spec[c].get(), FFTW_ESTIMATE);
            plans_->backward[c] =
                fftw_plan_dft_c2r_3d(static_cast<int>(pz_), static_cast<int>(py_),
                                     static_cast<int>(px_), plans_->spec[c].get(),
                                     plans_->real[c].get(), FFTW_ESTIMATE);
            if (plans_->forward[c] == nullptr || plans_->backward[c] == nullptr) {
                throw Error("FFT plan creation failed for padded grid " + std::to_string(px_) +
                            "x" + std::to_string(py_) + "x" + std::to_string(pz_));
            }
        }
    }

    std::array<std::vector<double>, 6> octant;
    std::filesystem::path cache_file;
    if (!opt.cache_dir.empty()) {
        cache_file = opt.cache_dir / cache_key(grid_, opt);
        if (std::filesystem::exists(cache_file)) {
            try {
                MagfData d = read_magf(cache_file);
                if (d.grid.nx == grid_.nx && d.grid.ny == grid_.ny && d.grid.nz == grid_.nz &&
                    d.grid.dx == grid_.dx && d.grid.dy == grid_.dy && d.grid.dz == grid_.dz &&
                    d.components.size() == 6) {
                    for (int c = 0; c < 6; ++c) octant[c] = std::move(d.components[c]);
                    from_cache_ = true;
                }
            } catch (const Error&) {
                from_cache_ = false;
            }
        }
    }
    if (!from_cache_) {
        octant = tensor_octant(grid_, opt);
        if (!cache_file.empty()) {
            std::filesystem::create_directories(opt.cache_dir);
            MagfData d;
            d.grid = GridSpec(grid_.nx, grid_.ny, grid_.nz, grid_.dx, grid_.dy, grid_.dz);
            for (int c = 0; c < 6; ++c) d.components.push_back(octant[c]);
            const auto tmp = cache_file.string() + ".tmp";
            write_magf(tmp, d);
            std::filesystem::rename(tmp, cache_file);
        }
    }

    const double scale = 1.0 / static_cast<double>(nreal);
    double* buf = plans_->real[0].get();
    for (int c = 0; c < 6; ++c) {
        for (std::int64_t pk = 0; pk < pz_; ++pk) {
            bool vk;
            const std::int64_t K = wrap_displacement(pk, grid_.nz, pz_, &vk);
            for (std::int64_t pj = 0; pj < py_; ++pj) {
                bool vj;
                const std::int64_t J = wrap_displacement(pj, grid_.ny, py_, &vj);
                for (std::int64_t pi = 0; pi < px_; ++pi) {
                    bool vi;
                    const std::int64_t I = wrap_displacement(pi, grid_.nx, px_, &vi);
                    const std::size_t f = static_cast<std::size_t>(pi + px_ * (pj + py_ * pk));
                    buf[f] = (vi && vj && vk) ? octant_lookup(octant, grid_, I, J, K)[c] : 0.0;
                }
            }
        }
        fftw_execute(plans_->forward[0]);
        spectrum_[c].resize(nspec);
        const fftw_complex* s = plans_->spec[0].get();
        for (std::size_t q = 0; q < nspec; ++q) spectrum_[c][q] = s[q][0] * scale;
    }
}

DemagKernel::~DemagKernel() = default;

void DemagKernel::apply(const VectorField3& m, VectorField3& out) {
    const GridSpec& g = grid_;
    if (!(m.grid().nx == g.nx && m.grid().ny == g.ny && m.grid().nz == g.nz)) {
        throw Error("demag: field grid does not match the kernel grid");
    }
    if (!(out.grid() == m.grid())) out = VectorField3(m.grid());
    const std::size_t nreal = static_cast<std::size_t>(px_ * py_ * pz_);
    const std::size_t nspec = static_cast<std::size_t>(nc_ * py_ * pz_);
    for (int c = 0; c < 3; ++c) {
        double* r = plans_->real[c].get();
        std::fill(r, r + nreal, 0.0);
        const auto src = m.component(c);
        for (std::int64_t k = 0; k < g.nz; ++k)
            for (std::int64_t j = 0; j < g.ny; ++j) {
                const double* row = src.data() + g.index(0, j, k);
                std::copy(row, row + g.nx, r + px_ * (j + py_ * k));
            }
        fftw_execute(plans_->forward[c]);
    }
    fftw_complex* sx = plans_->spec[0].get();
    fftw_complex* sy = plans_->spec[1].get();
    fftw_complex* sz = plans_->spec[2].get();
    const double* nxx = spectrum_[0].data();
    const double* nyy = spectrum_[1].data();
    const double* nzz = spectrum_[2].data();
    const double* nxy = spectrum_[3].data();
    const double* nxz = spectrum_[4].data();
    const double* nyz = spectrum_[5].data();
#pragma omp parallel for schedule(static)
    for (std::size_t q = 0; q < nspec; ++q) {
        for (int part = 0; part < 2; ++part) {
            const double mx = sx[q][part], my = sy[q][part], mz = sz[q][part];
            sx[q][part] = nxx[q] * mx + nxy[q] * my + nxz[q] * mz;
            sy[q][part] = nxy[q] * mx + nyy[q] * my + nyz[q] * mz;
            sz[q][part] = nxz[q] * mx + nyz[q] * my + nzz[q] * mz;
        }
    }
    for (int c = 0; c < 3; ++c) {
        fftw_execute(plans_->backward[c]);
        const double* r = plans_->real[c].get();
        auto dst = out.component(c);
        for (std::int64_t k = 0; k < g.nz; ++k)
            for (std::int64_t j = 0; j < g.ny; ++j) {
                const double* row = r + px_ * (j + py_ * k);
                std::copy(row, row + g.nx, dst.data() + g.index(0, j, k));
            }
    }
}

VectorField3 demag_field_direct(const VectorField3& m, const DemagOptions& opt) {
    const GridSpec& g = m.grid();
    constexpr std::size_t kLimit = 4096;
    if (g.cells() > kLimit) {
        throw Error("demag_field_direct: grid has " + std::to_string(g.cells()) +
                    " cells, above the O(N^2) guard of " + std::to_string(kLimit));
    }
    const auto octant = tensor_octant(g, opt);
    VectorField3 out(g);
    for (std::int64_t k = 0; k < g.nz; ++k)
        for (std::int64_t j = 0; j < g.ny; ++j)
            for (std::int64_t i = 0; i < g.nx; ++i) {
                Vec3 h{};
                for (std::int64_t kk = 0; kk < g.nz; ++kk)
                    for (std::int64_t jj = 0; jj < g.ny; ++jj)
                        for (std::int64_t ii = 0; ii < g.nx; ++ii) {
                            const TensorElements t = octant_lookup(octant, g, i - ii, j - jj, k - kk);
                            const Vec3 s = m.get(g.index(ii, jj, kk));
                            h.x += t.xx * s.x + t.xy * s.y + t.xz * s.z;
                            h.y += t.xy * s.x + t.yy * s.y + t.yz * s.z;
                            h.z += t.xz * s.x + t.yz * s.y + t.zz * s.z;
                        }
                out.set(g.index(i, j, k), h);
            }
    return out;
}

VectorField3 demag_field_fft(const VectorField3& m, DemagKernel& kernel) {
    VectorField3 out(m.grid());
    kernel.apply(m, out);
    return out;
}

}  // namespace magnex
