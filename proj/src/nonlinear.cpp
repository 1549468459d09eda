#include "sns/nonlinear.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "sns/errors.hpp"

namespace sns {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

// FFTW's planner is not thread safe; execution with distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Dense (2K+1)^2 box holding every retained coefficient, both half planes.
std::vector<cplx> expand(const SpectralField& w) {
  const int K = w.lattice().kmax();
  const int n = 2 * K + 1;
  std::vector<cplx> box(static_cast<std::size_t>(n * n));
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) box[static_cast<std::size_t>((a + K) * n + (b + K))] = w({a, b});
  return box;
}

SpectralField direct_kernel(const SpectralField& w, bool corrupted) {
  const Lattice& lat = w.lattice();
  const int K = lat.kmax();
  const int n = 2 * K + 1;
  const std::vector<cplx> box = expand(w);
  auto at = [&](int a, int b) { return box[static_cast<std::size_t>((a + K) * n + (b + K))]; };

  SpectralField out(lat);
  auto h = out.half();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Mode k = lat.mode(i);
    cplx acc{};
    for (int l1 = -K; l1 <= K; ++l1) {
      const int p1 = k.k1 - l1;
      if (p1 < -K || p1 > K) continue;
      for (int l2 = -K; l2 <= K; ++l2) {
        const int p2 = k.k2 - l2;
        if (p2 < -K || p2 > K) continue;
        if ((l1 == 0 && l2 == 0) || (p1 == 0 && p2 == 0)) continue;
        const double cross = corrupted ? static_cast<double>(k.k1 * l2 + l1 * k.k2)
                                       : static_cast<double>(k.k1 * l2 - l1 * k.k2);
        if (cross == 0.0) continue;
        acc += (cross / (l1 * l1 + l2 * l2)) * at(p1, p2) * at(l1, l2);
      }
    }
    h[i] = kInvTwoPi * acc;
  }
  return out;
}

}  // namespace

SpectralField nonlinear_term_direct(const SpectralField& w) { return direct_kernel(w, false); }

// The convolution is split as
//   sum_{p+l=k} (k x l)/|l|^2 w_p w_l = sum_{p+l=k} [p1 w_p][l2 w_l/|l|^2] - [p2 w_p][l1 w_l/|l|^2],
// using k x l = p x l. Each factor times -i is Hermitian, so four c2r
// transforms, one pointwise product and one r2c transform evaluate it.
struct FftKernel::Impl {
  Lattice lattice;
  int M;
  int nh;
  double* real[4];
  double* product;
  fftw_complex* spec[4];
  fftw_complex* result;
  fftw_plan to_real;
  fftw_plan to_spec;

  Impl(const Lattice& lat, int grid) : lattice(lat), M(grid), nh(grid / 2 + 1) {
    const auto nreal = static_cast<std::size_t>(M) * M;
    const auto nspec = static_cast<std::size_t>(M) * nh;
    std::lock_guard lock(planner_mutex());
    for (int j = 0; j < 4; ++j) {
      real[j] = fftw_alloc_real(nreal);
      spec[j] = fftw_alloc_complex(nspec);
    }
    product = fftw_alloc_real(nreal);
    result = fftw_alloc_complex(nspec);
    to_real = fftw_plan_dft_c2r_2d(M, M, spec[0], real[0], FFTW_ESTIMATE);
    to_spec = fftw_plan_dft_r2c_2d(M, M, product, result, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(to_real);
    fftw_destroy_plan(to_spec);
    for (int j = 0; j < 4; ++j) {
      fftw_free(real[j]);
      fftw_free(spec[j]);
    }
    fftw_free(product);
    fftw_free(result);
  }

  std::size_t index(int k1, int k2) const {
    const int row = ((k1 % M) + M) % M;
    return static_cast<std::size_t>(row) * nh + static_cast<std::size_t>(k2);
  }

  void put(fftw_complex* dst, int k1, int k2, cplx v) const {
    const std::size_t i = index(k1, k2);
    dst[i][0] = v.real();
    dst[i][1] = v.imag();
  }

  void apply(const SpectralField& w, SpectralField& out) {
    const auto nspec = static_cast<std::size_t>(M) * nh;
    const auto nreal = static_cast<std::size_t>(M) * M;
    for (int j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < nspec; ++i) spec[j][i][0] = spec[j][i][1] = 0.0;

    const auto h = w.half();
    const cplx minus_i{0.0, -1.0};
    for (std::size_t s = 0; s < h.size(); ++s) {
      const Mode k = lattice.mode(s);
      const cplx v = minus_i * h[s];
      const double inv = 1.0 / k.norm2();
      const double p1 = k.k1, p2 = k.k2;
      const cplx vals[4] = {p1 * v, p2 * v, p2 * inv * v, p1 * inv * v};
      for (int j = 0; j < 4; ++j) {
        put(spec[j], k.k1, k.k2, vals[j]);
        if (k.k2 == 0) put(spec[j], -k.k1, 0, std::conj(vals[j]));
      }
    }
    for (int j = 0; j < 4; ++j) fftw_execute_dft_c2r(to_real, spec[j], real[j]);
    for (std::size_t i = 0; i < nreal; ++i) product[i] = real[0][i] * real[2][i] - real[1][i] * real[3][i];
    fftw_execute(to_spec);

    const double scale = -kInvTwoPi / static_cast<double>(nreal);
    auto o = out.half();
    for (std::size_t s = 0; s < o.size(); ++s) {
      const Mode k = lattice.mode(s);
      const std::size_t i = index(k.k1, k.k2);
      o[s] = scale * cplx{result[i][0], result[i][1]};
    }
  }
};

FftKernel::FftKernel(const Lattice& lattice, int grid) {
  const int minimum = 3 * lattice.kmax() + 1;
  if (grid == 0) grid = minimum;
  if (grid < minimum)
    throw ConfigError("fft kernel: grid " + std::to_string(grid) + " too small for kmax " +
                      std::to_string(lattice.kmax()) + " (need >= " + std::to_string(minimum) + ")");
  impl_ = std::make_unique<Impl>(lattice, grid);
}

FftKernel::~FftKernel() = default;

int FftKernel::grid() const { return impl_->M; }
const Lattice& FftKernel::lattice() const { return impl_->lattice; }

SpectralField FftKernel::apply(const SpectralField& w) {
  SpectralField out(w.lattice());
  apply(w, out);
  return out;
}

void FftKernel::apply(const SpectralField& w, SpectralField& out) {
  if (!(w.lattice() == impl_->lattice) || !(out.lattice() == impl_->lattice))
    throw ConfigError("fft kernel: field lattice does not match kernel lattice");
  impl_->apply(w, out);
}

SpectralField nonlinear_term_fft(const SpectralField& w, int grid) {
  thread_local std::unique_ptr<FftKernel> cached;
  const int wanted = grid == 0 ? 3 * w.lattice().kmax() + 1 : grid;
  if (!cached || !(cached->lattice() == w.lattice()) || cached->grid() != wanted)
    cached = std::make_unique<FftKernel>(w.lattice(), grid);
  return cached->apply(w);
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "direct") return KernelKind::direct;
  if (name == "fft") return KernelKind::fft;
  if (name == "off") return KernelKind::off;
  if (name == "corrupted") return KernelKind::corrupted;
  throw ConfigError("unknown kernel '" + std::string(name) + "' (expected direct|fft|off|corrupted)");
}

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::direct: return "direct";
    case KernelKind::fft: return "fft";
    case KernelKind::off: return "off";
    case KernelKind::corrupted: return "corrupted";
  }
  return "unknown";
}

Drift::Drift(const Lattice& lattice, KernelKind kind) : lattice_(lattice), kind_(kind) {
  if (kind == KernelKind::fft) fft_ = std::make_unique<FftKernel>(lattice);
}

Drift::~Drift() = default;
Drift::Drift(Drift&&) noexcept = default;
Drift& Drift::operator=(Drift&&) noexcept = default;

SpectralField Drift::nonlinear(const SpectralField& w) {
  switch (kind_) {
    case KernelKind::direct: return direct_kernel(w, false);
    case KernelKind::corrupted: return direct_kernel(w, true);
    case KernelKind::fft: return fft_->apply(w);
    case KernelKind::off: break;
  }
  return SpectralField(w.lattice());
}

SpectralField Drift::operator()(const SpectralField& w) {
  SpectralField out = nonlinear(w);
  const auto in = w.half();
  auto o = out.half();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= static_cast<double>(lattice_.mode(i).norm2()) * in[i];
  return out;
}

SpectralField drift(const SpectralField& w) {
  Drift d(w.lattice(), KernelKind::direct);
  return d(w);
}

}  // namespace sns
