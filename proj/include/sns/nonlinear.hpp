#pragma once

#include <memory>
#include <string_view>

#include "sns/spectral_field.hpp"

namespace sns {

/// Galerkin-truncated nonlinearity
///   B(w)_k = (1/2pi) sum_l (k1 l2 - l1 k2) / |l|^2 w_{k-l} w_l,
/// summed over l with both l and k - l retained. Direct O(kmax^4) evaluation;
/// this is the reference every faster path is checked against.
SpectralField nonlinear_term_direct(const SpectralField& w);

/// Same convolution evaluated pseudo-spectrally on an M x M grid with
/// zero padding. Exact (up to round-off) for M >= 3 kmax + 1.
///
/// Owns FFTW plans and scratch buffers: not copyable, and a single instance
/// must not be used from two threads at once.
class FftKernel {
 public:
  /// grid = 0 picks the smallest admissible size 3 kmax + 1.
  explicit FftKernel(const Lattice& lattice, int grid = 0);
  ~FftKernel();
  FftKernel(const FftKernel&) = delete;
  FftKernel& operator=(const FftKernel&) = delete;

  int grid() const;
  const Lattice& lattice() const;

  SpectralField apply(const SpectralField& w);
  void apply(const SpectralField& w, SpectralField& out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper: uses a per-thread cached FftKernel.
SpectralField nonlinear_term_fft(const SpectralField& w, int grid = 0);

/// Which nonlinearity a drift evaluator uses. `off` drops B entirely (linear
/// system). `corrupted` is a deliberately wrong kernel used as a negative
/// control by the verification suite.
enum class KernelKind { direct, fft, off, corrupted };

KernelKind parse_kernel_kind(std::string_view name);
std::string_view to_string(KernelKind kind);

/// Evaluates B and the drift F(w)_k = -|k|^2 w_k + B(w)_k. Holds scratch
/// state, so use one instance per thread.
class Drift {
 public:
  Drift(const Lattice& lattice, KernelKind kind);
  ~Drift();
  Drift(Drift&&) noexcept;
  Drift& operator=(Drift&&) noexcept;

  const Lattice& lattice() const { return lattice_; }
  KernelKind kind() const { return kind_; }

  SpectralField nonlinear(const SpectralField& w);
  SpectralField operator()(const SpectralField& w);

 private:
  Lattice lattice_;
  KernelKind kind_;
  std::unique_ptr<FftKernel> fft_;
};

/// F(w) with the direct kernel.
SpectralField drift(const SpectralField& w);

}  // namespace sns
