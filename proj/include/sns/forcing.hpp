#pragma once

#include <utility>
#include <vector>

#include "sns/spectral_field.hpp"

namespace sns {

class RngStream;

/// Noise spectrum gamma_k on the forced shell |k|^2 <= N with its derived
/// scalars: R = sum_k gamma_k (both signs of k), rho = min over the shell,
/// kappa = N / R.
class ForcingSpec {
 public:
  /// Validating constructor. `profile` lists (k, gamma_k) for every mode of
  /// the shell, both signs, each exactly once. Throws ConfigError when the
  /// profile is asymmetric, non-positive inside the shell, incomplete, or
  /// has support outside the shell.
  static ForcingSpec build(const Lattice& lattice, const std::vector<std::pair<Mode, double>>& profile);
  /// gamma_k = value on every shell mode.
  static ForcingSpec flat(const Lattice& lattice, double value);
  /// gamma = 0 everywhere; for noise-free runs. R = rho = 0.
  static ForcingSpec unforced(const Lattice& lattice);

  const Lattice& lattice() const { return lattice_; }
  double gamma(Mode k) const;
  /// gamma by half-plane slot.
  double gamma_slot(std::size_t slot) const { return gamma_half_[slot]; }
  double R() const { return R_; }
  double rho() const { return rho_; }
  double kappa() const { return R_ > 0.0 ? lattice_.n_forced() / R_ : 0.0; }
  bool is_unforced() const { return R_ == 0.0; }

  /// Half-plane slots of the forced shell, in storage order.
  const std::vector<std::size_t>& shell_slots() const { return shell_slots_; }

  /// (f, gamma^{-1} g) = Re sum_{|k|^2 <= N} conj(f_k) g_k / gamma_k.
  double gamma_inv_inner(const SpectralField& f, const SpectralField& g) const;

 private:
  ForcingSpec(Lattice lattice, std::vector<double> gamma_half);

  Lattice lattice_;
  std::vector<double> gamma_half_;
  std::vector<std::size_t> shell_slots_;
  double R_ = 0.0;
  double rho_ = 0.0;
};

/// Increment db of the forcing Brownian motions over one step. Stored as a
/// spectral field supported on the forced shell, so db_{-k} = conj(db_k).
using NoiseIncrement = SpectralField;

/// Samples db_k = sqrt(gamma_k dt / 2) (xi + i eta) with xi, eta standard
/// normal on each half-plane shell mode, so E|b_k(t)|^2 = gamma_k t and
/// E b_k b_l = 0 unless l = -k.
NoiseIncrement sample_increment(const ForcingSpec& spec, double dt, RngStream& rng);
void sample_increment(const ForcingSpec& spec, double dt, RngStream& rng, NoiseIncrement& out);

/// Covariance trace in units where the viscosity is one: C' = nu^-3 C.
double rescale_covariance(double c_trace, double nu);
/// Re = epsilon^(1/3) / nu.
double reynolds(double epsilon, double nu);

}  // namespace sns
