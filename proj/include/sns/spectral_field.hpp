#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "sns/lattice.hpp"

namespace sns {

class RngStream;

using cplx = std::complex<double>;

/// Real vorticity field in Fourier space on a truncated lattice.
///
/// Only the half plane is stored, so w_{-k} = conj(w_k) holds by
/// construction and w_0 is identically zero.
class SpectralField {
 public:
  explicit SpectralField(Lattice lattice)
      : lattice_(lattice), half_(lattice.half_size(), cplx{}) {}

  const Lattice& lattice() const { return lattice_; }

  /// Coefficient w_k for any k; zero for k = 0 or k outside the lattice.
  cplx operator()(Mode k) const;
  /// Sets w_k (and thereby w_{-k} = conj(w_k)). Throws ConfigError for k = 0
  /// or k outside the lattice.
  void set(Mode k, cplx value);

  std::span<const cplx> half() const { return half_; }
  std::span<cplx> half() { return half_; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double factor);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double f) { return a *= f; }
  friend SpectralField operator*(double f, SpectralField a) { return a *= f; }

  bool all_finite() const;

 private:
  Lattice lattice_;
  std::vector<cplx> half_;
};

/// Velocity coefficients u_k = i (-k2, k1) w_k / |k|^2, half-plane storage.
struct VelocityField {
  Lattice lattice;
  std::vector<std::array<cplx, 2>> half;

  std::array<cplx, 2> operator()(Mode k) const;
};

VelocityField velocity_from_vorticity(const SpectralField& w);

/// Re sum_k conj(a_k) b_k over the full lattice.
double inner(const SpectralField& a, const SpectralField& b);
/// ||w||^2 = sum_k |w_k|^2.
double enstrophy(const SpectralField& w);
/// ||grad w||^2 = sum_k |k|^2 |w_k|^2.
double grad_enstrophy(const SpectralField& w);
/// sum_k |k|^-2 |w_k|^2.
double energy(const SpectralField& w);
double l2_norm(const SpectralField& w);
double max_abs(const SpectralField& w);

/// Keeps modes with |k|^2 <= N.
SpectralField project_s(const SpectralField& w);
/// Keeps modes with |k|^2 > N.
SpectralField project_l(const SpectralField& w);

enum class Subspace { all, s, l };

/// Random field with independent complex Gaussian coefficients, amplitude
/// weighted by (1 + |k|^2)^(-decay / 2), restricted to a subspace and scaled
/// to the given L2 norm.
SpectralField random_field(const Lattice& lattice, RngStream& rng, double norm,
                           double decay = 0.0, Subspace where = Subspace::all);

}  // namespace sns
