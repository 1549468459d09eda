#pragma once

#include <cstddef>
#include <vector>

namespace sns {

/// Integer wavevector k = (k1, k2).
struct Mode {
  int k1 = 0;
  int k2 = 0;

  constexpr int norm2() const { return k1 * k1 + k2 * k2; }
  constexpr Mode operator-() const { return {-k1, -k2}; }
  friend constexpr Mode operator+(Mode a, Mode b) { return {a.k1 + b.k1, a.k2 + b.k2}; }
  friend constexpr Mode operator-(Mode a, Mode b) { return {a.k1 - b.k1, a.k2 - b.k2}; }
  friend constexpr bool operator==(Mode, Mode) = default;
};

/// Truncated Fourier lattice: all k != 0 with max(|k1|, |k2|) <= kmax.
/// Modes with |k|^2 <= n_forced form the forced ("s") subspace, the rest the
/// high ("l") subspace.
///
/// Coefficients are stored on the half plane {k2 > 0} U {k2 = 0, k1 > 0};
/// the other half follows from reality, w_{-k} = conj(w_k). The storage order
/// is k2 = 0 (k1 = 1..kmax) followed by rows k2 = 1..kmax with k1 = -kmax..kmax.
class Lattice {
 public:
  Lattice(int kmax, int n_forced);

  int kmax() const { return kmax_; }
  int n_forced() const { return n_forced_; }

  /// Number of stored (half-plane) coefficients.
  std::size_t half_size() const {
    return static_cast<std::size_t>(2 * kmax_ * kmax_ + 2 * kmax_);
  }

  bool contains(Mode k) const;
  static bool in_upper_half(Mode k) { return k.k2 > 0 || (k.k2 == 0 && k.k1 > 0); }

  /// Half-plane storage slot of k; requires contains(k) && in_upper_half(k).
  std::size_t slot(Mode k) const {
    if (k.k2 == 0) return static_cast<std::size_t>(k.k1 - 1);
    return static_cast<std::size_t>(kmax_ + (k.k2 - 1) * (2 * kmax_ + 1) + (k.k1 + kmax_));
  }
  Mode mode(std::size_t slot) const;

  bool is_forced(Mode k) const { return k.norm2() <= n_forced_; }

  /// Smallest |k|^2 among retained high modes (the linear decay rate of l).
  int l_gap() const;
  /// Number of lattice modes (both signs) with |k|^2 <= n_forced.
  int forced_count() const;

  /// Half-plane modes in storage order.
  std::vector<Mode> half_modes() const;

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  int kmax_;
  int n_forced_;
};

}  // namespace sns
