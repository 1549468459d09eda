#include "sns/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

#include "sns/errors.hpp"

namespace sns {

Lattice::Lattice(int kmax, int n_forced) : kmax_(kmax), n_forced_(n_forced) {
  if (kmax < 1) throw ConfigError("lattice: kmax must be >= 1, got " + std::to_string(kmax));
  if (n_forced < 1) throw ConfigError("lattice: n_forced must be >= 1, got " + std::to_string(n_forced));
  if (n_forced >= kmax * kmax)
    throw ConfigError("lattice: n_forced must be < kmax^2 so that the high-mode subspace is nonempty");
}

bool Lattice::contains(Mode k) const {
  return !(k.k1 == 0 && k.k2 == 0) && std::abs(k.k1) <= kmax_ && std::abs(k.k2) <= kmax_;
}

Mode Lattice::mode(std::size_t slot) const {
  const auto K = static_cast<std::size_t>(kmax_);
  if (slot < K) return {static_cast<int>(slot) + 1, 0};
  const std::size_t rest = slot - K;
  const std::size_t row = 2 * K + 1;
  return {static_cast<int>(rest % row) - kmax_, static_cast<int>(rest / row) + 1};
}

int Lattice::l_gap() const {
  int gap = std::numeric_limits<int>::max();
  for (int a = -kmax_; a <= kmax_; ++a)
    for (int b = -kmax_; b <= kmax_; ++b) {
      const int n2 = a * a + b * b;
      if (n2 > n_forced_) gap = std::min(gap, n2);
    }
  return gap;
}

int Lattice::forced_count() const {
  int count = 0;
  for (int a = -kmax_; a <= kmax_; ++a)
    for (int b = -kmax_; b <= kmax_; ++b) {
      const int n2 = a * a + b * b;
      if (n2 > 0 && n2 <= n_forced_) ++count;
    }
  return count;
}

std::vector<Mode> Lattice::half_modes() const {
  std::vector<Mode> out(half_size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mode(i);
  return out;
}

}  // namespace sns
