#include "sns/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sns/errors.hpp"
#include "sns/rng.hpp"

namespace sns {

namespace {

std::string describe(Mode k) { return "(" + std::to_string(k.k1) + ", " + std::to_string(k.k2) + ")"; }

}  // namespace

ForcingSpec::ForcingSpec(Lattice lattice, std::vector<double> gamma_half)
    : lattice_(lattice), gamma_half_(std::move(gamma_half)) {
  double rho = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gamma_half_.size(); ++i) {
    if (!lattice_.is_forced(lattice_.mode(i))) continue;
    shell_slots_.push_back(i);
    R_ += 2.0 * gamma_half_[i];
    rho = std::min(rho, gamma_half_[i]);
  }
  rho_ = R_ > 0.0 ? rho : 0.0;
}

ForcingSpec ForcingSpec::build(const Lattice& lattice, const std::vector<std::pair<Mode, double>>& profile) {
  const std::size_t n = lattice.half_size();
  std::vector<double> upper(n, -1.0);
  std::vector<double> lower(n, -1.0);
  for (const auto& [k, g] : profile) {
    if (!lattice.contains(k)) throw ConfigError("forcing: mode " + describe(k) + " is not a lattice mode");
    if (!lattice.is_forced(k))
      throw ConfigError("forcing: mode " + describe(k) + " lies outside the forced shell |k|^2 <= " +
                        std::to_string(lattice.n_forced()));
    if (!(g > 0.0) || !std::isfinite(g))
      throw ConfigError("forcing: gamma at " + describe(k) + " must be positive and finite");
    auto& dst = Lattice::in_upper_half(k) ? upper[lattice.slot(k)] : lower[lattice.slot(-k)];
    if (dst >= 0.0) throw ConfigError("forcing: mode " + describe(k) + " listed twice");
    dst = g;
  }
  std::vector<double> gamma(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Mode k = lattice.mode(i);
    if (!lattice.is_forced(k)) continue;
    if (upper[i] < 0.0 || lower[i] < 0.0)
      throw ConfigError("forcing: gamma missing at " + describe(upper[i] < 0.0 ? k : -k) + " inside the shell");
    if (upper[i] != lower[i])
      throw ConfigError("forcing: asymmetric profile, gamma" + describe(k) + " != gamma" + describe(-k));
    gamma[i] = upper[i];
  }
  return ForcingSpec(lattice, std::move(gamma));
}

ForcingSpec ForcingSpec::flat(const Lattice& lattice, double value) {
  std::vector<std::pair<Mode, double>> profile;
  const int K = lattice.kmax();
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      const Mode k{a, b};
      if (lattice.contains(k) && lattice.is_forced(k)) profile.emplace_back(k, value);
    }
  return build(lattice, profile);
}

ForcingSpec ForcingSpec::unforced(const Lattice& lattice) {
  return ForcingSpec(lattice, std::vector<double>(lattice.half_size(), 0.0));
}

double ForcingSpec::gamma(Mode k) const {
  if (!lattice_.contains(k)) return 0.0;
  return gamma_half_[Lattice::in_upper_half(k) ? lattice_.slot(k) : lattice_.slot(-k)];
}

double ForcingSpec::gamma_inv_inner(const SpectralField& f, const SpectralField& g) const {
  const auto hf = f.half();
  const auto hg = g.half();
  double acc = 0.0;
  for (std::size_t i : shell_slots_)
    acc += (hf[i].real() * hg[i].real() + hf[i].imag() * hg[i].imag()) / gamma_half_[i];
  return 2.0 * acc;
}

void sample_increment(const ForcingSpec& spec, double dt, RngStream& rng, NoiseIncrement& out) {
  auto h = out.half();
  for (std::size_t i : spec.shell_slots()) {
    const double sd = std::sqrt(0.5 * spec.gamma_slot(i) * dt);
    const double re = rng.normal();
    const double im = rng.normal();
    h[i] = {sd * re, sd * im};
  }
}

NoiseIncrement sample_increment(const ForcingSpec& spec, double dt, RngStream& rng) {
  if (!(dt > 0.0)) throw ConfigError("sample_increment: dt must be positive");
  NoiseIncrement db(spec.lattice());
  sample_increment(spec, dt, rng, db);
  return db;
}

double rescale_covariance(double c_trace, double nu) {
  if (!(nu > 0.0)) throw ConfigError("rescale_covariance: viscosity must be positive");
  return c_trace / (nu * nu * nu);
}

double reynolds(double epsilon, double nu) {
  if (!(nu > 0.0)) throw ConfigError("reynolds: viscosity must be positive");
  return std::cbrt(epsilon) / nu;
}

}  // namespace sns
