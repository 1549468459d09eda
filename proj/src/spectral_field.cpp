#include "sns/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sns/errors.hpp"
#include "sns/rng.hpp"

namespace sns {

namespace {

void require_same_lattice(const Lattice& a, const Lattice& b) {
  if (!(a == b)) throw ConfigError("spectral fields live on different lattices");
}

std::string describe(Mode k) {
  return "(" + std::to_string(k.k1) + ", " + std::to_string(k.k2) + ")";
}

}  // namespace

cplx SpectralField::operator()(Mode k) const {
  if (!lattice_.contains(k)) return {};
  if (Lattice::in_upper_half(k)) return half_[lattice_.slot(k)];
  return std::conj(half_[lattice_.slot(-k)]);
}

void SpectralField::set(Mode k, cplx value) {
  if (!lattice_.contains(k)) throw ConfigError("mode " + describe(k) + " is not a retained lattice mode");
  if (Lattice::in_upper_half(k))
    half_[lattice_.slot(k)] = value;
  else
    half_[lattice_.slot(-k)] = std::conj(value);
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_lattice(lattice_, other.lattice_);
  for (std::size_t i = 0; i < half_.size(); ++i) half_[i] += other.half_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_lattice(lattice_, other.lattice_);
  for (std::size_t i = 0; i < half_.size(); ++i) half_[i] -= other.half_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double factor) {
  for (auto& v : half_) v *= factor;
  return *this;
}

bool SpectralField::all_finite() const {
  return std::all_of(half_.begin(), half_.end(),
                     [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

std::array<cplx, 2> VelocityField::operator()(Mode k) const {
  if (!lattice.contains(k)) return {};
  if (Lattice::in_upper_half(k)) return half[lattice.slot(k)];
  const auto& u = half[lattice.slot(-k)];
  return {std::conj(u[0]), std::conj(u[1])};
}

VelocityField velocity_from_vorticity(const SpectralField& w) {
  const Lattice& lat = w.lattice();
  VelocityField u{lat, std::vector<std::array<cplx, 2>>(lat.half_size())};
  const cplx I{0.0, 1.0};
  for (std::size_t i = 0; i < lat.half_size(); ++i) {
    const Mode k = lat.mode(i);
    const cplx scaled = I * w.half()[i] / static_cast<double>(k.norm2());
    u.half[i] = {-static_cast<double>(k.k2) * scaled, static_cast<double>(k.k1) * scaled};
  }
  return u;
}

double inner(const SpectralField& a, const SpectralField& b) {
  require_same_lattice(a.lattice(), b.lattice());
  double acc = 0.0;
  const auto ha = a.half();
  const auto hb = b.half();
  for (std::size_t i = 0; i < ha.size(); ++i) acc += ha[i].real() * hb[i].real() + ha[i].imag() * hb[i].imag();
  return 2.0 * acc;
}

double enstrophy(const SpectralField& w) {
  double acc = 0.0;
  for (cplx v : w.half()) acc += std::norm(v);
  return 2.0 * acc;
}

double grad_enstrophy(const SpectralField& w) {
  const Lattice& lat = w.lattice();
  double acc = 0.0;
  const auto h = w.half();
  for (std::size_t i = 0; i < h.size(); ++i) acc += lat.mode(i).norm2() * std::norm(h[i]);
  return 2.0 * acc;
}

double energy(const SpectralField& w) {
  const Lattice& lat = w.lattice();
  double acc = 0.0;
  const auto h = w.half();
  for (std::size_t i = 0; i < h.size(); ++i) acc += std::norm(h[i]) / lat.mode(i).norm2();
  return 2.0 * acc;
}

double l2_norm(const SpectralField& w) { return std::sqrt(enstrophy(w)); }

double max_abs(const SpectralField& w) {
  double m = 0.0;
  for (cplx v : w.half()) m = std::max(m, std::abs(v));
  return m;
}

namespace {

SpectralField project(const SpectralField& w, bool keep_forced) {
  SpectralField out = w;
  const Lattice& lat = w.lattice();
  auto h = out.half();
  for (std::size_t i = 0; i < h.size(); ++i)
    if (lat.is_forced(lat.mode(i)) != keep_forced) h[i] = {};
  return out;
}

}  // namespace

SpectralField project_s(const SpectralField& w) { return project(w, true); }
SpectralField project_l(const SpectralField& w) { return project(w, false); }

SpectralField random_field(const Lattice& lattice, RngStream& rng, double norm, double decay, Subspace where) {
  SpectralField w(lattice);
  auto h = w.half();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Mode k = lattice.mode(i);
    const double re = rng.normal();
    const double im = rng.normal();
    const bool keep = where == Subspace::all || (where == Subspace::s) == lattice.is_forced(k);
    if (keep) h[i] = cplx{re, im} * std::pow(1.0 + k.norm2(), -0.5 * decay);
  }
  const double current = l2_norm(w);
  if (current > 0.0) w *= norm / current;
  return w;
}

}  // namespace sns
