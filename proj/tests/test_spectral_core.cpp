#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "sns/errors.hpp"
#include "sns/field_io.hpp"
#include "sns/nonlinear.hpp"
#include "sns/rng.hpp"
#include "sns/spectral_field.hpp"

using namespace sns;
using std::numbers::pi;

namespace {

SpectralField pair(const Lattice& lat, Mode k, cplx v) {
  SpectralField w(lat);
  w.set(k, v);
  return w;
}

// Brute-force B over the full lattice, with no use of half-plane storage.
SpectralField brute_force_b(const SpectralField& w) {
  const Lattice& lat = w.lattice();
  const int K = lat.kmax();
  SpectralField out(lat);
  for (Mode k : lat.half_modes()) {
    cplx acc{};
    for (int l1 = -K; l1 <= K; ++l1)
      for (int l2 = -K; l2 <= K; ++l2) {
        const Mode l{l1, l2};
        if (l.norm2() == 0) continue;
        const Mode r = k - l;
        if (!lat.contains(r)) continue;
        acc += static_cast<double>(k.k1 * l.k2 - l.k1 * k.k2) / l.norm2() * w(r) * w(l);
      }
    out.set(k, acc / (2.0 * pi));
  }
  return out;
}

// Real-space value of the pair (k, -k) at (x, y); the synthesis convention
// is sum_k w_k e^{-i k.x}, inverse to w_k = (1/2pi) int e^{i k.x} w(x) dx.
double eval_real(Mode k, cplx v, double x, double y) {
  return 2.0 * std::real(v * std::exp(cplx{0.0, -(k.k1 * x + k.k2 * y)}));
}

}  // namespace

TEST_CASE("lattice validation and storage") {
  CHECK_THROWS_AS(Lattice(0, 1), ConfigError);
  CHECK_THROWS_AS(Lattice(2, 0), ConfigError);
  CHECK_THROWS_AS(Lattice(2, 4), ConfigError);
  const Lattice lat(3, 2);
  CHECK(lat.half_size() == 24);
  CHECK_FALSE(lat.contains({0, 0}));
  for (std::size_t s = 0; s < lat.half_size(); ++s) CHECK(lat.slot(lat.mode(s)) == s);
  CHECK(lat.is_forced({1, 1}));
  CHECK_FALSE(lat.is_forced({2, 0}));
  CHECK(lat.l_gap() == 4);
  CHECK(lat.forced_count() == 8);
}

TEST_CASE("reality and zero mean") {
  const Lattice lat(4, 2);
  RngStream rng(1, "reality");
  const SpectralField w = random_field(lat, rng, 1.0);
  for (int a = -4; a <= 4; ++a)
    for (int b = -4; b <= 4; ++b) CHECK(w({-a, -b}) == std::conj(w({a, b})));
  CHECK(w({0, 0}) == cplx{});
  SpectralField z(lat);
  CHECK_THROWS_AS(z.set({0, 0}, 1.0), ConfigError);
  CHECK_THROWS_AS(z.set({5, 0}, 1.0), ConfigError);
}

TEST_CASE("velocity from vorticity") {
  const Lattice lat(3, 1);
  const VelocityField u = velocity_from_vorticity(pair(lat, {1, 0}, 1.0));
  CHECK(std::abs(u({1, 0})[0]) == 0.0);
  CHECK(std::abs(u({1, 0})[1] - cplx(0, 1)) < 1e-15);

  const cplx v{2.0, 1.0};
  const VelocityField u2 = velocity_from_vorticity(pair(lat, {1, 2}, v));
  const cplx i{0, 1};
  CHECK(std::abs(u2({1, 2})[0] - i * -2.0 * v / 5.0) < 1e-15);
  CHECK(std::abs(u2({1, 2})[1] - i * 1.0 * v / 5.0) < 1e-15);

  RngStream rng(2, "velocity");
  const SpectralField w = random_field(lat, rng, 1.0);
  const VelocityField uw = velocity_from_vorticity(w);
  for (Mode k : lat.half_modes()) CHECK(std::abs(double(k.k1) * uw(k)[0] + double(k.k2) * uw(k)[1]) < 1e-14);
  for (Mode k : lat.half_modes()) {
    CHECK(std::abs(uw(-k)[0] - std::conj(uw(k)[0])) < 1e-15);
  }

  // Real-space oracle: the finite-difference curl of u reproduces w.
  const Mode k{1, 2};
  const double h = 1e-4;
  for (double x : {0.3, 1.7, 4.1}) {
    const double y = 0.5 * x + 0.2;
    auto ux = [&](double px, double py) { return eval_real(k, u2(k)[0], px, py); };
    auto uy = [&](double px, double py) { return eval_real(k, u2(k)[1], px, py); };
    const double curl = (uy(x + h, y) - uy(x - h, y)) / (2 * h) - (ux(x, y + h) - ux(x, y - h)) / (2 * h);
    CHECK(curl == doctest::Approx(eval_real(k, v, x, y)).epsilon(1e-6));
  }
}

TEST_CASE("nonlinear term hand values") {
  const Lattice lat(3, 1);
  CHECK(max_abs(nonlinear_term_direct(pair(lat, {1, 0}, 1.0))) == 0.0);
  SpectralField w = pair(lat, {1, 0}, 1.0);
  w.set({0, 1}, 1.0);
  const SpectralField b = nonlinear_term_direct(w);
  CHECK(std::abs(b({1, 1})) < 1e-15);
  CHECK(max_abs(nonlinear_term_direct(SpectralField(lat))) == 0.0);
  CHECK(max_abs(nonlinear_term_fft(SpectralField(lat))) == 0.0);

  // Unequal magnitudes make the (1,1) coefficient nonzero: the l = (0,1)
  // term contributes 1 * w10 * w01 / 1 and the l = (1,0) term -1 * w01 * w10 / 1,
  // so a radius difference is needed; use (2,0) and (0,1) instead.
  SpectralField w2 = pair(lat, {2, 0}, 1.0);
  w2.set({0, 1}, 1.0);
  // k = (2,1): l = (0,1) -> (2*1 - 0)/1 = 2; l = (2,0) -> (2*0 - 2*1)/4 = -1/2.
  CHECK(nonlinear_term_direct(w2)({2, 1}).real() == doctest::Approx(1.5 / (2 * pi)).epsilon(1e-14));
}

TEST_CASE("direct kernel matches brute force") {
  for (int K : {2, 3, 5}) {
    const Lattice lat(K, 1);
    RngStream rng(3, "brute", K);
    const SpectralField w = random_field(lat, rng, 2.0);
    const SpectralField d = nonlinear_term_direct(w) - brute_force_b(w);
    CHECK(max_abs(d) < 1e-13);
  }
}

TEST_CASE("fft kernel matches direct kernel") {
  for (int K : {2, 4, 7, 12}) {
    const Lattice lat(K, 1);
    for (int seed = 0; seed < 5; ++seed) {
      RngStream rng(4, "fft", K * 100 + seed);
      const SpectralField w = random_field(lat, rng, 3.0, 0.5);
      const double n = l2_norm(w);
      CHECK(max_abs(nonlinear_term_fft(w) - nonlinear_term_direct(w)) <= 1e-12 * (1.0 + n));
    }
  }
  const Lattice lat(4, 2);
  CHECK_THROWS_AS(FftKernel(lat, 12), ConfigError);
  FftKernel big(lat, 20);
  RngStream rng(5, "grid");
  const SpectralField w = random_field(lat, rng, 1.0);
  CHECK(max_abs(big.apply(w) - nonlinear_term_direct(w)) < 1e-13);
}

TEST_CASE("orthogonality of the nonlinearity") {
  for (int K : {3, 8}) {
    const Lattice lat(K, 2);
    for (int seed = 0; seed < 10; ++seed) {
      RngStream rng(6, "orth", K * 100 + seed);
      const SpectralField w = random_field(lat, rng, 5.0, 0.3);
      const SpectralField b = nonlinear_term_fft(w);
      const double scale = l2_norm(w) * l2_norm(b);
      CHECK(std::abs(inner(w, b)) <= 1e-10 * scale);
      SpectralField psi(lat);
      auto ph = psi.half();
      for (std::size_t s = 0; s < ph.size(); ++s) ph[s] = w.half()[s] / static_cast<double>(lat.mode(s).norm2());
      CHECK(std::abs(inner(psi, b)) <= 1e-10 * l2_norm(psi) * l2_norm(b));
    }
  }
}

TEST_CASE("drift") {
  const Lattice lat(3, 1);
  const SpectralField f = drift(pair(lat, {1, 0}, 1.0));
  CHECK(f({1, 0}) == cplx(-1.0, 0.0));
  CHECK(max_abs(drift(SpectralField(lat))) == 0.0);
  Drift off(lat, KernelKind::off);
  RngStream rng(7, "drift");
  const SpectralField w = random_field(lat, rng, 1.0);
  CHECK(max_abs(off.nonlinear(w)) == 0.0);
  Drift fft(lat, KernelKind::fft);
  CHECK(max_abs(fft(w) - drift(w)) < 1e-13);
  Drift bad(lat, KernelKind::corrupted);
  CHECK(std::abs(inner(w, bad.nonlinear(w))) > 1e-6);
  CHECK(parse_kernel_kind("fft") == KernelKind::fft);
  CHECK_THROWS_AS(parse_kernel_kind("nope"), ConfigError);
}

TEST_CASE("projections") {
  const Lattice lat(4, 2);
  RngStream rng(8, "proj");
  const SpectralField w = random_field(lat, rng, 1.0);
  const SpectralField s = project_s(w);
  const SpectralField l = project_l(w);
  CHECK(s({1, 1}) == w({1, 1}));
  CHECK(s({2, 0}) == cplx{});
  CHECK(l({2, 0}) == w({2, 0}));
  CHECK(max_abs(project_s(s) - s) == 0.0);
  CHECK(max_abs(project_l(l) - l) == 0.0);
  CHECK(max_abs(s + l - w) == 0.0);
}

TEST_CASE("quadratic functionals") {
  const Lattice lat(3, 1);
  const SpectralField w = pair(lat, {1, 0}, 1.0);
  CHECK(enstrophy(w) == 2.0);
  CHECK(grad_enstrophy(w) == 2.0);
  CHECK(energy(w) == 2.0);
  CHECK(enstrophy(SpectralField(lat)) == 0.0);
  for (int seed = 0; seed < 20; ++seed) {
    RngStream rng(9, "quad", seed);
    const SpectralField r = random_field(lat, rng, 1.0 + seed);
    CHECK(grad_enstrophy(r) >= enstrophy(r));
    CHECK(enstrophy(r) >= energy(r));
    CHECK(l2_norm(r) == doctest::Approx(1.0 + seed).epsilon(1e-12));
  }
}

TEST_CASE("random field subspaces") {
  const Lattice lat(4, 2);
  RngStream rng(10, "sub");
  const SpectralField s = random_field(lat, rng, 1.0, 0.0, Subspace::s);
  const SpectralField l = random_field(lat, rng, 1.0, 0.0, Subspace::l);
  CHECK(max_abs(project_l(s)) == 0.0);
  CHECK(max_abs(project_s(l)) == 0.0);
}

TEST_CASE("field csv round trip") {
  const Lattice lat(5, 3);
  RngStream rng(11, "io");
  const SpectralField w = random_field(lat, rng, 1.7, 1.0);
  std::stringstream buf;
  write_field_csv(buf, w);
  const SpectralField r = read_field_csv(buf);
  CHECK(r.lattice() == lat);
  for (std::size_t s = 0; s < lat.half_size(); ++s) CHECK(r.half()[s] == w.half()[s]);
  std::stringstream bad("# kmax=2 n_forced=1\nk1,k2,re,im\n1,0,x,0\n");
  CHECK_THROWS_AS(read_field_csv(bad), ConfigError);
  CHECK(parse_double(format_double(0.1)) == 0.1);
}
