#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sns/errors.hpp"
#include "sns/reduction.hpp"
#include "sns/rng.hpp"

using namespace sns;

namespace {

SPath zero_path(const Lattice& lat, double t_end, double dt) {
  SPath p(lat, 0.0, dt);
  const auto n = static_cast<std::size_t>(std::lround(t_end / dt));
  p.values.assign(n + 1, SpectralField(lat));
  return p;
}

}  // namespace

TEST_CASE("spath basics") {
  const Lattice lat(4, 2);
  RngStream rng(1, "spath");
  const SPath p = random_smooth_spath(lat, rng, 1.0, 0.01, 0.9);
  CHECK_NOTHROW(p.validate());
  CHECK(p.intervals() == 100);
  CHECK(p.t1() == doctest::Approx(1.0));
  for (const auto& v : p.values) CHECK(l2_norm(v) <= 0.9 + 1e-12);
  const SpectralField mid = p.at(0.015);
  CHECK(max_abs(mid - 0.5 * (p.values[1] + p.values[2])) < 1e-14);
  const SPath tail = p.slice(40, 100);
  CHECK(tail.t0 == doctest::Approx(0.4));
  CHECK(tail.values.size() == 61);

  SPath bad = p;
  bad.values[3].set({2, 0}, 1.0);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(p.slice(5, 5), ConfigError);
}

TEST_CASE("solve_l trivial cases") {
  const Lattice lat(4, 2);
  const SPath s0 = zero_path(lat, 1.0, 0.01);
  SpectralField l(lat);
  l.set({2, 0}, cplx(0.3, 0.1));
  const LTrajectory tr = solve_l(s0, l);
  for (std::size_t j = 0; j < tr.times.size(); ++j)
    CHECK(std::abs(tr.values[j]({2, 0}) - l({2, 0}) * std::exp(-4.0 * tr.times[j])) < 1e-15);

  const LTrajectory zero = solve_l(s0, SpectralField(lat));
  CHECK(max_abs(zero.values.back()) == 0.0);

  SpectralField wrong(lat);
  wrong.set({1, 0}, 1.0);
  CHECK_THROWS_AS(solve_l(s0, wrong), ConfigError);
}

TEST_CASE("solve_l stays in the high-mode subspace") {
  const Lattice lat(5, 2);
  RngStream rng(2, "closure");
  const SPath p = random_smooth_spath(lat, rng, 1.0, 0.01, 2.0);
  const SpectralField l0 = random_field(lat, rng, 2.0, 0.0, Subspace::l);
  for (const auto& v : solve_l(p, l0).values) CHECK(max_abs(project_s(v)) == 0.0);
}

TEST_CASE("contraction constant") {
  // Independent summation over the full square, both signs.
  for (int K : {6, 16}) {
    double sum = 0.0;
    for (int a = -K; a <= K; ++a)
      for (int b = -K; b <= K; ++b)
        if (a || b) sum += 1.0 / std::pow(a * a + b * b, 2);
    CHECK(contraction_constant_a(Lattice(K, 1)) == doctest::Approx(sum / (4 * std::numbers::pi * std::numbers::pi)).epsilon(1e-13));
  }
  CHECK(contraction_constant_a(Lattice(6, 1)) == doctest::Approx(0.1511298096796863).epsilon(1e-14));
  CHECK(contraction_constant_a(Lattice(16, 1)) == doctest::Approx(0.1524219915607074).epsilon(1e-14));
}

TEST_CASE("contraction check") {
  const Lattice lat(6, 2);
  RngStream rng(3, "contraction");
  const SPath p = random_smooth_spath(lat, rng, 1.0, 0.005, 0.5);
  const SpectralField l1 = random_field(lat, rng, 0.5, 1.0, Subspace::l);
  const ContractionReport same = contraction_check(p, l1, l1);
  CHECK(same.lhs.back() == 0.0);
  CHECK(same.pass);

  // Linearised regime: the difference decays at least at the gap rate.
  const SPath z = zero_path(lat, 1.0, 0.005);
  const ContractionReport lin = contraction_check(z, l1 * 1e-6, SpectralField(lat));
  CHECK(lin.gap == 4);
  CHECK(lin.decay_rate >= 4.0);
  CHECK(lin.holds_gap);
  CHECK_FALSE(lin.vacuous);

  const SpectralField l2 = random_field(lat, rng, 0.5, 1.0, Subspace::l);
  const ContractionReport gen = contraction_check(p, l1, l2);
  CHECK(gen.pass);
  CHECK(gen.holds);
  CHECK(gen.exponent < 0.0);

  // Large data: the integral term dominates and the report flags it.
  const SPath big = random_smooth_spath(lat, rng, 1.0, 0.005, 30.0);
  const ContractionReport vac = contraction_check(big, l1, l2, {400, KernelKind::fft});
  CHECK(vac.vacuous);
  CHECK(vac.pass);
}

TEST_CASE("semigroup identity") {
  const Lattice lat(6, 2);
  RngStream rng(4, "semigroup");
  const SPath p = random_smooth_spath(lat, rng, 1.0, 0.001, 0.5);
  const SpectralField l0 = random_field(lat, rng, 0.5, 1.0, Subspace::l);

  const SemigroupReport near = semigroup_check(p, l0, 1, {40, KernelKind::fft});
  CHECK(near.defect <= near.tolerance);

  const SemigroupReport lin = semigroup_check(p, l0, 370, {40, KernelKind::off});
  CHECK(lin.defect < 1e-15);

  for (int seed = 0; seed < 10; ++seed) {
    RngStream r(5, "semigroup_sweep", seed);
    const SPath q = random_smooth_spath(lat, r, 1.0, 0.001, 0.5);
    const SpectralField l = random_field(lat, r, 0.5, 1.0, Subspace::l);
    const SemigroupReport a = semigroup_check(q, l, 250 + 50 * seed, {40, KernelKind::fft});
    const SemigroupReport b = semigroup_check(q, l, 250 + 50 * seed, {80, KernelKind::fft});
    CHECK(a.defect <= 10.0 * a.tolerance);
    CHECK(b.defect < a.defect);
  }
  CHECK_THROWS_AS(semigroup_check(p, l0, 0, {40, KernelKind::fft}), ConfigError);
}

TEST_CASE("reduced drift") {
  const Lattice lat(4, 2);
  const SPath z = zero_path(lat, 0.5, 0.01);
  CHECK(max_abs(reduced_drift(z, SpectralField(lat))) == 0.0);

  SPath single(lat, 0.0, 0.001);
  SpectralField s(lat);
  s.set({1, 1}, cplx(0.4, -0.3));
  single.values.assign(11, s);
  const SpectralField f = reduced_drift(single, SpectralField(lat));
  CHECK(std::abs(f({1, 1}) + 2.0 * s({1, 1})) < 1e-3);
}

TEST_CASE("reduced drift matches the joint simulation") {
  const Lattice lat(5, 2);
  const ForcingSpec spec = ForcingSpec::flat(lat, 0.5);
  RngStream init(6, "joint");
  const SpectralField w0 = random_field(lat, init, 2.0, 0.5);
  IntegratorConfig cfg;
  cfg.dt = 0.005;
  cfg.t_end = 0.5;
  RngStream rng(6, "joint_path");
  const TrajectoryRecord rec = simulate(w0, spec, cfg, rng);
  const SPath p = SPath::from_trajectory(rec, lat);
  const LTrajectory l = solve_l(p, project_l(w0));
  const auto f = reduced_drift_path(p, project_l(w0));
  for (std::size_t j = 0; j < rec.fields.size(); ++j) {
    CHECK(max_abs(l.values[j] - project_l(rec.fields[j])) < 1e-13);
    CHECK(max_abs(f[j] - project_s(drift(rec.fields[j]))) < 1e-12);
  }
}

TEST_CASE("Girsanov ledger") {
  const Lattice lat(3, 1);
  const ForcingSpec spec = ForcingSpec::flat(lat, 0.8);
  const SPath z = zero_path(lat, 0.5, 0.01);
  const GirsanovLedger zero = girsanov_log_density(z, SpectralField(lat), spec);
  CHECK(zero.log_density == 0.0);

  RngStream rng(7, "ledger");
  SpectralField s0(lat);
  s0.set({1, 0}, 0.5);
  const SPath p = wiener_spath(spec, s0, 0.5, 0.01, rng);
  const SpectralField l0 = random_field(lat, rng, 0.5, 0.0, Subspace::l);
  const GirsanovLedger led = girsanov_log_density(p, l0, spec);
  CHECK(led.consistent());
  CHECK(led.quad_term >= 0.0);
  const auto f = reduced_drift_path(p, l0);
  double quad = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i)
    for (Mode k : lat.half_modes())
      if (lat.is_forced(k)) quad += 2.0 * std::norm(f[i](k)) / spec.gamma(k) * 0.5 * p.dt;
  CHECK(led.quad_term == doctest::Approx(quad).epsilon(1e-12));
  CHECK_THROWS_AS(girsanov_log_density(p, l0, ForcingSpec::unforced(lat)), ConfigError);
}

TEST_CASE("weighted Wiener estimator agrees with direct simulation") {
  const Lattice lat(2, 1);
  const ForcingSpec spec = ForcingSpec::flat(lat, 1.0);
  SpectralField s0(lat), l0(lat);
  s0.set({1, 0}, 0.8);
  s0.set({0, 1}, cplx(0.0, 0.5));
  l0.set({1, 1}, cplx(0.3, -0.2));
  auto g = [](const SpectralField& s) { return std::tanh(s({1, 0}).real() + s({0, 1}).imag()); };
  const GirsanovComparison r = girsanov_comparison(spec, s0, l0, 0.5, 0.005, 1500, 11, g);
  CHECK(r.pass);
  CHECK(r.mean_weight == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("delta f bound") {
  const Lattice lat(6, 2);
  CHECK(delta_f_constant(lat) == doctest::Approx(std::sqrt(2.0) * std::sqrt(8.0)));
  RngStream rng(8, "deltaf");
  const SpectralField s = random_field(lat, rng, 1.0, 0.0, Subspace::s);
  const SpectralField l = random_field(lat, rng, 1.0, 0.0, Subspace::l);
  const DeltaFReport same = delta_f_bound_check(s, l, l);
  CHECK(same.lhs == 0.0);
  CHECK(same.pass);

  SpectralField far(lat);
  far.set({6, 5}, 0.7);
  const DeltaFReport single = delta_f_bound_check(SpectralField(lat), SpectralField(lat), far);
  CHECK(single.pass);
  CHECK(single.slack > 1.0);

  for (int K : {3, 5, 8})
    for (int seed = 0; seed < 20; ++seed) {
      const Lattice lk(K, 1 + seed % 4);
      RngStream r(9, "deltaf_sweep", K * 100 + seed);
      const double scale = std::pow(10.0, -2.0 + 0.2 * seed);
      const DeltaFReport rep = delta_f_bound_check(random_field(lk, r, scale, 0.0, Subspace::s),
                                                   random_field(lk, r, scale, 0.5, Subspace::l),
                                                   random_field(lk, r, scale, 0.5, Subspace::l));
      CHECK(rep.pass);
    }
}

TEST_CASE("log density ratio") {
  const Lattice lat(3, 1);
  const ForcingSpec spec = ForcingSpec::flat(lat, 0.6);
  RngStream rng(10, "ratio");
  SpectralField s0(lat);
  s0.set({0, 1}, cplx(0.2, 0.4));
  const SPath p = wiener_spath(spec, s0, 0.5, 0.01, rng);
  const SpectralField l1 = random_field(lat, rng, 0.8, 0.0, Subspace::l);
  const SpectralField l2 = random_field(lat, rng, 0.8, 0.0, Subspace::l);
  const auto noise = consistent_noise(p, l1, spec);
  CHECK(log_density_ratio(p, l1, l1, spec, noise) == 0.0);

  const double direct = log_density_ratio(p, l1, l2, spec, noise);
  const double ledger = girsanov_log_density(p, l2, spec).log_density - girsanov_log_density(p, l1, spec).log_density;
  CHECK(direct == doctest::Approx(ledger).epsilon(1e-10));

  double previous = std::abs(log_density_ratio(p, l1, l1 + (l2 - l1) * 1.0, spec, noise));
  for (double scale : {0.3, 0.1, 0.03, 0.01}) {
    const double current = std::abs(log_density_ratio(p, l1, l1 + (l2 - l1) * scale, spec, noise));
    CHECK(current < previous);
    previous = current;
  }
  CHECK_THROWS_AS(log_density_ratio(p, l1, l2, spec, {}), ConfigError);
}
