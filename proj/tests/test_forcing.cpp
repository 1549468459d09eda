#include <cmath>

#include "doctest.h"
#include "sns/errors.hpp"
#include "sns/forcing.hpp"
#include "sns/rng.hpp"

using namespace sns;

TEST_CASE("shell sums") {
  const Lattice lat1(3, 1);
  const ForcingSpec a = ForcingSpec::build(lat1, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{0, 1}, 1.0}, {{0, -1}, 1.0}});
  CHECK(a.R() == 4.0);
  CHECK(a.rho() == 1.0);

  const Lattice lat2(4, 2);
  const ForcingSpec b = ForcingSpec::flat(lat2, 0.5);
  CHECK(b.R() == 4.0);
  CHECK(b.rho() == 0.5);
  CHECK(b.kappa() == 0.5);
  CHECK(b.shell_slots().size() == 4);

  const ForcingSpec c = ForcingSpec::flat(Lattice(6, 5), 0.25);
  CHECK(c.R() == doctest::Approx(0.25 * 20));

  double recomputed = 0.0;
  for (int k1 = -4; k1 <= 4; ++k1)
    for (int k2 = -4; k2 <= 4; ++k2)
      if (k1 || k2) recomputed += b.gamma({k1, k2});
  CHECK(recomputed == b.R());
  CHECK(b.gamma({2, 0}) == 0.0);
  CHECK(b.gamma({1, -1}) == b.gamma({-1, 1}));

  const ForcingSpec u = ForcingSpec::unforced(lat2);
  CHECK(u.is_unforced());
  CHECK(u.R() == 0.0);
}

TEST_CASE("profile validation") {
  const Lattice lat(3, 1);
  using P = std::vector<std::pair<Mode, double>>;
  CHECK_THROWS_AS(ForcingSpec::build(lat, P{{{1, 0}, 1.0}, {{-1, 0}, 2.0}, {{0, 1}, 1.0}, {{0, -1}, 1.0}}),
                  ConfigError);
  CHECK_THROWS_AS(ForcingSpec::build(lat, P{{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{0, 1}, 0.0}, {{0, -1}, 0.0}}),
                  ConfigError);
  CHECK_THROWS_AS(ForcingSpec::build(lat, P{{{1, 0}, 1.0}, {{-1, 0}, 1.0}}), ConfigError);
  CHECK_THROWS_AS(ForcingSpec::build(lat, P{{{1, 0}, 1.0},
                                           {{-1, 0}, 1.0},
                                           {{0, 1}, 1.0},
                                           {{0, -1}, 1.0},
                                           {{1, 1}, 1.0},
                                           {{-1, -1}, 1.0}}),
                  ConfigError);
  CHECK_THROWS_AS(ForcingSpec::build(lat, P{{{1, 0}, 1.0},
                                           {{1, 0}, 1.0},
                                           {{-1, 0}, 1.0},
                                           {{0, 1}, 1.0},
                                           {{0, -1}, 1.0}}),
                  ConfigError);
  CHECK_THROWS_AS(ForcingSpec::flat(lat, -1.0), ConfigError);
}

TEST_CASE("increment moments") {
  const Lattice lat(3, 2);
  std::vector<std::pair<Mode, double>> profile;
  for (Mode k : lat.half_modes())
    if (lat.is_forced(k)) {
      const double g = 0.3 + 0.2 * k.norm2();
      profile.push_back({k, g});
      profile.push_back({-k, g});
    }
  const ForcingSpec spec = ForcingSpec::build(lat, profile);
  const double dt = 0.01;
  const int n = 100000;
  RngStream rng(1, "moments");
  const auto& slots = spec.shell_slots();
  std::vector<double> second(slots.size(), 0.0);
  std::vector<cplx> pseudo(slots.size());
  cplx cross{};
  NoiseIncrement db(lat);
  bool support_ok = true;
  for (int i = 0; i < n; ++i) {
    sample_increment(spec, dt, rng, db);
    for (std::size_t j = 0; j < slots.size(); ++j) {
      const cplx v = db.half()[slots[j]] / std::sqrt(dt);
      second[j] += std::norm(v);
      pseudo[j] += v * v;
    }
    cross += db.half()[slots[0]] * db.half()[slots[1]] / dt;
    for (std::size_t s = 0; s < lat.half_size(); ++s)
      if (!lat.is_forced(lat.mode(s)) && db.half()[s] != cplx{}) support_ok = false;
  }
  CHECK(support_ok);
  for (std::size_t j = 0; j < slots.size(); ++j) {
    const double target = spec.gamma_slot(slots[j]);
    CHECK(second[j] / n == doctest::Approx(target).epsilon(0.05));
    CHECK(std::abs(pseudo[j] / double(n)) < 0.05 * target);
  }
  CHECK(std::abs(cross / double(n)) < 0.05);
}

TEST_CASE("two half steps have the covariance of one step") {
  const Lattice lat(3, 1);
  const ForcingSpec spec = ForcingSpec::flat(lat, 0.7);
  RngStream rng(2, "halves");
  const int n = 50000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const NoiseIncrement a = sample_increment(spec, 0.05, rng);
    const NoiseIncrement b = sample_increment(spec, 0.05, rng);
    sum += std::norm((a + b)({1, 0}));
  }
  CHECK(sum / n == doctest::Approx(0.7 * 0.1).epsilon(0.05));
}

TEST_CASE("unit rescaling") {
  CHECK(rescale_covariance(8.0, 2.0) == 1.0);
  CHECK(reynolds(8.0, 2.0) == doctest::Approx(1.0));
  CHECK(rescale_covariance(3.5, 1.0) == 3.5);
  CHECK_THROWS_AS(rescale_covariance(1.0, 0.0), ConfigError);
}
