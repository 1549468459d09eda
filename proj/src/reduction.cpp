#include "sns/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sns/errors.hpp"
#include "sns/parallel.hpp"
#include "sns/rng.hpp"
#include "sns/stats.hpp"

namespace sns {

namespace {

bool supported_on(const SpectralField& w, bool forced) {
  const Lattice& lat = w.lattice();
  const auto h = w.half();
  for (std::size_t i = 0; i < h.size(); ++i)
    if (lat.is_forced(lat.mode(i)) != forced && h[i] != cplx{}) return false;
  return true;
}

void require_same_lattice(const Lattice& a, const Lattice& b, const char* what) {
  if (!(a == b)) throw ConfigError(std::string(what) + ": lattice mismatch");
}

std::size_t grid_steps(double span, double dt) {
  const double n = span / dt;
  const long r = std::lround(n);
  if (r < 1 || std::abs(n - static_cast<double>(r)) > 1e-9 * std::max(1.0, n))
    throw ConfigError("path length must be a positive integer multiple of dt");
  return static_cast<std::size_t>(r);
}

}  // namespace

SpectralField SPath::at(double t) const {
  if (values.empty()) throw ConfigError("SPath: empty path");
  if (values.size() == 1 || t <= t0) return values.front();
  if (t >= t1()) return values.back();
  const double x = (t - t0) / dt;
  const auto i = std::min(static_cast<std::size_t>(x), intervals() - 1);
  const double frac = x - static_cast<double>(i);
  if (frac == 0.0) return values[i];
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

SPath SPath::slice(std::size_t i0, std::size_t i1) const {
  if (i0 >= i1 || i1 >= values.size()) throw ConfigError("SPath::slice: bad index range");
  SPath out(lattice, time(i0), dt);
  out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(i0), values.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
  return out;
}

void SPath::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("SPath: dt must be positive");
  if (values.size() < 2) throw ConfigError("SPath: need at least two samples");
  for (const auto& v : values) {
    require_same_lattice(v.lattice(), lattice, "SPath");
    if (!v.all_finite()) throw ConfigError("SPath: non-finite sample");
    if (!supported_on(v, true)) throw ConfigError("SPath: sample has high-mode support");
  }
}

SPath SPath::from_trajectory(const TrajectoryRecord& rec, const Lattice& lattice) {
  SPath out(lattice, rec.times.empty() ? 0.0 : rec.times.front(), rec.config.dt * rec.config.record_stride);
  for (const auto& f : rec.fields) {
    require_same_lattice(f.lattice(), lattice, "SPath::from_trajectory");
    out.values.push_back(project_s(f));
  }
  return out;
}

SPath random_smooth_spath(const Lattice& lattice, RngStream& rng, double t_end, double dt, double amplitude) {
  const std::size_t n = grid_steps(t_end, dt);
  const SpectralField a = random_field(lattice, rng, amplitude / 3.0, 0.0, Subspace::s);
  const SpectralField b = random_field(lattice, rng, amplitude / 3.0, 0.0, Subspace::s);
  const SpectralField c = random_field(lattice, rng, amplitude / 3.0, 0.0, Subspace::s);
  const double two_pi = 2.0 * std::numbers::pi;
  const double w1 = 1.0 + (two_pi - 1.0) * rng.uniform();
  const double w2 = 1.0 + (two_pi - 1.0) * rng.uniform();
  const double p1 = two_pi * rng.uniform();
  const double p2 = two_pi * rng.uniform();
  SPath out(lattice, 0.0, dt);
  out.values.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * dt;
    out.values.push_back(a + b * std::cos(w1 * t + p1) + c * std::sin(w2 * t + p2));
  }
  return out;
}

SPath wiener_spath(const ForcingSpec& spec, const SpectralField& s0, double t_end, double dt, RngStream& rng,
                   std::vector<NoiseIncrement>* increments) {
  require_same_lattice(s0.lattice(), spec.lattice(), "wiener_spath");
  if (!supported_on(s0, true)) throw ConfigError("wiener_spath: s0 has high-mode support");
  const std::size_t n = grid_steps(t_end, dt);
  SPath out(spec.lattice(), 0.0, dt);
  out.values.reserve(n + 1);
  out.values.push_back(s0);
  if (increments) increments->clear();
  NoiseIncrement db(spec.lattice());
  for (std::size_t i = 0; i < n; ++i) {
    sample_increment(spec, dt, rng, db);
    out.values.push_back(out.values.back() + db);
    if (increments) increments->push_back(db);
  }
  return out;
}

LTrajectory solve_l(const SPath& spath, const SpectralField& l_init, const LSolveOptions& options) {
  spath.validate();
  require_same_lattice(l_init.lattice(), spath.lattice, "solve_l");
  if (!supported_on(l_init, false)) throw ConfigError("solve_l: l_init has low-mode support");
  const Lattice& lat = spath.lattice;
  const std::size_t n = options.steps == 0 ? spath.intervals() : options.steps;
  const bool on_grid = n == spath.intervals();
  const double span = spath.t1() - spath.t0;
  const double h = on_grid ? spath.dt : span / static_cast<double>(n);

  std::vector<double> decay(lat.half_size());
  for (std::size_t i = 0; i < decay.size(); ++i) {
    const Mode k = lat.mode(i);
    decay[i] = lat.is_forced(k) ? 0.0 : std::exp(-k.norm2() * h);
  }

  Drift drift(lat, options.kernel);
  LTrajectory out;
  out.times.reserve(n + 1);
  out.values.reserve(n + 1);
  out.times.push_back(spath.t0);
  out.values.push_back(l_init);
  SpectralField l = l_init;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = on_grid ? spath.time(j) : spath.t0 + static_cast<double>(j) * h;
    const SpectralField s = on_grid ? spath.values[j] : spath.at(t);
    const SpectralField b = drift.nonlinear(s + l);
    auto lh = l.half();
    const auto bh = b.half();
    for (std::size_t i = 0; i < lh.size(); ++i) lh[i] = decay[i] * (lh[i] + h * bh[i]);
    if (!l.all_finite()) throw BlowUpError(t + h);
    out.times.push_back(on_grid ? spath.time(j + 1) : spath.t0 + static_cast<double>(j + 1) * h);
    out.values.push_back(l);
  }
  return out;
}

double contraction_constant_a(const Lattice& lattice) {
  double sum = 0.0;
  for (Mode k : lattice.half_modes()) {
    const double q = k.norm2();
    sum += 2.0 / (q * q);
  }
  return sum / (4.0 * std::numbers::pi * std::numbers::pi);
}

ContractionReport contraction_check(const SPath& spath, const SpectralField& l1, const SpectralField& l2,
                                    const LSolveOptions& options) {
  const LTrajectory a = solve_l(spath, l1, options);
  const LTrajectory b = solve_l(spath, l2, options);
  const Lattice& lat = spath.lattice;

  ContractionReport rep;
  rep.a = contraction_constant_a(lat);
  rep.n_forced = lat.n_forced();
  rep.gap = lat.l_gap();
  rep.times = a.times;
  const double d0 = l2_norm(l1 - l2);
  const bool on_grid = a.times.size() == spath.values.size();

  double integral = 0.0;
  double prev_grad = 0.0;
  rep.holds = rep.holds_gap = true;
  for (std::size_t j = 0; j < a.times.size(); ++j) {
    const SpectralField s = on_grid ? spath.values[j] : spath.at(a.times[j]);
    const double grad = grad_enstrophy(s + a.values[j]);
    if (j > 0) integral += 0.5 * (a.times[j] - a.times[j - 1]) * (grad + prev_grad);
    prev_grad = grad;
    const double elapsed = a.times[j] - a.times.front();
    const double lhs = l2_norm(a.values[j] - b.values[j]);
    rep.exponent = -rep.n_forced * elapsed + rep.a * integral;
    rep.exponent_gap = -rep.gap * elapsed + rep.a * integral;
    const double rhs = std::exp(rep.exponent) * d0;
    const double rhs_gap = std::exp(rep.exponent_gap) * d0;
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.rhs_gap.push_back(rhs_gap);
    const double slop = 1e-12 * d0;
    if (lhs > rhs + slop) rep.holds = false;
    if (lhs > rhs_gap + slop) rep.holds_gap = false;
  }
  rep.vacuous = rep.exponent >= 0.0;
  rep.pass = rep.holds || rep.vacuous;

  std::vector<double> x, y;
  for (std::size_t j = 0; j < rep.lhs.size(); ++j)
    if (rep.lhs[j] > 1e-250) {
      x.push_back(rep.times[j]);
      y.push_back(std::log(rep.lhs[j]));
    }
  if (x.size() >= 2) {
    const LinearFit fit = linear_fit(x, y);
    rep.decay_rate = -fit.slope;
    rep.decay_r2 = fit.r2;
  }
  return rep;
}

SemigroupReport semigroup_check(const SPath& spath, const SpectralField& l0, std::size_t split_index,
                                const LSolveOptions& options) {
  spath.validate();
  if (split_index == 0 || split_index >= spath.intervals())
    throw ConfigError("semigroup_check: split must be an interior grid index");
  if (options.steps == 0) throw ConfigError("semigroup_check: options.steps must be positive");
  const SpectralField one_shot = solve_l(spath, l0, options).values.back();
  const SpectralField mid = solve_l(spath.slice(0, split_index), l0, options).values.back();
  const SpectralField restarted = solve_l(spath.slice(split_index, spath.intervals()), mid, options).values.back();
  LSolveOptions fine = options;
  fine.steps = 2 * options.steps;
  const SpectralField refined = solve_l(spath, l0, fine).values.back();

  SemigroupReport rep;
  rep.split_index = split_index;
  rep.defect = max_abs(one_shot - restarted);
  rep.tolerance = 2.0 * max_abs(one_shot - refined);
  return rep;
}

std::vector<SpectralField> reduced_drift_path(const SPath& spath, const SpectralField& l_init, KernelKind kernel) {
  const LTrajectory l = solve_l(spath, l_init, {0, kernel});
  Drift drift(spath.lattice, kernel);
  std::vector<SpectralField> out;
  out.reserve(l.values.size());
  for (std::size_t j = 0; j < l.values.size(); ++j) out.push_back(project_s(drift(spath.values[j] + l.values[j])));
  return out;
}

SpectralField reduced_drift(const SPath& spath, const SpectralField& l_init, KernelKind kernel) {
  return reduced_drift_path(spath, l_init, kernel).back();
}

GirsanovLedger girsanov_log_density(const SPath& spath, const SpectralField& l_init, const ForcingSpec& spec,
                                    KernelKind kernel) {
  if (!(spec.rho() > 0.0)) throw ConfigError("girsanov_log_density: requires rho > 0");
  require_same_lattice(spec.lattice(), spath.lattice, "girsanov_log_density");
  const std::vector<SpectralField> f = reduced_drift_path(spath, l_init, kernel);
  GirsanovLedger led;
  for (std::size_t i = 0; i + 1 < spath.values.size(); ++i) {
    led.stoch_term += spec.gamma_inv_inner(f[i], spath.values[i + 1] - spath.values[i]);
    led.quad_term += 0.5 * spec.gamma_inv_inner(f[i], f[i]) * spath.dt;
  }
  led.log_density = led.stoch_term - led.quad_term;
  return led;
}

double delta_f_constant(const Lattice& lattice) {
  return std::sqrt(static_cast<double>(lattice.n_forced())) * std::sqrt(static_cast<double>(lattice.forced_count()));
}

DeltaFReport delta_f_bound_check(const SpectralField& s, const SpectralField& l, const SpectralField& lp) {
  require_same_lattice(s.lattice(), l.lattice(), "delta_f_bound_check");
  require_same_lattice(s.lattice(), lp.lattice(), "delta_f_bound_check");
  const SpectralField w = s + l;
  const SpectralField dl = l - lp;
  DeltaFReport rep;
  rep.c = delta_f_constant(s.lattice());
  rep.lhs = l2_norm(project_s(drift(w)) - project_s(drift(s + lp)));
  const double d = l2_norm(dl);
  rep.rhs = rep.c * (2.0 * l2_norm(w) * d + d * d);
  rep.slack = rep.lhs > 0.0 ? rep.rhs / rep.lhs : std::numeric_limits<double>::infinity();
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-12);
  return rep;
}

double log_density_ratio(const SPath& spath, const SpectralField& l_init_1, const SpectralField& l_init_2,
                         const ForcingSpec& spec, const std::vector<NoiseIncrement>& noise, KernelKind kernel) {
  if (!(spec.rho() > 0.0)) throw ConfigError("log_density_ratio: requires rho > 0");
  if (noise.size() != spath.intervals()) throw ConfigError("log_density_ratio: noise grid does not match the path");
  const auto f1 = reduced_drift_path(spath, l_init_1, kernel);
  const auto f2 = reduced_drift_path(spath, l_init_2, kernel);
  double stoch = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const SpectralField df = f2[i] - f1[i];
    stoch += spec.gamma_inv_inner(df, noise[i]);
    quad += 0.5 * spec.gamma_inv_inner(df, df) * spath.dt;
  }
  return stoch - quad;
}

std::vector<NoiseIncrement> consistent_noise(const SPath& spath, const SpectralField& l_init, const ForcingSpec& spec,
                                             KernelKind kernel) {
  require_same_lattice(spec.lattice(), spath.lattice, "consistent_noise");
  const auto f = reduced_drift_path(spath, l_init, kernel);
  std::vector<NoiseIncrement> out;
  out.reserve(spath.intervals());
  for (std::size_t i = 0; i < spath.intervals(); ++i)
    out.push_back(spath.values[i + 1] - spath.values[i] - f[i] * spath.dt);
  return out;
}

GirsanovComparison girsanov_comparison(const ForcingSpec& spec, const SpectralField& s0, const SpectralField& l0,
                                       double t, double dt, std::size_t samples, std::uint64_t seed,
                                       const std::function<double(const SpectralField&)>& observable, int workers,
                                       double k_se) {
  if (samples < 2) throw ConfigError("girsanov_comparison: need at least two samples");
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t;
  cfg.scheme = Scheme::exponential;
  const std::size_t steps = cfg.steps();
  std::vector<double> direct(samples), weighted(samples), weights(samples);
  parallel_chunks(samples, workers, [&](std::size_t begin, std::size_t end) {
    Stepper stepper(spec, cfg, KernelKind::direct);
    NoiseIncrement db(spec.lattice());
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(seed, "girsanov_direct", i);
      SpectralField w = s0 + l0;
      for (std::size_t j = 0; j < steps; ++j) stepper.step(w, rng, db, static_cast<double>(j) * dt);
      direct[i] = observable(project_s(w));

      RngStream wiener(seed, "girsanov_wiener", i);
      const SPath path = wiener_spath(spec, s0, t, dt, wiener);
      weights[i] = std::exp(girsanov_log_density(path, l0, spec, KernelKind::direct).log_density);
      weighted[i] = weights[i] * observable(path.values.back());
    }
  });
  const MeanSe d = mean_se(direct);
  const MeanSe w = mean_se(weighted);
  GirsanovComparison out;
  out.direct_mean = d.mean;
  out.direct_se = d.se;
  out.weighted_mean = w.mean;
  out.weighted_se = w.se;
  out.mean_weight = mean_se(weights).mean;
  const double combined = std::hypot(d.se, w.se);
  out.z = combined > 0.0 ? std::abs(d.mean - w.mean) / combined : 0.0;
  out.pass = out.z <= k_se;
  return out;
}

}  // namespace sns
