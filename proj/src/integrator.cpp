#include "sns/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sns/errors.hpp"
#include "sns/rng.hpp"

namespace sns {

namespace {

constexpr double kGridTol = 1e-9;

bool near_integer(double x, long& n) {
  n = std::lround(x);
  return std::abs(x - static_cast<double>(n)) <= kGridTol * std::max(1.0, std::abs(x));
}

}  // namespace

Scheme parse_scheme(std::string_view name) {
  if (name == "euler_maruyama" || name == "euler") return Scheme::euler_maruyama;
  if (name == "exponential") return Scheme::exponential;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected euler_maruyama|exponential)");
}

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::euler_maruyama ? "euler_maruyama" : "exponential";
}

double stable_dt(const Lattice& lattice) { return 0.1 / (lattice.kmax() * lattice.kmax()); }

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("integrator.dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("integrator.t_end must be >= 0");
  if (t_end > 0.0 && t_end < dt) throw ConfigError("integrator.t_end must be 0 or >= dt");
  long n = 0;
  if (!near_integer(t_end / dt, n)) throw ConfigError("integrator.t_end must be an integer multiple of dt");
  if (record_stride < 1) throw ConfigError("integrator.record_stride must be >= 1");
}

std::size_t IntegratorConfig::steps() const {
  validate();
  return static_cast<std::size_t>(std::lround(t_end / dt));
}

IntegratorConfig IntegratorConfig::defaults_for(const Lattice& lattice, double t_end) {
  IntegratorConfig cfg;
  cfg.dt = 1.0 / std::ceil(1.0 / stable_dt(lattice));
  cfg.scheme = lattice.kmax() > 8 ? Scheme::exponential : Scheme::euler_maruyama;
  cfg.t_end = t_end;
  return cfg;
}

Stepper::Stepper(const ForcingSpec& spec, const IntegratorConfig& cfg, KernelKind kernel)
    : spec_(spec), cfg_(cfg), drift_(spec.lattice(), kernel) {
  cfg_.validate();
  const Lattice& lat = spec.lattice();
  decay_.resize(lat.half_size());
  for (std::size_t i = 0; i < decay_.size(); ++i) decay_[i] = std::exp(-lat.mode(i).norm2() * cfg_.dt);
}

void Stepper::advance(SpectralField& w, const NoiseIncrement& db, double t) {
  const double dt = cfg_.dt;
  const Lattice& lat = spec_.lattice();
  auto h = w.half();
  const auto noise = db.half();
  if (cfg_.scheme == Scheme::exponential) {
    const SpectralField b = drift_.nonlinear(w);
    const auto bh = b.half();
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = decay_[i] * (h[i] + dt * bh[i]) + noise[i];
  } else {
    const SpectralField f = drift_.nonlinear(w);
    const auto fh = f.half();
    for (std::size_t i = 0; i < h.size(); ++i)
      h[i] += dt * (fh[i] - static_cast<double>(lat.mode(i).norm2()) * h[i]) + noise[i];
  }
  if (!w.all_finite()) throw BlowUpError(t + dt);
}

void Stepper::step(SpectralField& w, RngStream& rng, NoiseIncrement& db, double t) {
  sample_increment(spec_, cfg_.dt, rng, db);
  advance(w, db, t);
}

SpectralField step(const SpectralField& w, const ForcingSpec& spec, const IntegratorConfig& cfg, RngStream& rng,
                   KernelKind kernel) {
  Stepper stepper(spec, cfg, kernel);
  SpectralField out = w;
  NoiseIncrement db(spec.lattice());
  stepper.step(out, rng, db, 0.0);
  return out;
}

namespace {

void record(TrajectoryRecord& rec, const SpectralField& w, double t) {
  rec.times.push_back(t);
  rec.fields.push_back(w);
  rec.enstrophy_series.push_back(enstrophy(w));
  rec.grad_series.push_back(grad_enstrophy(w));
}

// Number of recorded samples per unit time, or 0 when the record grid does
// not land on integer times.
long samples_per_unit(const IntegratorConfig& cfg) {
  long n = 0;
  const double h = cfg.dt * cfg.record_stride;
  if (!near_integer(1.0 / h, n) || n < 1) return 0;
  return n;
}

void fill_dn(TrajectoryRecord& rec) {
  const long per_unit = samples_per_unit(rec.config);
  if (per_unit == 0) return;
  const double h = 1.0 / static_cast<double>(per_unit);
  for (std::size_t n = 1;; ++n) {
    const std::size_t end = n * static_cast<std::size_t>(per_unit);
    if (end >= rec.times.size()) break;
    const std::size_t begin = end - static_cast<std::size_t>(per_unit);
    rec.dn.push_back(unit_interval_d(std::span(rec.enstrophy_series).subspan(begin, per_unit + 1),
                                     std::span(rec.grad_series).subspan(begin, per_unit + 1), h));
  }
}

template <class NextIncrement>
TrajectoryRecord run(const SpectralField& w0, const ForcingSpec& spec, const IntegratorConfig& cfg, KernelKind kernel,
                     NextIncrement&& next) {
  if (!(w0.lattice() == spec.lattice())) throw ConfigError("simulate: initial field and forcing lattices differ");
  const std::size_t steps = cfg.steps();
  Stepper stepper(spec, cfg, kernel);
  TrajectoryRecord rec;
  rec.config = cfg;
  rec.injection_rate = spec.R();
  rec.noise.reserve(steps);
  SpectralField w = w0;
  record(rec, w, 0.0);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    rec.noise.push_back(next(i));
    stepper.advance(w, rec.noise.back(), t);
    if ((i + 1) % static_cast<std::size_t>(cfg.record_stride) == 0)
      record(rec, w, static_cast<double>(i + 1) * cfg.dt);
  }
  fill_dn(rec);
  return rec;
}

}  // namespace

TrajectoryRecord simulate(const SpectralField& w0, const ForcingSpec& spec, const IntegratorConfig& cfg,
                          RngStream& rng, KernelKind kernel) {
  return run(w0, spec, cfg, kernel, [&](std::size_t) { return sample_increment(spec, cfg.dt, rng); });
}

TrajectoryRecord replay(const SpectralField& w0, const ForcingSpec& spec, const IntegratorConfig& cfg,
                        const std::vector<NoiseIncrement>& noise, KernelKind kernel) {
  if (noise.size() != cfg.steps()) throw ConfigError("replay: noise stream length does not match the step count");
  return run(w0, spec, cfg, kernel, [&](std::size_t i) { return noise[i]; });
}

double unit_interval_d(std::span<const double> enstrophy, std::span<const double> grad, double h) {
  if (enstrophy.empty() || enstrophy.size() != grad.size()) throw ConfigError("unit_interval_d: bad sample spans");
  const double sup = *std::max_element(enstrophy.begin(), enstrophy.end());
  double integral = 0.0;
  for (std::size_t i = 1; i < grad.size(); ++i) integral += 0.5 * h * (grad[i - 1] + grad[i]);
  return 0.5 * sup + integral;
}

double compute_dn(const TrajectoryRecord& rec, int n) {
  const long per_unit = samples_per_unit(rec.config);
  if (per_unit == 0) throw ConfigError("compute_dn: record grid does not align with unit intervals");
  if (n < 1) throw ConfigError("compute_dn: interval index must be >= 1");
  const auto end = static_cast<std::size_t>(n) * static_cast<std::size_t>(per_unit);
  if (end >= rec.times.size())
    throw ConfigError("compute_dn: interval [" + std::to_string(n - 1) + ", " + std::to_string(n) +
                      "] not covered by the record");
  const std::size_t begin = end - static_cast<std::size_t>(per_unit);
  return unit_interval_d(std::span(rec.enstrophy_series).subspan(begin, per_unit + 1),
                         std::span(rec.grad_series).subspan(begin, per_unit + 1), 1.0 / static_cast<double>(per_unit));
}

double ito_residual(const TrajectoryRecord& rec, double t, double c_ito) {
  if (rec.config.record_stride != 1) throw ConfigError("ito_residual: requires record_stride == 1");
  const double dt = rec.config.dt;
  long j = 0;
  if (!near_integer(t / dt, j) || j < 0) throw ConfigError("ito_residual: t is not on the step grid");
  if (t > 1.0 + kGridTol) throw ConfigError("ito_residual: t must lie in the first unit interval");
  if (static_cast<std::size_t>(j) >= rec.fields.size()) throw ConfigError("ito_residual: t beyond the record");
  const auto J = static_cast<std::size_t>(j);
  double integral = 0.0;
  double stochastic = 0.0;
  for (std::size_t i = 0; i < J; ++i) {
    integral += 0.5 * dt * (rec.grad_series[i] + rec.grad_series[i + 1]);
    stochastic += inner(rec.fields[i], rec.noise[i]);
  }
  const double d_t = 0.5 * rec.enstrophy_series[J] + integral;
  const double d_0 = 0.5 * rec.enstrophy_series[0];
  return d_t - d_0 - c_ito * rec.injection_rate * static_cast<double>(J) * dt - stochastic;
}

}  // namespace sns
