#include "sns/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sns/errors.hpp"
#include "sns/parallel.hpp"
#include "sns/rng.hpp"

namespace sns {

using nlohmann::json;

namespace {

std::size_t grid_index(double t, double dt, const char* what) {
  const double x = t / dt;
  const long j = std::lround(x);
  if (j < 0 || std::abs(x - static_cast<double>(j)) > 1e-9 * std::max(1.0, x))
    throw ConfigError(std::string(what) + ": time " + std::to_string(t) + " is not on the step grid");
  return static_cast<std::size_t>(j);
}

json field_summary(const SpectralField& w) {
  return json{{"kmax", w.lattice().kmax()}, {"n_forced", w.lattice().n_forced()}, {"enstrophy", enstrophy(w)}};
}

void require_lattice(const SpectralField& w, const ForcingSpec& spec) {
  if (!(w.lattice() == spec.lattice())) throw ConfigError("initial field and forcing lattices differ");
}

std::size_t count_blowups(const std::vector<PathSummary>& paths) {
  return static_cast<std::size_t>(std::count_if(paths.begin(), paths.end(), [](const auto& p) { return p.blew_up; }));
}

McReport frequency_report(std::string name, std::size_t hits, std::size_t n, std::size_t blowups, double bound,
                          const EnsembleSettings& settings) {
  McReport r;
  r.name = std::move(name);
  r.samples = n;
  r.blowups = blowups;
  r.empirical = static_cast<double>(hits) / static_cast<double>(n);
  r.se = binomial_se(r.empirical, n);
  r.bound = bound;
  r.k_se = settings.k_se;
  r.pass = r.recompute_pass();
  return r;
}

SlopeReport slope_report(std::string name, std::string variable, std::vector<double> x,
                         std::vector<std::size_t> counts, std::size_t n, std::size_t blowups) {
  SlopeReport r;
  r.name = std::move(name);
  r.variable = std::move(variable);
  r.samples = n;
  r.blowups = blowups;
  r.x = std::move(x);
  r.counts = std::move(counts);
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double p = static_cast<double>(r.counts[i]) / static_cast<double>(n);
    r.frequency.push_back(p);
    r.se.push_back(binomial_se(p, n));
    if (r.counts[i] > 0) {
      fx.push_back(r.x[i]);
      fy.push_back(std::log(p));
    }
  }
  r.fitted_points = fx.size();
  if (fx.size() >= 2) r.fit = linear_fit(fx, fy);
  r.pass = r.fitted_points >= 3 && r.fit.slope < 0.0 && r.fit.r2 >= r.min_r2;
  return r;
}

}  // namespace

void EnsembleSettings::validate() const {
  integrator.validate();
  if (samples < min_samples)
    throw ConfigError("samples = " + std::to_string(samples) + " is below the minimum " + std::to_string(min_samples));
  if (samples < 2) throw ConfigError("samples must be at least 2");
  if (!(k_se > 0.0)) throw ConfigError("k_se must be positive");
  if (stream.empty()) throw ConfigError("stream name must not be empty");
}

json EnsembleSettings::to_json() const {
  return json{{"dt", integrator.dt},
              {"scheme", std::string(to_string(integrator.scheme))},
              {"kernel", std::string(to_string(kernel))},
              {"samples", samples},
              {"min_samples", min_samples},
              {"seed", seed},
              {"stream", stream},
              {"k_se", k_se}};
}

std::vector<PathSummary> run_ensemble(const SpectralField& w0, const ForcingSpec& spec,
                                      const EnsembleSettings& settings, double t_end,
                                      std::span<const double> sample_times) {
  settings.validate();
  require_lattice(w0, spec);
  IntegratorConfig cfg = settings.integrator;
  cfg.t_end = t_end;
  cfg.record_stride = 1;
  const std::size_t steps = cfg.steps();
  const double dt = cfg.dt;

  std::vector<std::size_t> sample_idx;
  for (double t : sample_times) {
    const std::size_t j = grid_index(t, dt, "run_ensemble");
    if (j > steps) throw ConfigError("run_ensemble: sample time beyond t_end");
    sample_idx.push_back(j);
  }
  long per_unit_l = std::lround(1.0 / dt);
  const bool unit_grid = std::abs(static_cast<double>(per_unit_l) * dt - 1.0) < 1e-9;
  const auto per_unit = static_cast<std::size_t>(unit_grid ? per_unit_l : 0);

  std::vector<PathSummary> out(settings.samples);
  parallel_chunks(settings.samples, settings.workers, [&](std::size_t begin, std::size_t end) {
    Stepper stepper(spec, cfg, settings.kernel);
    NoiseIncrement db(spec.lattice());
    for (std::size_t i = begin; i < end; ++i) {
      PathSummary& ps = out[i];
      ps.enstrophy.assign(sample_idx.size(), std::numeric_limits<double>::quiet_NaN());
      RngStream rng(settings.seed, settings.stream, i);
      SpectralField w = w0;
      double e = enstrophy(w), g = grad_enstrophy(w);
      double sup_e = e, integral = 0.0;
      ps.sup_d_first = 0.5 * e;
      auto take_samples = [&](std::size_t j) {
        for (std::size_t q = 0; q < sample_idx.size(); ++q)
          if (sample_idx[q] == j) ps.enstrophy[q] = e;
      };
      take_samples(0);
      try {
        for (std::size_t j = 1; j <= steps; ++j) {
          stepper.step(w, rng, db, static_cast<double>(j - 1) * dt);
          const double e_new = enstrophy(w), g_new = grad_enstrophy(w);
          integral += 0.5 * dt * (g + g_new);
          e = e_new;
          g = g_new;
          sup_e = std::max(sup_e, e);
          if (per_unit > 0 && j <= per_unit) ps.sup_d_first = std::max(ps.sup_d_first, 0.5 * e + integral);
          take_samples(j);
          if (per_unit > 0 && j % per_unit == 0) {
            ps.dn.push_back(0.5 * sup_e + integral);
            sup_e = e;
            integral = 0.0;
          }
        }
      } catch (const BlowUpError& err) {
        ps.blew_up = true;
        ps.blowup_time = err.time();
      }
    }
  });
  return out;
}

bool McReport::recompute_pass() const {
  if (blowups_fail && blowups > 0) return false;
  return empirical <= bound + k_se * se;
}

json McReport::to_json() const {
  return json{{"check", name},       {"samples", samples}, {"blowups", blowups}, {"empirical", empirical},
              {"se", se},            {"bound", bound},     {"k_se", k_se},       {"blowups_fail", blowups_fail},
              {"pass", pass},        {"params", params},   {"extra", extra}};
}

json SlopeReport::to_json() const {
  return json{{"check", name},
              {"variable", variable},
              {"samples", samples},
              {"blowups", blowups},
              {"x", x},
              {"counts", counts},
              {"frequency", frequency},
              {"se", se},
              {"slope", fit.slope},
              {"intercept", fit.intercept},
              {"r2", fit.r2},
              {"min_r2", min_r2},
              {"fitted_points", fitted_points},
              {"pass", pass},
              {"params", params}};
}

double exp_moment_bound(double t, double w0_enstrophy, double R) {
  return 3.0 * std::exp(std::exp(-t) * w0_enstrophy / (4.0 * R));
}

McReport check_exp_moment(const SpectralField& w0, double t, const ForcingSpec& spec,
                          const EnsembleSettings& settings) {
  if (spec.is_unforced()) throw ConfigError("check_exp_moment: requires R > 0");
  const double times[] = {t};
  const auto paths = run_ensemble(w0, spec, settings, t, times);
  const double R = spec.R();
  std::vector<double> values;
  for (const auto& p : paths)
    if (!p.blew_up) values.push_back(std::exp(p.enstrophy[0] / (4.0 * R)));
  const MeanSe m = mean_se(values);
  McReport r;
  r.name = "exp_moment";
  r.samples = paths.size();
  r.blowups = count_blowups(paths);
  r.empirical = m.mean;
  r.se = m.se;
  r.bound = exp_moment_bound(t, enstrophy(w0), R);
  r.k_se = settings.k_se;
  r.blowups_fail = true;
  r.pass = r.recompute_pass();
  r.params = {{"t", t}, {"R", R}, {"w0", field_summary(w0)}, {"ensemble", settings.to_json()}};
  return r;
}

double tail_bound(double t, double D, double w0_enstrophy, double R) {
  return 3.0 * std::exp(-D / (4.0 * R)) * std::exp(std::exp(-t) * w0_enstrophy / (4.0 * R));
}

TailCurve tail_curve(const SpectralField& w0, double t, std::span<const double> d_grid, const ForcingSpec& spec,
                     const EnsembleSettings& settings) {
  if (spec.is_unforced()) throw ConfigError("tail check: requires R > 0");
  const double times[] = {t};
  const auto paths = run_ensemble(w0, spec, settings, t, times);
  const std::size_t blowups = count_blowups(paths);
  TailCurve curve;
  curve.monotone = true;
  double previous = 2.0;
  for (double D : d_grid) {
    std::size_t hits = 0;
    for (const auto& p : paths)
      if (p.blew_up || p.enstrophy[0] >= D) ++hits;
    McReport r = frequency_report("tail", hits, paths.size(), blowups, tail_bound(t, D, enstrophy(w0), spec.R()),
                                  settings);
    r.params = {{"t", t}, {"D", D}, {"R", spec.R()}, {"w0", field_summary(w0)}, {"ensemble", settings.to_json()}};
    curve.points.push_back(std::move(r));
  }
  std::vector<double> sorted(d_grid.begin(), d_grid.end());
  std::vector<std::size_t> order(sorted.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sorted[a] < sorted[b]; });
  for (std::size_t i : order) {
    if (curve.points[i].empirical > previous) curve.monotone = false;
    previous = curve.points[i].empirical;
  }
  return curve;
}

McReport check_tail(const SpectralField& w0, double t, double D, const ForcingSpec& spec,
                    const EnsembleSettings& settings) {
  const double grid[] = {D};
  return tail_curve(w0, t, grid, spec, settings).points.front();
}

SlopeReport check_sup_tail(const SpectralField& w0, std::span<const double> a_grid, const ForcingSpec& spec,
                           const EnsembleSettings& settings) {
  if (spec.is_unforced()) throw ConfigError("check_sup_tail: requires R > 0");
  const double d0 = 0.5 * enstrophy(w0);
  for (double A : a_grid)
    if (A < 3.0 * d0) throw ConfigError("check_sup_tail: every A must be >= 3 D_0");
  const double times[] = {0.0};
  const auto paths = run_ensemble(w0, spec, settings, 1.0, times);
  std::vector<double> x;
  std::vector<std::size_t> counts;
  for (double A : a_grid) {
    std::size_t hits = 0;
    for (const auto& p : paths)
      if (p.blew_up || p.sup_d_first >= A) ++hits;
    x.push_back(A / spec.R());
    counts.push_back(hits);
  }
  SlopeReport r = slope_report("sup_tail", "A/R", std::move(x), std::move(counts), paths.size(), count_blowups(paths));
  r.params = {{"A", std::vector<double>(a_grid.begin(), a_grid.end())},
              {"R", spec.R()},
              {"D0", d0},
              {"w0", field_summary(w0)},
              {"ensemble", settings.to_json()}};
  return r;
}

namespace {

std::size_t block_hits(const std::vector<PathSummary>& paths, int t, int length, double beta, double R) {
  std::size_t hits = 0;
  for (const auto& p : paths) {
    if (p.blew_up) {
      ++hits;
      continue;
    }
    double sum = 0.0;
    for (int n = t; n < t + length; ++n) sum += p.dn.at(static_cast<std::size_t>(n - 1));
    if (sum >= beta * R * length) ++hits;
  }
  return hits;
}

}  // namespace

McReport check_block_tail(const SpectralField& w0, int t, int t_prime, double beta, const ForcingSpec& spec,
                          const EnsembleSettings& settings) {
  if (t < 1 || t_prime <= t) throw ConfigError("check_block_tail: need 1 <= t < t'");
  if (spec.is_unforced()) throw ConfigError("check_block_tail: requires R > 0");
  const double times[] = {0.0};
  const auto paths = run_ensemble(w0, spec, settings, t_prime - 1, times);
  McReport r = frequency_report("block_tail", block_hits(paths, t, t_prime - t, beta, spec.R()), paths.size(),
                                count_blowups(paths), 1.0, settings);
  r.params = {{"t", t},       {"t_prime", t_prime},          {"beta", beta},
              {"R", spec.R()}, {"w0", field_summary(w0)}, {"ensemble", settings.to_json()}};
  r.extra = {{"note", "constants of the bound are not explicit; bound is the trivial value 1"}};
  return r;
}

BlockSweeps block_tail_sweeps(const SpectralField& w0, int t_start, int fixed_length, std::span<const double> betas,
                              double fixed_beta, std::span<const int> lengths, const ForcingSpec& spec,
                              const EnsembleSettings& settings) {
  if (t_start < 1 || fixed_length < 1) throw ConfigError("block_tail_sweeps: need t >= 1 and length >= 1");
  if (spec.is_unforced()) throw ConfigError("block_tail_sweeps: requires R > 0");
  int max_length = fixed_length;
  for (int L : lengths) {
    if (L < 1) throw ConfigError("block_tail_sweeps: lengths must be >= 1");
    max_length = std::max(max_length, L);
  }
  const double times[] = {0.0};
  const auto paths = run_ensemble(w0, spec, settings, t_start + max_length - 1, times);
  const std::size_t blowups = count_blowups(paths);
  const double R = spec.R();

  std::vector<std::size_t> counts;
  for (double b : betas) counts.push_back(block_hits(paths, t_start, fixed_length, b, R));
  BlockSweeps out;
  out.beta = slope_report("block_tail_beta", "beta", std::vector<double>(betas.begin(), betas.end()),
                          std::move(counts), paths.size(), blowups);
  out.beta.params = {{"t", t_start}, {"length", fixed_length}, {"R", R}, {"ensemble", settings.to_json()}};

  counts.clear();
  std::vector<double> x;
  for (int L : lengths) {
    counts.push_back(block_hits(paths, t_start, L, fixed_beta, R));
    x.push_back(L);
  }
  out.length = slope_report("block_tail_length", "length", std::move(x), std::move(counts), paths.size(), blowups);
  out.length.params = {{"t", t_start}, {"beta", fixed_beta}, {"R", R}, {"ensemble", settings.to_json()}};
  return out;
}

double novikov_bound(double zeta_sq, double rho, double lambda) {
  return std::exp(2.0 * (1.0 + lambda) * zeta_sq / rho);
}

McReport check_novikov(const SPath& zeta, const ForcingSpec& spec, double lambda, const EnsembleSettings& settings) {
  settings.validate();
  zeta.validate();
  if (!(spec.rho() > 0.0)) throw ConfigError("check_novikov: requires rho > 0");
  if (!(zeta.lattice == spec.lattice())) throw ConfigError("check_novikov: lattice mismatch");
  double sup_sq = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < zeta.values.size(); ++i) {
    sup_sq = std::max(sup_sq, enstrophy(zeta.values[i]));
    if (i + 1 < zeta.values.size()) quad += spec.gamma_inv_inner(zeta.values[i], zeta.values[i]) * zeta.dt;
  }
  std::vector<double> values(settings.samples);
  parallel_chunks(settings.samples, settings.workers, [&](std::size_t begin, std::size_t end) {
    NoiseIncrement db(spec.lattice());
    for (std::size_t m = begin; m < end; ++m) {
      RngStream rng(settings.seed, settings.stream, m);
      double stoch = 0.0;
      for (std::size_t i = 0; i + 1 < zeta.values.size(); ++i) {
        sample_increment(spec, zeta.dt, rng, db);
        stoch += spec.gamma_inv_inner(zeta.values[i], db);
      }
      values[m] = std::exp(stoch + lambda * quad);
    }
  });
  const MeanSe ms = mean_se(values);
  McReport r;
  r.name = "novikov";
  r.samples = values.size();
  r.empirical = ms.mean;
  r.se = ms.se;
  r.bound = novikov_bound(sup_sq, spec.rho(), lambda);
  r.k_se = settings.k_se;
  r.blowups_fail = true;
  r.pass = r.recompute_pass();
  r.params = {{"lambda", lambda},
              {"zeta_sup_sq", sup_sq},
              {"rho", spec.rho()},
              {"t", zeta.t1() - zeta.t0},
              {"ensemble", settings.to_json()}};
  r.extra = {{"quadratic_variation", quad}, {"gaussian_mean", std::exp((0.5 + lambda) * quad)}};
  return r;
}

json CouplingReport::to_json() const {
  return json{{"check", "coupling_decay"}, {"times", times},     {"median_distance", median_distance},
              {"rate", rate},              {"r2", r2},           {"samples", samples},
              {"blowups", blowups}};
}

CouplingReport coupling_decay(const SpectralField& w0_a, const SpectralField& w0_b, const ForcingSpec& spec,
                              const EnsembleSettings& settings, double T) {
  settings.validate();
  require_lattice(w0_a, spec);
  require_lattice(w0_b, spec);
  IntegratorConfig cfg = settings.integrator;
  cfg.t_end = T;
  const std::size_t steps = cfg.steps();
  const auto stride = static_cast<std::size_t>(cfg.record_stride);
  const std::size_t records = steps / stride + 1;
  std::vector<std::vector<double>> dist(settings.samples);
  std::vector<char> blew(settings.samples, 0);
  parallel_chunks(settings.samples, settings.workers, [&](std::size_t begin, std::size_t end) {
    Stepper stepper(spec, cfg, settings.kernel);
    NoiseIncrement db(spec.lattice());
    for (std::size_t m = begin; m < end; ++m) {
      RngStream rng(settings.seed, settings.stream, m);
      SpectralField a = w0_a, b = w0_b;
      dist[m].push_back(l2_norm(a - b));
      try {
        for (std::size_t j = 1; j <= steps; ++j) {
          const double t = static_cast<double>(j - 1) * cfg.dt;
          stepper.step(a, rng, db, t);
          stepper.advance(b, db, t);
          if (j % stride == 0) dist[m].push_back(l2_norm(a - b));
        }
      } catch (const BlowUpError&) {
        blew[m] = 1;
      }
    }
  });
  CouplingReport rep;
  rep.samples = settings.samples;
  std::vector<double> fx, fy;
  for (std::size_t q = 0; q < records; ++q) {
    std::vector<double> col;
    for (std::size_t m = 0; m < settings.samples; ++m)
      if (!blew[m]) col.push_back(dist[m][q]);
    rep.times.push_back(static_cast<double>(q * stride) * cfg.dt);
    double med = std::numeric_limits<double>::quiet_NaN();
    if (!col.empty()) {
      std::sort(col.begin(), col.end());
      const std::size_t h = col.size() / 2;
      med = col.size() % 2 ? col[h] : 0.5 * (col[h - 1] + col[h]);
    }
    rep.median_distance.push_back(med);
    if (med > 1e-250) {
      fx.push_back(rep.times.back());
      fy.push_back(std::log(med));
    }
  }
  rep.blowups = static_cast<std::size_t>(std::count(blew.begin(), blew.end(), 1));
  if (fx.size() >= 2) {
    const LinearFit fit = linear_fit(fx, fy);
    rep.rate = -fit.slope;
    rep.r2 = fit.r2;
  }
  return rep;
}

json ItoStudy::to_json() const {
  return json{{"check", "ito_residual"}, {"dts", dts},       {"rms", rms},
              {"mean", mean},            {"mean_c1", mean_unit}, {"c_ito", c_ito},
              {"decreasing", decreasing}};
}

ItoStudy ito_study(const SpectralField& w0, const ForcingSpec& spec, const EnsembleSettings& settings,
                   std::span<const double> dts, double t) {
  settings.validate();
  require_lattice(w0, spec);
  ItoStudy study;
  study.decreasing = true;
  for (double dt : dts) {
    IntegratorConfig cfg = settings.integrator;
    cfg.dt = dt;
    cfg.t_end = t;
    cfg.record_stride = 1;
    std::vector<double> res(settings.samples), res_unit(settings.samples);
    parallel_chunks(settings.samples, settings.workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t m = begin; m < end; ++m) {
        RngStream rng(settings.seed, settings.stream, m);
        const TrajectoryRecord rec = simulate(w0, spec, cfg, rng, settings.kernel);
        res[m] = ito_residual(rec, t);
        res_unit[m] = ito_residual(rec, t, 1.0);
      }
    });
    double ss = 0.0;
    for (double r : res) ss += r * r;
    study.dts.push_back(dt);
    study.rms.push_back(std::sqrt(ss / static_cast<double>(res.size())));
    study.mean.push_back(mean_se(res).mean);
    study.mean_unit.push_back(mean_se(res_unit).mean);
    if (study.rms.size() > 1 && !(study.rms.back() < study.rms[study.rms.size() - 2])) study.decreasing = false;
  }
  return study;
}

}  // namespace sns
