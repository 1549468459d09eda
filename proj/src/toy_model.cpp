#include "sns/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/random/binomial_distribution.hpp>

#include "sns/errors.hpp"
#include "sns/parallel.hpp"
#include "sns/rng.hpp"

namespace sns {

using nlohmann::json;

void ToyChainSpec::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("toy.m must be positive");
  if (!(C >= 0.0) || !std::isfinite(C)) throw ConfigError("toy.C must be >= 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("toy.beta must be positive");
  if (grid_cells < 1) throw ConfigError("toy.grid_cells must be >= 1");
  if (truncation < 1) throw ConfigError("toy.truncation must be >= 1");
  if (horizon < 0) throw ConfigError("toy.horizon must be >= 0");
  if (max_states < 1) throw ConfigError("toy.max_states must be >= 1");
}

std::size_t ToyChainSpec::state_count() const {
  std::size_t n = 1;
  for (int i = 0; i < truncation; ++i) {
    if (n > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(grid_cells))
      return std::numeric_limits<std::size_t>::max();
    n *= static_cast<std::size_t>(grid_cells);
  }
  return n;
}

json ToyChainSpec::to_json() const {
  return json{{"m", m},
              {"C", C},
              {"beta", beta},
              {"grid_cells", grid_cells},
              {"truncation", truncation},
              {"horizon", horizon},
              {"max_states", max_states}};
}

double memory_mean(const ToyChainSpec& spec, std::span<const double> past) {
  const double q = std::exp(-spec.m);
  const std::size_t limit =
      spec.horizon > 0 ? std::min<std::size_t>(past.size(), static_cast<std::size_t>(spec.horizon)) : past.size();
  double sum = 0.0;
  double w = q;
  for (std::size_t j = 0; j < limit; ++j, w *= q) sum += spec.C * w * (past[j] - 0.5);
  // Zero padding beyond the supplied segment, summed in closed form.
  const auto L = static_cast<double>(past.size());
  if (spec.horizon == 0) {
    sum -= 0.5 * spec.C * std::exp(-spec.m * (L + 1.0)) / (1.0 - q);
  } else if (past.size() < static_cast<std::size_t>(spec.horizon)) {
    sum -= 0.5 * spec.C * (std::exp(-spec.m * (L + 1.0)) - std::exp(-spec.m * (spec.horizon + 1.0))) / (1.0 - q);
  }
  return std::clamp(0.5 + sum, 0.25, 0.75);
}

double kernel_density_at_mean(double beta, double x, double mu) {
  if (x < 0.0 || x > 1.0) return 0.0;
  const double r = std::sqrt(beta);
  const double z = 0.5 * std::sqrt(std::numbers::pi / beta) * (std::erf(r * (1.0 - mu)) + std::erf(r * mu));
  return std::exp(-beta * (x - mu) * (x - mu)) / z;
}

double kernel_density(const ToyChainSpec& spec, double x, std::span<const double> past) {
  return kernel_density_at_mean(spec.beta, x, memory_mean(spec, past));
}

double kernel_normalization(const ToyChainSpec& spec, std::span<const double> past) {
  const double mu = memory_mean(spec, past);
  auto f = [&](double x) { return kernel_density_at_mean(spec.beta, x, mu); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
}

double kernel_delta(const ToyChainSpec& spec, int s, int t, std::span<const double> segment) {
  if (!(s < t - 2)) throw ConfigError("kernel_delta: requires s < t - 2");
  if (segment.size() != static_cast<std::size_t>(t - s + 1))
    throw ConfigError("kernel_delta: segment must hold x_s, ..., x_t");
  for (double v : segment)
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("kernel_delta: values must lie in [0,1]");
  std::vector<double> past(segment.rbegin() + 1, segment.rend());
  const double x_t = segment.back();
  const double with_s = kernel_density(spec, x_t, past);
  past.pop_back();
  return with_s - kernel_density(spec, x_t, past);
}

json DeltaSweep::to_json() const {
  return json{{"distance", distance}, {"sup_delta", sup_delta}, {"constant", constant},
              {"slope", fit.slope},   {"r2", fit.r2}};
}

DeltaSweep delta_sweep(const ToyChainSpec& spec, std::span<const int> distances, int grid_points) {
  spec.validate();
  if (grid_points < 2) throw ConfigError("delta_sweep: need at least two grid points");
  DeltaSweep out;
  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (grid_points - 1);
  std::vector<double> fx, fy;
  for (int d : distances) {
    if (d < 3) throw ConfigError("delta_sweep: distances must be >= 3");
    std::vector<double> seg(static_cast<std::size_t>(d) + 1);
    double sup = 0.0;
    for (double fill : grid)
      for (int pattern = 0; pattern < 2; ++pattern)
        for (double xs : grid)
          for (double xt : grid) {
            for (std::size_t i = 1; i + 1 < seg.size(); ++i) seg[i] = pattern == 0 ? fill : (i % 2 ? fill : 1.0 - fill);
            seg.front() = xs;
            seg.back() = xt;
            sup = std::max(sup, std::abs(kernel_delta(spec, 0, d, seg)));
          }
    out.distance.push_back(d);
    out.sup_delta.push_back(sup);
    out.constant = std::max(out.constant, sup * std::exp(spec.m * d));
    if (sup > 0.0) {
      fx.push_back(d);
      fy.push_back(std::log(sup));
    }
  }
  if (fx.size() >= 2) out.fit = linear_fit(fx, fy);
  return out;
}

std::vector<int> TruncatedChain::decode(std::size_t state, int G, int N) {
  std::vector<int> cells(static_cast<std::size_t>(N));
  for (int i = N - 1; i >= 0; --i) {
    cells[static_cast<std::size_t>(i)] = static_cast<int>(state % static_cast<std::size_t>(G));
    state /= static_cast<std::size_t>(G);
  }
  return cells;
}

TruncatedChain build_truncated(const ToyChainSpec& spec) {
  spec.validate();
  const std::size_t n = spec.state_count();
  if (n > spec.max_states)
    throw ConfigError("toy chain: G^N = " + (n == std::numeric_limits<std::size_t>::max() ? std::string("overflow")
                                                                                          : std::to_string(n)) +
                      " states exceeds max_states = " + std::to_string(spec.max_states));
  const int G = spec.grid_cells, N = spec.truncation;
  std::vector<double> mid(static_cast<std::size_t>(G));
  for (int i = 0; i < G; ++i) mid[static_cast<std::size_t>(i)] = (i + 0.5) / G;

  TruncatedChain chain{spec, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  std::vector<double> window(static_cast<std::size_t>(2 * N));
  std::vector<double> past(static_cast<std::size_t>(N));
  std::vector<double> weights(static_cast<std::size_t>(G));
  for (std::size_t x = 0; x < n; ++x) {
    const auto xc = TruncatedChain::decode(x, G, N);
    for (std::size_t z = 0; z < n; ++z) {
      const auto zc = TruncatedChain::decode(z, G, N);
      // window = (x_{-N+1}, ..., x_0, x_1, ..., x_N)
      for (int i = 0; i < N; ++i) {
        window[static_cast<std::size_t>(i)] = mid[static_cast<std::size_t>(xc[static_cast<std::size_t>(i)])];
        window[static_cast<std::size_t>(N + i)] = mid[static_cast<std::size_t>(zc[static_cast<std::size_t>(i)])];
      }
      double prob = 1.0;
      for (int t = 1; t <= N; ++t) {
        // x_t sits at window index N - 1 + t; its past is the N values before it.
        const int pos = N - 1 + t;
        for (int j = 0; j < N; ++j) past[static_cast<std::size_t>(j)] = window[static_cast<std::size_t>(pos - 1 - j)];
        const double mu = memory_mean(spec, past);
        double norm = 0.0;
        for (int c = 0; c < G; ++c) {
          weights[static_cast<std::size_t>(c)] = kernel_density_at_mean(spec.beta, mid[static_cast<std::size_t>(c)], mu);
          norm += weights[static_cast<std::size_t>(c)];
        }
        prob *= weights[static_cast<std::size_t>(zc[static_cast<std::size_t>(t - 1)])] / norm;
      }
      chain.P(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(z)) = prob;
    }
  }
  validate_stochastic(chain.P);
  return chain;
}

void validate_stochastic(const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols() || P.rows() == 0) throw ConfigError("transition matrix must be square and nonempty");
  if ((P.array() < 0.0).any() || !P.allFinite()) throw ConfigError("transition matrix has negative or non-finite entries");
  const Eigen::VectorXd sums = P.rowwise().sum();
  if (((sums.array() - 1.0).abs() > 1e-10).any()) throw ConfigError("transition matrix rows do not sum to 1");
}

double doob_delta(const Eigen::MatrixXd& P) {
  validate_stochastic(P);
  double best = 1.0;
  const Eigen::Index n = P.rows();
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) best = std::min(best, P.row(a).cwiseMin(P.row(b)).sum());
  return std::clamp(best, 0.0, 1.0);
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P) {
  validate_stochastic(P);
  const Eigen::Index n = P.rows();
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  return A.fullPivLu().solve(b);
}

json TvReport::to_json() const {
  return json{{"delta", delta},   {"tv", tv},           {"envelope", envelope}, {"envelope_holds", envelope_holds},
              {"monotone", monotone}, {"panel_sets", panel_sets}};
}

TvReport tv_contraction_check(const Eigen::MatrixXd& P, int n_max, std::uint64_t panel_seed) {
  if (n_max < 1) throw ConfigError("tv_contraction_check: n_max must be >= 1");
  TvReport rep;
  rep.delta = doob_delta(P);
  const Eigen::VectorXd pi = stationary_distribution(P);
  const Eigen::Index n = P.rows();

  std::vector<Eigen::VectorXd> panel;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(n, 4); ++i) {
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
    ind(i) = 1.0;
    panel.push_back(ind);
  }
  RngStream rng(panel_seed, "toy_panel");
  for (int k = 0; k < 8; ++k) {
    Eigen::VectorXd ind(n);
    for (Eigen::Index i = 0; i < n; ++i) ind(i) = rng.uniform() < 0.5 ? 1.0 : 0.0;
    panel.push_back(ind);
  }
  rep.panel_sets = panel.size();

  rep.envelope_holds = rep.monotone = true;
  std::vector<double> prev_sup(panel.size(), 2.0), prev_inf(panel.size(), -1.0);
  Eigen::MatrixXd Pn = P;
  for (int step = 1; step <= n_max; ++step) {
    double tv = 0.0;
    for (Eigen::Index x = 0; x < n; ++x) tv = std::max(tv, 0.5 * (Pn.row(x).transpose() - pi).cwiseAbs().sum());
    const double env = std::pow(1.0 - rep.delta, step);
    rep.tv.push_back(tv);
    rep.envelope.push_back(env);
    if (tv > env + 1e-12) rep.envelope_holds = false;
    for (std::size_t b = 0; b < panel.size(); ++b) {
      const Eigen::VectorXd pb = Pn * panel[b];
      const double sup = pb.maxCoeff(), inf = pb.minCoeff();
      if (sup > prev_sup[b] + 1e-12 || inf < prev_inf[b] - 1e-12) rep.monotone = false;
      prev_sup[b] = sup;
      prev_inf[b] = inf;
    }
    if (step < n_max) Pn = Pn * P;
  }
  return rep;
}

Eigen::MatrixXd random_stochastic(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, "random_chain");
  Eigen::MatrixXd P(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    for (Eigen::Index j = 0; j < P.cols(); ++j) P(i, j) = rng.uniform();
    P.row(i) /= P.row(i).sum();
  }
  return P;
}

json ResolutionCheck::to_json() const {
  return json{{"delta_coarse", delta_coarse}, {"delta_fine", delta_fine}, {"delta_rel", delta_rel},
              {"tv_rel", tv_rel},             {"tv_floor", tv_floor},     {"tolerance", tolerance},
              {"stable", stable}};
}

ResolutionCheck resolution_check(const ToyChainSpec& spec, int n_max, double tolerance) {
  ToyChainSpec fine = spec;
  fine.grid_cells = 2 * spec.grid_cells;
  const TvReport a = tv_contraction_check(build_truncated(spec).P, n_max);
  const TvReport b = tv_contraction_check(build_truncated(fine).P, n_max);
  ResolutionCheck rc;
  rc.tolerance = tolerance;
  rc.delta_coarse = a.delta;
  rc.delta_fine = b.delta;
  rc.delta_rel = b.delta > 0.0 ? std::abs(a.delta - b.delta) / b.delta : std::abs(a.delta - b.delta);
  for (std::size_t i = 0; i < b.tv.size(); ++i)
    if (b.tv[i] >= rc.tv_floor) rc.tv_rel = std::max(rc.tv_rel, std::abs(a.tv[i] - b.tv[i]) / b.tv[i]);
  rc.stable = rc.delta_rel <= tolerance && rc.tv_rel <= tolerance;
  return rc;
}

double sample_kernel(double beta, double mu, double u) {
  const double r = std::sqrt(beta);
  const double a = std::erf(-r * mu);
  const double b = std::erf(r * (1.0 - mu));
  const double x = mu + boost::math::erf_inv(a + u * (b - a)) / r;
  return std::clamp(x, 0.0, 1.0);
}

json MixingSettings::to_json() const {
  return json{{"h1", h1},           {"h2", h2},         {"T_max", T_max},   {"samples", samples},
              {"bins", bins},       {"bootstrap", bootstrap}, {"seed", seed}, {"factor", factor}};
}

json MixingReport::to_json() const {
  return json{{"T", T},           {"tv", tv},       {"tv_se", tv_se}, {"null_level", null_level},
              {"fitted", fitted}, {"slope", slope}, {"r2", fit.r2},   {"m", m},
              {"pass", pass}};
}

namespace {

using Histogram = std::vector<std::size_t>;

Histogram multinomial(std::size_t n, const std::vector<double>& p, RngStream& rng) {
  Histogram out(p.size(), 0);
  double rest = 1.0;
  std::size_t left = n;
  for (std::size_t b = 0; b + 1 < p.size() && left > 0; ++b) {
    const double q = rest > 0.0 ? std::clamp(p[b] / rest, 0.0, 1.0) : 0.0;
    boost::random::binomial_distribution<long long, double> dist(static_cast<long long>(left), q);
    out[b] = static_cast<std::size_t>(dist(rng.engine()));
    left -= out[b];
    rest -= p[b];
  }
  out.back() += left;
  return out;
}

double histogram_tv(const Histogram& a, const Histogram& b, double n) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  return 0.5 * s / n;
}

}  // namespace

MixingReport memory_mixing_experiment(const ToyChainSpec& spec, const MixingSettings& settings) {
  spec.validate();
  if (settings.T_max < 1) throw ConfigError("mixing.T_max must be >= 1");
  if (settings.samples < 2) throw ConfigError("mixing.samples must be >= 2");
  if (settings.bins < 2) throw ConfigError("mixing.bins must be >= 2");
  if (settings.bootstrap < 2) throw ConfigError("mixing.bootstrap must be >= 2");
  for (const auto* h : {&settings.h1, &settings.h2})
    for (double v : *h)
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("mixing histories must lie in [0,1]");

  const auto T = static_cast<std::size_t>(settings.T_max);
  const auto bins = static_cast<std::size_t>(settings.bins);
  const std::size_t M = settings.samples;
  std::vector<Histogram> counts[2];
  for (auto& c : counts) c.assign(T, Histogram(bins, 0));
  std::mutex merge;

  parallel_chunks(M, settings.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<Histogram> local[2];
    for (auto& c : local) c.assign(T, Histogram(bins, 0));
    std::vector<double> past;
    for (int which = 0; which < 2; ++which) {
      const auto& h = which == 0 ? settings.h1 : settings.h2;
      for (std::size_t i = begin; i < end; ++i) {
        RngStream rng(settings.seed, which == 0 ? "toy_mixing_h1" : "toy_mixing_h2", i);
        past.assign(h.begin(), h.end());
        for (std::size_t t = 0; t < T; ++t) {
          const double x = sample_kernel(spec.beta, memory_mean(spec, past), rng.uniform());
          past.insert(past.begin(), x);
          const auto bin = std::min(bins - 1, static_cast<std::size_t>(x * static_cast<double>(bins)));
          ++local[which][t][bin];
        }
      }
    }
    std::lock_guard lock(merge);
    for (int w = 0; w < 2; ++w)
      for (std::size_t t = 0; t < T; ++t)
        for (std::size_t b = 0; b < bins; ++b) counts[w][t][b] += local[w][t][b];
  });

  MixingReport rep;
  rep.m = spec.m;
  const double n = static_cast<double>(M);
  std::vector<double> fx, fy;
  for (std::size_t t = 0; t < T; ++t) {
    const double tv = histogram_tv(counts[0][t], counts[1][t], n);
    std::vector<double> p1(bins), p2(bins), pooled(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      p1[b] = static_cast<double>(counts[0][t][b]) / n;
      p2[b] = static_cast<double>(counts[1][t][b]) / n;
      pooled[b] = 0.5 * (p1[b] + p2[b]);
    }
    RngStream boot(settings.seed, "toy_bootstrap", t);
    std::vector<double> resampled, null;
    for (int r = 0; r < settings.bootstrap; ++r) {
      resampled.push_back(histogram_tv(multinomial(M, p1, boot), multinomial(M, p2, boot), n));
      null.push_back(histogram_tv(multinomial(M, pooled, boot), multinomial(M, pooled, boot), n));
    }
    const MeanSe rs = mean_se(resampled);
    const MeanSe ns = mean_se(null);
    const double rs_sd = rs.se * std::sqrt(static_cast<double>(rs.n));
    const double ns_sd = ns.se * std::sqrt(static_cast<double>(ns.n));
    rep.T.push_back(static_cast<int>(t + 1));
    rep.tv.push_back(tv);
    rep.tv_se.push_back(rs_sd);
    rep.null_level.push_back(ns.mean + 3.0 * ns_sd);
    const bool use = tv > rep.null_level.back();
    rep.fitted.push_back(use);
    if (use) {
      fx.push_back(static_cast<double>(t + 1));
      fy.push_back(std::log(tv));
    }
  }
  if (fx.size() >= 2) rep.fit = linear_fit(fx, fy);
  rep.slope = rep.fit.slope;
  const double mag = std::abs(rep.slope);
  rep.pass = fx.size() >= 3 && rep.slope < 0.0 && mag >= spec.m / settings.factor && mag <= spec.m * settings.factor;
  return rep;
}

}  // namespace sns
