#include "sns/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "sns/errors.hpp"
#include "sns/estimates.hpp"
#include "sns/field_io.hpp"
#include "sns/reduction.hpp"
#include "sns/rng.hpp"

namespace sns {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Owns the output directory of one run and the list of files written to it.
class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("config.out: cannot create '" + dir + "': " + ec.message());
  }

  std::ofstream open(const std::string& name, bool data = true) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("config.out: cannot write '" + (dir_ / name).string() + "'");
    if (data) files_.push_back(name);
    return out;
  }

  void write_json(const std::string& name, const json& j, bool data = true) {
    auto out = open(name, data);
    out << j.dump(2) << '\n';
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

void write_manifest(OutputDir& out, const RunConfig& cfg, const CommandResult& res, const json& extra = {}) {
  json doc = cfg.to_json();
  json m = {{"command", cfg.command},
            {"seed", cfg.seed},
            {"substreams", res.substreams},
            {"status", res.status},
            {"exit_code", res.exit_code},
            {"files", res.files}};
  if (!extra.is_null()) m.update(extra);
  doc["manifest"] = m;
  out.write_json("manifest.json", doc, false);
}

std::string fmt(double x) { return format_double(x); }

}  // namespace

SpectralField initial_field(const RunConfig& cfg) {
  const Lattice lat = cfg.lattice();
  const auto& ini = cfg.initial;
  if (ini.type == "zero") return SpectralField(lat);
  if (ini.type == "random") {
    RngStream rng(cfg.seed, "initial");
    return random_field(lat, rng, ini.norm, ini.decay);
  }
  std::ifstream in(ini.path);
  if (!in) throw ConfigError("config.initial.path: cannot open '" + ini.path + "'");
  SpectralField w = [&] {
    try {
      return read_field_csv(in);
    } catch (const std::exception& e) {
      throw ConfigError("config.initial.path: " + std::string(e.what()));
    }
  }();
  if (!(w.lattice() == lat))
    throw ConfigError("config.initial.path: field lattice does not match config.lattice");
  return w;
}

// ---------------------------------------------------------------- simulate

CommandResult cmd_simulate(const RunConfig& cfg) {
  const Lattice lat = cfg.lattice();
  const ForcingSpec spec = cfg.forcing.build(lat);
  const SpectralField w0 = initial_field(cfg);
  CommandResult res;
  res.substreams = {"simulate"};
  if (cfg.initial.type == "random") res.substreams.insert(res.substreams.begin(), "initial");

  OutputDir out(cfg.out);
  RngStream rng(cfg.seed, "simulate");
  TrajectoryRecord rec;
  try {
    rec = simulate(w0, spec, cfg.integrator, rng, cfg.kernel);
  } catch (const BlowUpError& e) {
    res.status = "blowup";
    res.exit_code = kExitBlowUp;
    res.report = {{"blowup_time", e.time()}};
    write_manifest(out, cfg, res, {{"blowup_time", e.time()}});
    return res;
  }

  {
    auto f = out.open("trajectory.csv");
    f << "time,enstrophy,grad_enstrophy\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i)
      f << fmt(rec.times[i]) << ',' << fmt(rec.enstrophy_series[i]) << ',' << fmt(rec.grad_series[i]) << '\n';
  }
  {
    auto f = out.open("fields.csv");
    f << "# kmax=" << lat.kmax() << " n_forced=" << lat.n_forced() << "\n";
    f << "time,k1,k2,re,im\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      const auto h = rec.fields[i].half();
      for (std::size_t s = 0; s < h.size(); ++s) {
        const Mode k = lat.mode(s);
        f << fmt(rec.times[i]) << ',' << k.k1 << ',' << k.k2 << ',' << fmt(h[s].real()) << ',' << fmt(h[s].imag())
          << '\n';
      }
    }
  }
  {
    auto f = out.open("dn.csv");
    f << "n,D_n\n";
    for (std::size_t n = 0; n < rec.dn.size(); ++n) f << n + 1 << ',' << fmt(rec.dn[n]) << '\n';
  }
  res.status = "ok";
  res.files = out.files();
  res.report = {{"records", rec.times.size()}, {"injection_rate", rec.injection_rate}};
  write_manifest(out, cfg, res, {{"records", rec.times.size()}});
  return res;
}

// ------------------------------------------------------------------ verify

namespace {

json entry(const std::string& check, json params, double lhs, double rhs, bool pass) {
  return {{"check", check}, {"params", std::move(params)}, {"lhs", lhs}, {"rhs", rhs}, {"pass", pass},
          {"slack", rhs - lhs}};
}

json verify_orthogonality(const RunConfig& cfg, const Lattice& lat) {
  Drift drift(lat, cfg.verify.kernel);
  double worst = 0.0, worst_energy = 0.0;
  for (int i = 0; i < cfg.verify.fields; ++i) {
    RngStream rng(cfg.seed, "verify_orthogonality", static_cast<std::uint64_t>(i));
    const SpectralField w = random_field(lat, rng, 5.0, 0.3);
    const SpectralField b = drift.nonlinear(w);
    SpectralField psi(lat);
    for (std::size_t s = 0; s < psi.half().size(); ++s)
      psi.half()[s] = w.half()[s] / static_cast<double>(lat.mode(s).norm2());
    const double scale = l2_norm(w) * l2_norm(b);
    const double scale_e = l2_norm(psi) * l2_norm(b);
    if (scale > 0.0) worst = std::max(worst, std::abs(inner(w, b)) / scale);
    if (scale_e > 0.0) worst_energy = std::max(worst_energy, std::abs(inner(psi, b)) / scale_e);
  }
  const double tol = 1e-10;
  json params = {{"kmax", lat.kmax()}, {"fields", cfg.verify.fields},
                 {"kernel", std::string(to_string(cfg.verify.kernel))}, {"energy_ratio", worst_energy}};
  const double lhs = std::max(worst, worst_energy);
  return entry("orthogonality", params, lhs, tol, lhs <= tol);
}

json verify_kernel(const RunConfig& cfg, const Lattice& lat) {
  Drift drift(lat, cfg.verify.kernel);
  double worst = 0.0;
  for (int i = 0; i < cfg.verify.fields; ++i) {
    RngStream rng(cfg.seed, "verify_kernel_equivalence", static_cast<std::uint64_t>(i));
    const SpectralField w = random_field(lat, rng, 3.0, 0.5);
    const double err = max_abs(drift.nonlinear(w) - nonlinear_term_direct(w));
    worst = std::max(worst, err / (1.0 + enstrophy(w)));
  }
  const double tol = 1e-12;
  json params = {{"kmax", lat.kmax()}, {"fields", cfg.verify.fields},
                 {"kernel", std::string(to_string(cfg.verify.kernel))}};
  return entry("kernel_equivalence", params, worst, tol, worst <= tol);
}

struct Instance {
  SPath spath;
  SpectralField l1, l2;
};

Instance make_instance(const RunConfig& cfg, const Lattice& lat, const char* stream, int i) {
  RngStream rng(cfg.seed, stream, static_cast<std::uint64_t>(i));
  SPath p = random_smooth_spath(lat, rng, 1.0, 0.001, cfg.verify.amplitude);
  SpectralField l1 = random_field(lat, rng, 0.5, 1.0, Subspace::l);
  SpectralField l2 = random_field(lat, rng, 0.5, 1.0, Subspace::l);
  return {std::move(p), std::move(l1), std::move(l2)};
}

json verify_contraction(const RunConfig& cfg, const Lattice& lat) {
  LSolveOptions opts;
  opts.kernel = cfg.verify.kernel;
  int held = 0, vacuous = 0, passed = 0;
  double worst_ratio = 0.0, min_rate = std::numeric_limits<double>::infinity();
  int gap = 0;
  for (int i = 0; i < cfg.verify.instances; ++i) {
    const Instance in = make_instance(cfg, lat, "verify_contraction", i);
    const ContractionReport r = contraction_check(in.spath, in.l1, in.l2, opts);
    gap = r.gap;
    if (r.pass) ++passed;
    if (r.vacuous) ++vacuous;
    else if (r.holds) ++held;
    for (std::size_t j = 0; j < r.lhs.size(); ++j)
      if (r.rhs[j] > 0.0) worst_ratio = std::max(worst_ratio, r.lhs[j] / r.rhs[j]);
    min_rate = std::min(min_rate, r.decay_rate);
  }
  const double frac = static_cast<double>(held) / cfg.verify.instances;
  const bool ok = passed == cfg.verify.instances && frac >= 0.9 && min_rate >= 0.9 * gap;
  json params = {{"kmax", lat.kmax()},         {"n_forced", lat.n_forced()}, {"instances", cfg.verify.instances},
                 {"amplitude", cfg.verify.amplitude}, {"nonvacuous_fraction", frac}, {"vacuous", vacuous},
                 {"min_decay_rate", min_rate}, {"gap", gap}};
  return entry("contraction", params, worst_ratio, 1.0, ok);
}

json verify_semigroup(const RunConfig& cfg, const Lattice& lat) {
  LSolveOptions coarse{static_cast<std::size_t>(cfg.verify.steps), cfg.verify.kernel};
  LSolveOptions fine{2 * coarse.steps, cfg.verify.kernel};
  double worst = 0.0, rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (int i = 0; i < cfg.verify.instances; ++i) {
    const Instance in = make_instance(cfg, lat, "verify_semigroup", i);
    const std::size_t n = in.spath.intervals();
    const std::size_t split = n * 3 / 10 + (n * 4 / 10) * static_cast<std::size_t>(i) / cfg.verify.instances;
    const SemigroupReport a = semigroup_check(in.spath, in.l1, split, coarse);
    const SemigroupReport b = semigroup_check(in.spath, in.l1, split, fine);
    if (a.tolerance > 0.0) worst = std::max(worst, a.defect / a.tolerance);
    else if (a.defect > 0.0) worst = std::numeric_limits<double>::max();
    const double ratio = a.defect > 0.0 ? b.defect / a.defect : 0.5;
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
  }
  const bool halves = rmin >= 0.35 && rmax <= 0.65;
  json params = {{"kmax", lat.kmax()},   {"instances", cfg.verify.instances}, {"steps", cfg.verify.steps},
                 {"halving_ratio_min", rmin}, {"halving_ratio_max", rmax}};
  return entry("semigroup", params, worst, 10.0, worst <= 10.0 && halves);
}

json verify_delta_f(const RunConfig& cfg, const Lattice& lat) {
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < cfg.verify.delta_f_draws; ++i) {
    RngStream rng(cfg.seed, "verify_delta_f", static_cast<std::uint64_t>(i));
    const double scale = 0.1 + 2.0 * rng.uniform();
    const SpectralField s = random_field(lat, rng, scale, 0.0, Subspace::s);
    const SpectralField l = random_field(lat, rng, scale * rng.uniform(), 1.0, Subspace::l);
    const SpectralField lp = random_field(lat, rng, scale * rng.uniform(), 1.0, Subspace::l);
    const DeltaFReport r = delta_f_bound_check(s, l, lp);
    ok = ok && r.pass;
    if (r.rhs > 0.0) worst = std::max(worst, r.lhs / r.rhs);
  }
  json params = {{"kmax", lat.kmax()}, {"draws", cfg.verify.delta_f_draws}, {"C", delta_f_constant(lat)}};
  return entry("delta_f", params, worst, 1.0, ok && worst <= 1.0);
}

json verify_girsanov(const RunConfig& cfg) {
  const Lattice lat(2, 1);
  const ForcingSpec spec = ForcingSpec::flat(lat, 1.0);
  SpectralField s0(lat), l0(lat);
  s0.set({1, 0}, 0.8);
  s0.set({0, 1}, cplx(0.0, 0.5));
  l0.set({1, 1}, cplx(0.3, -0.2));
  l0.set({2, 1}, cplx(-0.1, 0.25));
  const auto g = [](const SpectralField& s) { return std::tanh(s({1, 0}).real() + s({0, 1}).imag()); };
  const double t = 0.5;
  const GirsanovComparison c = girsanov_comparison(spec, s0, l0, t, cfg.verify.girsanov_dt,
                                                   static_cast<std::size_t>(cfg.verify.girsanov_samples), cfg.seed, g,
                                                   cfg.workers, 3.0);
  json params = {{"kmax", 2},
                 {"n_forced", 1},
                 {"t", t},
                 {"dt", cfg.verify.girsanov_dt},
                 {"samples", cfg.verify.girsanov_samples},
                 {"observable", "tanh(Re w_(1,0) + Im w_(0,1))"},
                 {"direct_mean", c.direct_mean},
                 {"direct_se", c.direct_se},
                 {"weighted_mean", c.weighted_mean},
                 {"weighted_se", c.weighted_se},
                 {"mean_weight", c.mean_weight}};
  return entry("girsanov", params, c.z, 3.0, c.pass);
}

}  // namespace

CommandResult cmd_verify(const RunConfig& cfg) {
  const Lattice lat = cfg.lattice();
  CommandResult res;
  json checks = json::array();
  bool all = true;
  for (const auto& name : cfg.verify.checks) {
    json e;
    if (name == "orthogonality") e = verify_orthogonality(cfg, lat);
    else if (name == "kernel_equivalence") e = verify_kernel(cfg, lat);
    else if (name == "contraction") e = verify_contraction(cfg, lat);
    else if (name == "semigroup") e = verify_semigroup(cfg, lat);
    else if (name == "delta_f") e = verify_delta_f(cfg, lat);
    else if (name == "girsanov") e = verify_girsanov(cfg);
    if (name == "girsanov") {
      res.substreams.push_back("girsanov_direct");
      res.substreams.push_back("girsanov_wiener");
    } else {
      res.substreams.push_back("verify_" + name);
    }
    all = all && e["pass"].get<bool>();
    checks.push_back(std::move(e));
  }
  OutputDir out(cfg.out);
  res.report = {{"checks", checks}, {"pass", all}};
  out.write_json("verify_report.json", res.report);
  res.status = all ? "pass" : "fail";
  res.exit_code = all ? kExitPass : kExitCheckFailed;
  res.files = out.files();
  write_manifest(out, cfg, res);
  return res;
}

// ---------------------------------------------------------------- estimate

namespace {

struct EstimateOutcome {
  json report;
  bool pass = true;
  std::size_t blowups = 0;
};

EstimateOutcome run_estimate_check(const RunConfig& cfg, const EstimateCheck& c, const SpectralField& w0,
                                   const ForcingSpec& spec, EnsembleSettings s) {
  EstimateOutcome o;
  const auto mc = [&](const McReport& r) {
    o.report = r.to_json();
    o.pass = r.pass;
    o.blowups = r.blowups;
  };
  const auto slope = [&](const SlopeReport& r) {
    o.report = r.to_json();
    o.pass = r.pass;
    o.blowups = r.blowups;
  };
  const std::string& t = c.type;
  if (t == "exp_moment") {
    mc(check_exp_moment(w0, c.t, spec, s));
  } else if (t == "tail") {
    mc(check_tail(w0, c.t, c.D, spec, s));
  } else if (t == "tail_curve") {
    const TailCurve tc = tail_curve(w0, c.t, c.grid, spec, s);
    json pts = json::array();
    for (const auto& p : tc.points) {
      pts.push_back(p.to_json());
      o.pass = o.pass && p.pass;
      o.blowups = std::max(o.blowups, p.blowups);
    }
    o.pass = o.pass && tc.monotone;
    o.report = {{"name", "tail_curve"}, {"points", pts}, {"monotone", tc.monotone}, {"pass", o.pass}};
  } else if (t == "sup_tail") {
    slope(check_sup_tail(w0, c.grid, spec, s));
  } else if (t == "block_tail") {
    mc(check_block_tail(w0, c.t_start, c.t_prime, c.beta, spec, s));
  } else if (t == "block_sweeps") {
    const BlockSweeps b = block_tail_sweeps(w0, c.t_start, c.length, c.grid, c.beta, c.lengths, spec, s);
    o.pass = b.beta.pass && b.length.pass;
    o.blowups = b.beta.blowups;
    o.report = {{"name", "block_sweeps"}, {"beta", b.beta.to_json()}, {"length", b.length.to_json()},
                {"pass", o.pass}};
  } else if (t == "novikov") {
    const Lattice lat = spec.lattice();
    SpectralField zeta(lat);
    try {
      zeta.set(c.mode, c.amplitude);
    } catch (const ConfigError& e) {
      throw ConfigError("config.estimate.checks: novikov mode: " + std::string(e.what()));
    }
    if (!lat.is_forced(c.mode)) throw ConfigError("config.estimate.checks: novikov mode must lie in the forced shell");
    const double dt = s.integrator.dt;
    const auto steps = static_cast<std::size_t>(std::llround(c.t / dt));
    SPath z(lat, 0.0, dt);
    z.values.assign(steps + 1, zeta);
    mc(check_novikov(z, spec, c.lambda, s));
  } else if (t == "coupling") {
    RngStream rng(cfg.seed, s.stream + "_partner");
    const SpectralField b = random_field(spec.lattice(), rng, c.norm);
    const CouplingReport r = coupling_decay(w0, b, spec, s, c.T);
    o.report = r.to_json();
    o.report["name"] = "coupling";
    o.report["informational"] = true;
    o.blowups = r.blowups;
  } else if (t == "ito") {
    const ItoStudy r = ito_study(w0, spec, s, c.dts, c.t);
    o.report = r.to_json();
    o.report["name"] = "ito";
    o.pass = r.decreasing;
    o.report["pass"] = o.pass;
  }
  return o;
}

}  // namespace

CommandResult cmd_estimate(const RunConfig& cfg) {
  const Lattice lat = cfg.lattice();
  const ForcingSpec spec = cfg.forcing.build(lat);
  const SpectralField w0 = initial_field(cfg);
  CommandResult res;
  if (cfg.initial.type == "random") res.substreams.push_back("initial");

  json checks = json::array();
  bool all = true;
  std::size_t blowups = 0;
  for (std::size_t i = 0; i < cfg.estimate.checks.size(); ++i) {
    const EstimateCheck& c = cfg.estimate.checks[i];
    EnsembleSettings s;
    s.integrator = cfg.integrator;
    s.kernel = cfg.kernel;
    s.samples = c.samples > 0 ? c.samples : cfg.estimate.samples;
    s.min_samples = cfg.estimate.min_samples;
    s.seed = cfg.seed;
    s.stream = "estimate_" + std::to_string(i) + "_" + c.type;
    s.workers = cfg.workers;
    s.k_se = cfg.estimate.k_se;
    try {
      s.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("config.estimate.checks[" + std::to_string(i) + "]: " + e.what());
    }
    res.substreams.push_back(s.stream);
    if (c.type == "coupling") res.substreams.push_back(s.stream + "_partner");
    EstimateOutcome o;
    try {
      o = run_estimate_check(cfg, c, w0, spec, s);
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.rfind("config.", 0) == 0) throw;
      throw ConfigError("config.estimate.checks[" + std::to_string(i) + "]: " + msg);
    }
    all = all && o.pass;
    blowups += o.blowups;
    checks.push_back(std::move(o.report));
  }
  OutputDir out(cfg.out);
  res.report = {{"checks", checks}, {"pass", all}, {"blowups", blowups}};
  out.write_json("estimate_report.json", res.report);
  res.files = out.files();
  if (blowups > 0) {
    res.status = "blowup";
    res.exit_code = kExitBlowUp;
  } else {
    res.status = all ? "pass" : "fail";
    res.exit_code = all ? kExitPass : kExitCheckFailed;
  }
  write_manifest(out, cfg, res, {{"blowups", blowups}});
  return res;
}

// --------------------------------------------------------------------- toy

CommandResult cmd_toy(const RunConfig& cfg) {
  const ToySection& toy = cfg.toy;
  CommandResult res;
  json report = json::object();
  bool all = true;
  std::vector<std::tuple<std::string, int, double, double>> curve;
  const auto add_curve = [&](const std::string& name, const TvReport& r) {
    for (std::size_t n = 0; n < r.tv.size(); ++n) curve.emplace_back(name, static_cast<int>(n + 1), r.tv[n], r.envelope[n]);
  };

  // The chain is built first so that an over-budget request fails before any output.
  const TruncatedChain chain = build_truncated(toy.chain);
  validate_stochastic(chain.P);

  if (toy.two_state) {
    Eigen::MatrixXd P(2, 2);
    P << 0.9, 0.1, 0.2, 0.8;
    const TvReport r = tv_contraction_check(P, toy.n_max, derive_seed(cfg.seed, "toy_panel", 0));
    double err = std::abs(r.delta - 0.3);
    for (std::size_t n = 0; n < r.tv.size(); ++n)
      err = std::max(err, std::abs(r.tv[n] - (2.0 / 3.0) * std::pow(0.7, static_cast<double>(n + 1))));
    const bool ok = err <= 1e-12 && r.envelope_holds;
    json j = r.to_json();
    j["max_error"] = err;
    j["pass"] = ok;
    report["two_state"] = j;
    all = all && ok;
    add_curve("two_state", r);
  }

  {
    const TvReport r = tv_contraction_check(chain.P, toy.n_max, derive_seed(cfg.seed, "toy_panel", 1));
    json j = r.to_json();
    j["states"] = chain.states();
    j["pass"] = r.envelope_holds && r.monotone;
    report["truncated_chain"] = j;
    all = all && r.envelope_holds && r.monotone;
    add_curve("truncated", r);
  }
  res.substreams.push_back("toy_panel");

  if (toy.random_chains > 0) {
    json list = json::array();
    bool ok = true;
    for (int i = 0; i < toy.random_chains; ++i) {
      const Eigen::MatrixXd P = random_stochastic(static_cast<std::size_t>(toy.random_states),
                                                  derive_seed(cfg.seed, "toy_random_chain", static_cast<std::uint64_t>(i)));
      const TvReport r = tv_contraction_check(P, toy.n_max, derive_seed(cfg.seed, "toy_panel", 2 + i));
      ok = ok && r.envelope_holds;
      list.push_back({{"delta", r.delta}, {"tv_final", r.tv.back()}, {"envelope_final", r.envelope.back()},
                      {"envelope_holds", r.envelope_holds}});
    }
    report["random_chains"] = {{"states", toy.random_states}, {"chains", list}, {"pass", ok}};
    all = all && ok;
    res.substreams.push_back("toy_random_chain");
  }

  if (toy.resolution) {
    const ResolutionCheck r = resolution_check(toy.chain, toy.n_max);
    json j = r.to_json();
    j["pass"] = r.stable;
    report["resolution"] = j;
    all = all && r.stable;
  }

  if (!toy.delta_distances.empty()) {
    json j = delta_sweep(toy.chain, toy.delta_distances).to_json();
    j["informational"] = true;
    report["delta_sweep"] = j;
  }

  if (toy.mixing) {
    MixingSettings ms = *toy.mixing;
    ms.seed = derive_seed(cfg.seed, "toy_mixing");
    ms.workers = cfg.workers;
    const MixingReport r = memory_mixing_experiment(toy.chain, ms);
    report["mixing"] = r.to_json();
    all = all && r.pass;
    res.substreams.push_back("toy_mixing");
  }

  OutputDir out(cfg.out);
  report["pass"] = all;
  out.write_json("toy_report.json", report);
  {
    auto f = out.open("tv_curve.csv");
    f << "chain,n,tv,envelope\n";
    for (const auto& [name, n, tv, env] : curve) f << name << ',' << n << ',' << fmt(tv) << ',' << fmt(env) << '\n';
  }
  res.report = report;
  res.files = out.files();
  res.status = all ? "pass" : "fail";
  res.exit_code = all ? kExitPass : kExitCheckFailed;
  write_manifest(out, cfg, res);
  return res;
}

CommandResult run_command(const RunConfig& cfg) {
  if (cfg.command == "simulate") return cmd_simulate(cfg);
  if (cfg.command == "verify") return cmd_verify(cfg);
  if (cfg.command == "estimate") return cmd_estimate(cfg);
  if (cfg.command == "toy") return cmd_toy(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace sns
