#include "sns/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "sns/errors.hpp"

namespace sns {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); }

/// Re-roots a module error under a config path: "integrator.dt must be ..."
/// becomes "config.integrator.dt: must be ...".
[[noreturn]] void rewrap(const std::string& path, const std::exception& e, const std::string& local) {
  const std::string msg = e.what();
  if (msg.rfind(local + ".", 0) == 0) {
    const std::size_t start = local.size() + 1;
    const std::size_t sp = msg.find(' ', start);
    if (sp != std::string::npos) fail(path + "." + msg.substr(start, sp - start), msg.substr(sp + 1));
  }
  if (msg.rfind(local + ": ", 0) == 0) fail(path, msg.substr(local.size() + 2));
  fail(path, msg);
}

template <class T>
T convert(const json& v, const std::string& path);

template <>
double convert<double>(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}
template <>
int convert<int>(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(path, "integer out of range");
  return static_cast<int>(x);
}
template <>
std::size_t convert<std::size_t>(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    fail(path, "expected a nonnegative integer");
  return v.get<std::size_t>();
}
template <>
bool convert<bool>(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}
template <>
std::string convert<std::string>(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

template <class T>
std::vector<T> convert_vector(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert<T>(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::uint64_t convert_u64(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0))
    fail(path, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

Mode convert_mode(const json& v, const std::string& path) {
  const auto k = convert_vector<int>(v, path);
  if (k.size() != 2) fail(path, "expected [k1, k2]");
  return {k[0], k[1]};
}

/// Object view that records which keys were read and rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* find(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    used_.insert(key);
    return &j_.at(key);
  }

  template <class T>
  void get(const std::string& key, T& target) {
    if (const json* v = find(key)) target = convert<T>(*v, at(key));
  }
  template <class T>
  void get_vector(const std::string& key, std::vector<T>& target) {
    if (const json* v = find(key)) target = convert_vector<T>(*v, at(key));
  }
  void get_u64(const std::string& key, std::uint64_t& target) {
    if (const json* v = find(key)) target = convert_u64(*v, at(key));
  }
  void ignore(const std::string& key) { used_.insert(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) fail(at(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class F>
void check(bool ok, const std::string& path, F&& msg) {
  if (!ok) fail(path, msg());
}

void parse_verify(Reader r, VerifySection& v) {
  static const std::set<std::string> known = {"orthogonality", "kernel_equivalence", "contraction",
                                              "semigroup",     "delta_f",            "girsanov"};
  r.get_vector("checks", v.checks);
  for (std::size_t i = 0; i < v.checks.size(); ++i)
    check(known.count(v.checks[i]) > 0, r.at("checks") + "[" + std::to_string(i) + "]",
          [&] { return "unknown check '" + v.checks[i] + "'"; });
  std::string kernel = std::string(to_string(v.kernel));
  r.get("kernel", kernel);
  try {
    v.kernel = parse_kernel_kind(kernel);
  } catch (const ConfigError& e) {
    fail(r.at("kernel"), e.what());
  }
  r.get("fields", v.fields);
  r.get("instances", v.instances);
  r.get("amplitude", v.amplitude);
  r.get("steps", v.steps);
  r.get("delta_f_draws", v.delta_f_draws);
  r.get("girsanov_samples", v.girsanov_samples);
  r.get("girsanov_dt", v.girsanov_dt);
  check(v.fields >= 1, r.at("fields"), [] { return "must be >= 1"; });
  check(v.instances >= 1, r.at("instances"), [] { return "must be >= 1"; });
  check(v.amplitude > 0.0, r.at("amplitude"), [] { return "must be positive"; });
  check(v.steps >= 1, r.at("steps"), [] { return "must be >= 1"; });
  check(v.delta_f_draws >= 1, r.at("delta_f_draws"), [] { return "must be >= 1"; });
  check(v.girsanov_samples >= 2, r.at("girsanov_samples"), [] { return "must be >= 2"; });
  check(v.girsanov_dt > 0.0, r.at("girsanov_dt"), [] { return "must be positive"; });
  r.finish();
}

const std::set<std::string>& keys_for(const std::string& type) {
  static const std::map<std::string, std::set<std::string>> table = {
      {"exp_moment", {"t"}},
      {"tail", {"t", "D"}},
      {"tail_curve", {"t", "D"}},
      {"sup_tail", {"A"}},
      {"block_tail", {"t", "t_prime", "beta"}},
      {"block_sweeps", {"t", "length", "betas", "beta", "lengths"}},
      {"novikov", {"lambda", "amplitude", "mode", "t"}},
      {"coupling", {"T", "norm"}},
      {"ito", {"dts", "t"}},
  };
  static const std::set<std::string> none;
  const auto it = table.find(type);
  return it == table.end() ? none : it->second;
}

EstimateCheck parse_estimate_check(Reader r, std::size_t min_samples) {
  EstimateCheck c;
  r.get("type", c.type);
  check(!c.type.empty(), r.at("type"), [] { return "required"; });
  const auto& keys = keys_for(c.type);
  check(!keys.empty(), r.at("type"), [&] { return "unknown estimate '" + c.type + "'"; });
  std::size_t samples = 0;
  r.get("samples", samples);
  c.samples = samples;
  if (samples > 0)
    check(samples >= min_samples, r.at("samples"),
          [&] { return "must be >= min_samples = " + std::to_string(min_samples); });
  auto opt = [&](const char* key, auto& target) {
    if (keys.count(key)) r.get(key, target);
  };
  opt("t", c.t);
  if (c.type == "tail_curve") {
    if (keys.count("D")) r.get_vector("D", c.grid);
  } else {
    opt("D", c.D);
  }
  if (c.type == "sup_tail") r.get_vector("A", c.grid);
  if (c.type == "block_sweeps") {
    r.get_vector("betas", c.grid);
    r.get_vector("lengths", c.lengths);
    r.get("length", c.length);
    r.get("beta", c.beta);
    r.get("t", c.t_start);
  }
  if (c.type == "block_tail") {
    r.get("t", c.t_start);
    r.get("t_prime", c.t_prime);
    r.get("beta", c.beta);
  }
  opt("lambda", c.lambda);
  opt("amplitude", c.amplitude);
  if (keys.count("mode"))
    if (const json* v = r.find("mode")) c.mode = convert_mode(*v, r.at("mode"));
  opt("T", c.T);
  opt("norm", c.norm);
  if (c.type == "ito") r.get_vector("dts", c.dts);

  if (c.type == "tail_curve" || c.type == "sup_tail")
    check(c.grid.size() >= (c.type == "sup_tail" ? 3u : 1u), r.at(c.type == "sup_tail" ? "A" : "D"),
          [] { return "grid too short"; });
  if (c.type == "block_sweeps") {
    check(c.grid.size() >= 3, r.at("betas"), [] { return "need at least three values"; });
    check(c.lengths.size() >= 3, r.at("lengths"), [] { return "need at least three values"; });
  }
  if (c.type == "ito") check(c.dts.size() >= 2, r.at("dts"), [] { return "need at least two step sizes"; });
  check(c.t >= 0.0, r.at("t"), [] { return "must be >= 0"; });
  r.finish();
  return c;
}

void parse_estimate(Reader r, EstimateSection& e) {
  r.get("samples", e.samples);
  r.get("min_samples", e.min_samples);
  r.get("k_se", e.k_se);
  check(e.samples >= e.min_samples, r.at("samples"),
        [&] { return "must be >= min_samples = " + std::to_string(e.min_samples); });
  check(e.k_se > 0.0, r.at("k_se"), [] { return "must be positive"; });
  if (const json* v = r.find("checks")) {
    if (!v->is_array()) fail(r.at("checks"), "expected an array");
    e.checks.clear();
    for (std::size_t i = 0; i < v->size(); ++i)
      e.checks.push_back(parse_estimate_check(Reader((*v)[i], r.at("checks") + "[" + std::to_string(i) + "]"),
                                              e.min_samples));
  }
  r.finish();
}

void parse_toy(Reader r, ToySection& t) {
  if (const json* v = r.find("chain")) {
    Reader c(*v, r.at("chain"));
    c.get("m", t.chain.m);
    c.get("C", t.chain.C);
    c.get("beta", t.chain.beta);
    c.get("grid_cells", t.chain.grid_cells);
    c.get("truncation", t.chain.truncation);
    c.get("horizon", t.chain.horizon);
    c.get("max_states", t.chain.max_states);
    c.finish();
    try {
      t.chain.validate();
    } catch (const ConfigError& e) {
      rewrap(r.at("chain"), e, "toy");
    }
    check(t.chain.state_count() <= t.chain.max_states, r.at("chain"), [&] {
      return "G^N = " + std::to_string(t.chain.state_count()) + " states exceeds max_states = " +
             std::to_string(t.chain.max_states);
    });
  }
  r.get("n_max", t.n_max);
  r.get("two_state", t.two_state);
  r.get("random_chains", t.random_chains);
  r.get("random_states", t.random_states);
  r.get("resolution", t.resolution);
  r.get_vector("delta_distances", t.delta_distances);
  check(t.n_max >= 1, r.at("n_max"), [] { return "must be >= 1"; });
  check(t.random_chains >= 0, r.at("random_chains"), [] { return "must be >= 0"; });
  check(t.random_states >= 2, r.at("random_states"), [] { return "must be >= 2"; });
  for (std::size_t i = 0; i < t.delta_distances.size(); ++i)
    check(t.delta_distances[i] >= 3, r.at("delta_distances"), [] { return "distances must be >= 3"; });
  if (const json* v = r.find("mixing")) {
    Reader m(*v, r.at("mixing"));
    MixingSettings ms;
    m.get_vector("h1", ms.h1);
    m.get_vector("h2", ms.h2);
    m.get("T_max", ms.T_max);
    m.get("samples", ms.samples);
    m.get("bins", ms.bins);
    m.get("bootstrap", ms.bootstrap);
    m.get("factor", ms.factor);
    m.finish();
    for (const auto* h : {&ms.h1, &ms.h2})
      for (double x : *h) check(x >= 0.0 && x <= 1.0, m.at(h == &ms.h1 ? "h1" : "h2"), [] { return "values must lie in [0,1]"; });
    check(ms.T_max >= 1, m.at("T_max"), [] { return "must be >= 1"; });
    check(ms.samples >= 2, m.at("samples"), [] { return "must be >= 2"; });
    check(ms.bins >= 2, m.at("bins"), [] { return "must be >= 2"; });
    check(ms.bootstrap >= 2, m.at("bootstrap"), [] { return "must be >= 2"; });
    check(ms.factor >= 1.0, m.at("factor"), [] { return "must be >= 1"; });
    t.mixing = ms;
  }
  r.finish();
}

json estimate_check_json(const EstimateCheck& c) {
  json j{{"type", c.type}};
  if (c.samples > 0) j["samples"] = c.samples;
  const std::string& t = c.type;
  if (t == "exp_moment") j["t"] = c.t;
  if (t == "tail") j.update({{"t", c.t}, {"D", c.D}});
  if (t == "tail_curve") j.update({{"t", c.t}, {"D", c.grid}});
  if (t == "sup_tail") j["A"] = c.grid;
  if (t == "block_tail") j.update({{"t", c.t_start}, {"t_prime", c.t_prime}, {"beta", c.beta}});
  if (t == "block_sweeps")
    j.update({{"t", c.t_start}, {"length", c.length}, {"betas", c.grid}, {"beta", c.beta}, {"lengths", c.lengths}});
  if (t == "novikov")
    j.update({{"lambda", c.lambda}, {"amplitude", c.amplitude}, {"mode", {c.mode.k1, c.mode.k2}}, {"t", c.t}});
  if (t == "coupling") j.update({{"T", c.T}, {"norm", c.norm}});
  if (t == "ito") j.update({{"dts", c.dts}, {"t", c.t}});
  return j;
}

}  // namespace

ForcingSpec ForcingConfig::build(const Lattice& lattice) const {
  if (flat) return *flat == 0.0 ? ForcingSpec::unforced(lattice) : ForcingSpec::flat(lattice, *flat);
  return ForcingSpec::build(lattice, modes);
}

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["workers"] = workers;
  j["out"] = out;
  j["lattice"] = {{"kmax", kmax}, {"n_forced", n_forced}};
  if (forcing.flat) {
    j["forcing"] = {{"flat", *forcing.flat}};
  } else {
    json modes = json::array();
    for (const auto& [k, g] : forcing.modes) modes.push_back({{"k", {k.k1, k.k2}}, {"gamma", g}});
    j["forcing"] = {{"modes", modes}};
  }
  j["integrator"] = {{"dt", integrator.dt},
                     {"scheme", std::string(sns::to_string(integrator.scheme))},
                     {"t_end", integrator.t_end},
                     {"record_stride", integrator.record_stride},
                     {"kernel", std::string(sns::to_string(kernel))}};
  j["initial"] = {{"type", initial.type}, {"norm", initial.norm}, {"decay", initial.decay}, {"path", initial.path}};
  if (command == "verify")
    j["verify"] = {{"checks", verify.checks},
                   {"kernel", std::string(sns::to_string(verify.kernel))},
                   {"fields", verify.fields},
                   {"instances", verify.instances},
                   {"amplitude", verify.amplitude},
                   {"steps", verify.steps},
                   {"delta_f_draws", verify.delta_f_draws},
                   {"girsanov_samples", verify.girsanov_samples},
                   {"girsanov_dt", verify.girsanov_dt}};
  if (command == "estimate") {
    json checks = json::array();
    for (const auto& c : estimate.checks) checks.push_back(estimate_check_json(c));
    j["estimate"] = {{"samples", estimate.samples},
                     {"min_samples", estimate.min_samples},
                     {"k_se", estimate.k_se},
                     {"checks", checks}};
  }
  if (command == "toy") {
    json t = {{"chain", toy.chain.to_json()},
              {"n_max", toy.n_max},
              {"two_state", toy.two_state},
              {"random_chains", toy.random_chains},
              {"random_states", toy.random_states},
              {"resolution", toy.resolution},
              {"delta_distances", toy.delta_distances}};
    if (toy.mixing) {
      const auto& m = *toy.mixing;
      t["mixing"] = {{"h1", m.h1},     {"h2", m.h2},       {"T_max", m.T_max},         {"samples", m.samples},
                     {"bins", m.bins}, {"bootstrap", m.bootstrap}, {"factor", m.factor}};
    }
    j["toy"] = t;
  }
  return j;
}

RunConfig parse_config(const json& doc, const std::string& command) {
  static const std::set<std::string> commands = {"simulate", "verify", "estimate", "toy"};
  if (!commands.count(command)) throw ConfigError("unknown command '" + command + "'");
  RunConfig cfg;
  cfg.command = command;
  Reader r(doc, "config");
  r.ignore("manifest");
  r.get_u64("seed", cfg.seed);
  r.get("workers", cfg.workers);
  r.get("out", cfg.out);
  check(cfg.workers >= 0, r.at("workers"), [] { return "must be >= 0 (0 = all threads)"; });

  if (const json* v = r.find("lattice")) {
    Reader l(*v, r.at("lattice"));
    l.get("kmax", cfg.kmax);
    l.get("n_forced", cfg.n_forced);
    l.finish();
  }
  try {
    (void)cfg.lattice();
  } catch (const ConfigError& e) {
    rewrap(r.at("lattice"), e, "lattice");
  }

  if (const json* v = r.find("forcing")) {
    Reader f(*v, r.at("forcing"));
    if (f.has("flat") && f.has("modes")) fail(r.at("forcing"), "give either 'flat' or 'modes', not both");
    if (f.has("flat")) {
      double g = 0.0;
      f.get("flat", g);
      cfg.forcing.flat = g;
    } else if (const json* m = f.find("modes")) {
      if (!m->is_array()) fail(f.at("modes"), "expected an array");
      for (std::size_t i = 0; i < m->size(); ++i) {
        Reader e((*m)[i], f.at("modes") + "[" + std::to_string(i) + "]");
        Mode k;
        double g = 0.0;
        if (const json* kv = e.find("k")) k = convert_mode(*kv, e.at("k"));
        else fail(e.at("k"), "required");
        if (!e.has("gamma")) fail(e.at("gamma"), "required");
        e.get("gamma", g);
        e.finish();
        cfg.forcing.modes.push_back({k, g});
      }
    } else {
      fail(r.at("forcing"), "expected 'flat' or 'modes'");
    }
    f.finish();
  } else {
    cfg.forcing.flat = 0.5;
  }
  try {
    (void)cfg.forcing.build(cfg.lattice());
  } catch (const ConfigError& e) {
    rewrap(r.at("forcing"), e, "forcing");
  }

  if (const json* v = r.find("integrator")) {
    Reader g(*v, r.at("integrator"));
    g.get("dt", cfg.integrator.dt);
    g.get("t_end", cfg.integrator.t_end);
    g.get("record_stride", cfg.integrator.record_stride);
    std::string scheme(to_string(cfg.integrator.scheme)), kernel(to_string(cfg.kernel));
    g.get("scheme", scheme);
    g.get("kernel", kernel);
    g.finish();
    try {
      cfg.integrator.scheme = parse_scheme(scheme);
    } catch (const ConfigError& e) {
      fail(g.at("scheme"), e.what());
    }
    try {
      cfg.kernel = parse_kernel_kind(kernel);
    } catch (const ConfigError& e) {
      fail(g.at("kernel"), e.what());
    }
  }
  try {
    cfg.integrator.validate();
  } catch (const ConfigError& e) {
    rewrap(r.at("integrator"), e, "integrator");
  }

  if (const json* v = r.find("initial")) {
    Reader i(*v, r.at("initial"));
    i.get("type", cfg.initial.type);
    i.get("norm", cfg.initial.norm);
    i.get("decay", cfg.initial.decay);
    i.get("path", cfg.initial.path);
    i.finish();
    const auto& t = cfg.initial.type;
    check(t == "zero" || t == "random" || t == "file", i.at("type"), [] { return "expected zero|random|file"; });
    check(cfg.initial.norm >= 0.0, i.at("norm"), [] { return "must be >= 0"; });
    check(t != "file" || !cfg.initial.path.empty(), i.at("path"), [] { return "required for type 'file'"; });
  }

  if (const json* v = r.find("verify")) parse_verify(Reader(*v, r.at("verify")), cfg.verify);
  if (const json* v = r.find("estimate")) parse_estimate(Reader(*v, r.at("estimate")), cfg.estimate);
  if (const json* v = r.find("toy")) parse_toy(Reader(*v, r.at("toy")), cfg.toy);
  r.finish();
  if (command == "estimate" && cfg.estimate.checks.empty())
    throw ConfigError("config.estimate.checks: at least one check is required");
  return cfg;
}

RunConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, command);
}

}  // namespace sns
