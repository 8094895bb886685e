#include "config.hpp"

#include "fnls/kernel.hpp"
#include "fnls/noise.hpp"
#include "fnls/nonlinearity.hpp"
#include "fnls/solver.hpp"
#include "fnls/spectral.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <vector>

namespace fnls::cli {

namespace {

// Reads keys from one JSON object, records the values used in `out` and
// remembers which keys it consumed so that leftovers can be reported.
class Reader {
 public:
  Reader(json in, std::string path, json& out) : in_(std::move(in)), path_(std::move(path)), out_(out) {
    if (!in_.is_object()) throw ConfigError(where(), "expected a JSON object");
    out_ = json::object();
  }

  std::string where() const { return path_.empty() ? "/" : path_; }
  std::string at(const std::string& key) const { return path_ + "/" + key; }
  bool has(const std::string& key) const { return in_.contains(key); }

  double real(const std::string& key, std::optional<double> fallback) {
    const json* v = fetch(key, fallback.has_value());
    double x = fallback.value_or(0.0);
    if (v != nullptr) {
      if (!v->is_number()) throw ConfigError(at(key), "expected a number");
      x = v->get<double>();
    }
    if (!std::isfinite(x)) throw ConfigError(at(key), "must be finite");
    out_[key] = x;
    return x;
  }

  long long integer(const std::string& key, std::optional<long long> fallback) {
    const json* v = fetch(key, fallback.has_value());
    long long x = fallback.value_or(0);
    if (v != nullptr) {
      if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
      x = v->get<long long>();
    }
    out_[key] = x;
    return x;
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
    const json* v = fetch(key, true);
    std::uint64_t x = fallback;
    if (v != nullptr) {
      // documents built in code hold signed integers even when non-negative
      const bool ok = v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0);
      if (!ok) throw ConfigError(at(key), "expected a non-negative integer");
      x = v->get<std::uint64_t>();
    }
    out_[key] = x;
    return x;
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& options) {
    const json* v = fetch(key, true);
    std::string x = fallback;
    if (v != nullptr) {
      if (!v->is_string()) throw ConfigError(at(key), "expected a string");
      x = v->get<std::string>();
    }
    bool known = false;
    std::string list;
    for (const auto& o : options) {
      known = known || o == x;
      list += (list.empty() ? "" : ", ") + o;
    }
    if (!known) throw ConfigError(at(key), "'" + x + "' is not one of " + list);
    out_[key] = x;
    return x;
  }

  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) {
    const json* v = fetch(key, true);
    std::vector<double> xs = fallback;
    if (v != nullptr) {
      if (!v->is_array()) throw ConfigError(at(key), "expected an array of numbers");
      xs.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& e = (*v)[i];
        if (!e.is_number()) throw ConfigError(at(key) + "/" + std::to_string(i), "expected a number");
        xs.push_back(e.get<double>());
      }
    }
    out_[key] = xs;
    return xs;
  }

  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback) {
    const json* v = fetch(key, true);
    std::vector<int> xs = fallback;
    if (v != nullptr) {
      if (!v->is_array()) throw ConfigError(at(key), "expected an array of integers");
      xs.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& e = (*v)[i];
        if (!e.is_number_integer()) {
          throw ConfigError(at(key) + "/" + std::to_string(i), "expected an integer");
        }
        xs.push_back(e.get<int>());
      }
    }
    out_[key] = xs;
    return xs;
  }

  Reader child(const std::string& key) {
    seen_.insert(key);
    const json sub = in_.contains(key) ? in_.at(key) : json::object();
    return Reader(sub, at(key), out_[key]);
  }

  void finish() const {
    for (const auto& item : in_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(at(item.key()), "unknown key");
    }
  }

 private:
  const json* fetch(const std::string& key, bool optional) {
    seen_.insert(key);
    if (!in_.contains(key)) {
      if (!optional) throw ConfigError(at(key), "required key is missing");
      return nullptr;
    }
    return &in_.at(key);
  }

  json in_;
  std::string path_;
  json& out_;
  std::set<std::string> seen_;
};

// Runs a core validator and re-raises its message under a JSON path.
void check(const std::string& path, const std::function<void()>& body) {
  try {
    body();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

double read_hurst(Reader& r, std::optional<double> fallback) {
  const double h = r.real("H", fallback);
  check(r.at("H"), [&] { HurstKernel k(h); });
  return h;
}

GridSpec read_grid(Reader& r) {
  Reader g = r.child("grid");
  const int dim = static_cast<int>(g.integer("dim", 1));
  const int points = static_cast<int>(g.integer("N", 16));
  const double half_width = g.real("L", std::numbers::pi);
  g.finish();
  // validate field by field so the error names the offending key
  check(g.at("dim"), [&] { GridSpec(dim, 8, 1.0); });
  check(g.at("N"), [&] { GridSpec(1, points, 1.0); });
  check(g.at("L"), [&] { GridSpec(1, 8, half_width); });
  return GridSpec(dim, points, half_width);
}

void read_noise(Reader& r, double hurst, const GridSpec& grid) {
  const double alpha = r.real("alpha", hurst >= 0.5 ? 0.2 : 0.75 - hurst);
  check(r.at("alpha"), [&] { check_alpha_window(hurst, alpha); });
  const double decay = r.real("r", 4.0);
  const long long modes = r.integer("modes", 8);
  require(modes >= 0 && modes <= grid.size(), r.at("modes"),
          "must lie in [0, " + std::to_string(grid.size()) + "] (0 keeps every mode)");
  check(r.at("r"), [&] { build_correlation(grid, decay, hurst, alpha, static_cast<int>(modes)); });
}

void read_method(Reader& r, const std::string& fallback) {
  r.choice("method", fallback, {"volterra", "fbm_path"});
  const long long refine = r.integer("refine", 1);
  require(refine >= 1 && refine <= 1024, r.at("refine"), "must lie in [1, 1024]");
}

long long read_path_grid(Reader& r, long long steps) {
  const double horizon = r.real("T", 1.0);
  const long long n = r.integer("n", steps);
  require(n >= 1 && n <= (1LL << 24), r.at("n"), "must lie in [1, 2^24]");
  check(r.at("T"), [&] { TimeGrid tg(horizon, static_cast<int>(n)); });
  return n;
}

void read_solver(Reader& r, double dt, bool snapshots) {
  SolverConfig cfg;
  cfg.horizon = r.real("T", 1.0);
  cfg.dt = r.real("dt", dt);
  check(r.at("dt"), [&] { cfg.steps(); });
  const double m = r.real("M", 0.0);
  require(m >= 0.0, r.at("M"), "must be >= 0 (0 selects 1e3 ||u0||_H1)");
  if (snapshots) {
    const long long stride = r.integer("snapshot_stride", 1);
    require(stride >= 0, r.at("snapshot_stride"), "must be >= 0");
  }
}

void read_nonlinearity(Reader& r) {
  Reader n = r.child("nonlinearity");
  NonlinearitySpec nl;
  const std::string kind = n.choice("kind", "kerr", {"none", "kerr", "saturated"});
  nl.kind = parse_nonlinearity_kind(kind);
  nl.lambda = n.real("lambda", -1.0);
  nl.sigma = n.real("sigma", 1.0);
  nl.kappa = n.real("kappa", 1.0);
  n.finish();
  check(r.at("nonlinearity"), [&] { nl.validate(); });
}

void read_initial(Reader& r) {
  Reader n = r.child("initial");
  n.choice("kind", "gaussian", {"zero", "gaussian", "plane_wave", "soliton"});
  n.real("amplitude", 1.0);
  const double width = n.real("width", 1.0);
  require(width > 0.0, n.at("width"), "must be positive");
  n.integer("wavenumber", 0);
  const double eta = n.real("eta", 1.0);
  require(eta > 0.0, n.at("eta"), "must be positive");
  n.finish();
}

// Shared by every kind driven by the solver: grid, noise, time stepping,
// nonlinearity and initial datum.
void read_problem(Reader& r, std::optional<double> hurst_default, double dt, bool snapshots) {
  const double hurst = read_hurst(r, hurst_default);
  const GridSpec grid = read_grid(r);
  read_noise(r, hurst, grid);
  read_solver(r, dt, snapshots);
  read_nonlinearity(r);
  read_initial(r);
}

void parse_body(Reader& r, Kind kind) {
  switch (kind) {
    case Kind::fbm: {
      read_hurst(r, std::nullopt);
      read_path_grid(r, 256);
      const long long reps = r.integer("replicates", 1000);
      require(reps >= 1 && reps <= 10000000, r.at("replicates"), "must lie in [1, 1e7]");
      r.choice("sampler", "exact", {"exact", "fast"});
      return;
    }
    case Kind::convolve: {
      const double hurst = read_hurst(r, std::nullopt);
      const GridSpec grid = read_grid(r);
      read_noise(r, hurst, grid);
      read_path_grid(r, 16);
      read_method(r, "volterra");
      return;
    }
    case Kind::solve: {
      read_problem(r, 0.5, 1e-3, true);
      const double eps = r.real("eps", 0.0);
      require(eps >= 0.0, r.at("eps"), "must be >= 0");
      read_method(r, "fbm_path");
      return;
    }
    case Kind::skeleton: {
      read_problem(r, std::nullopt, 1.0 / 16, true);
      Reader c = r.child("control");
      c.choice("kind", "random", {"zero", "random", "constant"});
      c.real("scale", 1.0);
      c.finish();
      return;
    }
    case Kind::ldp: {
      read_problem(r, std::nullopt, 1.0 / 16, false);
      Reader e = r.child("event");
      e.choice("kind", "terminal-ball-exit", {"terminal-ball-exit", "sup-norm-exceed", "blow-up-before-T"});
      const double delta = e.real("delta", 0.6);
      require(delta >= 0.0, e.at("delta"), "must be >= 0");
      const double s = e.real("s", 0.0);
      require(s >= 0.0, e.at("s"), "must be >= 0");
      e.finish();
      const auto ladder = r.reals("eps_ladder", {0.25, 0.16, 0.09, 0.04});
      require(!ladder.empty(), r.at("eps_ladder"), "needs at least one eps");
      for (std::size_t i = 0; i < ladder.size(); ++i) {
        require(ladder[i] > 0.0, r.at("eps_ladder") + "/" + std::to_string(i), "eps must be positive");
      }
      const long long reps = r.integer("replicates", 20000);
      require(reps >= 100 && reps <= 10000000, r.at("replicates"), "must lie in [100, 1e7]");
      const long long basis = r.integer("basis_dim", 64);
      require(basis >= 1 && basis <= 64, r.at("basis_dim"), "must lie in [1, 64]");
      const long long iterations = r.integer("iterations", 200);
      require(iterations >= 1, r.at("iterations"), "must be >= 1");
      return;
    }
    case Kind::holder: {
      const std::string source = r.choice("source", "fbm", {"fbm", "convolution"});
      const double hurst = read_hurst(r, std::nullopt);
      const long long n = read_path_grid(r, 16384);
      require(n >= 1023, r.at("n"), "Hoelder estimation needs n >= 1023 steps");
      const long long paths = r.integer("paths", 1);
      require(paths >= 1 && paths <= 100000, r.at("paths"), "must lie in [1, 1e5]");
      r.choice("statistic", "rms", {"rms", "sup"});
      const long long lo = r.integer("min_lag", 4);
      const long long hi = r.integer("max_lag", 0);
      require(lo >= 1, r.at("min_lag"), "must be >= 1");
      require(hi == 0 || hi > lo, r.at("max_lag"), "must exceed min_lag (0 selects n/8)");
      if (source == "fbm") {
        r.choice("sampler", "fast", {"exact", "fast"});
      } else {
        const GridSpec grid = read_grid(r);
        read_noise(r, hurst, grid);
        read_method(r, "fbm_path");
        const double s = r.real("s", 1.0);
        require(s >= 0.0, r.at("s"), "must be >= 0");
      }
      return;
    }
    case Kind::support: {
      read_problem(r, std::nullopt, 1.0 / 16, false);
      const long long samples = r.integer("samples", 50);
      require(samples >= 1 && samples <= 100000, r.at("samples"), "must lie in [1, 1e5]");
      const auto sizes = r.integers("family_sizes", {8, 16, 32, 64});
      require(!sizes.empty(), r.at("family_sizes"), "needs at least one size");
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        require(sizes[i] >= 1 && (i == 0 || sizes[i] > sizes[i - 1]),
                r.at("family_sizes") + "/" + std::to_string(i), "sizes must be positive and increasing");
      }
      const double s = r.real("s", 1.0);
      require(s >= 0.0, r.at("s"), "must be >= 0");
      return;
    }
    case Kind::oracle_suite:
      return;
  }
}

}  // namespace

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::fbm: return "fbm";
    case Kind::convolve: return "convolve";
    case Kind::solve: return "solve";
    case Kind::skeleton: return "skeleton";
    case Kind::ldp: return "ldp";
    case Kind::holder: return "holder";
    case Kind::support: return "support";
    case Kind::oracle_suite: return "oracle-suite";
  }
  return "";
}

Kind parse_kind(const std::string& name) {
  for (Kind k : {Kind::fbm, Kind::convolve, Kind::solve, Kind::skeleton, Kind::ldp, Kind::holder,
                 Kind::support, Kind::oracle_suite}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("/kind", "unknown experiment kind '" + name + "'");
}

RunConfig parse_config(const json& doc, Kind kind) {
  RunConfig cfg;
  cfg.kind = kind;
  json out;
  Reader r(doc, "", out);
  if (r.has("kind")) {
    const std::string named = r.choice("kind", to_string(kind), {to_string(kind)});
    (void)named;
  }
  cfg.seed = r.unsigned64("seed", 0);
  parse_body(r, kind);
  r.finish();
  out.erase("kind");
  out.erase("seed");
  cfg.params = std::move(out);
  return cfg;
}

RunConfig parse_config(const std::string& text, Kind kind) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc, kind);
}

json resolved(const RunConfig& cfg) {
  json j = cfg.params;
  j["kind"] = to_string(cfg.kind);
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace fnls::cli
