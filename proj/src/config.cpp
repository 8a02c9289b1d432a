#include "mmdscan/config.hpp"

#include <charconv>
#include <istream>
#include <optional>
#include <set>
#include <string_view>

#include "mmdscan/errors.hpp"
#include "mmdscan/simd/block_sums.hpp"

namespace mmdscan {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Marks keys as consumed so leftovers can be reported as unknown.
class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  std::optional<std::string> get(const std::string& key) {
    const auto it = kv_.values.find(key);
    if (it == kv_.values.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::string get_or(const std::string& key, std::string fallback) {
    return get(key).value_or(std::move(fallback));
  }

  double real(const std::string& key, double fallback) {
    const auto v = get(key);
    return v ? to_real(key, *v) : fallback;
  }

  std::size_t integer(const std::string& key, std::size_t fallback) {
    const auto v = get(key);
    return v ? to_integer(key, *v) : fallback;
  }

  std::vector<std::size_t> integers(const std::string& key, std::vector<std::size_t> fallback) {
    const auto v = get(key);
    if (!v) return fallback;
    std::vector<std::size_t> out;
    std::string_view rest = *v;
    while (true) {
      const auto comma = rest.find(',');
      out.push_back(to_integer(key, std::string(trim(rest.substr(0, comma)))));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    fail(key, "expected true or false, got '" + *v + "'");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto it = kv_.line_of.find(key);
    if (it != kv_.line_of.end()) throw ParseError(it->second, key + ": " + what);
    throw InvalidInput(key + ": " + what);
  }

  void reject_unused() const {
    for (const auto& [key, value] : kv_.values) {
      if (!used_.contains(key)) fail(key, "unknown key");
    }
  }

  double to_real(const std::string& key, const std::string& text) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
      fail(key, "not a number: '" + text + "'");
    }
    return v;
  }

  std::size_t to_integer(const std::string& key, const std::string& text) const {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
      fail(key, "not a nonnegative integer: '" + text + "'");
    }
    return v;
  }

 private:
  const KeyValues& kv_;
  std::set<std::string> used_;
};

DistSpec read_dist(Reader& r, const std::string& prefix, bool allow_contaminated,
                   const DistSpec* base) {
  const std::string family = r.get_or(prefix + ".family", "gaussian");
  if (family == "gaussian") {
    return {GaussianDist{r.real(prefix + ".mean", 0.0), r.real(prefix + ".variance", 1.0)}};
  }
  if (family == "laplace") {
    return {LaplaceDist{r.real(prefix + ".mean", 0.0), r.real(prefix + ".variance", 1.0)}};
  }
  if (family == "bernoulli") return {BernoulliDist{r.real(prefix + ".p0", 0.5)}};
  if (family == "mixture") {
    const std::size_t count = r.integer(prefix + ".components", 0);
    if (count == 0) r.fail(prefix + ".family", "mixture needs " + prefix + ".components >= 1");
    MixtureDist mix;
    for (std::size_t i = 0; i < count; ++i) {
      const std::string sub = prefix + "." + std::to_string(i);
      const double weight = r.real(sub + ".weight", 1.0 / static_cast<double>(count));
      mix.components.push_back({weight, read_dist(r, sub, false, nullptr)});
    }
    return {std::move(mix)};
  }
  if (family == "contaminated" && allow_contaminated && base != nullptr) {
    const double eps = r.real(prefix + ".epsilon", 1.0);
    return contaminated(eps, *base, read_dist(r, prefix + ".tilde", false, nullptr));
  }
  r.fail(prefix + ".family", "unknown distribution family '" + family + "'");
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const std::string_view body = trim(text);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) throw ParseError(line, "empty key");
    if (kv.values.contains(key)) throw ParseError(line, "duplicate key '" + key + "'");
    kv.values.emplace(key, value);
    kv.line_of.emplace(key, line);
  }
  return kv;
}

ExperimentSpec experiment_from_config(const KeyValues& kv) {
  Reader r(kv);
  ExperimentSpec spec;

  const std::string scenario = r.get_or("scenario", "reference");
  if (scenario == "reference") {
    spec.detector.scenario = Scenario::WithReference;
  } else if (scenario == "loo") {
    spec.detector.scenario = Scenario::LeaveOneOut;
  } else {
    r.fail("scenario", "expected reference or loo, got '" + scenario + "'");
  }

  const std::string mode = r.get_or("mode", "argmax");
  if (mode == "argmax") {
    spec.detector.mode = ArgMax{};
  } else if (mode == "top-s") {
    spec.detector.mode = TopS{};
  } else if (mode == "threshold") {
    const std::string delta = r.get_or("delta", "auto");
    if (delta == "auto") {
      spec.delta_auto = true;
      spec.detector.mode = Threshold{};
    } else {
      spec.detector.mode = Threshold{r.to_real("delta", delta)};
    }
  } else {
    r.fail("mode", "expected argmax, top-s or threshold, got '" + mode + "'");
  }
  spec.detector.majority_anomalous = r.boolean("majority_anomalous", false);

  const std::string sub = r.get_or("subsample_l", "none");
  if (sub == "auto") {
    spec.subsample_auto = true;
  } else if (sub != "none") {
    spec.detector.subsample_l = r.to_integer("subsample_l", sub);
  }

  try {
    spec.detector.kernel = KernelSpec(parse_kernel_family(r.get_or("kernel", "gaussian")),
                                      r.real("sigma", 1.0));
  } catch (const InvalidInput& e) {
    r.fail(kv.values.contains("sigma") ? "sigma" : "kernel", e.what());
  }

  const std::string sweep = r.get_or("sweep", "m");
  if (sweep == "m") {
    spec.sweep = SweepAxis::M;
  } else if (sweep == "n") {
    spec.sweep = SweepAxis::N;
  } else {
    r.fail("sweep", "expected m or n, got '" + sweep + "'");
  }

  spec.n_grid = r.integers("n", {100});
  spec.s_values = r.integers("s", {1});
  spec.m_grid = r.integers("m", {});
  spec.trials = r.integer("trials", 500);
  spec.master_seed = r.integer("seed", 0);
  spec.workers = r.integer("workers", 1);

  if (kv.values.contains("schedule.m_rule") || kv.values.contains("schedule.delta_rule")) {
    Schedule sched;
    sched.m_rule.name = r.get_or("schedule.m_rule", "log-power");
    sched.m_rule.coef = r.real("schedule.m_coef", sched.m_rule.coef);
    sched.m_rule.power = r.real("schedule.m_power", sched.m_rule.power);
    sched.m_rule.value = r.real("schedule.m_value", 0.0);
    sched.delta_rule.name = r.get_or("schedule.delta_rule", "inverse-log-power");
    sched.delta_rule.power = r.real("schedule.delta_power", sched.delta_rule.power);
    sched.delta_rule.value = r.real("schedule.delta_value", 0.0);
    spec.schedule = sched;
  }

  spec.p = read_dist(r, "p", false, nullptr);
  spec.q = read_dist(r, "q", true, &spec.p);

  r.reject_unused();
  validate(spec);
  return spec;
}

nlohmann::json to_json(const DistSpec& d) {
  using nlohmann::json;
  return std::visit(
      [](const auto& f) -> json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, GaussianDist>) {
          return {{"family", "gaussian"}, {"mean", f.mean}, {"variance", f.variance}};
        } else if constexpr (std::is_same_v<F, LaplaceDist>) {
          return {{"family", "laplace"}, {"mean", f.mean}, {"variance", f.variance}};
        } else if constexpr (std::is_same_v<F, BernoulliDist>) {
          return {{"family", "bernoulli"}, {"p0", f.p0}};
        } else {
          json comps = json::array();
          for (const auto& c : f.components) {
            comps.push_back({{"weight", c.weight}, {"dist", to_json(c.dist)}});
          }
          return {{"family", "mixture"}, {"components", comps}};
        }
      },
      d.family);
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  using nlohmann::json;
  json j;
  j["config_grammar_version"] = kConfigGrammarVersion;
  j["version"] = kVersion;
  j["simd_backend"] = std::string(simd::active_backend().name);
  j["scenario"] = spec.detector.scenario == Scenario::WithReference ? "reference" : "loo";
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ArgMax>) {
          j["mode"] = "argmax";
        } else if constexpr (std::is_same_v<M, TopS>) {
          j["mode"] = "top-s";
        } else {
          j["mode"] = "threshold";
          j["delta"] = spec.delta_auto ? json("auto") : json(m.delta);
        }
      },
      spec.detector.mode);
  j["majority_anomalous"] = spec.detector.majority_anomalous;
  if (spec.subsample_auto) {
    j["subsample_l"] = "auto";
  } else if (spec.detector.subsample_l) {
    j["subsample_l"] = *spec.detector.subsample_l;
  } else {
    j["subsample_l"] = nullptr;
  }
  j["kernel"] = {{"family", std::string(to_string(spec.detector.kernel.family()))},
                 {"sigma", spec.detector.kernel.sigma()}};
  j["sweep"] = spec.sweep == SweepAxis::M ? "m" : "n";
  j["n"] = spec.n_grid;
  j["s"] = spec.s_values;
  j["m"] = spec.m_grid;
  j["trials"] = spec.trials;
  j["seed"] = spec.master_seed;
  j["workers"] = spec.workers;
  if (spec.schedule) {
    const auto& s = *spec.schedule;
    j["schedule"] = {{"m_rule", {{"name", s.m_rule.name},
                                 {"coef", s.m_rule.coef},
                                 {"power", s.m_rule.power},
                                 {"value", s.m_rule.value}}},
                     {"delta_rule", {{"name", s.delta_rule.name},
                                     {"power", s.delta_rule.power},
                                     {"value", s.delta_rule.value}}}};
  } else {
    j["schedule"] = nullptr;
  }
  j["p"] = to_json(spec.p);
  j["q"] = to_json(spec.q);
  return j;
}

nlohmann::json to_json(const ErrorCurve& curve) {
  using nlohmann::json;
  json points = json::array();
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const GridPoint& pt = curve.points[i];
    points.push_back({{"n", pt.n},
                      {"s", pt.s},
                      {"m", pt.m},
                      {"delta", pt.delta ? json(*pt.delta) : json(nullptr)},
                      {"error_rate", curve.error_rate[i]},
                      {"stderr", curve.stderr_rate[i]},
                      {"trials", curve.trials[i]},
                      {"precision", curve.precision[i]},
                      {"recall", curve.recall[i]}});
  }
  return {{"axis", curve.axis == SweepAxis::M ? "m" : "n"}, {"points", points}};
}

}  // namespace mmdscan
