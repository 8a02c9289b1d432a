#include "mmdscan/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mmdscan/bounds.hpp"
#include "mmdscan/config.hpp"
#include "mmdscan/csv_io.hpp"
#include "mmdscan/detect.hpp"
#include "mmdscan/errors.hpp"
#include "mmdscan/experiments.hpp"

namespace mmdscan::cli {
namespace {

namespace fs = std::filesystem;

struct DetectArgs {
  std::string input;
  std::string reference = "none";
  std::size_t dim = 1;
  std::string mode = "argmax";
  std::size_t s = 1;
  std::string delta = "auto";
  std::string subsample_l = "none";
  std::string kernel = "gaussian";
  double sigma = 1.0;
  std::string output;
  std::uint64_t seed = 0;
  bool majority_anomalous = false;
  std::size_t workers = 1;
};

struct BoundArgs {
  std::string which;
  double k = 1.0;
  double mmd2 = 0.0;
  double eta = 0.1;
  std::size_t n = 0;
  std::size_t s = 1;
  std::optional<double> delta;
  std::optional<double> alpha;
  double epsilon = 1.0;
  std::optional<double> e_null;
};

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string output;
  std::string meta;
};

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& flag, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput(flag + ": not a number: '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& flag, const std::string& text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput(flag + ": not a nonnegative integer: '" + text + "'");
  }
  return v;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

void run_detect(const DetectArgs& a, std::ostream& out) {
  std::optional<fs::path> ref_path;
  if (a.reference != "none") ref_path = a.reference;
  const Dataset d = load_dataset(a.input, a.dim, ref_path);

  DetectorConfig cfg;
  cfg.scenario = d.has_reference() ? Scenario::WithReference : Scenario::LeaveOneOut;
  cfg.kernel = KernelSpec(parse_kernel_family(a.kernel), a.sigma);
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  cfg.majority_anomalous = a.majority_anomalous;

  if (a.mode == "argmax") {
    cfg.mode = ArgMax{};
  } else if (a.mode == "top-s") {
    cfg.mode = TopS{a.s};
  } else if (a.mode == "threshold") {
    cfg.mode = Threshold{a.delta == "auto" ? default_delta(d.n()) : parse_real("--delta", a.delta)};
  } else {
    throw InvalidInput("--mode must be argmax, top-s or threshold");
  }

  if (a.subsample_l == "auto") {
    cfg.subsample_l = default_subsample_l(d.n(), a.s);
  } else if (a.subsample_l != "none") {
    cfg.subsample_l = parse_count("--subsample-l", a.subsample_l);
  }
  if (cfg.subsample_l && cfg.scenario == Scenario::WithReference) {
    throw InvalidInput("--subsample-l applies only without a reference (--reference none)");
  }

  const DetectionResult result = detect(d, cfg);
  nlohmann::json j;
  j["scenario"] = cfg.scenario == Scenario::WithReference ? "reference" : "loo";
  j["mode"] = a.mode;
  j["scores"] = result.scores;
  std::vector<std::size_t> flagged;
  for (std::size_t k : result.flagged) flagged.push_back(k + 1);
  j["flagged"] = flagged;
  j["threshold"] = result.threshold_used ? nlohmann::json(*result.threshold_used) : nullptr;
  if (cfg.subsample_l) j["subsample_l"] = *cfg.subsample_l;
  if (!d.labels().empty()) {
    std::vector<std::string> ids;
    for (std::size_t k : result.flagged) ids.push_back(d.labels()[k]);
    j["flagged_ids"] = ids;
  }

  const std::string text = j.dump(2) + "\n";
  if (a.output.empty()) {
    out << text;
  } else {
    open_output(a.output) << text;
  }
}

void run_bound(const BoundArgs& a, std::ostream& out) {
  BoundSpec spec;
  spec.which = parse_bound_case(a.which);
  spec.kernel_bound = a.k;
  spec.mmd2 = a.mmd2;
  spec.eta = a.eta;
  spec.n = a.n;
  spec.s = a.s;
  spec.delta = a.delta;
  spec.epsilon = a.epsilon;
  spec.e_null = a.e_null;
  if (a.alpha) {
    spec.alpha = *a.alpha;
  } else if (a.n > 0) {
    spec.alpha = static_cast<double>(a.s) / static_cast<double>(a.n);
  }
  const BoundResult r = evaluate_bound(spec);
  out << r.m << '\n' << format_double(r.bound) << '\n';
}

std::string series_suffix(const ExperimentSpec& spec, const ErrorCurve& c) {
  const GridPoint& pt = c.points.front();
  if (spec.sweep == SweepAxis::N) return "-s" + std::to_string(pt.s);
  return "-n" + std::to_string(pt.n) + "-s" + std::to_string(pt.s);
}

void run_simulate(const SimulateArgs& a, std::ostream& out) {
  std::ifstream in(a.config);
  if (!in) throw InvalidInput("cannot read config file " + a.config);
  ExperimentSpec spec = experiment_from_config(parse_key_values(in));
  if (a.seed) spec.master_seed = *a.seed;
  if (a.workers) spec.workers = *a.workers;

  const std::vector<ErrorCurve> curves = run_curves(spec);
  if (curves.size() > 1 && a.output.empty()) {
    throw InvalidInput("this config produces " + std::to_string(curves.size()) +
                       " series; pass --output to write one CSV per series");
  }

  nlohmann::json meta;
  meta["spec"] = to_json(spec);
  meta["series"] = nlohmann::json::array();
  for (const ErrorCurve& c : curves) {
    nlohmann::json entry = to_json(c);
    if (a.output.empty()) {
      write_curve_csv(out, c);
    } else {
      fs::path path = a.output;
      if (curves.size() > 1) {
        path.replace_filename(path.stem().string() + series_suffix(spec, c) +
                              path.extension().string());
      }
      auto f = open_output(path);
      write_curve_csv(f, c);
      entry["csv"] = path.string();
    }
    meta["series"].push_back(std::move(entry));
  }

  std::string meta_path = a.meta;
  if (meta_path.empty() && !a.output.empty()) meta_path = a.output + ".json";
  if (!meta_path.empty()) open_output(meta_path) << meta.dump(2) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anomalous sequence detection with kernel maximum mean discrepancy", "mmdscan"};
  app.require_subcommand(1);

  DetectArgs da;
  auto* detect_cmd = app.add_subcommand("detect", "Score sequences in a CSV file and flag anomalies");
  detect_cmd->add_option("--input", da.input, "Sequences, one per row")->required();
  detect_cmd->add_option("--reference", da.reference, "Reference sequence CSV or 'none'");
  detect_cmd->add_option("--dim", da.dim, "Values per sample")->check(CLI::PositiveNumber);
  detect_cmd->add_option("--mode", da.mode, "argmax | top-s | threshold")
      ->check(CLI::IsMember({"argmax", "top-s", "threshold"}));
  detect_cmd->add_option("--s", da.s, "Number of anomalous sequences (top-s)");
  detect_cmd->add_option("--delta", da.delta, "Threshold or 'auto' = (ln n)^-0.7");
  detect_cmd->add_option("--subsample-l", da.subsample_l,
                         "Leave-one-out stack size: 'none', 'auto' = ceil(sqrt(s n)), or an integer");
  detect_cmd->add_option("--kernel", da.kernel, "gaussian | laplace")
      ->check(CLI::IsMember({"gaussian", "laplace"}));
  detect_cmd->add_option("--sigma", da.sigma, "Kernel bandwidth");
  detect_cmd->add_option("--output", da.output, "JSON output path (default stdout)");
  detect_cmd->add_option("--seed", da.seed, "Seed for the subsample draw");
  detect_cmd->add_flag("--majority-anomalous", da.majority_anomalous,
                       "Leave-one-out top-s with s > n/2: flag the s smallest scores");
  detect_cmd->add_option("--workers", da.workers, "Threads for the Gram block build (0 = all)");

  BoundArgs ba;
  auto* bound_cmd = app.add_subcommand("bound", "Sample size sufficient for consistent detection");
  bound_cmd->add_option("--case", ba.which, "ref-s1 | ref-known-s | ref-unknown-s | loo-s1 | "
                                            "loo-known-s | loo-unknown-s | mixture-ref-known-s | "
                                            "mixture-loo-known-s")
      ->required();
  bound_cmd->add_option("--k", ba.k, "Kernel bound K");
  bound_cmd->add_option("--mmd2", ba.mmd2, "Population MMD^2 (MMD^2[p, q~] for mixtures)")
      ->required();
  bound_cmd->add_option("--eta", ba.eta, "Slack eta > 0");
  bound_cmd->add_option("--n", ba.n, "Number of sequences")->required();
  bound_cmd->add_option("--s", ba.s, "Number of anomalous sequences");
  bound_cmd->add_option("--delta", ba.delta, "Threshold (unknown-s cases)");
  bound_cmd->add_option("--alpha", ba.alpha, "Limit of s/n (loo known-s cases; default s/n)");
  bound_cmd->add_option("--epsilon", ba.epsilon, "Mixture weight (mixture cases)");
  bound_cmd->add_option("--e-null", ba.e_null, "E[MMD_u^2[Y, Ybar]] (loo-unknown-s)");

  SimulateArgs sa;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo error-rate campaign");
  sim_cmd->add_option("--config", sa.config, "Experiment config file")->required();
  sim_cmd->add_option("--seed", sa.seed, "Override the config's master seed");
  sim_cmd->add_option("--workers", sa.workers, "Override the config's worker count (0 = all)");
  sim_cmd->add_option("--output", sa.output, "CSV path (default stdout)");
  sim_cmd->add_option("--meta", sa.meta, "JSON sidecar path (default <output>.json)");

  auto* version_cmd = app.add_subcommand("version", "Print version information");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kInvalidInput;
  }

  try {
    if (*detect_cmd) run_detect(da, out);
    if (*bound_cmd) run_bound(ba, out);
    if (*sim_cmd) run_simulate(sa, out);
    if (*version_cmd) {
      out << "mmdscan " << kVersion << "\nconfig-grammar " << kConfigGrammarVersion << '\n';
    }
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const InvalidState& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}

}  // namespace mmdscan::cli
