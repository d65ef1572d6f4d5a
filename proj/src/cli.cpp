#include "datamarket/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "datamarket/io.hpp"

namespace datamarket {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string instance;
  std::string out;
  std::uint64_t budget = kDefaultProfileBudget;

  // generate
  std::string spec_path;
  std::string kind;
  GeneratorSpec spec;

  // analyze
  bool dynamics = false;
  int max_rounds = 1000;

  // simulate
  std::int64_t horizon = 1000;
  std::vector<std::uint64_t> seeds{0};
  std::string alpha;
  std::string learner = "zooming";
  int k_cap = kDefaultSimulationKCap;
  bool clean_event = false;
};

// Writes to the --out path, or to `out` when none was given.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << text;
}

std::vector<LearnerKind> parse_learners(const std::string& text) {
  std::vector<LearnerKind> kinds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      kinds.push_back(learner_kind_from_string(item));
    } catch (const std::invalid_argument& e) {
      throw ParseError("--learner", e.what());
    }
  }
  if (kinds.empty()) throw ParseError("--learner", "no learner given");
  return kinds;
}

AlphaSchedule parse_alpha(const std::string& text) {
  if (text.empty()) return AlphaSchedule::from_instance();
  if (text == "corollary") return AlphaSchedule::corollary();
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size() || !(value >= 0.0 && value <= 1.0)) {
      throw std::invalid_argument(text);
    }
    return AlphaSchedule::fixed(value);
  } catch (const std::exception&) {
    throw ParseError("--alpha",
                     "expected a number in [0, 1] or \"corollary\", got '" +
                         text + "'");
  }
}

int cmd_generate(const Options& opt, std::ostream& out) {
  GeneratorSpec spec = opt.spec;
  if (!opt.spec_path.empty()) {
    std::ifstream in(opt.spec_path);
    if (!in) throw ParseError("--spec", "cannot open " + opt.spec_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError("", std::string("malformed spec: ") + e.what());
    }
    spec = generator_spec_from_json(doc);
  } else {
    if (opt.kind.empty()) throw ParseError("--kind", "required without --spec");
    try {
      spec.kind = generator_kind_from_string(opt.kind);
    } catch (const ParameterError& e) {
      throw ParseError("--kind", e.what());
    }
  }
  emit(opt.out, dump_instance(generate(spec)), out);
  return kExitOk;
}

int cmd_analyze(const Options& opt, std::ostream& out) {
  const MarketInstance instance = load_instance(opt.instance);
  const EquilibriumReport report = wrae(instance, opt.budget);
  json doc = report_to_json(instance, report);
  if (opt.dynamics) {
    std::vector<int> order(static_cast<std::size_t>(instance.buyers()));
    for (int i = 0; i < instance.buyers(); ++i) order[i] = i;
    const Profile start =
        Profile::uniform(instance.buyers(), SellerSet::empty(instance.sellers()));
    doc["dynamics"] = dynamics_to_json(
        sequential_best_response(instance, start, order, opt.max_rounds));
  }
  emit(opt.out, doc.dump(1) + "\n", out);
  return kExitOk;
}

int cmd_validate(const Options& opt, std::ostream& out) {
  const MarketInstance instance = load_instance(opt.instance);
  emit(opt.out, checks_to_json(validate_instance(instance)).dump(1) + "\n", out);
  return kExitOk;
}

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

Stats stats(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

json stats_json(const std::vector<double>& xs) {
  const Stats s = stats(xs);
  return {{"mean", s.mean}, {"std", s.std}};
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const MarketInstance instance = load_instance(opt.instance);
  if (instance.model() != ExternalityModel::kIndependent) {
    throw UnsupportedModelError("learning unsupported for joint externality");
  }
  if (opt.seeds.empty()) throw ParseError("--seeds", "at least one seed");
  if (opt.horizon < 4) throw ParseError("-T", "horizon must be >= 4");
  if (opt.out.empty()) throw ParseError("--out", "simulate needs an output directory");
  fs::create_directories(opt.out);

  SimulationConfig config;
  config.horizon = opt.horizon;
  config.learners = parse_learners(opt.learner);
  config.alpha = parse_alpha(opt.alpha);
  config.k_cap = opt.k_cap;
  config.track_clean_event = opt.clean_event;

  const int n = instance.buyers();
  const std::int64_t quarter = opt.horizon / 4;
  std::vector<std::vector<double>> final_effective(static_cast<std::size_t>(n));
  std::vector<double> total_effective, total_quarter, welfare, realized;
  json per_seed = json::array();

  for (std::uint64_t seed : opt.seeds) {
    config.seed = seed;
    const SimulationTrace trace = simulate(instance, config);
    const RegretSeries regrets = regret_series(instance, trace, opt.budget);

    const std::string stem = "seed_" + std::to_string(seed);
    {
      std::ofstream file(fs::path(opt.out) / (stem + ".trace.jsonl"));
      if (!file) throw std::runtime_error("cannot write trace for " + stem);
      write_trace_jsonl(file, trace, regrets);
    }
    {
      std::ofstream file(fs::path(opt.out) / (stem + ".regret.csv"));
      if (!file) throw std::runtime_error("cannot write regrets for " + stem);
      write_regret_csv(file, regrets);
    }

    double sum_t = 0.0, sum_q = 0.0;
    std::vector<double> finals;
    for (int i = 0; i < n; ++i) {
      const auto& row = regrets.effective_cumulative[i];
      finals.push_back(row.back());
      final_effective[i].push_back(row.back());
      sum_t += row.back();
      sum_q += row[quarter - 1];
    }
    total_effective.push_back(sum_t);
    total_quarter.push_back(sum_q);
    welfare.push_back(regrets.welfare_cumulative.back());
    realized.push_back(regrets.realized_welfare_cumulative.back());
    per_seed.push_back({{"seed", seed},
                        {"effective_regret", finals},
                        {"effective_regret_quarter", sum_q},
                        {"welfare_regret", welfare.back()},
                        {"clean_event_violations", trace.clean_event_violations}});
  }

  json per_buyer = json::array();
  for (const auto& xs : final_effective) per_buyer.push_back(stats_json(xs));
  const double mean_t = stats(total_effective).mean;
  const double mean_q = stats(total_quarter).mean;
  const double rate_t = mean_t / static_cast<double>(opt.horizon);
  const double rate_q = mean_q / static_cast<double>(quarter);
  std::vector<std::string> learner_names;
  for (auto kind : config.learners) learner_names.push_back(to_string(kind));

  json summary = {
      {"version", kFormatVersion},
      {"n", n},
      {"k", instance.sellers()},
      {"horizon", opt.horizon},
      {"seeds", opt.seeds},
      {"learners", learner_names},
      {"alpha", opt.alpha.empty() ? json(instance.alpha()) : json(opt.alpha)},
      {"effective_regret", per_buyer},
      {"effective_regret_total", stats_json(total_effective)},
      {"welfare_regret", stats_json(welfare)},
      {"realized_welfare_regret", stats_json(realized)},
      {"sublinearity",
       {{"quarter_horizon", quarter},
        {"rate_at_quarter", rate_q},
        {"rate_at_horizon", rate_t},
        {"holds", rate_t < rate_q}}},
      {"per_seed", per_seed}};
  const std::string text = summary.dump(1) + "\n";
  emit((fs::path(opt.out) / "summary.json").string(), text, out);
  out << "wrote " << opt.seeds.size() << " trace(s) and summary.json to "
      << opt.out << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  Options opt;
  CLI::App app{"Fixed-price data market analysis and simulation"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "Write a generated instance");
  generate->add_option("--spec", opt.spec_path, "GeneratorSpec JSON file");
  generate->add_option("--kind", opt.kind,
                       "thm1 | thm2-lower | joint-no-pne | symmetric-omega-n | "
                       "random-independent | random-symmetric | random-joint | "
                       "random-closeness");
  generate->add_option("-n,--buyers", opt.spec.n, "Buyers");
  generate->add_option("-k,--sellers", opt.spec.k, "Sellers");
  generate->add_option("--alpha", opt.spec.alpha, "Transaction weight");
  generate->add_option("--epsilon", opt.spec.epsilon, "Construction epsilon");
  generate->add_option("--lambda", opt.spec.lambda, "Closeness constant");
  generate->add_option("--seed", opt.spec.seed, "Generator seed");
  generate->add_option("--a", opt.spec.a, "joint-no-pne: first set mask");
  generate->add_option("--b", opt.spec.b, "joint-no-pne: second set mask");
  generate->add_option("--out", opt.out, "Output file (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "Equilibria, optimum and WRaE");
  analyze->add_option("--instance", opt.instance, "Instance file")->required();
  analyze->add_option("--out", opt.out, "Report file (default stdout)");
  analyze->add_option("--budget", opt.budget, "Profile enumeration budget");
  analyze->add_flag("--dynamics", opt.dynamics,
                    "Also run sequential best response from all-empty");
  analyze->add_option("--max-rounds", opt.max_rounds, "Best-response passes");

  auto* simulate = app.add_subcommand("simulate", "Run repeated-market learning");
  simulate->add_option("--instance", opt.instance, "Instance file")->required();
  simulate->add_option("--out", opt.out, "Output directory")->required();
  simulate->add_option("-T", opt.horizon, "Horizon");
  simulate->add_option("--seeds", opt.seeds, "Seeds")->delimiter(',');
  simulate->add_option("--alpha", opt.alpha, "Number in [0, 1] or 'corollary'");
  simulate->add_option("--learner", opt.learner,
                       "zooming | ucb | dominant-scripted | random, or one per "
                       "buyer separated by commas");
  simulate->add_option("--budget", opt.budget, "Profile enumeration budget");
  simulate->add_option("--k-cap", opt.k_cap, "Largest k for simulation");
  simulate->add_flag("--clean-event", opt.clean_event,
                     "Track confidence-radius violations");

  auto* validate = app.add_subcommand("validate", "Check instance invariants");
  validate->add_option("--instance", opt.instance, "Instance file")->required();
  validate->add_option("--out", opt.out, "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*generate) return cmd_generate(opt, out);
    if (*analyze) return cmd_analyze(opt, out);
    if (*simulate) return cmd_simulate(opt, out);
    if (*validate) return cmd_validate(opt, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const UnsupportedModelError& e) {
    err << e.what() << "\n";
    return kExitUnsupportedModel;
  } catch (const std::logic_error& e) {
    // invalid_argument derives from logic_error: bad parameters are input
    // errors, anything else is a broken internal invariant.
    if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) {
      err << "invalid input: " << e.what() << "\n";
      return kExitParse;
    }
    err << "internal invariant breach: " << e.what() << "\n";
    return kExitInvariantBreach;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitParse;
}

}  // namespace datamarket
