#include "datamarket/io.hpp"

#include <fstream>
#include <sstream>

namespace datamarket {
namespace {

using nlohmann::json;

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

const json& field(const json& doc, const std::string& name,
                  const std::string& path) {
  if (!doc.is_object()) throw ParseError(path, "expected an object");
  const auto it = doc.find(name);
  if (it == doc.end()) {
    throw ParseError(path.empty() ? name : path + "." + name, "missing field");
  }
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
  return v.get<int>();
}

const json& array(const json& v, std::size_t size, const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array");
  if (v.size() != size) {
    throw ParseError(path, "expected " + std::to_string(size) +
                               " entries, got " + std::to_string(v.size()));
  }
  return v;
}

// Reads a nested array of the given shape into `out`, row-major.
void read_table(const json& v, const std::vector<std::size_t>& shape,
                std::size_t depth, const std::string& path,
                std::vector<double>& out) {
  const json& a = array(v, shape[depth], path);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string p = index_path(path, i);
    if (depth + 1 == shape.size()) {
      out.push_back(number(a[i], p));
    } else {
      read_table(a[i], shape, depth + 1, p, out);
    }
  }
}

json write_table(std::span<const double> values,
                 const std::vector<std::size_t>& shape, std::size_t depth,
                 std::size_t& offset) {
  json a = json::array();
  for (std::size_t i = 0; i < shape[depth]; ++i) {
    if (depth + 1 == shape.size()) {
      a.push_back(values[offset++]);
    } else {
      a.push_back(write_table(values, shape, depth + 1, offset));
    }
  }
  return a;
}

json write_table(std::span<const double> values,
                 const std::vector<std::size_t>& shape) {
  std::size_t offset = 0;
  return write_table(values, shape, 0, offset);
}

json masks_json(const Profile& profile) { return profile.masks(); }

std::string noise_kind_name(NoiseModel::Kind kind) {
  return kind == NoiseModel::Kind::kUniform ? "uniform" : "degenerate";
}

json noise_to_json(const NoiseModel& noise) {
  return {{"gain_halfwidth", noise.gain_halfwidth},
          {"ext_halfwidth", noise.ext_halfwidth},
          {"kind", noise_kind_name(noise.kind)}};
}

NoiseModel noise_from_json(const json& v, const std::string& path) {
  NoiseModel noise;
  if (!v.is_object()) throw ParseError(path, "expected an object");
  if (v.contains("gain_halfwidth")) {
    noise.gain_halfwidth = number(v["gain_halfwidth"], path + ".gain_halfwidth");
  }
  if (v.contains("ext_halfwidth")) {
    noise.ext_halfwidth = number(v["ext_halfwidth"], path + ".ext_halfwidth");
  }
  if (v.contains("kind")) {
    const auto& kind = v["kind"];
    if (kind == "uniform") {
      noise.kind = NoiseModel::Kind::kUniform;
    } else if (kind == "degenerate") {
      noise.kind = NoiseModel::Kind::kDegenerate;
    } else {
      throw ParseError(path + ".kind", "expected \"uniform\" or \"degenerate\"");
    }
  }
  return noise;
}

}  // namespace

json instance_to_json(const MarketInstance& instance) {
  const auto n = static_cast<std::size_t>(instance.buyers());
  const std::size_t sets = instance.sets();
  json doc;
  doc["version"] = kFormatVersion;
  doc["n"] = instance.buyers();
  doc["k"] = instance.sellers();
  doc["alpha"] = instance.alpha();
  doc["lambda"] = instance.lambda();
  doc["gain"] = write_table(instance.gains().values(), {n, sets});
  if (instance.model() == ExternalityModel::kIndependent) {
    doc["model"] = "independent";
    doc["externality"] =
        write_table(instance.independent().values(), {n, n, sets});
  } else {
    doc["model"] = "joint";
    doc["symmetric"] = instance.joint().symmetric();
    doc["externality"] =
        write_table(instance.joint().values(), {n, n, sets, sets});
  }
  doc["noise"] = noise_to_json(instance.noise());
  return doc;
}

MarketInstance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "instance must be an object");
  if (doc.contains("version") &&
      integer(doc["version"], "version") != kFormatVersion) {
    throw ParseError("version", "unsupported format version");
  }
  const int n = integer(field(doc, "n", ""), "n");
  const int k = integer(field(doc, "k", ""), "k");
  if (n < 1) throw ParseError("n", "must be >= 1");
  if (k < 1 || k > kMaxSellers) throw ParseError("k", "must lie in [1, 20]");
  const double alpha = number(field(doc, "alpha", ""), "alpha");
  const double lambda =
      doc.contains("lambda") ? number(doc["lambda"], "lambda") : 1.0;
  const NoiseModel noise =
      doc.contains("noise") ? noise_from_json(doc["noise"], "noise")
                            : NoiseModel{};
  const auto& model = field(doc, "model", "");
  const auto un = static_cast<std::size_t>(n);
  const std::size_t sets = set_count(k);

  std::vector<double> gain;
  read_table(field(doc, "gain", ""), {un, sets}, 0, "gain", gain);
  std::vector<double> ext;
  Externality externality = IndependentExternality(1, 1);
  if (model == "independent") {
    read_table(field(doc, "externality", ""), {un, un, sets}, 0,
               "externality", ext);
    externality = IndependentExternality(n, k, std::move(ext));
  } else if (model == "joint") {
    bool symmetric = false;
    if (doc.contains("symmetric")) {
      if (!doc["symmetric"].is_boolean()) {
        throw ParseError("symmetric", "expected a boolean");
      }
      symmetric = doc["symmetric"].get<bool>();
    }
    read_table(field(doc, "externality", ""), {un, un, sets, sets}, 0,
               "externality", ext);
    externality = JointExternality(n, k, std::move(ext), symmetric);
  } else {
    throw ParseError("model", "expected \"independent\" or \"joint\"");
  }
  try {
    return MarketInstance(GainTable(n, k, std::move(gain)),
                          std::move(externality), alpha, lambda, noise);
  } catch (const PreconditionError& e) {
    throw ParseError("", e.what());
  }
}

std::string dump_instance(const MarketInstance& instance) {
  return instance_to_json(instance).dump(1) + "\n";
}

MarketInstance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed document: ") + e.what());
  }
  return instance_from_json(doc);
}

MarketInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open instance file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

void save_instance(const MarketInstance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << dump_instance(instance);
}

json generator_spec_to_json(const GeneratorSpec& spec) {
  return {{"kind", to_string(spec.kind)}, {"n", spec.n},
          {"k", spec.k},                  {"alpha", spec.alpha},
          {"epsilon", spec.epsilon},      {"lambda", spec.lambda},
          {"seed", spec.seed},            {"a", spec.a},
          {"b", spec.b},                  {"noise", noise_to_json(spec.noise)}};
}

GeneratorSpec generator_spec_from_json(const json& doc) {
  GeneratorSpec spec;
  const auto& kind = field(doc, "kind", "");
  if (!kind.is_string()) throw ParseError("kind", "expected a string");
  try {
    spec.kind = generator_kind_from_string(kind.get<std::string>());
  } catch (const ParameterError& e) {
    throw ParseError("kind", e.what());
  }
  if (doc.contains("n")) spec.n = integer(doc["n"], "n");
  if (doc.contains("k")) spec.k = integer(doc["k"], "k");
  if (doc.contains("alpha")) spec.alpha = number(doc["alpha"], "alpha");
  if (doc.contains("epsilon")) spec.epsilon = number(doc["epsilon"], "epsilon");
  if (doc.contains("lambda")) spec.lambda = number(doc["lambda"], "lambda");
  auto unsigned_field = [&](const char* name) {
    const auto& v = doc[name];
    if (!v.is_number_unsigned()) {
      throw ParseError(name, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  };
  if (doc.contains("seed")) spec.seed = unsigned_field("seed");
  if (doc.contains("a")) spec.a = static_cast<std::uint32_t>(unsigned_field("a"));
  if (doc.contains("b")) spec.b = static_cast<std::uint32_t>(unsigned_field("b"));
  if (doc.contains("noise")) spec.noise = noise_from_json(doc["noise"], "noise");
  return spec;
}

json report_to_json(const MarketInstance& instance,
                    const EquilibriumReport& report) {
  json doc;
  doc["version"] = kFormatVersion;
  doc["n"] = instance.buyers();
  doc["k"] = instance.sellers();
  doc["alpha"] = instance.alpha();
  doc["model"] = instance.model() == ExternalityModel::kIndependent
                     ? "independent"
                     : "joint";
  doc["social_optimum"] = {{"profile", masks_json(report.social_optimum.profile)},
                           {"welfare", report.social_optimum.welfare}};
  json equilibria = json::array();
  for (std::size_t e = 0; e < report.pure_equilibria.size(); ++e) {
    equilibria.push_back({{"profile", masks_json(report.pure_equilibria[e])},
                          {"welfare", report.equilibrium_welfare[e]}});
  }
  doc["pure_equilibria"] = equilibria;
  doc["worst_wrae"] = report.worst_wrae ? json(*report.worst_wrae) : json();
  doc["best_wrae"] = report.best_wrae ? json(*report.best_wrae) : json();
  doc["dominant_profile"] =
      report.dominant_profile ? masks_json(*report.dominant_profile) : json();
  return doc;
}

json dynamics_to_json(const DynamicsTrace& trace) {
  json states = json::array();
  for (const auto& s : trace.states) states.push_back(masks_json(s));
  json updates = json::array();
  for (const auto& u : trace.updates) {
    updates.push_back({{"round", u.round},
                       {"buyer", u.buyer},
                       {"from", u.from.bits()},
                       {"to", u.to.bits()}});
  }
  return {{"states", states},
          {"updates", updates},
          {"converged", trace.converged},
          {"cycle_detected", trace.cycle_detected}};
}

json checks_to_json(const std::vector<InvariantCheck>& checks) {
  json list = json::array();
  for (const auto& c : checks) {
    list.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"version", kFormatVersion},
          {"passed", all_passed(checks)},
          {"checks", list}};
}

void write_trace_jsonl(std::ostream& out, const SimulationTrace& trace,
                       const RegretSeries& regrets) {
  const auto n = static_cast<std::size_t>(trace.n);
  for (std::int64_t t = 1; t <= trace.rounds(); ++t) {
    const std::size_t base = static_cast<std::size_t>(t - 1) * n;
    auto slice = [&](const auto& v) {
      return json(std::vector(v.begin() + base, v.begin() + base + n));
    };
    json record = {{"t", t},
                   {"alpha", trace.alpha[t - 1]},
                   {"profile", slice(trace.masks)},
                   {"utilities", slice(trace.realized_utility)},
                   {"transactions", slice(trace.transaction)},
                   {"per_buyer",
                    {{"pulls", slice(trace.chosen_pulls)},
                     {"active_count", slice(trace.active_count)}}}};
    out << record.dump() << '\n';
  }
  json effective = json::array();
  for (const auto& row : regrets.effective_cumulative) {
    effective.push_back(row.empty() ? 0.0 : row.back());
  }
  std::vector<std::uint32_t> dominant;
  for (const auto& s : regrets.dominant) dominant.push_back(s.bits());
  json summary = {
      {"summary", true},
      {"rounds", trace.rounds()},
      {"seed", trace.seed},
      {"effective_regret", effective},
      {"welfare_regret", regrets.welfare_cumulative.empty()
                             ? 0.0
                             : regrets.welfare_cumulative.back()},
      {"realized_welfare_regret",
       regrets.realized_welfare_cumulative.empty()
           ? 0.0
           : regrets.realized_welfare_cumulative.back()},
      {"dominant_profile", dominant},
      {"social_optimum",
       {{"profile", masks_json(regrets.optimum.profile)},
        {"welfare", regrets.optimum.welfare}}},
      {"clean_event", {{"checks", trace.clean_event_checks},
                       {"violations", trace.clean_event_violations}}}};
  out << summary.dump() << '\n';
}

}  // namespace datamarket
