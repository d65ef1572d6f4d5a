#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "datamarket/equilibrium.hpp"
#include "datamarket/instances.hpp"
#include "datamarket/learning.hpp"
#include "datamarket/market.hpp"
#include "datamarket/metrics.hpp"
#include "datamarket/validate.hpp"

namespace datamarket {

inline constexpr int kFormatVersion = 1;

// Instance documents. Tables are indexed by the integer seller-set mask:
// gain[i][mask], externality[i][j][mask_j] (independent) or
// externality[i][j][mask_i][mask_j] (joint). Doubles are written in
// shortest round-trip form, so write -> read reproduces every bit.
nlohmann::json instance_to_json(const MarketInstance& instance);
MarketInstance instance_from_json(const nlohmann::json& doc);

std::string dump_instance(const MarketInstance& instance);
MarketInstance parse_instance(const std::string& text);
MarketInstance load_instance(const std::string& path);
void save_instance(const MarketInstance& instance, const std::string& path);

nlohmann::json generator_spec_to_json(const GeneratorSpec& spec);
// Missing fields take the GeneratorSpec defaults.
GeneratorSpec generator_spec_from_json(const nlohmann::json& doc);

nlohmann::json report_to_json(const MarketInstance& instance,
                              const EquilibriumReport& report);
nlohmann::json dynamics_to_json(const DynamicsTrace& trace);
nlohmann::json checks_to_json(const std::vector<InvariantCheck>& checks);

// One JSON object per round, then one summary record with final regrets.
void write_trace_jsonl(std::ostream& out, const SimulationTrace& trace,
                       const RegretSeries& regrets);

}  // namespace datamarket
