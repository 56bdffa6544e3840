#include "properties.hpp"

#include <exception>

namespace ddfuse::testing {

const std::vector<Property>& all_properties() {
  static const std::vector<Property> registry = [] {
    std::vector<Property> out;
    register_geometry_properties(out);
    register_evidence_properties(out);
    register_matching_properties(out);
    register_pipeline_properties(out);
    register_metrics_properties(out);
    register_sim_properties(out);
    register_io_properties(out);
    return out;
  }();
  return registry;
}

PropertyOutcome run_property(const Property& property) {
  std::uint64_t seed = 1469598103934665603ULL;  // FNV-1a of the name
  for (char c : property.module + "/" + property.name) {
    seed = (seed ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  }
  Rng rng(seed);
  PropertyOutcome outcome;
  for (int i = 0; i < property.cases; ++i) {
    ++outcome.cases_run;
    try {
      if (auto failure = property.check(rng)) {
        outcome.failure = "case " + std::to_string(i) + ": " + *failure;
        return outcome;
      }
    } catch (const std::exception& e) {
      outcome.failure = "case " + std::to_string(i) + " threw: " + e.what();
      return outcome;
    }
  }
  return outcome;
}

}  // namespace ddfuse::testing
