#pragma once

#include <string>
#include <vector>

#include "qds/channel.hpp"

namespace qds {

struct GeneratedChannel {
  std::string name;
  std::string description;
  std::vector<double> gammas;
  KrausMap map;
};

// Three-level toy model {sqrt(g0) I, sqrt(g1) swap12, sqrt(g2) |1><3|,
// sqrt(g2) (|1><1| + |2><2|)}. The last operator completes the first three to a
// trace-preserving map; `literal` drops it. Requires three non-negative gammas
// summing to one.
GeneratedChannel toy3(const std::vector<double>& gammas = {0.5, 0.3, 0.2}, bool literal = false);

// Seven-level noise model. Requires five positive gammas summing to one with
// g3 < g4 < g5.
GeneratedChannel seven_level(const std::vector<double>& gammas = {0.3, 0.3, 0.05, 0.15, 0.2});

// Dispatch by name ("toy3" or "seven_level"); empty gammas select defaults.
GeneratedChannel generate_example(const std::string& name, const std::vector<double>& gammas,
                                  bool literal = false);

}  // namespace qds
