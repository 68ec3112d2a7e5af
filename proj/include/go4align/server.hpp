#pragma once

// Newline-delimited JSON weighting service. Each request line
//   {"risks": [r_0, ..., r_{M-1}]}
// yields one response line
//   {"iteration": t, "weights": [...], "labels": [...], "omega": [...]}
// or, on a bad request, {"error": "<CODE>"} with the state left unchanged.
//
// Codes: E_PARSE (not JSON, or a non-numeric risk), E_SCHEMA (no "risks"
// array), E_PROTOCOL (task count differs from the first request), E_RISK
// (negative or non-finite risk), E_TASKS (fewer than two tasks or fewer
// tasks than groups).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "go4align/weighters.hpp"

namespace go4align {

struct ServerConfig {
  double beta = kDefaultBeta;
  std::size_t k = 2;
  std::size_t cadence = 1;
  ClusterEngine engine = ClusterEngine::kExact;
  std::size_t restarts = 8;
  std::uint64_t seed = 0;

  WeighterConfig weighter() const;
};

class WeightServer {
 public:
  explicit WeightServer(ServerConfig config);

  std::string handle(std::string_view line);

  // Serves until end of input; flushes after every response.
  void serve(std::istream& in, std::ostream& out);

  std::size_t requests_served() const;

 private:
  ServerConfig config_;
  std::optional<Weighter> weighter_;
};

}  // namespace go4align
