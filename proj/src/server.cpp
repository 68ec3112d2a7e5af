#include "go4align/server.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "go4align/error.hpp"

namespace go4align {

namespace {

using nlohmann::json;

std::string error_line(const char* code) {
  return json{{"error", code}}.dump();
}

}  // namespace

WeighterConfig ServerConfig::weighter() const {
  WeighterConfig w;
  w.strategy = Strategy::kGO4Align;
  w.beta = beta;
  w.k = k;
  w.cadence = cadence;
  w.engine = engine;
  w.restarts = restarts;
  w.seed = seed;
  return w;
}

WeightServer::WeightServer(ServerConfig config) : config_(config) {}

std::size_t WeightServer::requests_served() const {
  return weighter_ ? weighter_->iteration() : 0;
}

std::string WeightServer::handle(std::string_view line) {
  json request;
  try {
    request = json::parse(line.begin(), line.end());
  } catch (const json::exception&) {
    return error_line("E_PARSE");
  }
  if (!request.is_object() || !request.contains("risks") ||
      !request["risks"].is_array()) {
    return error_line("E_SCHEMA");
  }
  Vector risks;
  for (const auto& v : request["risks"]) {
    if (!v.is_number()) return error_line("E_PARSE");
    risks.push_back(v.get<double>());
  }
  if (risks.size() < 2) return error_line("E_TASKS");
  if (weighter_ && risks.size() != weighter_->task_count()) {
    return error_line("E_PROTOCOL");
  }
  for (double r : risks) {
    if (!std::isfinite(r) || r < 0.0) return error_line("E_RISK");
  }

  if (!weighter_) {
    if (config_.k > risks.size()) return error_line("E_TASKS");
    weighter_.emplace(config_.weighter(), risks.size());
  }
  const std::size_t iteration = weighter_->iteration();
  WeighterOutput out;
  try {
    out = weighter_->weigh(risks);
  } catch (const Error& e) {
    return error_line(e.code() == ErrorCode::kNonpositiveRisk ? "E_RISK" : "E_PROTOCOL");
  }
  json response;
  response["iteration"] = iteration;
  response["weights"] = out.weights;
  response["labels"] = out.grouping->labels;
  response["omega"] = out.grouping->omega;
  return response.dump();
}

void WeightServer::serve(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << handle(line) << '\n' << std::flush;
  }
}

}  // namespace go4align
