#include "go4align/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "go4align/error.hpp"

namespace go4align {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kConfig, fmt::format("{}: {}", path, msg));
}

void reject_unknown(const YAML::Node& node, const std::string& path,
                    const std::set<std::string>& known) {
  if (!node.IsMap()) fail(path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <typename T>
void read(const YAML::Node& node, const std::string& section, const char* key,
          T& out) {
  const YAML::Node value = node[key];
  if (!value) return;
  const std::string path = section + "." + key;
  if (!value.IsScalar()) fail(path, "expected a scalar");
  try {
    out = value.as<T>();
  } catch (const YAML::Exception&) {
    if constexpr (std::is_same_v<T, bool>) {
      fail(path, "expected true or false");
    } else if constexpr (std::is_arithmetic_v<T>) {
      fail(path, "expected a number");
    } else {
      fail(path, "expected a string");
    }
  }
}

template <typename T>
void read_list(const YAML::Node& node, const std::string& section,
               const char* key, std::vector<T>& out) {
  const YAML::Node value = node[key];
  if (!value) return;
  const std::string path = section + "." + key;
  if (!value.IsSequence()) fail(path, "expected a list");
  out.clear();
  for (std::size_t i = 0; i < value.size(); ++i) {
    try {
      out.push_back(value[i].as<T>());
    } catch (const YAML::Exception&) {
      fail(fmt::format("{}[{}]", path, i), "expected a number");
    }
  }
}

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0)) fail(path, "must be > 0");
}

}  // namespace

RunConfig parse_run_config(const std::string& yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig, fmt::format("config: {}", e.what()));
  }
  if (!root || root.IsNull()) fail("config", "empty document");
  reject_unknown(root, "", {"problem", "strategy", "optimizer", "output"});

  RunConfig cfg;

  if (const YAML::Node p = root["problem"]) {
    reject_unknown(p, "problem",
                   {"tasks", "shared_dim", "head_dim", "rows", "scales", "data_id",
                    "conflict", "noise", "magnitude", "seed"});
    ProblemSpec& s = cfg.problem;
    read(p, "problem", "tasks", s.tasks);
    read(p, "problem", "shared_dim", s.shared_dim);
    read(p, "problem", "head_dim", s.head_dim);
    read(p, "problem", "rows", s.rows);
    read_list(p, "problem", "scales", s.scales);
    read_list(p, "problem", "data_id", s.data_id);
    read(p, "problem", "conflict", s.conflict);
    read(p, "problem", "noise", s.noise);
    read(p, "problem", "magnitude", s.magnitude);
    read(p, "problem", "seed", s.seed);
  }
  const ProblemSpec& prob = cfg.problem;
  if (prob.tasks < 2) fail("problem.tasks", "must be >= 2");
  if (prob.shared_dim < 1) fail("problem.shared_dim", "must be >= 1");
  if (prob.rows < 1) fail("problem.rows", "must be >= 1");
  if (!prob.scales.empty() && prob.scales.size() != prob.tasks) {
    fail("problem.scales", fmt::format("expected {} entries", prob.tasks));
  }
  for (double v : prob.scales) require_positive(v, "problem.scales");
  if (!prob.data_id.empty() && prob.data_id.size() != prob.tasks) {
    fail("problem.data_id", fmt::format("expected {} entries", prob.tasks));
  }

  if (const YAML::Node s = root["strategy"]) {
    reject_unknown(s, "strategy",
                   {"name", "beta", "k", "cadence", "engine", "restarts",
                    "temperature", "uw_lr", "agrm_wrap"});
    WeighterConfig& w = cfg.weighting;
    std::string name = to_string(w.strategy);
    read(s, "strategy", "name", name);
    try {
      w.strategy = parse_strategy(name);
    } catch (const Error& e) {
      fail("strategy.name", e.what());
    }
    read(s, "strategy", "beta", w.beta);
    if (const YAML::Node k = s["k"]) {
      if (k.IsScalar() && k.Scalar() == "elbow") {
        cfg.k_elbow = true;
      } else {
        read(s, "strategy", "k", w.k);
      }
    }
    read(s, "strategy", "cadence", w.cadence);
    std::string engine = "exact";
    read(s, "strategy", "engine", engine);
    if (engine == "exact") {
      w.engine = ClusterEngine::kExact;
    } else if (engine == "lloyd") {
      w.engine = ClusterEngine::kLloyd;
    } else {
      fail("strategy.engine", "expected exact or lloyd");
    }
    read(s, "strategy", "restarts", w.restarts);
    read(s, "strategy", "temperature", w.temperature);
    read(s, "strategy", "uw_lr", w.uw_lr);
    read(s, "strategy", "agrm_wrap", w.agrm_wrap);
  }
  const WeighterConfig& w = cfg.weighting;
  if (!(w.beta >= 0.0)) fail("strategy.beta", "must be >= 0");
  if (w.cadence < 1) fail("strategy.cadence", "must be >= 1");
  if (w.restarts < 1) fail("strategy.restarts", "must be >= 1");
  require_positive(w.temperature, "strategy.temperature");
  require_positive(w.uw_lr, "strategy.uw_lr");
  const bool groups = w.strategy == Strategy::kGO4Align || w.agrm_wrap;
  if (groups && !cfg.k_elbow && (w.k < 2 || w.k > prob.tasks)) {
    fail("strategy.k", fmt::format("must satisfy 1 < k <= {}", prob.tasks));
  }

  if (const YAML::Node o = root["optimizer"]) {
    reject_unknown(o, "optimizer",
                   {"kind", "lr", "iterations", "epoch_length", "seed",
                    "convergence_fraction"});
    std::string kind = to_string(cfg.train.optimizer);
    read(o, "optimizer", "kind", kind);
    try {
      cfg.train.optimizer = parse_optimizer(kind);
    } catch (const Error& e) {
      fail("optimizer.kind", e.what());
    }
    read(o, "optimizer", "lr", cfg.train.lr);
    read(o, "optimizer", "iterations", cfg.train.iterations);
    read(o, "optimizer", "epoch_length", cfg.train.epoch_length);
    read(o, "optimizer", "seed", cfg.seed);
    read(o, "optimizer", "convergence_fraction", cfg.convergence_fraction);
  }
  require_positive(cfg.train.lr, "optimizer.lr");
  if (cfg.train.epoch_length < 1) fail("optimizer.epoch_length", "must be >= 1");
  require_positive(cfg.convergence_fraction, "optimizer.convergence_fraction");
  cfg.weighting.epoch_length = cfg.train.epoch_length;

  if (const YAML::Node out = root["output"]) {
    reject_unknown(out, "output", {"dir"});
    std::string dir = cfg.output_dir.string();
    read(out, "output", "dir", dir);
    cfg.output_dir = dir;
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kConfig, fmt::format("cannot read config {}", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

}  // namespace go4align
