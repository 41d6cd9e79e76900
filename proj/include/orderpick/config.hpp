#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "orderpick/trainer.hpp"

namespace orderpick {

// invalid configuration input; the CLI maps this to exit code 2
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct WarehouseParams {
  int aisles = 22;
  int slots_per_aisle = 58;
  int stations = 4;
  double scale = 1.0 / 3.0;
};

struct OrderParams {
  double mean_length = 5.0;
  int min_length = 1;
  int max_length = 10;
};

// Everything a run needs, resolvable from (file, preset, flag overrides).
struct ExperimentConfig {
  std::string preset_name = "paper";
  WarehouseParams warehouse;
  WorkerSpec workers;
  OrderParams orders;
  EngineConfig engine;
  int sectors_k = 22;
  std::string policy = "pdm";
  std::string checkpoint_path;
  TrainConfig train;
  int episodes = 50;  // simulate/eval episodes
  uint64_t seed = 1;
  std::string output_dir = "out";
  bool events = false;
  std::string path_cache_file;

  static ExperimentConfig preset(const std::string& name);

  // partial override: only keys present in `j` are applied
  void apply_json(const nlohmann::json& j);
  void load_file(const std::string& path);
  nlohmann::json to_json() const;
  uint64_t hash() const;
  void validate() const;

  // honors the ORDERPICK_OUTPUT_ROOT environment variable
  std::string resolved_output_dir() const;

  // engine config with the worker speed and base seed folded in
  EngineConfig engine_config() const {
    EngineConfig e = engine;
    e.speed = workers.speed;
    e.seed = seed;
    return e;
  }
};

// materialised simulation inputs shared by every episode of a run
struct BuiltEnv {
  WarehouseGraph graph;
  PathCache cache;
  OrderProfile profile;
  SectorPartition sectors;
};

BuiltEnv build_environment(const ExperimentConfig& config);

}  // namespace orderpick
