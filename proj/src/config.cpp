#include "orderpick/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace orderpick {

using nlohmann::json;

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.preset_name = name;
  if (name == "paper") {
    // 22x58 grid: 1276 item slots, 16 AGVs, 8 pickers, 80 orders, 22 sectors
    cfg.warehouse = {22, 58, 4, 1.0 / 3.0};
    cfg.workers.num_agvs = 16;
    cfg.workers.num_pickers = 8;
    cfg.engine.orders_per_episode = 80;
    cfg.engine.max_ticks = 20000;
    cfg.sectors_k = 22;
    cfg.orders = {5.0, 1, 10};
    cfg.train.episodes = 8000;
    cfg.train.eval_interval = 200;
  } else if (name == "tiny") {
    cfg.warehouse = {2, 5, 1, 1.0 / 3.0};
    cfg.workers.num_agvs = 2;
    cfg.workers.num_pickers = 1;
    cfg.engine.orders_per_episode = 10;
    cfg.engine.max_ticks = 2000;
    cfg.sectors_k = 2;
    cfg.orders = {5.0, 1, 8};
    cfg.train.episodes = 600;
    cfg.train.eval_interval = 40;
  } else {
    throw ConfigError("unknown preset: " + name + " (expected paper or tiny)");
  }
  return cfg;
}

void ExperimentConfig::apply_json(const json& j) {
  try {
    if (j.contains("preset")) {
      *this = preset(j.at("preset").get<std::string>());
    }
    if (j.contains("warehouse")) {
      const auto& w = j.at("warehouse");
      if (w.contains("aisles")) warehouse.aisles = w.at("aisles").get<int>();
      if (w.contains("slots_per_aisle")) warehouse.slots_per_aisle = w.at("slots_per_aisle").get<int>();
      if (w.contains("stations")) warehouse.stations = w.at("stations").get<int>();
      if (w.contains("scale")) warehouse.scale = w.at("scale").get<double>();
    }
    if (j.contains("workers")) {
      const auto& w = j.at("workers");
      if (w.contains("agvs")) workers.num_agvs = w.at("agvs").get<int>();
      if (w.contains("pickers")) workers.num_pickers = w.at("pickers").get<int>();
      if (w.contains("speed")) workers.speed = w.at("speed").get<double>();
      if (w.contains("start_locations"))
        workers.start_locations = w.at("start_locations").get<std::vector<int>>();
    }
    if (j.contains("orders")) {
      const auto& o = j.at("orders");
      if (o.contains("mean_length")) orders.mean_length = o.at("mean_length").get<double>();
      if (o.contains("min_length")) orders.min_length = o.at("min_length").get<int>();
      if (o.contains("max_length")) orders.max_length = o.at("max_length").get<int>();
    }
    if (j.contains("engine")) {
      const auto& e = j.at("engine");
      if (e.contains("dt")) engine.dt = e.at("dt").get<double>();
      if (e.contains("orders_per_episode"))
        engine.orders_per_episode = e.at("orders_per_episode").get<int>();
      if (e.contains("max_ticks")) engine.max_ticks = e.at("max_ticks").get<int>();
    }
    if (j.contains("sectors")) sectors_k = j.at("sectors").get<int>();
    if (j.contains("policy")) policy = j.at("policy").get<std::string>();
    if (j.contains("checkpoint")) checkpoint_path = j.at("checkpoint").get<std::string>();
    if (j.contains("train")) {
      const auto& t = j.at("train");
      if (t.contains("algorithm"))
        train.algorithm = algorithm_from_string(t.at("algorithm").get<std::string>());
      if (t.contains("episodes")) train.episodes = t.at("episodes").get<int>();
      if (t.contains("gamma")) train.gamma = t.at("gamma").get<double>();
      if (t.contains("gae_lambda")) train.gae_lambda = t.at("gae_lambda").get<double>();
      if (t.contains("lr")) train.lr = t.at("lr").get<double>();
      if (t.contains("entropy_coef")) train.entropy_coef = t.at("entropy_coef").get<double>();
      if (t.contains("value_coef")) train.value_coef = t.at("value_coef").get<double>();
      if (t.contains("max_grad_norm")) train.max_grad_norm = t.at("max_grad_norm").get<double>();
      if (t.contains("parallel_envs")) train.parallel_envs = t.at("parallel_envs").get<int>();
      if (t.contains("eval_interval")) train.eval_interval = t.at("eval_interval").get<int>();
      if (t.contains("eval_episodes")) train.eval_episodes = t.at("eval_episodes").get<int>();
      if (t.contains("seed")) train.seed = t.at("seed").get<uint64_t>();
    }
    if (j.contains("episodes")) episodes = j.at("episodes").get<int>();
    if (j.contains("seed")) seed = j.at("seed").get<uint64_t>();
    if (j.contains("output_dir")) output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("events")) events = j.at("events").get<bool>();
    if (j.contains("path_cache_file")) path_cache_file = j.at("path_cache_file").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  apply_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["preset"] = preset_name;
  j["warehouse"] = {{"aisles", warehouse.aisles},
                    {"slots_per_aisle", warehouse.slots_per_aisle},
                    {"stations", warehouse.stations},
                    {"scale", warehouse.scale}};
  j["workers"] = {{"agvs", workers.num_agvs},
                  {"pickers", workers.num_pickers},
                  {"speed", workers.speed},
                  {"start_locations", workers.start_locations}};
  j["orders"] = {{"mean_length", orders.mean_length},
                 {"min_length", orders.min_length},
                 {"max_length", orders.max_length}};
  j["engine"] = {{"dt", engine.dt},
                 {"orders_per_episode", engine.orders_per_episode},
                 {"max_ticks", engine.max_ticks}};
  j["sectors"] = sectors_k;
  j["policy"] = policy;
  j["checkpoint"] = checkpoint_path;
  j["train"] = {{"algorithm", to_string(train.algorithm)},
                {"episodes", train.episodes},
                {"gamma", train.gamma},
                {"gae_lambda", train.gae_lambda},
                {"lr", train.lr},
                {"entropy_coef", train.entropy_coef},
                {"value_coef", train.value_coef},
                {"max_grad_norm", train.max_grad_norm},
                {"parallel_envs", train.parallel_envs},
                {"eval_interval", train.eval_interval},
                {"eval_episodes", train.eval_episodes},
                {"seed", train.seed}};
  j["episodes"] = episodes;
  j["seed"] = seed;
  j["events"] = events;
  return j;
}

uint64_t ExperimentConfig::hash() const {
  const std::string dump = to_json().dump();
  return fnv1a64(dump.data(), dump.size());
}

void ExperimentConfig::validate() const {
  try {
    EngineConfig e = engine;
    e.speed = workers.speed;
    e.validate();
    workers.validate();
    if (warehouse.aisles < 1 || warehouse.slots_per_aisle < 1 || warehouse.stations < 1)
      throw std::invalid_argument("warehouse counts must be at least 1");
    if (!(warehouse.scale > 0.0)) throw std::invalid_argument("scale must be positive");
    if (sectors_k < 1) throw std::invalid_argument("sector count must be at least 1");
    if (episodes < 1) throw std::invalid_argument("episodes must be at least 1");
    if (policy != "fm" && policy != "pdm" && policy != "random" && policy != "hsnac" &&
        policy != "snac")
      throw std::invalid_argument("policy must be one of fm|pdm|random|hsnac|snac");
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string ExperimentConfig::resolved_output_dir() const {
  const char* root = std::getenv("ORDERPICK_OUTPUT_ROOT");
  if (root && *root && !std::filesystem::path(output_dir).is_absolute())
    return (std::filesystem::path(root) / output_dir).string();
  return output_dir;
}

BuiltEnv build_environment(const ExperimentConfig& config) {
  config.validate();
  WarehouseGraph graph = generate_layout(config.warehouse.aisles, config.warehouse.slots_per_aisle,
                                         config.warehouse.stations, config.warehouse.scale);
  if (config.sectors_k > graph.size())
    throw ConfigError("sector count exceeds the number of locations");

  std::optional<PathCache> cache;
  if (!config.path_cache_file.empty() && std::filesystem::exists(config.path_cache_file)) {
    try {
      cache = PathCache::load(config.path_cache_file, graph);
    } catch (const std::runtime_error&) {
      cache.reset();  // stale dump for a different layout; recompute
    }
  }
  if (!cache) {
    cache = PathCache::precompute(graph);
    if (!config.path_cache_file.empty()) cache->save(config.path_cache_file);
  }

  OrderProfile profile = OrderProfile::uniform(config.orders.mean_length, config.orders.min_length,
                                               config.orders.max_length, graph.num_items());
  SectorPartition sectors = partition_sectors(graph, config.sectors_k);
  return BuiltEnv{std::move(graph), std::move(*cache), std::move(profile), std::move(sectors)};
}

}  // namespace orderpick
