#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "orderpick/bench.hpp"
#include "orderpick/config.hpp"
#include "orderpick/report.hpp"

namespace fs = std::filesystem;
using namespace orderpick;

namespace {

struct CommonOpts {
  std::string config_file;
  std::string preset;
  std::string policy;
  std::string checkpoint;
  std::string out_dir;
  int episodes = -1;
  int64_t seed = -1;
  bool events = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_file, "JSON config file");
  cmd->add_option("--preset", opts.preset, "built-in preset: paper or tiny");
  cmd->add_option("--policy", opts.policy, "fm|pdm|random|hsnac|snac");
  cmd->add_option("--checkpoint", opts.checkpoint, "checkpoint file for hsnac/snac policies");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--episodes", opts.episodes, "episode count");
  cmd->add_option("--seed", opts.seed, "base random seed");
  cmd->add_flag("--events", opts.events, "write a JSON-lines event log");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig cfg =
      ExperimentConfig::preset(opts.preset.empty() ? "paper" : opts.preset);
  if (!opts.config_file.empty()) cfg.load_file(opts.config_file);
  if (!opts.policy.empty()) cfg.policy = opts.policy;
  if (!opts.checkpoint.empty()) cfg.checkpoint_path = opts.checkpoint;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.episodes >= 0) cfg.episodes = opts.episodes;
  if (opts.seed >= 0) {
    cfg.seed = static_cast<uint64_t>(opts.seed);
    cfg.train.seed = cfg.seed;
  }
  if (opts.events) cfg.events = true;
  cfg.validate();
  return cfg;
}

std::unique_ptr<Policy> make_policy(const ExperimentConfig& cfg, const BuiltEnv& env) {
  if (cfg.policy == "fm") return std::make_unique<FollowMePolicy>();
  if (cfg.policy == "pdm") return std::make_unique<PdmPolicy>();
  if (cfg.policy == "random") return std::make_unique<RandomPolicy>();
  if (cfg.checkpoint_path.empty())
    throw ConfigError("policy " + cfg.policy + " needs --checkpoint");
  Checkpoint ckpt = load_checkpoint(cfg.checkpoint_path);
  if (to_string(ckpt.policy.algorithm) != cfg.policy)
    throw ConfigError("checkpoint holds a " + std::string(to_string(ckpt.policy.algorithm)) +
                      " policy, not " + cfg.policy);
  if (ckpt.policy.num_agvs != cfg.workers.num_agvs ||
      ckpt.policy.num_pickers != cfg.workers.num_pickers ||
      ckpt.policy.num_sectors != cfg.sectors_k)
    throw ConfigError("checkpoint does not match the configured worker/sector counts");
  return std::make_unique<NetPolicy>(std::move(ckpt.policy), env.sectors, /*greedy=*/true);
}

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.resolved_output_dir();
  fs::create_directories(dir);
  return dir;
}

int cmd_simulate(const CommonOpts& opts, bool aggregate_only) {
  const ExperimentConfig cfg = resolve_config(opts);
  const BuiltEnv env = build_environment(cfg);
  const fs::path out = prepare_out_dir(cfg);
  auto policy = make_policy(cfg, env);

  Engine engine(env.graph, env.cache, cfg.workers, env.profile, cfg.engine_config());
  std::ofstream event_log;
  int current_episode = 0;
  if (cfg.events) {
    event_log.open(out / "events.jsonl", std::ios::binary);
    engine.set_event_sink([&](const Event& e) {
      event_log << "{\"episode\":" << current_episode << ',' << event_to_json(e).substr(1) << '\n';
    });
  }

  EvalReport report;
  std::vector<double> pick, agv_d, picker_d, agv_i, picker_i, lead;
  for (int e = 0; e < cfg.episodes; ++e) {
    current_episode = e;
    const MetricsReport m = run_episode(engine, *policy, cfg.seed + static_cast<uint64_t>(e));
    report.episodes.push_back(m);
    pick.push_back(m.pick_rate_lines_per_hour);
    agv_d.push_back(m.agv_distance_m);
    picker_d.push_back(m.picker_distance_m);
    agv_i.push_back(m.agv_idle_s);
    picker_i.push_back(m.picker_idle_s);
    lead.push_back(m.mean_lead_time_s);
  }
  report.pick_rate = aggregate(pick);
  report.agv_distance = aggregate(agv_d);
  report.picker_distance = aggregate(picker_d);
  report.agv_idle = aggregate(agv_i);
  report.picker_idle = aggregate(picker_i);
  report.lead_time = aggregate(lead);

  const uint64_t hash = cfg.hash();
  if (!aggregate_only) write_file((out / "episodes.csv").string(), episodes_csv(report.episodes, hash));
  write_file((out / "aggregate.csv").string(), aggregate_csv(report, hash));

  std::cout << "policy=" << policy->name() << " episodes=" << cfg.episodes
            << " pick_rate=" << report.pick_rate.mean << " +/- " << report.pick_rate.ci95
            << " lines/h\n"
            << "picker_distance=" << report.picker_distance.mean
            << " m, agv_distance=" << report.agv_distance.mean << " m\n"
            << "outputs in " << out.string() << "\n";
  return 0;
}

int cmd_train(const CommonOpts& opts, const std::string& algo, const std::string& seeds_csv,
              int checkpoint_every, const std::string& resume) {
  ExperimentConfig cfg = resolve_config(opts);
  if (!algo.empty()) cfg.train.algorithm = algorithm_from_string(algo);
  if (opts.episodes >= 0) {
    cfg.train.episodes = opts.episodes;  // --episodes means training episodes here
    cfg.episodes = 50;
  }
  cfg.validate();
  const BuiltEnv env = build_environment(cfg);
  const fs::path out = prepare_out_dir(cfg);
  const uint64_t hash = cfg.hash();

  std::vector<uint64_t> seeds;
  if (seeds_csv.empty()) {
    seeds.push_back(cfg.train.seed);
  } else {
    std::stringstream ss(seeds_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) seeds.push_back(std::stoull(tok));
  }

  for (uint64_t seed : seeds) {
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    Trainer trainer(env.graph, env.cache, cfg.workers, env.profile, cfg.engine_config(),
                    env.sectors, tc, hash);
    if (!resume.empty()) {
      Checkpoint ckpt = load_checkpoint(resume);
      if (ckpt.config_hash != hash)
        throw ConfigError("resume checkpoint was produced under a different config hash");
      trainer.restore(ckpt);
    }
    const std::string tag = "seed" + std::to_string(seed);
    TrainResult result = trainer.run(checkpoint_every, [&](int episode, const Checkpoint& ckpt) {
      save_checkpoint((out / ("checkpoint_" + tag + "_ep" + std::to_string(episode) + ".json")).string(),
                      ckpt);
    });
    save_checkpoint((out / ("checkpoint_" + tag + "_final.json")).string(), result.final_checkpoint);
    write_file((out / ("curve_" + tag + ".csv")).string(), curve_csv(result.curve, hash));

    // final greedy evaluation report
    NetPolicy policy(result.final_checkpoint.policy, env.sectors, /*greedy=*/true);
    Engine engine(env.graph, env.cache, cfg.workers, env.profile, cfg.engine_config());
    const EvalReport report = evaluate(engine, policy, cfg.episodes, cfg.seed);
    write_file((out / ("final_eval_" + tag + ".csv")).string(), aggregate_csv(report, hash));
    std::cout << "seed " << seed << ": trained " << cfg.train.episodes
              << " episodes, final pick_rate=" << report.pick_rate.mean << " +/- "
              << report.pick_rate.ci95 << " lines/h\n";
  }
  std::cout << "outputs in " << out.string() << "\n";
  return 0;
}

int cmd_bench(const CommonOpts& opts, int envs, int samples) {
  const ExperimentConfig cfg = resolve_config(opts);
  const BuiltEnv env = build_environment(cfg);
  const fs::path out = prepare_out_dir(cfg);

  BenchConfig bc;
  bc.parallel_envs = envs;
  bc.samples = samples;
  bc.seed = cfg.seed;
  const BenchResult r =
      run_bench(env.graph, env.cache, cfg.workers, env.profile, cfg.engine_config(), bc);

  std::ostringstream os;
  os << "envs=" << r.envs << " samples=" << r.samples << " (warm-up excluded)\n"
     << "steps_per_second_mean=" << r.mean_steps_per_second << "\n"
     << "steps_per_second_std=" << r.std_steps_per_second << "\n"
     << "total_steps=" << r.total_steps << " elapsed_s=" << r.elapsed_s << "\n";
  std::cout << os.str();
  write_file((out / "bench.txt").string(), os.str());
  return 0;
}

int cmd_export_layout(const CommonOpts& opts, const std::string& out_file) {
  const ExperimentConfig cfg = resolve_config(opts);
  const WarehouseGraph graph = generate_layout(cfg.warehouse.aisles, cfg.warehouse.slots_per_aisle,
                                               cfg.warehouse.stations, cfg.warehouse.scale);
  const std::string text = export_layout(graph);
  if (out_file.empty()) {
    std::cout << text;
  } else {
    write_file(out_file, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orderpick: warehouse order-picking simulator and MARL trainer"};
  app.require_subcommand(1);

  CommonOpts sim_opts, eval_opts, train_opts, bench_opts, export_opts;
  std::string algo, seeds_csv, resume, export_file;
  int checkpoint_every = 0, bench_envs = 4, bench_samples = 300;

  auto* sim = app.add_subcommand("simulate", "run episodes with a policy, write metrics CSVs");
  add_common(sim, sim_opts);
  auto* evalc = app.add_subcommand("eval", "aggregate evaluation of a policy or checkpoint");
  add_common(evalc, eval_opts);
  auto* train = app.add_subcommand("train", "train hsnac or snac policies");
  add_common(train, train_opts);
  train->add_option("--algo", algo, "hsnac|snac");
  train->add_option("--seeds", seeds_csv, "comma-separated training seeds");
  train->add_option("--checkpoint-every", checkpoint_every, "episodes between checkpoints");
  train->add_option("--resume", resume, "resume from a checkpoint file");
  auto* bench = app.add_subcommand("bench", "engine steps/second with a random policy");
  add_common(bench, bench_opts);
  bench->add_option("--envs", bench_envs, "parallel environments");
  bench->add_option("--samples", bench_samples, "measured samples");
  auto* exportc = app.add_subcommand("export-layout", "plain-text node/edge listing");
  add_common(exportc, export_opts);
  exportc->add_option("--file", export_file, "write to a file instead of stdout");

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(sim_opts, false);
    if (evalc->parsed()) return cmd_simulate(eval_opts, true);
    if (train->parsed()) return cmd_train(train_opts, algo, seeds_csv, checkpoint_every, resume);
    if (bench->parsed()) return cmd_bench(bench_opts, bench_envs, bench_samples);
    if (exportc->parsed()) return cmd_export_layout(export_opts, export_file);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
