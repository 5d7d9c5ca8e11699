// malltwin: twin generation, training, evaluation and comparison from the command line.
//
// Exit codes: 0 ok, 1 usage, 2 config/dataset, 3 network, 4 LLM response parse,
// 5 model/topology mismatch, 6 output verification failed.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "malltwin/config.hpp"
#include "malltwin/dqn/checkpoint.hpp"
#include "malltwin/dqn/trainer.hpp"
#include "malltwin/errors.hpp"
#include "malltwin/evaluation.hpp"
#include "malltwin/hashing.hpp"
#include "malltwin/io.hpp"
#include "malltwin/llm.hpp"
#include "malltwin/manifest.hpp"
#include "malltwin/synthetic.hpp"
#include "malltwin/training.hpp"

namespace fs = std::filesystem;
using namespace malltwin;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kNetwork = 3, kParse = 4, kMismatch = 5, kVerify = 6 };

struct Loaded {
  ScenarioConfig config;
  std::string path;
  std::string sha256;
};

Loaded load_scenario(const std::string& path) {
  try {
    const auto text = read_text_file(path);
    return {parse_config(text), path, sha256_hex(text)};
  } catch (const ParseError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<DaySchedule> load_days(const std::string& dir, const ScenarioConfig& config) {
  if (!fs::is_directory(dir)) throw ConfigError("dataset directory '" + dir + "' does not exist");
  std::vector<DaySchedule> days;
  try {
    days = load_dataset(dir, config);
  } catch (const ParseError& e) {
    throw ConfigError(dir + ": " + e.what());
  }
  if (days.empty()) throw ConfigError("dataset directory '" + dir + "' holds no day files");
  return days;
}

std::string day_id(const std::string& prefix, std::uint64_t seed, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-s%llu-d%04d", prefix.c_str(), static_cast<unsigned long long>(seed), index);
  return buf;
}

std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

std::string zone_file(std::size_t index, const std::string& zone, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02zu-", index);
  return buf + slug(zone) + ext;
}

RunManifest base_manifest(const std::string& command, const Loaded& cfg) {
  RunManifest m;
  m.command = command;
  m.config_path = cfg.path;
  m.config_sha256 = cfg.sha256;
  return m;
}

std::vector<std::string> ids_of(const std::vector<DaySchedule>& days) {
  std::vector<std::string> ids;
  for (const auto& d : days) ids.push_back(d.day_id);
  return ids;
}

// A trained model directory: models/*.json sorted by file name.
std::vector<dqn::ModelCheckpoint> load_models(const std::string& dir) {
  const fs::path models = fs::path(dir) / "models";
  if (!fs::is_directory(models)) throw ConfigError("'" + dir + "' has no models/ directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(models)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("'" + models.string() + "' holds no model files");
  std::vector<dqn::ModelCheckpoint> out;
  for (const auto& f : files) {
    try {
      out.push_back(dqn::load_checkpoint(f));
    } catch (const ParseError& e) {
      throw ConfigError(f.string() + ": " + e.what());
    }
  }
  return out;
}

struct NamedPolicy {
  std::string name;
  Policy policy;
  Topology topology;
  std::set<std::string> training_days;
};

NamedPolicy policy_from_models_dir(const std::string& name, const std::string& dir, const ScenarioConfig& config) {
  const auto models = load_models(dir);
  const Topology topology = parse_topology(models.front().topology);
  std::set<std::string> seen;
  for (const auto& m : models) seen.insert(m.training_day_ids.begin(), m.training_day_ids.end());
  return {name, policy_from_models(models, topology, config), topology, seen};
}

// "setpoint:25" or "setpoint:25:distributed"; anything else is a model directory.
NamedPolicy parse_policy(const std::string& name, const std::string& spec, const ScenarioConfig& config) {
  const std::string prefix = "setpoint:";
  if (spec.rfind(prefix, 0) != 0) return policy_from_models_dir(name, spec, config);
  std::string rest = spec.substr(prefix.size());
  Topology topology = Topology::Centralized;
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    topology = parse_topology(rest.substr(colon + 1));
    rest = rest.substr(0, colon);
  }
  double t = 0.0;
  try {
    t = std::stod(rest);
  } catch (const std::exception&) {
    throw ConfigError("bad setpoint in policy '" + spec + "'");
  }
  return {name, Policy::setpoint(t), topology, {}};
}

std::string scores_csv(const EvalReport& r) {
  std::string out = "day_id,total_score,comfort_score,energy_score,energy_kwh\n";
  for (const auto& d : r.days) {
    out += d.day_id + "," + format_number(d.total_score) + "," + format_number(d.comfort_score) + "," +
           format_number(d.energy_score) + "," + format_number(d.energy_kwh) + "\n";
  }
  return out;
}

// ---- commands

struct GenerateArgs {
  std::string config, out, source = "synthetic";
  int days = 0;
  std::uint64_t seed = 0;
  double indoor_c = kDefaultIndoorTempC;
};

int cmd_generate(const GenerateArgs& a) {
  const auto cfg = load_scenario(a.config);
  std::vector<DaySchedule> days;
  std::vector<std::string> warnings;
  int hits = 0, misses = 0;
  if (a.source == "synthetic") {
    days = generate_synthetic_dataset(cfg.config, a.seed, a.days);
  } else {
    IndoorTrace trace;
    for (const auto t : checkpoints(cfg.config.mall)) trace[t] = a.indoor_c;
    for (int i = 0; i < a.days; ++i) {
      const auto id = day_id("llm", a.seed, i);
      CachedChatClient client(cfg.config.llm, id);
      days.push_back(generate_day_llm(cfg.config, client, trace, id, &warnings));
      hits += client.cache_hits();
      misses += client.cache_misses();
    }
  }
  StagedOutput stage(a.out);
  for (const auto& d : days) stage.write(d.day_id + ".json", schedule_to_json(d));
  auto m = base_manifest("twin generate", cfg);
  m.dataset_dir = a.out;
  m.day_ids = ids_of(days);
  m.seeds["seed"] = a.seed;
  m.options["source"] = a.source;
  m.numbers["days"] = a.days;
  if (a.source == "llm") {
    m.options["model"] = cfg.config.llm.model_name;
    m.numbers["indoor_temp_c"] = a.indoor_c;
    m.numbers["cache_hits"] = hits;
    m.numbers["cache_misses"] = misses;
  }
  stage.commit(m);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << days.size() << " day(s) to " << a.out << "\n";
  return kOk;
}

struct TrainArgs {
  std::string config, data, out, topology = "centralized", mode = "balanced";
  std::uint64_t seed = 0;
  int episodes = -1;
  int jobs = 1;
};

int cmd_train(const TrainArgs& a) {
  const auto cfg = load_scenario(a.config);
  const auto days = load_days(a.data, cfg.config);
  TrainRequest req;
  req.topology = parse_topology(a.topology);
  req.mode = parse_mode(a.mode);
  req.seed = a.seed;
  if (a.episodes >= 0) req.episodes = a.episodes;
  req.jobs = a.jobs;
  const auto models = train_controllers(cfg.config, days, req);

  StagedOutput stage(a.out);
  for (std::size_t z = 0; z < models.size(); ++z) {
    const auto& m = models[z];
    stage.write("models/" + zone_file(z, m.checkpoint.zone, ".json"), dqn::checkpoint_to_json(m.checkpoint));
    stage.write("logs/" + zone_file(z, m.checkpoint.zone, ".csv"), dqn::training_log_csv(m.log));
  }
  auto man = base_manifest("train", cfg);
  man.dataset_dir = a.data;
  man.day_ids = ids_of(days);
  man.seeds["seed"] = a.seed;
  man.options["topology"] = a.topology;
  man.options["mode"] = a.mode;
  const auto w = mode_weights(cfg.config.reward, req.mode);
  man.numbers["w_c"] = w.w_c;
  man.numbers["w_e"] = w.w_e;
  man.numbers["episodes"] = req.episodes.value_or(cfg.config.rl.episodes);
  man.numbers["zones"] = static_cast<double>(models.size());
  stage.commit(man);
  std::cout << "trained " << models.size() << " " << a.topology << " " << a.mode << " controller(s) into " << a.out
            << "\n";
  return kOk;
}

struct EvalArgs {
  std::string config, data, out, models, topology = "centralized";
  double setpoint = std::numeric_limits<double>::quiet_NaN();
};

int cmd_eval(const EvalArgs& a) {
  const auto cfg = load_scenario(a.config);
  const auto days = load_days(a.data, cfg.config);
  NamedPolicy p = a.models.empty()
                      ? NamedPolicy{"setpoint-" + format_number(a.setpoint), Policy::setpoint(a.setpoint),
                                    parse_topology(a.topology), {}}
                      : policy_from_models_dir("dqn", a.models, cfg.config);
  const auto report = rollout(p.policy, days, p.topology, cfg.config, cfg.config.reward, p.name, p.training_days);
  StagedOutput stage(a.out);
  stage.write("report.json", report_to_json(report));
  stage.write("scores.csv", scores_csv(report));
  stage.write("trace.csv", trace_csv(report.trace));
  auto m = base_manifest("eval", cfg);
  m.dataset_dir = a.data;
  m.day_ids = ids_of(days);
  m.options["policy"] = a.models.empty() ? "setpoint:" + format_number(a.setpoint) : a.models;
  m.options["topology"] = to_string(p.topology);
  m.numbers["total_score"] = report.aggregate.total_score;
  stage.commit(m);
  std::cout << p.name << " (" << to_string(p.topology) << "): total " << format_number(report.aggregate.total_score)
            << " over " << days.size() << " day(s)\n";
  return kOk;
}

struct CompareArgs {
  std::string config, data, out;
  std::vector<std::string> policies;
};

int cmd_compare(const CompareArgs& a) {
  const auto cfg = load_scenario(a.config);
  const auto days = load_days(a.data, cfg.config);
  std::vector<std::pair<std::string, EvalReport>> reports;
  StagedOutput stage(a.out);
  auto m = base_manifest("compare", cfg);
  for (const auto& spec : a.policies) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("policy '" + spec + "' must be NAME=SPEC");
    const auto name = spec.substr(0, eq);
    for (const auto& [n, r] : reports) {
      if (n == name) throw ConfigError("duplicate policy name '" + name + "'");
    }
    const auto p = parse_policy(name, spec.substr(eq + 1), cfg.config);
    auto report = rollout(p.policy, days, p.topology, cfg.config, cfg.config.reward, name, p.training_days);
    stage.write("traces/" + slug(name) + ".csv", trace_csv(report.trace));
    m.options["policy." + name] = spec.substr(eq + 1);
    reports.emplace_back(name, std::move(report));
  }
  const auto table = compare(reports);
  stage.write("comparison.csv", table.to_csv());
  stage.write("differences.csv", table.differences_csv());
  stage.write("comparison.txt", table.to_text());
  m.dataset_dir = a.data;
  m.day_ids = ids_of(days);
  stage.commit(m);
  std::cout << table.to_text();
  return kOk;
}

struct SweepArgs {
  std::string config, data, out, topology = "centralized";
};

int cmd_sweep(const SweepArgs& a) {
  const auto cfg = load_scenario(a.config);
  const auto days = load_days(a.data, cfg.config);
  const auto csv = sweep_setpoints_csv(days, parse_topology(a.topology), cfg.config, cfg.config.reward);
  StagedOutput stage(a.out);
  stage.write("sweep.csv", csv);
  auto m = base_manifest("sweep-setpoint", cfg);
  m.dataset_dir = a.data;
  m.day_ids = ids_of(days);
  m.options["topology"] = a.topology;
  stage.commit(m);
  std::cout << csv;
  return kOk;
}

int cmd_verify(const std::string& dir) {
  const auto bad = verify_manifest(dir);
  for (const auto& b : bad) std::cerr << "hash mismatch: " << b << "\n";
  if (!bad.empty()) return kVerify;
  std::cout << "all outputs in " << dir << " match manifest.json\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mall digital twin and deep Q-learning HVAC setpoint controllers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  const std::vector<std::string> topologies{"centralized", "distributed"};
  const std::vector<std::string> modes{"balanced", "energy", "comfort"};

  auto* twin = app.add_subcommand("twin", "Digital-twin occupancy datasets");
  twin->require_subcommand(1);
  GenerateArgs gen;
  auto* generate = twin->add_subcommand("generate", "Generate day schedules");
  generate->add_option("--config", gen.config, "Scenario config JSON")->required()->check(CLI::ExistingFile);
  generate->add_option("--source", gen.source, "synthetic or llm")->check(CLI::IsMember({"synthetic", "llm"}));
  generate->add_option("--days", gen.days, "Number of days")->required()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Seed (synthetic) or day label (llm)");
  generate->add_option("--indoor-temp", gen.indoor_c, "Indoor temperature fed to distribution prompts (llm)");
  generate->add_option("--out", gen.out, "Output dataset directory")->required();

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Train DQN controllers on a dataset");
  train->add_option("--config", tr.config)->required()->check(CLI::ExistingFile);
  train->add_option("--data", tr.data, "Training dataset directory")->required();
  train->add_option("--topology", tr.topology)->check(CLI::IsMember(topologies));
  train->add_option("--mode", tr.mode)->check(CLI::IsMember(modes));
  train->add_option("--seed", tr.seed);
  train->add_option("--episodes", tr.episodes, "Override rl.episodes")->check(CLI::NonNegativeNumber);
  train->add_option("--jobs", tr.jobs, "Zones trained concurrently")->check(CLI::PositiveNumber);
  train->add_option("--out", tr.out, "Output model directory")->required();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Roll out one policy on held-out days");
  eval->add_option("--config", ev.config)->required()->check(CLI::ExistingFile);
  eval->add_option("--data", ev.data, "Held-out dataset directory")->required();
  auto* models_opt = eval->add_option("--models", ev.models, "Model directory written by train");
  auto* setpoint_opt = eval->add_option("--setpoint", ev.setpoint, "Fixed setpoint instead of a model");
  models_opt->excludes(setpoint_opt);
  eval->add_option("--topology", ev.topology, "Topology for --setpoint")->check(CLI::IsMember(topologies));
  eval->add_option("--out", ev.out)->required();

  CompareArgs cmp;
  auto* comp = app.add_subcommand("compare", "Evaluate several policies on the same days and tabulate");
  comp->add_option("--config", cmp.config)->required()->check(CLI::ExistingFile);
  comp->add_option("--data", cmp.data, "Held-out dataset directory")->required();
  comp->add_option("--policy", cmp.policies, "NAME=MODEL_DIR or NAME=setpoint:T[:topology]")->required();
  comp->add_option("--out", cmp.out)->required();

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep-setpoint", "Score every fixed setpoint on the grid");
  sweep->add_option("--config", sw.config)->required()->check(CLI::ExistingFile);
  sweep->add_option("--data", sw.data)->required();
  sweep->add_option("--topology", sw.topology)->check(CLI::IsMember(topologies));
  sweep->add_option("--out", sw.out)->required();

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "Check output hashes against manifest.json");
  verify->add_option("dir", verify_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (eval->parsed() && ev.models.empty() && setpoint_opt->count() == 0) {
    std::cerr << "eval: one of --models or --setpoint is required\n";
    return kUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (train->parsed()) return cmd_train(tr);
    if (eval->parsed()) return cmd_eval(ev);
    if (comp->parsed()) return cmd_compare(cmp);
    if (sweep->parsed()) return cmd_sweep(sw);
    if (verify->parsed()) return cmd_verify(verify_dir);
  } catch (const MismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMismatch;
  } catch (const NetworkError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNetwork;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kUsage;
}
