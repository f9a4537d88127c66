#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsnet/error.hpp"
#include "lsnet/sampler.hpp"

namespace lsnet {

// Everything a command needs. Populated from a flat `key = value` file and
// flag overrides; see README for the key list.
struct RunConfig {
  std::string edges;
  std::string tree;
  std::string out = "lsnet-out";
  std::string run_dir;         // report input (defaults to out)
  std::string truth_edges;     // report: optional edges documented later

  std::string model = "full";  // affinity | phylo | full
  bool with_g = false;
  bool drop_single_host = false;
  bool normalize_labels = false;

  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  SamplerConfig sampler;

  std::size_t folds = 5;
  std::size_t floor = 2;
  std::vector<std::string> models;  // crossval; empty means the default list
  std::size_t nn_k_max = 10;

  std::optional<std::string> transforms;  // scan grid
  bool include_kappa = false;

  std::size_t sim_hosts = 50;
  std::size_t sim_parasites = 100;
  double sim_eta = 1.0;
  std::size_t sim_burn = 1000;

  std::size_t top_x = 0;       // 0 means "number of target ones"
  double report_threshold = 0.5;

  // Throws InvalidConfig naming the key.
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> settings() const;
  SamplerConfig sampler_for(const std::string& model, bool with_g) const;
};

RunConfig load_config(const std::string& path);
void parse_config_text(RunConfig& config, const std::string& text, const std::string& origin = "config");

// 2 config, 3 data, 4 numerical, 1 internal.
int exit_code(ErrorCategory category);

std::string sha256_file(const std::string& path);

struct CommandResult {
  std::string out_dir;
  std::vector<std::string> files;  // written, relative to out_dir
};

CommandResult cmd_fit(const RunConfig& config);
CommandResult cmd_crossval(const RunConfig& config);
CommandResult cmd_scan(const RunConfig& config);
CommandResult cmd_simulate(const RunConfig& config);
CommandResult cmd_report(const RunConfig& config);

}  // namespace lsnet
