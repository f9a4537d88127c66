// Command-line front end. Talks to the library only through lsnet.h.
#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lsnet/lsnet.h"

namespace {

struct Options {
  std::string config_file;
  std::string seed;
  std::string jobs;
  std::string model;
  std::string out;
  std::string run_dir;
  bool with_g = false;
  bool drop_single_host = false;
  std::vector<std::string> sets;
};

int fail(lsnet_status s) {
  std::fprintf(stderr, "lsnet: %s\n", lsnet_last_error());
  return s == LSNET_ERR_ARGUMENT ? 2 : static_cast<int>(s);
}

int run(const std::string& command, const Options& o) {
  lsnet_config* raw = nullptr;
  if (lsnet_status s = lsnet_config_create(&raw); s != LSNET_OK) return fail(s);
  std::unique_ptr<lsnet_config, void (*)(lsnet_config*)> cfg(raw, lsnet_config_destroy);

  if (!o.config_file.empty())
    if (lsnet_status s = lsnet_config_load(cfg.get(), o.config_file.c_str()); s != LSNET_OK) return fail(s);

  // flags win over the file
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "lsnet: --set expects key=value, got '%s'\n", kv.c_str());
      return 2;
    }
    overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.seed.empty()) overrides.emplace_back("seed", o.seed);
  if (!o.jobs.empty()) overrides.emplace_back("jobs", o.jobs);
  if (!o.model.empty()) overrides.emplace_back("model", o.model);
  if (!o.out.empty()) overrides.emplace_back("out", o.out);
  if (!o.run_dir.empty()) overrides.emplace_back("run_dir", o.run_dir);
  if (o.with_g) overrides.emplace_back("with_g", "true");
  if (o.drop_single_host) overrides.emplace_back("drop_single_host", "true");
  for (const auto& [k, v] : overrides)
    if (lsnet_status s = lsnet_config_set(cfg.get(), k.c_str(), v.c_str()); s != LSNET_OK) return fail(s);

  static const std::map<std::string, lsnet_status (*)(const lsnet_config*)> commands{
      {"fit", lsnet_cmd_fit},
      {"crossval", lsnet_cmd_crossval},
      {"scan", lsnet_cmd_scan},
      {"simulate", lsnet_cmd_simulate},
      {"report", lsnet_cmd_report},
  };
  if (lsnet_status s = commands.at(command)(cfg.get()); s != LSNET_OK) return fail(s);

  char out[4096];
  lsnet_config_get(cfg.get(), command == "report" ? "run_dir" : "out", out, sizeof out, nullptr);
  if (command == "report" && out[0] == '\0') lsnet_config_get(cfg.get(), "out", out, sizeof out, nullptr);
  std::printf("%s: wrote %s%s\n", command.c_str(), out, command == "report" ? "/report" : "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-score network model for host-parasite interaction prediction"};
  app.set_version_flag("--version", std::string(lsnet_version()));
  app.require_subcommand(1);

  Options o;
  app.add_option("--config", o.config_file, "key = value configuration file");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--jobs", o.jobs, "worker threads");
  app.add_option("--model", o.model, "affinity | phylo | full");
  app.add_flag("--with-g", o.with_g, "model uncertainty in unobserved interactions");
  app.add_flag("--drop-single-host", o.drop_single_host, "remove parasites with a single documented host");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--set", o.sets, "extra key=value setting (repeatable)");

  const std::vector<std::pair<std::string, std::string>> subs{
      {"fit", "run the sampler and write trace, predictive matrix and diagnostics"},
      {"crossval", "k-fold cross-validation of several models"},
      {"scan", "AUC of the phylogeny-only model across tree transforms"},
      {"simulate", "generate a synthetic network with known parameters"},
      {"report", "degree distributions, top-x recovery and left-ordered matrices of a fit"},
  };
  std::string chosen;
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&chosen, n = name] { chosen = n; });
    if (name == "report") sub->add_option("run_dir", o.run_dir, "directory written by fit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run(chosen, o);
}
