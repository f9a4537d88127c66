#include "lsnet/lsnet.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "lsnet/evaluate.hpp"
#include "lsnet/newick.hpp"
#include "lsnet/pipeline.hpp"
#include "lsnet/transforms.hpp"

struct lsnet_config {
  lsnet::RunConfig config;
};

struct lsnet_tree {
  std::shared_ptr<const lsnet::PhyloTree> tree;
};

namespace {

thread_local std::string last_error;

lsnet_status status_of(lsnet::ErrorCategory c) {
  switch (c) {
    case lsnet::ErrorCategory::Config: return LSNET_ERR_CONFIG;
    case lsnet::ErrorCategory::Data: return LSNET_ERR_DATA;
    case lsnet::ErrorCategory::Numerical: return LSNET_ERR_NUMERIC;
    case lsnet::ErrorCategory::Internal: return LSNET_ERR_INTERNAL;
  }
  return LSNET_ERR_INTERNAL;
}

template <class F>
lsnet_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return LSNET_OK;
  } catch (const lsnet::Error& e) {
    last_error = e.what();
    return status_of(e.category());
  } catch (const std::exception& e) {
    last_error = e.what();
    return LSNET_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return LSNET_ERR_INTERNAL;
  }
}

lsnet_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return LSNET_ERR_ARGUMENT;
}

lsnet::PairwiseMrcaDepths pair_depths(const lsnet_tree* t, const char* a, const char* b) {
  const std::string labels[2] = {a, b};
  for (const auto& l : labels)
    if (!t->tree->find_leaf(l)) throw lsnet::Error(lsnet::ErrorCode::UnknownTip, "no tip named '" + l + "'");
  return lsnet::PairwiseMrcaDepths(t->tree, {labels[0], labels[1]});
}

}  // namespace

extern "C" {

const char* lsnet_version(void) { return LSNET_VERSION; }

const char* lsnet_last_error(void) { return last_error.c_str(); }

lsnet_status lsnet_config_create(lsnet_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new lsnet_config(); });
}

void lsnet_config_destroy(lsnet_config* config) { delete config; }

lsnet_status lsnet_config_load(lsnet_config* config, const char* path) {
  if (!config || !path) return null_argument("config/path");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw lsnet::Error(lsnet::ErrorCode::InvalidConfig, std::string("cannot open config file ") + path);
    std::stringstream buf;
    buf << in.rdbuf();
    lsnet::RunConfig copy = config->config;
    lsnet::parse_config_text(copy, buf.str(), path);
    config->config = std::move(copy);
  });
}

lsnet_status lsnet_config_set(lsnet_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return null_argument("config/key/value");
  return guarded([&] { config->config.set(key, value); });
}

lsnet_status lsnet_config_get(const lsnet_config* config, const char* key, char* buf, size_t len, size_t* needed) {
  if (!config || !key) return null_argument("config/key");
  return guarded([&] {
    const auto settings = config->config.settings();
    auto it = settings.find(key);
    if (it == settings.end()) throw lsnet::Error(lsnet::ErrorCode::InvalidConfig, std::string(key) + ": unknown key");
    if (needed) *needed = it->second.size() + 1;
    if (buf && len > 0) {
      const std::size_t n = std::min(len - 1, it->second.size());
      std::memcpy(buf, it->second.data(), n);
      buf[n] = '\0';
    }
  });
}

lsnet_status lsnet_cmd_fit(const lsnet_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] { lsnet::cmd_fit(config->config); });
}

lsnet_status lsnet_cmd_crossval(const lsnet_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] { lsnet::cmd_crossval(config->config); });
}

lsnet_status lsnet_cmd_scan(const lsnet_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] { lsnet::cmd_scan(config->config); });
}

lsnet_status lsnet_cmd_simulate(const lsnet_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] { lsnet::cmd_simulate(config->config); });
}

lsnet_status lsnet_cmd_report(const lsnet_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] { lsnet::cmd_report(config->config); });
}

lsnet_status lsnet_tree_parse(const char* newick, lsnet_tree** out) {
  if (!newick || !out) return null_argument("newick/out");
  return guarded([&] { *out = new lsnet_tree{std::make_shared<const lsnet::PhyloTree>(lsnet::parse_newick(newick))}; });
}

lsnet_status lsnet_tree_read(const char* path, lsnet_tree** out) {
  if (!path || !out) return null_argument("path/out");
  return guarded([&] { *out = new lsnet_tree{std::make_shared<const lsnet::PhyloTree>(lsnet::read_newick_file(path))}; });
}

void lsnet_tree_destroy(lsnet_tree* tree) { delete tree; }

lsnet_status lsnet_tree_tip_count(const lsnet_tree* tree, size_t* out) {
  if (!tree || !out) return null_argument("tree/out");
  *out = tree->tree->tip_count();
  return LSNET_OK;
}

lsnet_status lsnet_tree_patristic(const lsnet_tree* tree, const char* a, const char* b, double* out) {
  if (!tree || !a || !b || !out) return null_argument("tree/a/b/out");
  return guarded([&] { *out = lsnet::patristic_distance(*tree->tree, a, b); });
}

lsnet_status lsnet_tree_eb_distance(const lsnet_tree* tree, const char* a, const char* b, double eta, double* out) {
  if (!tree || !a || !b || !out) return null_argument("tree/a/b/out");
  return guarded([&] {
    if (std::strcmp(a, b) == 0) {
      *out = 0.0;
      return;
    }
    const auto depths = pair_depths(tree, a, b);
    *out = lsnet::transform_pair(depths, 0, 1, lsnet::TransformSpec::eb(eta));
  });
}

lsnet_status lsnet_auc(const double* prob, const uint8_t* truth, size_t n, double* out) {
  if (!prob || !truth || !out) return null_argument("prob/truth/out");
  return guarded([&] { *out = lsnet::mann_whitney_auc({prob, n}, {truth, n}); });
}

lsnet_status lsnet_elementary_score(double x, int y, double theta, double* out) {
  if (!out) return null_argument("out");
  if (y != 0 && y != 1) {
    last_error = "y must be 0 or 1";
    return LSNET_ERR_ARGUMENT;
  }
  *out = lsnet::elementary_score(x, y, theta);
  return LSNET_OK;
}

lsnet_status lsnet_wilcoxon_greater(const double* a, const double* b, size_t n, double* p_value) {
  if (!a || !b || !p_value) return null_argument("a/b/p_value");
  return guarded([&] { *p_value = lsnet::wilcoxon_paired_one_sided({a, n}, {b, n}); });
}

}  // extern "C"
