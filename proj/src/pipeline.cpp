#include "lsnet/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lsnet/csv.hpp"
#include "lsnet/evaluate.hpp"
#include "lsnet/interactions.hpp"
#include "lsnet/newick.hpp"
#include "lsnet/transforms.hpp"

namespace fs = std::filesystem;

namespace lsnet {

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::InvalidConfig, key + ": " + msg);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) config_error(key, "expected a non-negative integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) config_error(key, "expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  std::string s = v;
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  config_error(key, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  for (char c : v + ",") {
    if (c == ',') {
      if (!csv::trim(item).empty()) out.push_back(csv::trim(item));
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  return out;
}

const std::vector<std::string> kModelNames{"affinity", "phylo", "full", "full_g", "nn"};

std::string join_list(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = csv::trim(raw_key);
  const std::string v = csv::trim(raw_value);
  auto& s = sampler;
  if (key == "edges") edges = v;
  else if (key == "tree") tree = v;
  else if (key == "out") out = v;
  else if (key == "run_dir") run_dir = v;
  else if (key == "truth_edges") truth_edges = v;
  else if (key == "model") {
    if (v != "affinity" && v != "phylo" && v != "full") config_error(key, "expected affinity, phylo or full");
    model = v;
  } else if (key == "with_g") with_g = to_bool(key, v);
  else if (key == "drop_single_host") drop_single_host = to_bool(key, v);
  else if (key == "normalize_labels") normalize_labels = to_bool(key, v);
  else if (key == "seed") seed = to_size(key, v);
  else if (key == "jobs") {
    jobs = to_size(key, v);
    if (jobs == 0) config_error(key, "must be at least 1");
  } else if (key == "iterations") s.iterations = to_size(key, v);
  else if (key == "burn_in") s.burn_in = to_size(key, v);
  else if (key == "thin") s.thin = to_size(key, v);
  else if (key == "eta_init") s.eta_init = to_double(key, v);
  else if (key == "eta_proposal_sd") s.eta_proposal_sd = to_double(key, v);
  else if (key == "adapt_window") s.adapt_window = to_size(key, v);
  else if (key == "g_init") s.g_init = to_double(key, v);
  else if (key == "alpha_gamma") s.hyper.alpha_gamma = to_double(key, v);
  else if (key == "tau_gamma") s.hyper.tau_gamma = to_double(key, v);
  else if (key == "alpha_rho") s.hyper.alpha_rho = to_double(key, v);
  else if (key == "tau_rho") s.hyper.tau_rho = to_double(key, v);
  else if (key == "averaging") {
    if (v == "literal") s.averaging = RowAveraging::Literal;
    else if (v == "single_draw") s.averaging = RowAveraging::SingleDraw;
    else config_error(key, "expected literal or single_draw");
  } else if (key == "delta_default") {
    if (v == "one") s.delta_default = DeltaDefault::One;
    else if (v == "mean_distance") s.delta_default = DeltaDefault::MeanDistance;
    else config_error(key, "expected one or mean_distance");
  } else if (key == "folds") folds = to_size(key, v);
  else if (key == "floor") floor = to_size(key, v);
  else if (key == "models") {
    models = split_list(v);
    for (const auto& m : models)
      if (std::find(kModelNames.begin(), kModelNames.end(), m) == kModelNames.end())
        config_error(key, "unknown model '" + m + "'");
  } else if (key == "nn_k_max") nn_k_max = to_size(key, v);
  else if (key == "transforms") transforms = v;
  else if (key == "include_kappa") include_kappa = to_bool(key, v);
  else if (key == "sim_hosts") sim_hosts = to_size(key, v);
  else if (key == "sim_parasites") sim_parasites = to_size(key, v);
  else if (key == "sim_eta") sim_eta = to_double(key, v);
  else if (key == "sim_burn") sim_burn = to_size(key, v);
  else if (key == "top_x") top_x = to_size(key, v);
  else if (key == "report_threshold") report_threshold = to_double(key, v);
  else config_error(key, "unknown key");
}

std::map<std::string, std::string> RunConfig::settings() const {
  const auto& s = sampler;
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  std::map<std::string, std::string> m{
      {"edges", edges},
      {"tree", tree},
      {"out", out},
      {"run_dir", run_dir},
      {"truth_edges", truth_edges},
      {"model", model},
      {"with_g", b(with_g)},
      {"drop_single_host", b(drop_single_host)},
      {"normalize_labels", b(normalize_labels)},
      {"seed", std::to_string(seed)},
      {"jobs", std::to_string(jobs)},
      {"iterations", std::to_string(s.iterations)},
      {"burn_in", std::to_string(s.burn_in)},
      {"thin", std::to_string(s.thin)},
      {"eta_init", csv::exact(s.eta_init)},
      {"eta_proposal_sd", csv::exact(s.eta_proposal_sd)},
      {"adapt_window", std::to_string(s.adapt_window)},
      {"g_init", csv::exact(s.g_init)},
      {"alpha_gamma", csv::exact(s.hyper.alpha_gamma)},
      {"tau_gamma", csv::exact(s.hyper.tau_gamma)},
      {"alpha_rho", csv::exact(s.hyper.alpha_rho)},
      {"tau_rho", csv::exact(s.hyper.tau_rho)},
      {"averaging", s.averaging == RowAveraging::Literal ? "literal" : "single_draw"},
      {"delta_default", s.delta_default == DeltaDefault::One ? "one" : "mean_distance"},
      {"folds", std::to_string(folds)},
      {"floor", std::to_string(floor)},
      {"models", join_list(models)},
      {"nn_k_max", std::to_string(nn_k_max)},
      {"include_kappa", b(include_kappa)},
      {"sim_hosts", std::to_string(sim_hosts)},
      {"sim_parasites", std::to_string(sim_parasites)},
      {"sim_eta", csv::exact(sim_eta)},
      {"sim_burn", std::to_string(sim_burn)},
      {"top_x", std::to_string(top_x)},
      {"report_threshold", csv::exact(report_threshold)},
  };
  if (transforms) m["transforms"] = *transforms;
  return m;
}

SamplerConfig RunConfig::sampler_for(const std::string& name, bool g) const {
  SamplerConfig s = sampler;
  s.seed = seed;
  s.jobs = jobs;
  if (name == "affinity") s.flags = ModelFlags::affinity_only();
  else if (name == "phylo") s.flags = ModelFlags::phylogeny_only();
  else if (name == "full") s.flags = ModelFlags::full(g);
  else if (name == "full_g") s.flags = ModelFlags::full(true);
  else config_error("model", "unknown model '" + name + "'");
  if (name == "affinity" || name == "phylo") s.flags.use_uncertainty = g;
  return s;
}

void parse_config_text(RunConfig& config, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (csv::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidConfig, origin + ":" + std::to_string(number) + ": expected key = value");
    config.set(line.substr(0, eq), line.substr(eq + 1));
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig config;
  parse_config_text(config, buf.str(), path);
  return config;
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Numerical: return 4;
    case ErrorCategory::Internal: return 1;
  }
  return 1;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorCode::Internal, "sha256 unavailable");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

namespace {

struct Dataset {
  InteractionMatrix z;
  std::optional<PairwiseMrcaDepths> depths;
  std::vector<std::string> inputs;
  const PairwiseMrcaDepths* depths_ptr() const { return depths ? &*depths : nullptr; }
};

void require_file(const std::string& key, const std::string& path, const std::string& why) {
  if (path.empty()) config_error(key, "required " + why);
  if (!fs::is_regular_file(path)) config_error(key, "file not found: " + path);
}

bool needs_tree(const std::string& model) { return model != "affinity" && model != "nn"; }

Dataset load_dataset(const RunConfig& cfg, bool want_tree) {
  require_file("edges", cfg.edges, "edge list");
  Dataset d;
  d.inputs.push_back(cfg.edges);
  auto records = read_edges_csv(cfg.edges);
  const LabelNormalization norm;
  if (cfg.normalize_labels)
    for (auto& r : records) {
      r.host = normalize_label(r.host, norm);
      r.parasite = normalize_label(r.parasite, norm);
    }
  d.z = build_matrix(records);
  if (cfg.drop_single_host) d.z = drop_single_host_parasites(d.z);
  if (!want_tree) return d;

  require_file("tree", cfg.tree, "for models using the phylogeny");
  d.inputs.push_back(cfg.tree);
  PhyloTree tree = read_newick_file(cfg.tree);
  if (cfg.normalize_labels) {
    std::map<std::string, std::string> mapping;
    for (const auto& l : tree.leaf_labels()) mapping[l] = normalize_label(l, norm);
    tree = relabel(tree, mapping);
  }
  std::vector<std::string> missing;
  for (const auto& h : d.z.hosts())
    if (!tree.find_leaf(h)) missing.push_back(h);
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 5); ++i) list += (i ? ", " : "") + missing[i];
    throw Error(ErrorCode::UnknownTip, std::to_string(missing.size()) + " host(s) absent from the tree: " + list +
                                           (missing.size() > 5 ? ", ..." : ""));
  }
  const PhyloTree pruned = prune_to(tree, d.z.hosts());
  d.depths.emplace(pairwise_depths(pruned, d.z.hosts()));
  return d;
}

fs::path prepare_out(const std::string& dir) {
  if (dir.empty()) config_error("out", "output directory is empty");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  return fs::path(dir);
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                    const std::vector<std::string>& inputs, std::vector<std::string>& files) {
  nlohmann::ordered_json m;
  m["tool"] = "lsnet";
  m["version"] = LSNET_VERSION;
  m["command"] = command;
  m["seed"] = cfg.seed;
  nlohmann::ordered_json c;
  for (const auto& [k, v] : cfg.settings()) c[k] = v;
  m["config"] = c;
  m["inputs"] = nlohmann::ordered_json::array();
  for (const auto& p : inputs) m["inputs"].push_back({{"path", p}, {"sha256", sha256_file(p)}});
  m["outputs"] = nlohmann::ordered_json::array();
  for (const auto& f : files) m["outputs"].push_back({{"file", f}, {"sha256", sha256_file((dir / f).string())}});
  csv::write_file((dir / "manifest.json").string(), m.dump(2) + "\n");
  files.push_back("manifest.json");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 over the tuple
  std::uint64_t x = seed;
  for (std::uint64_t v : {a, b}) {
    x += 0x9E3779B97F4A7C15ULL + v;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    x ^= x >> 31;
  }
  return x;
}

void write_autocorrelation_csv(const std::string& path, const PosteriorTrace& trace, std::size_t max_lag) {
  std::string out = "parameter,lag,acf\n";
  auto emit = [&](const std::string& name, const std::vector<double>& x) {
    const auto acf = autocorrelation(x, max_lag);
    for (std::size_t k = 0; k < acf.size(); ++k)
      out += csv::escape(name) + "," + std::to_string(k) + "," + csv::fixed(acf[k], 6) + "\n";
  };
  if (trace.flags.use_phylogeny) emit("eta", trace.eta);
  if (trace.flags.use_uncertainty) emit("g", trace.g);
  if (trace.flags.use_affinities) {
    for (std::size_t h = 0; h < trace.H(); ++h) emit("gamma:" + trace.hosts[h], trace.gamma_series(h));
    for (std::size_t j = 0; j < trace.J(); ++j) emit("rho:" + trace.parasites[j], trace.rho_series(j));
  }
  csv::write_file(path, out);
}

}  // namespace

CommandResult cmd_fit(const RunConfig& cfg) {
  SamplerConfig sc = cfg.sampler_for(cfg.model, cfg.with_g);
  sc.validate();
  Dataset d = load_dataset(cfg, needs_tree(cfg.model));
  const PosteriorTrace trace = run_mcmc(d.z, d.depths_ptr(), sc);

  const fs::path dir = prepare_out(cfg.out);
  CommandResult res{dir.string(), {}};
  write_matrix_csv((dir / "matrix.csv").string(), d.z);
  write_trace_csv((dir / "trace.csv").string(), trace);
  write_probability_csv((dir / "predictive.csv").string(), d.z.hosts(), d.z.parasites(), trace.predictive);
  write_summary_csv((dir / "summary.csv").string(), summarize_trace(trace));
  write_autocorrelation_csv((dir / "autocorrelation.csv").string(), trace, 50);
  csv::write_file((dir / "sampler.csv").string(),
                  "key,value\neta_acceptance," + csv::fixed(trace.eta_acceptance, 6) + "\neta_proposal_sd," +
                      csv::exact(trace.eta_proposal_sd) + "\nrecorded_sweeps," + std::to_string(trace.length) + "\n");
  res.files = {"matrix.csv", "trace.csv", "predictive.csv", "summary.csv", "autocorrelation.csv", "sampler.csv"};
  write_manifest(dir, "fit", cfg, d.inputs, res.files);
  return res;
}

CommandResult cmd_crossval(const RunConfig& cfg) {
  std::vector<std::string> models = cfg.models;
  if (models.empty()) {
    models = {"affinity", "phylo", "full", "nn"};
    if (cfg.with_g) models.push_back("full_g");
  }
  if (cfg.folds < 2) config_error("folds", "need at least 2 folds");
  if (cfg.nn_k_max == 0) config_error("nn_k_max", "must be at least 1");
  cfg.sampler.validate();
  bool want_tree = false;
  for (const auto& m : models) want_tree = want_tree || needs_tree(m);
  Dataset d = load_dataset(cfg, want_tree);
  if (std::find(models.begin(), models.end(), "phylo") != models.end()) require_multi_host_columns(d.z);

  Rng rng(cfg.seed);
  const FoldPlan plan = make_folds(d.z, cfg.folds, cfg.floor, rng);
  const std::size_t K = plan.k;
  const std::size_t M = models.size();
  std::vector<InteractionMatrix> training;
  for (std::size_t f = 0; f < K; ++f) training.push_back(plan.training(d.z, f));

  std::vector<std::vector<FoldPredictions>> preds(M, std::vector<FoldPredictions>(K));
  std::vector<std::vector<NnSelection>> nn_sel(M, std::vector<NnSelection>(K));
  auto run_task = [&](std::size_t task) {
    const std::size_t m = task / K;
    const std::size_t f = task % K;
    const auto& train = training[f];
    Matrix p;
    if (models[m] == "nn") {
      nn_sel[m][f] = select_nn_k(train, cfg.nn_k_max);
      p = nn_baseline_matrix(train, nn_sel[m][f].k);
    } else {
      SamplerConfig sc = cfg.sampler_for(models[m], false);
      sc.jobs = 1;
      sc.seed = derive_seed(cfg.seed, f, m);
      p = run_mcmc(train, d.depths_ptr(), sc).predictive;
    }
    preds[m][f] = unknown_cell_predictions(d.z, train, p);
  };
  const std::size_t tasks = M * K;
  const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, tasks));
  std::vector<std::exception_ptr> errors(jobs);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t task = t; task < tasks; task += jobs) run_task(task);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const fs::path dir = prepare_out(cfg.out);
  CommandResult res{dir.string(), {}};

  std::vector<std::pair<std::string, RocCurve>> roc_grid;
  std::vector<std::pair<std::string, ScoreCurve>> murphy;
  std::vector<std::vector<double>> fold_auc(M);
  std::vector<std::string> header{"model", "auc", "mean_fold_auc", "best_threshold", "pct_ones_recovered"};
  for (std::size_t f = 0; f < K; ++f) header.push_back("auc_fold" + std::to_string(f + 1));
  std::string summary = csv::join(header) + "\n";
  const auto theta = default_theta_grid();
  const auto thresholds = default_threshold_grid();
  for (std::size_t m = 0; m < M; ++m) {
    const RocCurve exact = roc_auc(preds[m]);
    fold_auc[m] = exact.fold_auc;
    double mean_fold = 0.0;
    for (double a : exact.fold_auc) mean_fold += a / static_cast<double>(K);
    summary += models[m] + "," + csv::fixed(exact.auc, 6) + "," + csv::fixed(mean_fold, 6) + "," +
               csv::fixed(exact.best_threshold, 6) + "," + csv::fixed(exact.pct_ones_recovered, 2);
    for (double a : exact.fold_auc) summary += "," + csv::fixed(a, 6);
    summary += "\n";
    roc_grid.emplace_back(models[m], roc_auc(preds[m], thresholds));
    murphy.emplace_back(models[m], murphy_diagram(preds[m], theta));
  }
  csv::write_file((dir / "summary.csv").string(), summary);
  write_roc_csv((dir / "roc.csv").string(), roc_grid);
  write_murphy_csv((dir / "murphy.csv").string(), murphy);

  std::string wil = "model_a,model_b,p_value\n";
  for (std::size_t a = 0; a < M; ++a)
    for (std::size_t b = 0; b < M; ++b) {
      if (a == b) continue;
      std::string p = "NA";
      if (K >= 5) {
        try {
          p = csv::exact(wilcoxon_paired_one_sided(fold_auc[a], fold_auc[b]));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::AllZeroDifferences) throw;
        }
      }
      wil += models[a] + "," + models[b] + "," + p + "\n";
    }
  csv::write_file((dir / "wilcoxon.csv").string(), wil);

  std::string folds = "fold,host,parasite\n";
  for (std::size_t f = 0; f < K; ++f)
    for (const auto& c : plan.held_out[f])
      folds += std::to_string(f + 1) + "," + csv::escape(d.z.hosts()[c.h]) + "," + csv::escape(d.z.parasites()[c.j]) +
               "\n";
  csv::write_file((dir / "folds.csv").string(), folds);
  res.files = {"summary.csv", "roc.csv", "murphy.csv", "wilcoxon.csv", "folds.csv"};

  const auto nn = std::find(models.begin(), models.end(), "nn");
  if (nn != models.end()) {
    const auto m = static_cast<std::size_t>(nn - models.begin());
    std::string out = "fold,k,training_auc\n";
    for (std::size_t f = 0; f < K; ++f)
      out += std::to_string(f + 1) + "," + std::to_string(nn_sel[m][f].k) + "," +
             csv::fixed(nn_sel[m][f].training_auc, 6) + "\n";
    csv::write_file((dir / "nn_k.csv").string(), out);
    res.files.push_back("nn_k.csv");
  }
  write_manifest(dir, "crossval", cfg, d.inputs, res.files);
  return res;
}

CommandResult cmd_scan(const RunConfig& cfg) {
  const std::string grid_text = cfg.transforms.value_or(
      "EB:-2,EB:-1,EB:0,EB:1,EB:2,lambda:0.25,lambda:0.5,lambda:0.75,lambda:1,delta:0.5,delta:1,delta:2,OU:0.5,OU:1,OU:2");
  const auto grid = parse_transform_grid(grid_text);
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "transforms: grid is empty");
  Dataset d = load_dataset(cfg, true);
  ScanOptions opts;
  opts.folds = cfg.folds;
  opts.floor = cfg.floor;
  opts.seed = cfg.seed;
  opts.include_kappa = cfg.include_kappa;
  opts.jobs = cfg.jobs;
  const auto rows = transform_scan(d.z, *d.depths, grid, opts);
  const fs::path dir = prepare_out(cfg.out);
  CommandResult res{dir.string(), {"scan.csv"}};
  write_scan_csv((dir / "scan.csv").string(), rows);
  write_manifest(dir, "scan", cfg, d.inputs, res.files);
  return res;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
  if (cfg.sim_parasites == 0) config_error("sim_parasites", "must be at least 1");
  cfg.sampler.hyper.validate();
  const bool phylo = cfg.model != "affinity";
  const bool aff = cfg.model != "phylo";
  Rng rng(cfg.seed);
  std::vector<std::string> inputs;

  std::optional<PhyloTree> tree;
  std::optional<PairwiseMrcaDepths> depths;
  std::size_t H = cfg.sim_hosts;
  if (!cfg.tree.empty()) {
    require_file("tree", cfg.tree, "tree");
    inputs.push_back(cfg.tree);
    tree.emplace(read_newick_file(cfg.tree));
    H = tree->tip_count();
  } else if (phylo) {
    if (H < 2) config_error("sim_hosts", "need at least 2 hosts for a tree");
    tree.emplace(random_tree(H, rng, "h"));
  }
  if (H == 0) config_error("sim_hosts", "must be at least 1");
  if (tree) depths.emplace(pairwise_depths(*tree));

  const auto& hp = cfg.sampler.hyper;
  SyntheticSpec spec;
  spec.use_phylogeny = phylo;
  spec.eta = phylo ? cfg.sim_eta : 0.0;
  spec.burn_sweeps = cfg.sim_burn;
  spec.delta_default = cfg.sampler.delta_default;
  std::gamma_distribution<double> gd(hp.alpha_gamma, 1.0 / hp.tau_gamma);
  std::gamma_distribution<double> rd(hp.alpha_rho, 1.0 / hp.tau_rho);
  for (std::size_t h = 0; h < H; ++h) spec.gamma.push_back(aff ? gd(rng) : 1.0);
  for (std::size_t j = 0; j < cfg.sim_parasites; ++j) spec.rho.push_back(aff ? rd(rng) : 1.0);
  const InteractionMatrix z = generate_synthetic(phylo ? &*depths : nullptr, spec, rng);

  const fs::path dir = prepare_out(cfg.out);
  CommandResult res{dir.string(), {"edges.csv", "matrix.csv", "truth.csv"}};
  write_edges_csv((dir / "edges.csv").string(), z);
  write_matrix_csv((dir / "matrix.csv").string(), z);
  std::string truth = "parameter,value\n";
  if (phylo) truth += "eta," + csv::exact(spec.eta) + "\n";
  for (std::size_t h = 0; h < H; ++h) truth += csv::escape("gamma:" + z.hosts()[h]) + "," + csv::exact(spec.gamma[h]) + "\n";
  for (std::size_t j = 0; j < spec.rho.size(); ++j)
    truth += csv::escape("rho:" + z.parasites()[j]) + "," + csv::exact(spec.rho[j]) + "\n";
  csv::write_file((dir / "truth.csv").string(), truth);
  if (tree) {
    csv::write_file((dir / "tree.nwk").string(), to_newick(*tree) + "\n");
    res.files.push_back("tree.nwk");
  }
  write_manifest(dir, "simulate", cfg, inputs, res.files);
  return res;
}

CommandResult cmd_report(const RunConfig& cfg) {
  const fs::path run = cfg.run_dir.empty() ? fs::path(cfg.out) : fs::path(cfg.run_dir);
  for (const char* name : {"matrix.csv", "predictive.csv", "trace.csv"})
    if (!fs::is_regular_file(run / name))
      throw Error(ErrorCode::MissingArtifact, (run / name).string() + " not found; run fit first");
  const InteractionMatrix z = read_matrix_csv((run / "matrix.csv").string());
  std::vector<std::string> hosts;
  std::vector<std::string> parasites;
  const Matrix p = read_probability_csv((run / "predictive.csv").string(), &hosts, &parasites);
  if (hosts != z.hosts() || parasites != z.parasites())
    throw Error(ErrorCode::LabelMismatch, "predictive.csv and matrix.csv disagree on labels");
  std::vector<std::string> inputs{(run / "matrix.csv").string(), (run / "predictive.csv").string(),
                                  (run / "trace.csv").string()};

  const fs::path dir = prepare_out((run / "report").string());
  CommandResult res{dir.string(), {}};

  // degree distributions: observed vs predicted at the threshold
  std::vector<std::uint8_t> called(p.data().size());
  for (std::size_t i = 0; i < called.size(); ++i) called[i] = p.data()[i] >= cfg.report_threshold;
  const InteractionMatrix predicted(z.hosts(), z.parasites(), called);
  const auto obs = degree_distributions(z);
  const auto pred = degree_distributions(predicted);
  std::string deg = "side,degree,observed,predicted\n";
  auto emit = [&](const char* side, const std::map<std::size_t, std::size_t>& a,
                  const std::map<std::size_t, std::size_t>& b) {
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> all;
    for (const auto& [k, v] : a) all[k].first = v;
    for (const auto& [k, v] : b) all[k].second = v;
    for (const auto& [k, v] : all)
      deg += std::string(side) + "," + std::to_string(k) + "," + std::to_string(v.first) + "," +
             std::to_string(v.second) + "\n";
  };
  emit("host", obs.host_histogram, pred.host_histogram);
  emit("parasite", obs.parasite_histogram, pred.parasite_histogram);
  csv::write_file((dir / "degree_distribution.csv").string(), deg);

  // top-x: later-documented ones among current zeros when a truth file is
  // given, otherwise documented ones among all cells
  std::vector<double> cand_prob;
  std::vector<std::uint8_t> cand_truth;
  if (!cfg.truth_edges.empty()) {
    require_file("truth_edges", cfg.truth_edges, "truth edge list");
    inputs.push_back(cfg.truth_edges);
    std::map<std::string, std::size_t> hi;
    std::map<std::string, std::size_t> pi;
    for (std::size_t h = 0; h < z.rows(); ++h) hi[z.hosts()[h]] = h;
    for (std::size_t j = 0; j < z.cols(); ++j) pi[z.parasites()[j]] = j;
    std::vector<std::uint8_t> later(z.cells().size(), 0);
    for (const auto& r : read_edges_csv(cfg.truth_edges)) {
      auto a = hi.find(r.host);
      auto b = pi.find(r.parasite);
      if (a != hi.end() && b != pi.end()) later[a->second * z.cols() + b->second] = 1;
    }
    for (std::size_t i = 0; i < later.size(); ++i)
      if (!z.cells()[i]) {
        cand_prob.push_back(p.data()[i]);
        cand_truth.push_back(later[i]);
      }
  } else {
    cand_prob = p.data();
    cand_truth = z.cells();
  }
  const std::size_t targets = static_cast<std::size_t>(std::count(cand_truth.begin(), cand_truth.end(), 1));
  const std::size_t x_max = std::min(cfg.top_x ? cfg.top_x : targets, cand_prob.size());
  const auto curve = top_x_recovery(cand_prob, cand_truth, x_max);
  std::string top = "x,recovered\n";
  for (std::size_t x = 0; x < curve.size(); ++x) top += std::to_string(x + 1) + "," + std::to_string(curve[x]) + "\n";
  csv::write_file((dir / "top_x.csv").string(), top);

  const auto perm = left_order_permutation(z);
  write_matrix_csv((dir / "left_ordered_matrix.csv").string(), z.select_columns(perm));
  Matrix lp(z.rows(), z.cols());
  std::vector<std::string> lpar;
  for (std::size_t c = 0; c < perm.size(); ++c) {
    lpar.push_back(z.parasites()[perm[c]]);
    for (std::size_t h = 0; h < z.rows(); ++h) lp(h, c) = p(h, perm[c]);
  }
  write_probability_csv((dir / "left_ordered_predictive.csv").string(), z.hosts(), lpar, lp);
  res.files = {"degree_distribution.csv", "top_x.csv", "left_ordered_matrix.csv", "left_ordered_predictive.csv"};
  write_manifest(dir, "report", cfg, inputs, res.files);
  return res;
}

}  // namespace lsnet
