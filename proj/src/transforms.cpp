#include "lsnet/transforms.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <thread>

#include "lsnet/csv.hpp"
#include "lsnet/error.hpp"
#include "lsnet/evaluate.hpp"
#include "lsnet/model.hpp"

namespace lsnet {

void TransformSpec::validate() const {
  const double p = parameter;
  auto fail = [&](const char* what) {
    throw Error(ErrorCode::InvalidTransform, to_string(kind) + " parameter " + csv::exact(p) + " " + what);
  };
  if (!std::isfinite(p)) fail("is not finite");
  switch (kind) {
    case TransformKind::Identity:
      if (p != 0.0) fail("must be absent");
      break;
    case TransformKind::EB:
      break;
    case TransformKind::Lambda:
      if (p < 0.0 || p > 1.0) fail("outside [0,1]");
      break;
    case TransformKind::Delta:
      if (p <= 0.0) fail("must be > 0");
      break;
    case TransformKind::OU:
    case TransformKind::Kappa:
      if (p < 0.0) fail("must be >= 0");
      break;
  }
}

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Identity: return "identity";
    case TransformKind::EB: return "EB";
    case TransformKind::Lambda: return "lambda";
    case TransformKind::Delta: return "delta";
    case TransformKind::OU: return "OU";
    case TransformKind::Kappa: return "kappa";
  }
  return "?";
}

TransformSpec parse_transform_spec(const std::string& text) {
  const std::string s = csv::trim(text);
  const auto colon = s.find(':');
  std::string name = csv::trim(s.substr(0, colon));
  for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::map<std::string, TransformKind> kinds{
      {"identity", TransformKind::Identity}, {"eb", TransformKind::EB},       {"lambda", TransformKind::Lambda},
      {"delta", TransformKind::Delta},       {"ou", TransformKind::OU},       {"kappa", TransformKind::Kappa}};
  auto it = kinds.find(name);
  if (it == kinds.end()) throw Error(ErrorCode::InvalidTransform, "unknown transform '" + name + "'");
  TransformSpec spec{it->second, 0.0};
  if (colon != std::string::npos) {
    const std::string num = csv::trim(s.substr(colon + 1));
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), spec.parameter);
    if (ec != std::errc() || ptr != num.data() + num.size())
      throw Error(ErrorCode::InvalidTransform, "bad parameter '" + num + "'");
  } else if (spec.kind != TransformKind::Identity) {
    throw Error(ErrorCode::InvalidTransform, name + " needs a parameter (kind:value)");
  }
  spec.validate();
  return spec;
}

std::vector<TransformSpec> parse_transform_grid(const std::string& text) {
  std::vector<TransformSpec> out;
  std::string item;
  for (char c : text + ",") {
    if (c == ',' || c == ';') {
      if (!csv::trim(item).empty()) out.push_back(parse_transform_spec(item));
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  return out;
}

double eb_branch(double t, double t_anc, double eta) {
  const double d = t - t_anc;
  if (eta == 0.0) return d;
  if (std::abs(eta) < 1e-8) return d * (1.0 + 0.5 * eta * (t + t_anc));
  return std::exp(eta * t_anc) * std::expm1(eta * d) / eta;
}

namespace {

// (1 - e^{-2 alpha t}) / (2 alpha), -> t as alpha -> 0
double ou_depth(double t, double alpha) {
  if (alpha == 0.0) return t;
  return -std::expm1(-2.0 * alpha * t) / (2.0 * alpha);
}

double kappa_path(const PairwiseMrcaDepths& depths, std::size_t h, std::size_t i, double kappa) {
  const auto& tree = depths.tree();
  const double scale = depths.tree_depth_original();
  std::map<int, double> up;
  double acc = 0.0;
  for (int id = depths.tip_node(h); id != -1; id = tree.node(id).parent) {
    up[id] = acc;
    if (id != tree.root()) acc += std::pow(tree.node(id).length / scale, kappa);
  }
  acc = 0.0;
  for (int id = depths.tip_node(i); id != -1; id = tree.node(id).parent) {
    auto it = up.find(id);
    if (it != up.end()) return acc + it->second;
    acc += std::pow(tree.node(id).length / scale, kappa);
  }
  return acc;
}

}  // namespace

double transform_pair(const PairwiseMrcaDepths& depths, std::size_t h, std::size_t i, const TransformSpec& spec,
                      bool require_positive) {
  if (h >= depths.size() || i >= depths.size()) throw Error(ErrorCode::InvalidArgument, "pair index out of range");
  if (h == i) throw Error(ErrorCode::InvalidArgument, "transform_pair needs two distinct hosts");
  const double th = depths.tip_depth(h);
  const double ti = depths.tip_depth(i);
  const double tk = depths.mrca_depth(h, i);
  const double p = spec.parameter;
  double phi = 0.0;
  switch (spec.kind) {
    case TransformKind::Identity:
      phi = (th - tk) + (ti - tk);
      break;
    case TransformKind::EB:
      phi = eb_branch(th, tk, p) + eb_branch(ti, tk, p);
      break;
    case TransformKind::Lambda:
      phi = (th - p * tk) + (ti - p * tk);
      break;
    case TransformKind::Delta:
      phi = (std::pow(th, p) - std::pow(tk, p)) + (std::pow(ti, p) - std::pow(tk, p));
      break;
    case TransformKind::OU:
      phi = (ou_depth(th, p) - ou_depth(tk, p)) + (ou_depth(ti, p) - ou_depth(tk, p));
      break;
    case TransformKind::Kappa:
      phi = kappa_path(depths, h, i, p);
      break;
  }
  if (require_positive && !(phi > 0.0))
    throw Error(ErrorCode::DegenerateDistance,
                "zero distance between '" + depths.labels()[h] + "' and '" + depths.labels()[i] + "'");
  return phi;
}

Matrix transformed_distances(const PairwiseMrcaDepths& depths, const TransformSpec& spec) {
  spec.validate();
  const std::size_t n = depths.size();
  Matrix out(n, n, 0.0);
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t i = h + 1; i < n; ++i) {
      const double d = transform_pair(depths, h, i, spec);
      out(h, i) = d;
      out(i, h) = d;
    }
  return out;
}

std::vector<ScanRow> transform_scan(const InteractionMatrix& z, const PairwiseMrcaDepths& depths,
                                    const std::vector<TransformSpec>& grid, const ScanOptions& options) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "transform grid is empty");
  if (depths.labels() != z.hosts()) throw Error(ErrorCode::LabelMismatch, "depths and matrix host order differ");
  for (const auto& spec : grid) {
    spec.validate();
    if (spec.kind == TransformKind::Kappa && !options.include_kappa)
      throw Error(ErrorCode::InvalidTransform, "kappa is excluded from the scan unless explicitly enabled");
  }
  require_multi_host_columns(z);
  require_distinct_tips(depths);

  Rng rng(options.seed);
  const FoldPlan plan = make_folds(z, options.folds, options.floor, rng);
  std::vector<InteractionMatrix> training;
  for (std::size_t f = 0; f < plan.held_out.size(); ++f) training.push_back(plan.training(z, f));

  std::vector<ScanRow> rows(grid.size());
  auto evaluate_row = [&](std::size_t r) {
    const Matrix dist = transformed_distances(depths, grid[r]);
    std::vector<FoldPredictions> folds;
    for (const auto& train : training) {
      const Matrix p = phylogeny_only_probabilities(train, dist);
      folds.push_back(unknown_cell_predictions(z, train, p));
    }
    rows[r] = {grid[r], roc_auc(folds).auc};
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, grid.size()));
  if (jobs == 1) {
    for (std::size_t r = 0; r < grid.size(); ++r) evaluate_row(r);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < jobs; ++t)
        pool.emplace_back([&, t] {
          try {
            for (std::size_t r = t; r < grid.size(); r += jobs) evaluate_row(r);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_scan_csv(const std::string& path, const std::vector<ScanRow>& rows) {
  std::string out = "kind,parameter,auc\n";
  for (const auto& r : rows)
    out += to_string(r.spec.kind) + "," + csv::exact(r.spec.parameter) + "," + csv::fixed(r.auc, 6) + "\n";
  csv::write_file(path, out);
}

}  // namespace lsnet
