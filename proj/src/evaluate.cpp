#include "lsnet/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsnet/csv.hpp"
#include "lsnet/error.hpp"

namespace lsnet {

InteractionMatrix FoldPlan::training(const InteractionMatrix& z, std::size_t fold) const {
  return z.without(held_out.at(fold));
}

std::size_t FoldPlan::held_out_total() const {
  std::size_t n = 0;
  for (const auto& f : held_out) n += f.size();
  return n;
}

FoldPlan make_folds(const InteractionMatrix& z, std::size_t k, std::size_t floor, Rng& rng) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 folds");
  std::vector<Cell> ones;
  for (std::size_t h = 0; h < z.rows(); ++h)
    for (std::size_t j = 0; j < z.cols(); ++j)
      if (z.at(h, j)) ones.push_back({h, j});
  std::shuffle(ones.begin(), ones.end(), rng);

  std::vector<std::size_t> col_count(z.cols(), 0);
  for (const auto& c : ones) ++col_count[c.j];
  std::vector<std::vector<std::size_t>> taken(k, std::vector<std::size_t>(z.cols(), 0));

  FoldPlan plan;
  plan.k = k;
  plan.floor = floor;
  plan.held_out.resize(k);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  for (const auto& c : ones) {
    if (col_count[c.j] <= floor) continue;
    const std::size_t capacity = col_count[c.j] - floor;
    const std::size_t start = pick(rng);
    for (std::size_t step = 0; step < k; ++step) {
      const std::size_t f = (start + step) % k;
      if (taken[f][c.j] < capacity) {
        ++taken[f][c.j];
        plan.held_out[f].push_back(c);
        break;
      }
    }
  }
  if (plan.held_out_total() == 0)
    throw Error(ErrorCode::InfeasibleFloor, "no column has more than " + std::to_string(floor) + " ones");
  for (auto& f : plan.held_out) std::sort(f.begin(), f.end());
  return plan;
}

FoldPredictions unknown_cell_predictions(const InteractionMatrix& full, const InteractionMatrix& train,
                                         const Matrix& prob) {
  FoldPredictions out;
  for (std::size_t h = 0; h < train.rows(); ++h)
    for (std::size_t j = 0; j < train.cols(); ++j)
      if (!train.at(h, j)) {
        out.prob.push_back(prob(h, j));
        out.truth.push_back(full.at(h, j));
      }
  return out;
}

FoldPredictions all_cell_predictions(const InteractionMatrix& truth, const Matrix& prob) {
  FoldPredictions out;
  out.prob = prob.data();
  out.truth = truth.cells();
  return out;
}

double elementary_score(double x, int y, double theta) {
  const double lo = std::min(x, static_cast<double>(y));
  const double hi = std::max(x, static_cast<double>(y));
  return (lo <= theta && theta < hi) ? std::abs(y - theta) : 0.0;
}

std::vector<double> default_theta_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
  return g;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 200; ++i) g.push_back(i / 200.0);
  return g;
}

ScoreCurve murphy_diagram(std::span<const FoldPredictions> folds, std::span<const double> theta_grid) {
  if (folds.empty()) throw Error(ErrorCode::EmptyTestSet, "no folds");
  for (std::size_t t = 1; t < theta_grid.size(); ++t)
    if (!(theta_grid[t] > theta_grid[t - 1])) throw Error(ErrorCode::InvalidArgument, "theta grid must increase");
  for (double th : theta_grid)
    if (!(th > 0.0 && th < 1.0)) throw Error(ErrorCode::InvalidArgument, "theta must lie in (0,1)");

  ScoreCurve curve;
  curve.theta.assign(theta_grid.begin(), theta_grid.end());
  curve.mean_score.assign(theta_grid.size(), 0.0);
  for (const auto& fold : folds) {
    if (fold.prob.empty()) throw Error(ErrorCode::EmptyTestSet, "fold has no test cells");
    std::vector<double> scores(theta_grid.size(), 0.0);
    for (std::size_t t = 0; t < theta_grid.size(); ++t) {
      double sum = 0.0;
      for (std::size_t c = 0; c < fold.prob.size(); ++c) sum += elementary_score(fold.prob[c], fold.truth[c], theta_grid[t]);
      scores[t] = sum / static_cast<double>(fold.prob.size());
      curve.mean_score[t] += scores[t] / static_cast<double>(folds.size());
    }
    curve.per_fold.push_back(std::move(scores));
  }
  return curve;
}

namespace {

double trapezoid_auc(const std::vector<double>& fpr, const std::vector<double>& tpr) {
  // points ordered by descending threshold, anchored at (0,0) and (1,1)
  double area = 0.0;
  double px = 0.0;
  double py = 0.0;
  for (std::size_t t = 0; t < fpr.size(); ++t) {
    area += (fpr[t] - px) * (tpr[t] + py) / 2.0;
    px = fpr[t];
    py = tpr[t];
  }
  area += (1.0 - px) * (1.0 + py) / 2.0;
  return area;
}

}  // namespace

RocCurve roc_auc(std::span<const FoldPredictions> folds, std::span<const double> threshold_grid) {
  if (folds.empty()) throw Error(ErrorCode::EmptyTestSet, "no folds");
  RocCurve roc;
  if (threshold_grid.empty()) {
    for (const auto& f : folds) roc.threshold.insert(roc.threshold.end(), f.prob.begin(), f.prob.end());
  } else {
    roc.threshold.assign(threshold_grid.begin(), threshold_grid.end());
  }
  std::sort(roc.threshold.begin(), roc.threshold.end(), std::greater<>());
  roc.threshold.erase(std::unique(roc.threshold.begin(), roc.threshold.end()), roc.threshold.end());

  const std::size_t nt = roc.threshold.size();
  roc.tpr.assign(nt, 0.0);
  roc.fpr.assign(nt, 0.0);
  for (const auto& fold : folds) {
    if (fold.prob.empty()) throw Error(ErrorCode::EmptyTestSet, "fold has no test cells");
    std::vector<std::size_t> order(fold.prob.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fold.prob[a] > fold.prob[b]; });
    const double pos = static_cast<double>(std::count(fold.truth.begin(), fold.truth.end(), std::uint8_t{1}));
    const double neg = static_cast<double>(fold.truth.size()) - pos;
    if (pos == 0.0 || neg == 0.0) throw Error(ErrorCode::DegenerateTruth, "test set truth is all 0 or all 1");

    std::vector<double> tpr(nt);
    std::vector<double> fpr(nt);
    std::size_t cursor = 0;
    double tp = 0.0;
    double fp = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
      while (cursor < order.size() && fold.prob[order[cursor]] >= roc.threshold[t]) {
        (fold.truth[order[cursor]] ? tp : fp) += 1.0;
        ++cursor;
      }
      tpr[t] = tp / pos;
      fpr[t] = fp / neg;
      roc.tpr[t] += tpr[t] / static_cast<double>(folds.size());
      roc.fpr[t] += fpr[t] / static_cast<double>(folds.size());
    }
    roc.fold_auc.push_back(trapezoid_auc(fpr, tpr));
  }
  roc.auc = trapezoid_auc(roc.fpr, roc.tpr);
  double best = -1.0;
  for (std::size_t t = 0; t < nt; ++t) {
    if (roc.tpr[t] - roc.fpr[t] > best) {
      best = roc.tpr[t] - roc.fpr[t];
      roc.best_threshold = roc.threshold[t];
      roc.pct_ones_recovered = 100.0 * roc.tpr[t];
    }
  }
  return roc;
}

double mann_whitney_auc(std::span<const double> prob, std::span<const std::uint8_t> truth) {
  if (prob.size() != truth.size()) throw Error(ErrorCode::InvalidArgument, "prob/truth size mismatch");
  std::vector<std::size_t> order(prob.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return prob[a] < prob[b]; });
  double rank_sum = 0.0;
  double pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t e = i;
    while (e < order.size() && prob[order[e]] == prob[order[i]]) ++e;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(e)) / 2.0;
    for (std::size_t k = i; k < e; ++k)
      if (truth[order[k]]) {
        rank_sum += mid;
        pos += 1.0;
      }
    i = e;
  }
  const double neg = static_cast<double>(prob.size()) - pos;
  if (pos == 0.0 || neg == 0.0) throw Error(ErrorCode::DegenerateTruth, "truth is all 0 or all 1");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

namespace {

std::vector<std::vector<std::size_t>> shared_counts(const InteractionMatrix& z) {
  std::vector<std::vector<std::size_t>> c(z.rows(), std::vector<std::size_t>(z.rows(), 0));
  for (const auto& col : z.column_ones())
    for (std::size_t a : col)
      for (std::size_t b : col)
        if (a != b) ++c[a][b];
  return c;
}

// Hosts (other than h) whose count reaches the k-th highest distinct value.
std::vector<std::size_t> neighbourhood(std::size_t h, const std::vector<std::size_t>& counts, std::size_t k) {
  std::vector<std::size_t> distinct;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (i != h) distinct.push_back(counts[i]);
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::size_t> out;
  if (distinct.empty()) return out;
  const std::size_t cut = distinct[std::min(k, distinct.size()) - 1];
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (i != h && counts[i] >= cut) out.push_back(i);
  return out;
}

double neighbourhood_mean(const InteractionMatrix& z, std::size_t j, const std::vector<std::size_t>& hood) {
  if (hood.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i : hood) s += z.at(i, j);
  return s / static_cast<double>(hood.size());
}

double nn_cell(const InteractionMatrix& z, const std::vector<std::vector<std::size_t>>& shared, std::size_t h,
               std::size_t j, std::size_t k) {
  std::vector<std::size_t> counts = shared[h];
  if (z.at(h, j))
    for (std::size_t i = 0; i < z.rows(); ++i)
      if (i != h && z.at(i, j)) --counts[i];
  return neighbourhood_mean(z, j, neighbourhood(h, counts, k));
}

}  // namespace

std::vector<double> nn_baseline(const InteractionMatrix& train, std::span<const Cell> cells, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const auto shared = shared_counts(train);
  std::vector<double> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(nn_cell(train, shared, c.h, c.j, k));
  return out;
}

Matrix nn_baseline_matrix(const InteractionMatrix& train, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const auto shared = shared_counts(train);
  Matrix out(train.rows(), train.cols());
  for (std::size_t h = 0; h < train.rows(); ++h) {
    // cells with z_hj = 0 all share the unadjusted neighbourhood
    const auto hood = neighbourhood(h, shared[h], k);
    for (std::size_t j = 0; j < train.cols(); ++j)
      out(h, j) = train.at(h, j) ? nn_cell(train, shared, h, j, k) : neighbourhood_mean(train, j, hood);
  }
  return out;
}

NnSelection select_nn_k(const InteractionMatrix& train, std::size_t k_max) {
  if (k_max == 0) throw Error(ErrorCode::InvalidArgument, "k range is empty");
  NnSelection best{1, -1.0};
  for (std::size_t k = 1; k <= k_max; ++k) {
    const Matrix p = nn_baseline_matrix(train, k);
    const double auc = mann_whitney_auc(p.data(), train.cells());
    if (auc > best.training_auc) best = {k, auc};
  }
  return best;
}

std::vector<std::size_t> top_x_recovery(std::span<const double> prob, std::span<const std::uint8_t> truth,
                                        std::size_t x_max) {
  if (prob.size() != truth.size()) throw Error(ErrorCode::InvalidArgument, "prob/truth size mismatch");
  if (x_max > prob.size()) throw Error(ErrorCode::InvalidArgument, "x_max exceeds the number of cells");
  std::vector<std::size_t> order(prob.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return prob[a] > prob[b]; });
  std::vector<std::size_t> curve;
  curve.reserve(x_max);
  std::size_t found = 0;
  for (std::size_t x = 0; x < x_max; ++x) {
    found += truth[order[x]];
    curve.push_back(found);
  }
  return curve;
}

double wilcoxon_paired_one_sided(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "paired samples differ in length");
  if (a.size() < 5) throw Error(ErrorCode::InvalidArgument, "signed-rank test needs at least 5 pairs");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  if (d.empty()) throw Error(ErrorCode::AllZeroDifferences, "every paired difference is zero");

  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return std::abs(d[x]) < std::abs(d[y]); });
  // doubled midranks keep the statistic integral under ties
  std::vector<std::size_t> rank2(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t e = i;
    while (e < n && std::abs(d[order[e]]) == std::abs(d[order[i]])) ++e;
    for (std::size_t k = i; k < e; ++k) rank2[order[k]] = i + 1 + e;
    i = e;
  }
  std::size_t observed = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank2[i];
    if (d[i] > 0) observed += rank2[i];
  }
  std::vector<long double> ways(total + 1, 0.0L);
  ways[0] = 1.0L;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t w = total; w >= rank2[i]; --w) {
      ways[w] += ways[w - rank2[i]];
      if (w == rank2[i]) break;
    }
  long double tail = 0.0L;
  for (std::size_t w = observed; w <= total; ++w) tail += ways[w];
  return static_cast<double>(tail / std::pow(2.0L, static_cast<long double>(n)));
}

void write_murphy_csv(const std::string& path, const std::vector<std::pair<std::string, ScoreCurve>>& curves) {
  std::string out = "model,theta,mean_score,fold\n";
  for (const auto& [name, c] : curves) {
    for (std::size_t t = 0; t < c.theta.size(); ++t)
      out += csv::escape(name) + "," + csv::fixed(c.theta[t], 4) + "," + csv::fixed(c.mean_score[t], 8) + ",mean\n";
    for (std::size_t f = 0; f < c.per_fold.size(); ++f)
      for (std::size_t t = 0; t < c.theta.size(); ++t)
        out += csv::escape(name) + "," + csv::fixed(c.theta[t], 4) + "," + csv::fixed(c.per_fold[f][t], 8) + "," +
               std::to_string(f + 1) + "\n";
  }
  csv::write_file(path, out);
}

void write_roc_csv(const std::string& path, const std::vector<std::pair<std::string, RocCurve>>& curves) {
  std::string out = "model,threshold,tpr,fpr\n";
  for (const auto& [name, c] : curves)
    for (std::size_t t = 0; t < c.threshold.size(); ++t)
      out += csv::escape(name) + "," + csv::fixed(c.threshold[t], 6) + "," + csv::fixed(c.tpr[t], 8) + "," +
             csv::fixed(c.fpr[t], 8) + "\n";
  csv::write_file(path, out);
}

}  // namespace lsnet
