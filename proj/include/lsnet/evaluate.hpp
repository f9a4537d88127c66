#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lsnet/interactions.hpp"
#include "lsnet/matrix.hpp"

namespace lsnet {

// Disjoint held-out sets of one-cells. Removing any single fold leaves every
// column with at least `floor` ones.
struct FoldPlan {
  std::size_t k = 0;
  std::size_t floor = 0;
  std::vector<std::vector<Cell>> held_out;

  InteractionMatrix training(const InteractionMatrix& z, std::size_t fold) const;
  std::size_t held_out_total() const;
};

FoldPlan make_folds(const InteractionMatrix& z, std::size_t k, std::size_t floor, Rng& rng);

// Aligned predictions and 0/1 truth for one evaluation fold.
struct FoldPredictions {
  std::vector<double> prob;
  std::vector<std::uint8_t> truth;
};

// The cells that are 0 in `train`, with truth taken from `full`.
FoldPredictions unknown_cell_predictions(const InteractionMatrix& full, const InteractionMatrix& train,
                                         const Matrix& prob);
// Every cell, truth from `truth`.
FoldPredictions all_cell_predictions(const InteractionMatrix& truth, const Matrix& prob);

// |y - theta| if min(x,y) <= theta < max(x,y), else 0.
double elementary_score(double x, int y, double theta);

std::vector<double> default_theta_grid();      // 0.01 .. 0.99, 99 points
std::vector<double> default_threshold_grid();  // 201 points over [0,1]

struct ScoreCurve {
  std::vector<double> theta;
  std::vector<double> mean_score;               // averaged over folds
  std::vector<std::vector<double>> per_fold;    // [fold][theta]
};

ScoreCurve murphy_diagram(std::span<const FoldPredictions> folds, std::span<const double> theta_grid);

struct RocCurve {
  std::vector<double> threshold;  // descending
  std::vector<double> tpr;        // fold-averaged
  std::vector<double> fpr;        // fold-averaged
  double auc = 0.0;
  double best_threshold = 0.0;    // maximizes tpr - fpr on the averaged curve
  double pct_ones_recovered = 0.0;
  std::vector<double> fold_auc;
};

// Cells are called positive when prob >= threshold. An empty grid means
// "every distinct predicted value" (the exact empirical ROC).
RocCurve roc_auc(std::span<const FoldPredictions> folds, std::span<const double> threshold_grid = {});

// P(random one outscores random zero), ties counted half.
double mann_whitney_auc(std::span<const double> prob, std::span<const std::uint8_t> truth);

// Nearest-neighbour baseline on shared-parasite counts. The neighbourhood of
// (h, j) holds every host whose shared count with h, ignoring parasite j,
// reaches the k-th highest distinct count.
std::vector<double> nn_baseline(const InteractionMatrix& train, std::span<const Cell> cells, std::size_t k);
Matrix nn_baseline_matrix(const InteractionMatrix& train, std::size_t k);

struct NnSelection {
  std::size_t k = 1;
  double training_auc = 0.0;
};
// k in [1, k_max] maximizing the AUC of predicting `train` itself.
NnSelection select_nn_k(const InteractionMatrix& train, std::size_t k_max);

// Cumulative count of true ones among the top-x cells by probability,
// x = 1..x_max. Ties keep the input order.
std::vector<std::size_t> top_x_recovery(std::span<const double> prob, std::span<const std::uint8_t> truth,
                                        std::size_t x_max);

// Exact one-sided p-value of the paired signed-rank test for a > b.
double wilcoxon_paired_one_sided(std::span<const double> a, std::span<const double> b);

void write_murphy_csv(const std::string& path, const std::vector<std::pair<std::string, ScoreCurve>>& curves);
void write_roc_csv(const std::string& path, const std::vector<std::pair<std::string, RocCurve>>& curves);

}  // namespace lsnet
