#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "lsnet/error.hpp"
#include "lsnet/evaluate.hpp"

using namespace lsnet;

namespace {

InteractionMatrix matrix(std::vector<std::vector<int>> rows) {
  std::vector<std::string> hosts, parasites;
  std::vector<std::uint8_t> cells;
  for (std::size_t h = 0; h < rows.size(); ++h) hosts.push_back("h" + std::to_string(h));
  for (std::size_t j = 0; j < rows[0].size(); ++j) parasites.push_back("p" + std::to_string(j));
  for (const auto& r : rows)
    for (int v : r) cells.push_back(static_cast<std::uint8_t>(v));
  return InteractionMatrix(hosts, parasites, cells);
}

InteractionMatrix random_matrix(std::size_t H, std::size_t J, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::vector<int>> rows(H, std::vector<int>(J));
  for (auto& r : rows)
    for (auto& v : r) v = coin(rng);
  return matrix(rows);
}

}  // namespace

TEST_CASE("folds are disjoint and respect the floor") {
  Rng rng(1);
  const auto z = random_matrix(30, 40, 0.3, rng);
  const auto plan = make_folds(z, 5, 2, rng);
  std::set<Cell> seen;
  for (std::size_t f = 0; f < 5; ++f) {
    for (const auto& c : plan.held_out[f]) {
      CHECK(z.at(c.h, c.j) == 1);
      CHECK(seen.insert(c).second);
    }
    const auto train = plan.training(z, f);
    for (std::size_t j = 0; j < z.cols(); ++j)
      CHECK(train.col_sum(j) >= std::min<std::size_t>(2, z.col_sum(j)));
  }
  CHECK(plan.held_out_total() == seen.size());
}

TEST_CASE("a column with exactly floor ones is never held out") {
  Rng rng(2);
  const auto z = matrix({{1, 1}, {1, 1}, {0, 1}, {0, 1}});
  const auto plan = make_folds(z, 2, 2, rng);
  for (const auto& fold : plan.held_out)
    for (const auto& c : fold) CHECK(c.j == 1);
  CHECK_THROWS_AS(make_folds(matrix({{1}, {1}}), 2, 2, rng), Error);
  CHECK_THROWS_AS(make_folds(z, 1, 2, rng), Error);
}

TEST_CASE("unknown-cell predictions take truth from the full matrix") {
  const auto full = matrix({{1, 0}, {1, 1}});
  const auto train = full.without({{1, 1}});
  Matrix p(2, 2, 0.0);
  p(0, 1) = 0.2;
  p(1, 1) = 0.9;
  const auto fp = unknown_cell_predictions(full, train, p);
  REQUIRE(fp.prob.size() == 2);
  CHECK(fp.prob == std::vector<double>{0.2, 0.9});
  CHECK(fp.truth == std::vector<std::uint8_t>{0, 1});
}

TEST_CASE("elementary score cases") {
  CHECK(elementary_score(0.7, 1, 0.8) == doctest::Approx(0.2));
  CHECK(elementary_score(0.7, 1, 0.5) == 0.0);
  CHECK(elementary_score(0.3, 0, 0.2) == doctest::Approx(0.2));
  for (double t = 0.05; t < 1.0; t += 0.1) {
    CHECK(elementary_score(1.0, 1, t) == 0.0);
    CHECK(elementary_score(0.0, 0, t) == 0.0);
  }
}

TEST_CASE("Murphy diagram") {
  FoldPredictions perfect{{1.0, 0.0, 1.0}, {1, 0, 1}};
  const std::vector<FoldPredictions> one{perfect};
  for (double v : murphy_diagram(one, default_theta_grid()).mean_score) CHECK(v == 0.0);

  // constant 0.5 on balanced truth: y = 1 scores 1 - theta for theta >= 0.5,
  // y = 0 scores theta for theta < 0.5
  FoldPredictions half{{0.5, 0.5}, {1, 0}};
  const std::vector<FoldPredictions> two{half};
  const std::vector<double> grid{0.1, 0.4, 0.5, 0.7};
  const auto curve = murphy_diagram(two, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double expected = ((t >= 0.5 ? 1.0 - t : 0.0) + (t < 0.5 ? t : 0.0)) / 2.0;
    CHECK(curve.mean_score[i] == doctest::Approx(expected));
  }
  CHECK(default_theta_grid().size() == 99);
  CHECK(default_threshold_grid().size() == 201);
}

TEST_CASE("ROC and AUC") {
  FoldPredictions sep{{0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}};
  const std::vector<FoldPredictions> one{sep};
  const auto roc = roc_auc(one);
  CHECK(roc.auc == doctest::Approx(1.0));
  CHECK(roc.pct_ones_recovered == doctest::Approx(100.0));
  CHECK(roc.best_threshold > 0.2);
  CHECK(roc.best_threshold <= 0.8);

  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  FoldPredictions noise;
  for (int i = 0; i < 20000; ++i) {
    noise.prob.push_back(u(rng));
    noise.truth.push_back(coin(rng));
  }
  CHECK(std::abs(mann_whitney_auc(noise.prob, noise.truth) - 0.5) < 0.02);

  // grid-based and exact curves agree on the trapezoid area when values sit on the grid
  FoldPredictions coarse{{0.25, 0.5, 0.5, 0.75, 1.0, 0.0}, {0, 1, 0, 1, 1, 0}};
  const std::vector<FoldPredictions> c{coarse};
  CHECK(roc_auc(c, default_threshold_grid()).auc == doctest::Approx(roc_auc(c).auc));
  CHECK(roc_auc(c).auc == doctest::Approx(mann_whitney_auc(coarse.prob, coarse.truth)));

  FoldPredictions flat{{0.3, 0.4}, {1, 1}};
  CHECK_THROWS_AS(mann_whitney_auc(flat.prob, flat.truth), Error);
}

TEST_CASE("fold averaging of ROC curves") {
  FoldPredictions a{{0.9, 0.1}, {1, 0}}, b{{0.1, 0.9}, {1, 0}};
  const std::vector<FoldPredictions> both{a, b};
  const auto roc = roc_auc(both, default_threshold_grid());
  CHECK(roc.fold_auc.size() == 2);
  CHECK(roc.fold_auc[0] == doctest::Approx(1.0));
  CHECK(roc.fold_auc[1] == doctest::Approx(0.0));
  CHECK(roc.auc == doctest::Approx(0.5));
}

TEST_CASE("nearest-neighbour baseline") {
  // h0 shares p0 only with h1; h1 also has p1
  const auto z = matrix({{1, 0, 0}, {1, 1, 0}, {0, 0, 1}});
  const std::vector<Cell> cell{{0, 1}};
  CHECK(nn_baseline(z, cell, 1)[0] == doctest::Approx(1.0));

  // identical rows: every other host is a neighbour, probability is the column mean without h
  const auto same = matrix({{1, 1, 0}, {1, 1, 0}, {1, 1, 1}, {1, 1, 0}});
  const std::vector<Cell> c2{{0, 2}};
  CHECK(nn_baseline(same, c2, 1)[0] == doctest::Approx(1.0 / 3.0));

  // ties in shared counts both enter the neighbourhood
  const auto tie = matrix({{1, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 0, 0}});
  const std::vector<Cell> c3{{0, 2}, {0, 3}};
  const auto p = nn_baseline(tie, c3, 1);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));

  // a documented cell does not count its own parasite: h1 shares only p0
  // with h0, so for cell (h0, p0) the nearest host is h2
  const auto own = matrix({{1, 1}, {1, 0}, {0, 1}});
  const std::vector<Cell> c4{{0, 0}};
  CHECK(nn_baseline(own, c4, 1)[0] == 0.0);

  const auto m = nn_baseline_matrix(z, 1);
  CHECK(m(0, 1) == doctest::Approx(1.0));
  Rng rng(4);
  const auto sel = select_nn_k(random_matrix(12, 15, 0.3, rng), 4);
  CHECK(sel.k >= 1);
  CHECK(sel.k <= 4);
}

TEST_CASE("top-x recovery") {
  const std::vector<double> prob{0.9, 0.1, 0.8, 0.3};
  const std::vector<std::uint8_t> truth{1, 0, 1, 0};
  const auto curve = top_x_recovery(prob, truth, 4);
  CHECK(curve == std::vector<std::size_t>{1, 2, 2, 2});
  CHECK(top_x_recovery(prob, truth, 0).empty());
  // ties keep input order
  const std::vector<double> flat{0.5, 0.5};
  const std::vector<std::uint8_t> second{0, 1};
  CHECK(top_x_recovery(flat, second, 1)[0] == 0);
}

TEST_CASE("Wilcoxon signed-rank") {
  const std::vector<double> b{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> a = b;
  for (auto& v : a) v += 1.0;
  CHECK(wilcoxon_paired_one_sided(a, b) == doctest::Approx(1.0 / 32.0));
  CHECK_THROWS_AS(wilcoxon_paired_one_sided(b, b), Error);

  // exact enumeration over the 2^6 sign patterns of ranks 1..6
  const std::vector<double> x{1.0, -2.0, 3.0, 4.0, -5.0, 6.0}, zero(6, 0.0);
  const double observed = 1 + 3 + 4 + 6;
  int at_least = 0;
  for (int mask = 0; mask < 64; ++mask) {
    int w = 0;
    for (int r = 1; r <= 6; ++r) w += (mask >> (r - 1) & 1) ? r : 0;
    at_least += w >= observed;
  }
  CHECK(wilcoxon_paired_one_sided(x, zero) == doctest::Approx(at_least / 64.0));
}
