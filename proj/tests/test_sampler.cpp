#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <memory>
#include <numeric>

#include "lsnet/error.hpp"
#include "lsnet/sampler.hpp"

using namespace lsnet;

namespace {

struct Toy {
  std::shared_ptr<const PhyloTree> tree;
  PairwiseMrcaDepths depths;
  InteractionMatrix z;
};

Toy toy(std::uint64_t seed, std::size_t H = 12, std::size_t J = 20) {
  Rng rng(seed);
  auto tree = std::make_shared<const PhyloTree>(random_tree(H, rng, "h"));
  PairwiseMrcaDepths depths(tree, tree->leaf_labels());
  SyntheticSpec spec;
  spec.gamma.assign(H, 0.4);
  spec.rho.assign(J, 0.5);
  spec.eta = 0.5;
  auto z = generate_synthetic(&depths, spec, rng);
  return {tree, std::move(depths), std::move(z)};
}

SamplerConfig short_run(std::uint64_t seed = 3) {
  SamplerConfig c;
  c.iterations = 200;
  c.burn_in = 200;
  c.seed = seed;
  return c;
}

double mean_of(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / double(x.size()); }

}  // namespace

TEST_CASE("gamma update with an empty row") {
  const std::size_t J = 6;
  std::vector<std::uint8_t> z(J, 0);
  std::vector<double> delta(J, 1.0), latent(J, 0.0), rho(J, 1.0);
  RowContext row{z, delta, latent};
  Hyperparams hp;
  Rng rng(1);
  GammaUpdate seen;
  update_gamma(0, row, rho, hp, rng, [&](const GammaUpdate& u) { seen = u; });
  CHECK(seen.shape == 1.0);
  CHECK(seen.rate == doctest::Approx(1.0 + J));

  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += update_gamma(0, row, rho, hp, rng);
  // Gamma(1, 7): mean 1/7, sd 1/7
  CHECK(std::abs(sum / n - 1.0 / 7.0) < 3.0 * (1.0 / 7.0) / std::sqrt(double(n)));
}

TEST_CASE("rho row update shapes and rates") {
  std::vector<std::uint8_t> z{0, 1};
  std::vector<double> delta{2.0, 3.0}, latent{0.0, 0.5};
  RowContext row{z, delta, latent};
  Hyperparams hp{1.0, 1.0, 2.0, 4.0};
  Rng rng(1);
  std::vector<GammaUpdate> seen;
  std::vector<double> out(2);
  update_rho_row(0, row, 0.7, hp, rng, out, [&](const GammaUpdate& u) { seen.push_back(u); });
  REQUIRE(seen.size() == 2);
  CHECK(seen[0].shape == 2.0);
  CHECK(seen[0].rate == doctest::Approx(4.0 + 0.7 * 2.0));
  CHECK(seen[1].shape == 3.0);
  CHECK(seen[1].rate == doctest::Approx(4.0 + 0.7 * 3.0 * std::exp(-0.5)));
}

TEST_CASE("latent update under uncertainty") {
  Rng rng(2);
  const double tau = std::log(2.0);  // psi = 0.5
  const int n = 100000;
  for (auto [g, p] : {std::pair{1.0, 0.5}, std::pair{0.5, 1.0 / 3.0}}) {
    int positive = 0;
    for (int i = 0; i < n; ++i) positive += update_latent(false, tau, true, g, rng) > 0.0;
    CHECK(std::abs(double(positive) / n - p) < 3.0 * std::sqrt(p * (1 - p) / n));
  }
  CHECK(update_latent(false, tau, false, 0.5, rng) == 0.0);
  CHECK(update_latent(true, tau, false, 0.0, rng) > 0.0);
}

TEST_CASE("g update is Beta(hidden + 1, documented + 1)") {
  const std::size_t J = 8;
  Rng rng(3);
  const int n = 50000;
  std::vector<std::uint8_t> ones(J, 1);
  std::vector<double> delta(J, 1.0), pos(J, 1.0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += update_g({ones, delta, pos}, rng);
  const double m = 1.0 / (J + 2.0);
  const double sd = std::sqrt(m * (1 - m) / (J + 3.0));
  CHECK(std::abs(sum / n - m) < 3.0 * sd / std::sqrt(double(n)));

  std::vector<std::uint8_t> zeros(J, 0);
  std::vector<double> none(J, 0.0);
  sum = 0.0;
  for (int i = 0; i < n; ++i) sum += update_g({zeros, delta, none}, rng);
  CHECK(std::abs(sum / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("eta row target") {
  std::vector<std::uint8_t> z{1, 0};
  std::vector<double> delta{0.8, 1.7}, latent{0.3, 0.0}, rho{0.5, 2.0};
  const double gamma = 1.2;
  const double expected = std::log(0.8) - gamma * 0.5 * 0.8 * std::exp(-0.3) - gamma * 2.0 * 1.7;
  CHECK(eta_row_log_target({z, delta, latent}, gamma, rho) == doctest::Approx(expected));
}

TEST_CASE("predictive cell") {
  CHECK(predictive_cell(1.0, 1.0, std::log(2.0), true, false, 0.0) == doctest::Approx(0.5));
  CHECK(predictive_cell(1.0, 1.0, std::log(2.0), false, true, 1.0) == doctest::Approx(0.5));
  CHECK(predictive_cell(1.0, 1.0, std::log(2.0), false, true, 0.5) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("configuration errors") {
  const auto t = toy(1);
  auto c = short_run();
  c.iterations = 0;
  CHECK_THROWS_AS(run_mcmc(t.z, &t.depths, c), Error);
  c = short_run();
  CHECK_THROWS_AS(run_mcmc(t.z, nullptr, c), Error);
  c.flags = ModelFlags::affinity_only();
  CHECK_NOTHROW(run_mcmc(t.z, nullptr, c));
}

TEST_CASE("chains are reproducible and independent of the job count") {
  const auto t = toy(2);
  auto c = short_run();
  const auto a = run_mcmc(t.z, &t.depths, c);
  const auto b = run_mcmc(t.z, &t.depths, c);
  CHECK(a.gamma == b.gamma);
  CHECK(a.eta == b.eta);
  c.jobs = 3;
  const auto p = run_mcmc(t.z, &t.depths, c);
  CHECK(a.gamma == p.gamma);
  CHECK(a.rho == p.rho);
  CHECK(a.eta == p.eta);
  CHECK(a.length == 200);
  CHECK(a.predictive.rows() == t.z.rows());
}

TEST_CASE("uncertainty with g held at zero reproduces the plain chain") {
  const auto t = toy(3);
  auto c = short_run();
  const auto plain = run_mcmc(t.z, &t.depths, c);
  c.flags = ModelFlags::full(true);
  c.fixed_g = 0.0;
  const auto held = run_mcmc(t.z, &t.depths, c);
  CHECK(plain.gamma == held.gamma);
  CHECK(plain.eta == held.eta);
}

TEST_CASE("single-draw mode runs and adapts the proposal") {
  const auto t = toy(4);
  auto c = short_run();
  c.averaging = RowAveraging::SingleDraw;
  const auto tr = run_mcmc(t.z, &t.depths, c);
  CHECK(tr.eta_proposal_sd > 0.0);
  CHECK(std::isfinite(tr.eta_proposal_sd));
  CHECK(tr.eta_acceptance > 0.0);
  CHECK(tr.eta_acceptance < 1.0);
}

TEST_CASE("posterior_predict agrees with the running predictive mean") {
  const auto t = toy(5);
  const auto tr = run_mcmc(t.z, &t.depths, short_run());
  const auto p = posterior_predict(tr, t.z, &t.depths);
  for (std::size_t i = 0; i < p.data().size(); ++i) CHECK(p.data()[i] == doctest::Approx(tr.predictive.data()[i]));
}

TEST_CASE("synthetic generation") {
  Rng rng(6);
  SyntheticSpec spec;
  spec.use_phylogeny = false;
  spec.gamma.assign(100, 1.0);
  spec.rho.assign(100, 0.5);
  const auto z = generate_synthetic(nullptr, spec, rng);
  // independent cells with p = 1 - e^{-0.5}; re-seeding is negligible here
  const double p = 1.0 - std::exp(-0.5);
  const double freq = double(z.ones()) / 1e4;
  CHECK(std::abs(freq - p) < 3.0 * std::sqrt(p * (1 - p) / 1e4));

  Rng a(7), b(7);
  spec.gamma.assign(10, 1.0);
  spec.rho.assign(10, 1.0);
  CHECK(generate_synthetic(nullptr, spec, a).cells() == generate_synthetic(nullptr, spec, b).cells());

  spec.gamma.assign(10, 50.0);
  spec.rho.assign(10, 50.0);
  CHECK(generate_synthetic(nullptr, spec, a).ones() == 100);

  spec.burn_sweeps = 10;
  CHECK_THROWS_AS(generate_synthetic(nullptr, spec, a), Error);
}

TEST_CASE("diagnostics") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));

  // AR(1) with phi = 0.5 has ESS about n (1 - phi) / (1 + phi)
  Rng rng(8);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> x(40000);
  double v = 0.0;
  for (auto& e : x) e = v = 0.5 * v + noise(rng);
  CHECK(effective_sample_size(x) == doctest::Approx(40000.0 / 3.0).epsilon(0.15));
  const auto acf = autocorrelation(x, 3);
  CHECK(acf[0] == doctest::Approx(1.0));
  CHECK(acf[1] == doctest::Approx(0.5).epsilon(0.05));

  const auto s = summarize("x", {1, 2, 3, 4, 5});
  CHECK(s.mean == 3.0);
  CHECK(s.lower == doctest::Approx(1.1));
}

TEST_CASE("trace CSV round trip is exact") {
  const auto t = toy(9, 6, 8);
  const auto tr = run_mcmc(t.z, &t.depths, short_run());
  const auto path = (std::filesystem::temp_directory_path() / "lsnet-trace-test.csv").string();
  write_trace_csv(path, tr);
  const auto back = read_trace_csv(path);
  CHECK(back.gamma == tr.gamma);
  CHECK(back.rho == tr.rho);
  CHECK(back.eta == tr.eta);
  CHECK(back.hosts == tr.hosts);
  std::filesystem::remove(path);
}

TEST_CASE("restricted single-column chain never visits the empty column") {
  auto tree = std::make_shared<const PhyloTree>(parse_newick("(a:1,b:1,c:1);"));
  const auto depths = pairwise_depths(*tree);
  SyntheticSpec spec;
  spec.gamma = {1.0, 1.0, 1.0};
  spec.rho = {0.01};
  auto m = conditional_model(&depths, spec);
  m.forbid_empty_columns = true;
  Rng rng(10);
  std::vector<std::uint8_t> cells{1, 0, 0};
  for (int i = 0; i < 1000; ++i) {
    m.sweep(cells, rng);
    CHECK(cells[0] + cells[1] + cells[2] > 0);
  }
}

TEST_CASE("unequal distances give conditionals no joint can reproduce") {
  // Hammersley-Clifford around (1,1,1) depends on the update order unless the
  // weights are equal; two orders disagree on P(100) / P(111).
  const double w01 = 0.5, w02 = 2.0, w12 = 2.0;
  auto odds = [](double tb) { return std::exp(-tb) / (1.0 - std::exp(-tb)); };
  // drop host 1 then host 2, versus host 2 then host 1
  const double order_a = odds(w01 + w12) * odds(w02);
  const double order_b = odds(w02 + w12) * odds(w01);
  CHECK(std::abs(order_a - order_b) > 1e-3);
}
