#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "lsnet/error.hpp"
#include "lsnet/interactions.hpp"
#include "lsnet/sampler.hpp"
#include "lsnet/transforms.hpp"

using namespace lsnet;

namespace {

PairwiseMrcaDepths abc() {
  auto tree = std::make_shared<const PhyloTree>(parse_newick("((A:1,B:1):1,C:2):0;"));
  return PairwiseMrcaDepths(tree, {"A", "B", "C"});
}

}  // namespace

TEST_CASE("EB at eta = 0 is the plain distance") {
  const auto d = abc();
  for (std::size_t h = 0; h < 3; ++h)
    for (std::size_t i = 0; i < 3; ++i)
      if (h != i) CHECK(transform_pair(d, h, i, TransformSpec::eb(0.0)) == d.distance(h, i));
}

TEST_CASE("EB at eta = ln 2 on depths (1, 1) with MRCA 0.5") {
  const double eta = std::log(2.0);
  const double expected = 2.0 * (2.0 - std::sqrt(2.0)) / eta;
  CHECK(transform_pair(abc(), 0, 1, TransformSpec::eb(eta)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.6902).epsilon(1e-4));
}

TEST_CASE("eb_branch is continuous through zero and splits additively") {
  for (double t : {0.3, 0.9}) {
    CHECK(eb_branch(t, 0.1, 0.0) == doctest::Approx(t - 0.1));
    CHECK(eb_branch(t, 0.1, 1e-9) == doctest::Approx(t - 0.1).epsilon(1e-8));
    CHECK(eb_branch(t, 0.1, -1e-9) == doctest::Approx(t - 0.1).epsilon(1e-8));
    CHECK(eb_branch(t, 0.1, 2.0) == doctest::Approx(eb_branch(t, 0.2, 2.0) + eb_branch(0.2, 0.1, 2.0)));
  }
}

TEST_CASE("other transforms against their one-line definitions") {
  const auto d = abc();
  // A, C: tips at 1, MRCA at 0. A, B: MRCA at 0.5.
  CHECK(transform_pair(d, 0, 1, TransformSpec::lambda(0.3)) == doctest::Approx(2.0 * (1.0 - 0.3 * 0.5)));
  CHECK(transform_pair(d, 0, 1, TransformSpec::lambda(1.0)) == doctest::Approx(1.0));
  CHECK(transform_pair(d, 0, 1, TransformSpec::delta(2.0)) == doctest::Approx(2.0 * (1.0 - 0.25)));
  const double a = 0.8;
  auto ou = [&](double t) { return (1.0 - std::exp(-2.0 * a * t)) / (2.0 * a); };
  CHECK(transform_pair(d, 0, 1, TransformSpec::ou(a)) == doctest::Approx(2.0 * (ou(1.0) - ou(0.5))));
  CHECK(transform_pair(d, 0, 2, TransformSpec::ou(0.0)) == doctest::Approx(2.0));
  // kappa raises each normalized branch length: A-B path is two branches of 0.5
  CHECK(transform_pair(d, 0, 1, TransformSpec::kappa(2.0)) == doctest::Approx(0.5));
  CHECK(transform_pair(d, 0, 2, TransformSpec::kappa(1.0)) == doctest::Approx(2.0));
}

TEST_CASE("parameters outside the domain are rejected") {
  CHECK_THROWS_AS(TransformSpec::lambda(1.5).validate(), Error);
  CHECK_THROWS_AS(TransformSpec::delta(0.0).validate(), Error);
  CHECK_THROWS_AS(TransformSpec::ou(-1.0).validate(), Error);
  CHECK_NOTHROW(TransformSpec::eb(-3.0).validate());
}

TEST_CASE("spec parsing") {
  const auto s = parse_transform_spec("EB:0.5");
  CHECK(s.kind == TransformKind::EB);
  CHECK(s.parameter == 0.5);
  CHECK(parse_transform_spec("lambda:0.3").kind == TransformKind::Lambda);
  CHECK(parse_transform_spec("identity").kind == TransformKind::Identity);
  CHECK(parse_transform_grid("eb:-0.02, eb:0 ;eb:0.02").size() == 3);
  CHECK_THROWS_AS(parse_transform_spec("warp:1"), Error);
}

TEST_CASE("duplicate tips give a degenerate distance") {
  auto tree = std::make_shared<const PhyloTree>(parse_newick("((A:0,B:0):1,C:1);"));
  PairwiseMrcaDepths d(tree, {"A", "B", "C"});
  try {
    transform_pair(d, 0, 1, TransformSpec::identity(), true);
    FAIL("expected DegenerateDistance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateDistance);
  }
}

TEST_CASE("transformed distance matrix is symmetric with zero diagonal") {
  std::mt19937_64 rng(4);
  const auto tree = random_tree(8, rng);
  const auto m = transformed_distances(pairwise_depths(tree), TransformSpec::eb(1.3));
  for (std::size_t h = 0; h < 8; ++h) {
    CHECK(m(h, h) == 0.0);
    for (std::size_t i = 0; i < 8; ++i) CHECK(m(h, i) == m(i, h));
  }
}

TEST_CASE("scan over a grid") {
  Rng rng(12);
  auto tree = std::make_shared<const PhyloTree>(random_tree(20, rng, "h"));
  PairwiseMrcaDepths depths(tree, tree->leaf_labels());
  SyntheticSpec spec;
  spec.gamma.assign(20, 0.2);
  spec.rho.assign(40, 0.2);
  spec.eta = 0.0;
  auto z = drop_single_host_parasites(generate_synthetic(&depths, spec, rng));

  ScanOptions opt;
  opt.folds = 3;
  const auto rows = transform_scan(z, depths, {TransformSpec::identity()}, opt);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].auc > 0.5);

  const auto eb = transform_scan(z, depths, parse_transform_grid("eb:-0.02,eb:0,eb:0.02"), opt);
  REQUIRE(eb.size() == 3);
  for (const auto& r : eb) {
    CHECK(r.auc >= 0.0);
    CHECK(r.auc <= 1.0);
  }
  CHECK_THROWS_AS(transform_scan(z, depths, {}, opt), Error);
}
