#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "lsnet/error.hpp"
#include "lsnet/interactions.hpp"

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

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("duplicate records collapse and keep the earliest year") {
  const auto z = build_matrix({{"A", "p1", 2005, {}}, {"A", "p1", 1999, {}}, {"B", "p1", {}, {}}});
  CHECK(z.rows() == 2);
  CHECK(z.cols() == 1);
  CHECK(z.at(0, 0) == 1);
  CHECK(z.at(1, 0) == 1);
  CHECK(z.year(0, 0) == 1999);
  CHECK_FALSE(z.year(1, 0).has_value());
  CHECK(code_of([] { build_matrix({}); }) == ErrorCode::EmptyInput);
}

std::set<std::pair<std::string, std::string>> pairs(const InteractionMatrix& z) {
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t h = 0; h < z.rows(); ++h)
    for (std::size_t j = 0; j < z.cols(); ++j)
      if (z.at(h, j)) out.emplace(z.hosts()[h], z.parasites()[j]);
  return out;
}

TEST_CASE("records round trip") {
  const auto z = matrix({{1, 0, 1}, {0, 1, 1}});
  CHECK(pairs(build_matrix(to_records(z))) == pairs(z));
}

TEST_CASE("single-host filtering") {
  const auto z = matrix({{1, 1, 0}, {1, 0, 1}, {0, 0, 1}});
  const auto kept = drop_single_host_parasites(z);
  CHECK(kept.cols() == 2);
  CHECK(kept.parasites()[0] == "p0");
  CHECK(kept.parasites()[1] == "p2");
  CHECK(drop_single_host_parasites(kept).cells() == kept.cells());
  CHECK(code_of([] { drop_single_host_parasites(matrix({{1, 0}, {0, 1}})); }) == ErrorCode::AllColumnsDropped);
}

TEST_CASE("temporal split") {
  const auto z = build_matrix({{"A", "p1", 2001, {}}, {"B", "p1", 2008, {}}, {"A", "p2", 2004, {}}, {"B", "p2", 2009, {}}});
  const auto split = temporal_split(z, 2006);
  CHECK(split.train.ones() == 2);
  CHECK(split.test_mask.size() == 2);
  CHECK(temporal_split(z, 2010).test_mask.empty());
  CHECK(code_of([] { temporal_split(matrix({{1}}), 2006); }) == ErrorCode::MissingYears);
}

TEST_CASE("degree distributions") {
  const auto ident = degree_distributions(matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  CHECK(ident.host_histogram.at(1) == 3);
  CHECK(ident.parasite_histogram.at(1) == 3);
  const auto ones = degree_distributions(matrix({{1, 1, 1}, {1, 1, 1}}));
  CHECK(ones.host_degrees == std::vector<std::size_t>{3, 3});
  CHECK(ones.parasite_degrees == std::vector<std::size_t>{2, 2, 2});
}

TEST_CASE("left ordering") {
  const auto z = matrix({{0, 1}, {1, 1}});
  const auto lo = left_order(z);
  CHECK(lo.parasites() == std::vector<std::string>{"p1", "p0"});
  CHECK(left_order(lo).cells() == lo.cells());
  const auto swapped = z.select_columns({1, 0});
  CHECK(left_order(swapped).cells() == lo.cells());
}

TEST_CASE("label normalization") {
  LabelNormalization opts;
  CHECK(normalize_label("Canis_lupus", opts) == normalize_label("canis lupus", opts));
  opts.case_fold = false;
  CHECK(normalize_label("Canis_lupus", opts) == "Canis lupus");
}

TEST_CASE("CSV round trips") {
  const auto dir = std::filesystem::temp_directory_path() / "lsnet-test-interactions";
  std::filesystem::create_directories(dir);
  const auto z = matrix({{1, 0, 1}, {0, 1, 1}});
  write_matrix_csv((dir / "m.csv").string(), z);
  CHECK(read_matrix_csv((dir / "m.csv").string()).cells() == z.cells());
  write_edges_csv((dir / "e.csv").string(), z);
  CHECK(pairs(build_matrix(read_edges_csv((dir / "e.csv").string()))) == pairs(z));

  std::ofstream((dir / "bad.csv").string()) << "host,parasite\nA,\n";
  CHECK(code_of([&] { read_edges_csv((dir / "bad.csv").string()); }) == ErrorCode::InvalidRecord);
  std::filesystem::remove_all(dir);
}

TEST_CASE("without and column helpers") {
  const auto z = matrix({{1, 1}, {1, 0}});
  const auto w = z.without({{0, 1}});
  CHECK(w.at(0, 1) == 0);
  CHECK(w.ones() == 2);
  CHECK(z.col_sum(0) == 2);
  CHECK(z.row_sum(1) == 1);
  CHECK(z.column_ones()[0] == std::vector<std::size_t>{0, 1});
}
