#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsnet/matrix.hpp"

namespace lsnet {

struct InteractionRecord {
  std::string host;
  std::string parasite;
  std::optional<int> year;
  std::optional<int> evidence_count;  // kept for provenance, unused by the model
};

// Dense binary host x parasite matrix with optional earliest-year per cell.
// Immutable; every transformation returns a new matrix.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;
  InteractionMatrix(std::vector<std::string> hosts, std::vector<std::string> parasites,
                    std::vector<std::uint8_t> cells, std::vector<std::optional<int>> years = {});

  std::size_t rows() const { return hosts_.size(); }
  std::size_t cols() const { return parasites_.size(); }
  const std::vector<std::string>& hosts() const { return hosts_; }
  const std::vector<std::string>& parasites() const { return parasites_; }

  std::uint8_t at(std::size_t h, std::size_t j) const { return cells_[h * cols() + j]; }
  std::optional<int> year(std::size_t h, std::size_t j) const {
    return years_.empty() ? std::nullopt : years_[h * cols() + j];
  }
  bool has_years() const { return !years_.empty(); }
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  const std::vector<std::optional<int>>& years() const { return years_; }

  std::size_t row_sum(std::size_t h) const;
  std::size_t col_sum(std::size_t j) const;
  std::size_t ones() const;
  // Row indices of the ones in each column.
  std::vector<std::vector<std::size_t>> column_ones() const;

  // Copy with the listed cells set to 0 (years kept).
  InteractionMatrix without(const std::vector<Cell>& cells) const;
  InteractionMatrix select_columns(const std::vector<std::size_t>& cols) const;
  InteractionMatrix select_rows(const std::vector<std::size_t>& rows) const;

 private:
  std::vector<std::string> hosts_;
  std::vector<std::string> parasites_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::optional<int>> years_;
};

InteractionMatrix build_matrix(const std::vector<InteractionRecord>& records);

// Records for every one-cell, in row-major order (inverse of build_matrix).
std::vector<InteractionRecord> to_records(const InteractionMatrix& z);

InteractionMatrix drop_single_host_parasites(const InteractionMatrix& z);

// Keep parasites for which the predicate holds (e.g. "named to species level").
InteractionMatrix filter_parasites(const InteractionMatrix& z, const std::function<bool(const std::string&)>& keep);

struct TemporalSplit {
  InteractionMatrix train;
  std::vector<Cell> test_mask;  // one-cells first documented after the cutoff
};
TemporalSplit temporal_split(const InteractionMatrix& z, int cutoff);

struct DegreeDistribution {
  std::vector<std::size_t> host_degrees;
  std::vector<std::size_t> parasite_degrees;
  std::map<std::size_t, std::size_t> host_histogram;      // degree -> number of hosts
  std::map<std::size_t, std::size_t> parasite_histogram;  // degree -> number of parasites
};
DegreeDistribution degree_distributions(const InteractionMatrix& z);

// Columns sorted by descending bit-string value (row 0 most significant),
// ties by parasite label.
InteractionMatrix left_order(const InteractionMatrix& z);
std::vector<std::size_t> left_order_permutation(const InteractionMatrix& z);

struct LabelNormalization {
  bool underscores_as_spaces = true;
  bool case_fold = true;
};
std::string normalize_label(const std::string& label, const LabelNormalization& opts);

// CSV: header host,parasite[,year][,evidence_count].
std::vector<InteractionRecord> read_edges_csv(const std::string& path);
void write_edges_csv(const std::string& path, const InteractionMatrix& z);

// Matrix CSV: host labels in the first column, parasite labels as header.
void write_matrix_csv(const std::string& path, const InteractionMatrix& z);
void write_probability_csv(const std::string& path, const std::vector<std::string>& hosts,
                           const std::vector<std::string>& parasites, const Matrix& p);
InteractionMatrix read_matrix_csv(const std::string& path);
Matrix read_probability_csv(const std::string& path, std::vector<std::string>* hosts = nullptr,
                            std::vector<std::string>* parasites = nullptr);

}  // namespace lsnet
