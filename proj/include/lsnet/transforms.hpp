#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsnet/interactions.hpp"
#include "lsnet/matrix.hpp"
#include "lsnet/newick.hpp"

namespace lsnet {

// Single-parameter evolutionary rescalings of pairwise distances.
//   EB      eta in R         branch term (e^{eta t} - e^{eta t_k}) / eta
//   Lambda  lambda in [0,1]  shared path (root..MRCA) scaled by lambda
//   Delta   delta > 0        node depths raised to delta
//   OU      alpha >= 0       depths mapped through (1 - e^{-2 alpha t}) / (2 alpha)
//   Kappa   kappa >= 0       each branch length raised to kappa (scan opt-in only)
enum class TransformKind { Identity, EB, Lambda, Delta, OU, Kappa };

struct TransformSpec {
  TransformKind kind = TransformKind::Identity;
  double parameter = 0.0;

  static TransformSpec identity() { return {}; }
  static TransformSpec eb(double eta) { return {TransformKind::EB, eta}; }
  static TransformSpec lambda(double l) { return {TransformKind::Lambda, l}; }
  static TransformSpec delta(double d) { return {TransformKind::Delta, d}; }
  static TransformSpec ou(double alpha) { return {TransformKind::OU, alpha}; }
  static TransformSpec kappa(double k) { return {TransformKind::Kappa, k}; }

  // Throws InvalidTransform when the parameter is outside the kind's domain.
  void validate() const;
};

std::string to_string(TransformKind kind);
// "EB:0.5", "lambda:0.3", "identity", ... (kind names are case-insensitive)
TransformSpec parse_transform_spec(const std::string& text);
std::vector<TransformSpec> parse_transform_grid(const std::string& text);  // comma or ';' separated

// (e^{eta t} - e^{eta t_anc}) / eta, with the analytic limit at eta -> 0.
double eb_branch(double t, double t_anc, double eta);

// phi(T_hi, parameter). With require_positive, a zero distance (duplicate
// tips) throws DegenerateDistance.
double transform_pair(const PairwiseMrcaDepths& depths, std::size_t h, std::size_t i, const TransformSpec& spec,
                      bool require_positive = false);

// Symmetric H x H matrix of transformed distances, zero diagonal.
Matrix transformed_distances(const PairwiseMrcaDepths& depths, const TransformSpec& spec);

struct ScanOptions {
  std::size_t folds = 5;
  std::size_t floor = 2;
  std::uint64_t seed = 1;
  bool include_kappa = false;
  std::size_t jobs = 1;
};

struct ScanRow {
  TransformSpec spec;
  double auc = 0.0;
};

// AUC of the phylogeny-only probabilities (gamma = rho = 1) on held-out
// cells for every spec, rows in the order given.
std::vector<ScanRow> transform_scan(const InteractionMatrix& z, const PairwiseMrcaDepths& depths,
                                    const std::vector<TransformSpec>& grid, const ScanOptions& options = {});

void write_scan_csv(const std::string& path, const std::vector<ScanRow>& rows);

}  // namespace lsnet
