#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsnet/interactions.hpp"
#include "lsnet/matrix.hpp"
#include "lsnet/newick.hpp"

namespace lsnet {

// Gamma(shape, rate) priors on host and parasite affinities.
struct Hyperparams {
  double alpha_gamma = 1.0;
  double tau_gamma = 1.0;
  double alpha_rho = 1.0;
  double tau_rho = 1.0;

  void validate() const;
};

struct ModelFlags {
  bool use_phylogeny = true;
  bool use_affinities = true;
  bool use_uncertainty = false;

  static ModelFlags affinity_only() { return {false, true, false}; }
  static ModelFlags phylogeny_only() { return {true, false, false}; }
  static ModelFlags full(bool with_g = false) { return {true, true, with_g}; }
};

// Value of delta for a cell whose column has no other documented host.
enum class DeltaDefault { One, MeanDistance };

struct ModelState {
  std::vector<double> gamma;  // per host, > 0
  std::vector<double> rho;    // per parasite, > 0
  double eta = 0.0;
  double g = 0.0;    // 0 exactly when uncertainty is off
  Matrix latent;     // s_hj >= 0
  Hyperparams hyper;
  ModelFlags flags;
};

// Sum over documented neighbours i != h of 1 / distance(h, i); default_value
// when there is none. Throws NonPositiveDistance for a zero/negative distance
// to a documented neighbour.
double delta_weight(std::size_t h, std::span<const std::uint8_t> column, const Matrix& distances,
                    double default_value = 1.0);

// 1 - e^{-tau}; throws NegativeRate for tau < 0.
double interaction_prob(double tau);

// log tau - s - tau e^{-s} for s > 0, and -tau (log of the atom) at s = 0.
double gumbel_zero_inflated_logpdf(double s, double tau);

// Unit-scale Gumbel with location tau_log conditioned on s > 0 (inverse CDF).
double sample_truncated_gumbel(double tau_log, Rng& rng);

// P(s > 0 | z = 0) under the uncertainty correction: g psi / (g psi + 1 - psi).
double hidden_positive_prob(double g, double psi);

// Per-cell delta for the current eta, and row recomputation under a
// proposed eta. With use_phylogeny off every delta is 1.
class DeltaCache {
 public:
  DeltaCache(const InteractionMatrix& z, const PairwiseMrcaDepths* depths, bool use_phylogeny,
             DeltaDefault default_kind = DeltaDefault::One);

  // Recompute for a new eta; no-op when eta equals the cached value.
  void set_eta(double eta);
  double eta() const { return eta_; }
  double delta(std::size_t h, std::size_t j) const { return delta_(h, j); }
  const Matrix& values() const { return delta_; }
  double default_value() const { return default_value_; }
  bool uses_phylogeny() const { return use_phylogeny_; }

  // delta_h. under `eta` without touching the cache.
  void row_for_eta(std::size_t h, double eta, std::span<double> out) const;
  Matrix all_for_eta(double eta) const;

  std::size_t recomputations() const { return recomputations_; }

 private:
  void inverse_row(std::size_t h, double eta, std::span<double> out) const;
  void fill_row(std::size_t h, std::span<const double> inverse, std::span<double> out) const;

  const InteractionMatrix* z_;
  const PairwiseMrcaDepths* depths_;
  bool use_phylogeny_;
  double default_value_ = 1.0;
  std::vector<std::vector<std::size_t>> column_ones_;
  double eta_ = 0.0;
  bool valid_ = false;
  Matrix delta_;
  std::size_t recomputations_ = 0;
};

// Phylogeny-only probabilities 1 - exp(-delta_hj) for fixed transformed
// distances (gamma = rho = 1). Columns without another documented host get
// probability 1 - e^{-default_value}.
Matrix phylogeny_only_probabilities(const InteractionMatrix& z, const Matrix& distances, double default_value = 1.0);

// Throws SingleHostColumn when a column has exactly one documented host.
void require_multi_host_columns(const InteractionMatrix& z);

// Throws DegenerateDistance if two hosts sit at distance 0 (duplicate tips).
void require_distinct_tips(const PairwiseMrcaDepths& depths);

}  // namespace lsnet
