#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lsnet/interactions.hpp"
#include "lsnet/matrix.hpp"
#include "lsnet/model.hpp"
#include "lsnet/newick.hpp"

namespace lsnet {

// How per-row draws of rho, eta and g become the sweep's value.
//   Literal     each row draws rho^(h), eta^(h), g^(h) from its row
//               conditional given the previous sweep; the sweep value is
//               the mean over rows.
//   SingleDraw  conventional Gibbs: one draw of rho_j, eta and g per sweep
//               from their full conditionals.
enum class RowAveraging { Literal, SingleDraw };

// Emitted whenever a Gamma conditional is sampled, before the draw.
struct GammaUpdate {
  enum class Target { Host, Parasite } target = Target::Host;
  std::size_t row = 0;
  std::size_t col = 0;  // parasite index for Target::Parasite
  double shape = 0.0;
  double rate = 0.0;
};

struct SamplerConfig {
  std::size_t iterations = 20000;
  std::size_t burn_in = 20000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  Hyperparams hyper;
  ModelFlags flags = ModelFlags::full();
  RowAveraging averaging = RowAveraging::Literal;
  DeltaDefault delta_default = DeltaDefault::One;

  double eta_init = 0.0;
  double eta_proposal_sd = 0.5;
  std::size_t adapt_window = 50;
  double adapt_epsilon = 1e-6;
  bool update_eta = true;

  double g_init = 0.5;
  // Hold g at this value instead of sampling it (uncertainty runs only).
  std::optional<double> fixed_g;

  // Starting affinities; empty means the prior mean.
  std::vector<double> gamma_init;
  std::vector<double> rho_init;

  // Rows are conditionally independent within a sweep, so any job count
  // yields the same chain.
  std::size_t jobs = 1;

  // Called from worker threads when jobs > 1.
  std::function<void(const GammaUpdate&)> gamma_observer;

  // Throws InvalidConfig.
  void validate() const;
};

struct PosteriorTrace {
  std::vector<std::string> hosts;
  std::vector<std::string> parasites;
  ModelFlags flags;
  DeltaDefault delta_default = DeltaDefault::One;

  std::size_t length = 0;
  std::vector<std::size_t> iteration;  // sweep index (1-based, after burn-in)
  std::vector<double> gamma;           // length x H, row-major
  std::vector<double> rho;             // length x J
  std::vector<double> eta;
  std::vector<double> g;

  // Mean over recorded sweeps of the per-cell predictive probability.
  Matrix predictive;
  double eta_acceptance = 0.0;  // recorded phase, over all row proposals
  double eta_proposal_sd = 0.0; // frozen value after burn-in

  std::size_t H() const { return hosts.size(); }
  std::size_t J() const { return parasites.size(); }
  double gamma_at(std::size_t t, std::size_t h) const { return gamma[t * H() + h]; }
  double rho_at(std::size_t t, std::size_t j) const { return rho[t * J() + j]; }
  std::vector<double> gamma_series(std::size_t h) const;
  std::vector<double> rho_series(std::size_t j) const;
};

// Per-cell predictive probability for one parameter set.
double predictive_cell(double gamma, double rho, double delta, bool documented, bool use_uncertainty, double g);

PosteriorTrace run_mcmc(const InteractionMatrix& z, const PairwiseMrcaDepths* depths, const SamplerConfig& config);

// Recomputes the predictive matrix from a trace.
Matrix posterior_predict(const PosteriorTrace& trace, const InteractionMatrix& z, const PairwiseMrcaDepths* depths);

// Single-conditional building blocks, exposed for testing.
struct RowContext {
  std::span<const std::uint8_t> z;    // row h of Z
  std::span<const double> delta;      // delta_h.
  std::span<double> latent;           // s_h.
};

double update_gamma(std::size_t h, const RowContext& row, std::span<const double> rho, const Hyperparams& hyper,
                    Rng& rng, const std::function<void(const GammaUpdate&)>& observer = {});
void update_rho_row(std::size_t h, const RowContext& row, double gamma, const Hyperparams& hyper, Rng& rng,
                    std::span<double> out, const std::function<void(const GammaUpdate&)>& observer = {});
double update_latent(bool documented, double tau, bool use_uncertainty, double g, Rng& rng);
// Beta(N_-+ + 1, N_++ + 1) from the row's latent signs.
double update_g(const RowContext& row, Rng& rng);
// Row conditional log target of eta up to a constant.
double eta_row_log_target(const RowContext& row, double gamma, std::span<const double> rho);

struct SyntheticSpec {
  std::vector<double> gamma;
  std::vector<double> rho;
  double eta = 0.0;
  bool use_phylogeny = true;
  DeltaDefault delta_default = DeltaDefault::One;
  std::size_t burn_sweeps = 1000;
};

// The conditional model P(z_hj = 1 | rest) = 1 - exp(-gamma_h rho_j delta_hj)
// with delta from fixed EB weights. Cells are row-major H x J.
struct ConditionalModel {
  std::size_t H = 0;
  std::size_t J = 0;
  Matrix weight;  // 1 / phi(T_hi, eta), zero diagonal; empty without phylogeny
  std::vector<double> gamma;
  std::vector<double> rho;
  double default_value = 1.0;
  // Restrict to states without all-zero columns: a cell whose column has no
  // other one is held at 1.
  bool forbid_empty_columns = false;

  double prob_one(std::span<const std::uint8_t> cells, std::size_t h, std::size_t j) const;
  // One row-major pass of single-site updates.
  void sweep(std::span<std::uint8_t> cells, Rng& rng) const;
};

ConditionalModel conditional_model(const PairwiseMrcaDepths* depths, const SyntheticSpec& spec);

// Single-site Gibbs on the conditional model from a random start; returns
// the final state with all-zero columns re-seeded by one uniform host.
// Hosts come from `depths` (or h1..hH), parasites are p1..pJ. Re-seeded
// columns are outside the model, so callers may want their count.
InteractionMatrix generate_synthetic(const PairwiseMrcaDepths* depths, const SyntheticSpec& spec, Rng& rng,
                                     std::size_t* reseeded = nullptr);

// Diagnostics.
std::vector<double> autocorrelation(const std::vector<double>& x, std::size_t max_lag);
// Geyer initial positive sequence estimator.
double effective_sample_size(const std::vector<double>& x);
double quantile(std::vector<double> x, double q);

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double lower = 0.0;  // 2.5%
  double upper = 0.0;  // 97.5%
  double ess = 0.0;
};
ParamSummary summarize(const std::string& name, const std::vector<double>& x);
std::vector<ParamSummary> summarize_trace(const PosteriorTrace& trace);

void write_trace_csv(const std::string& path, const PosteriorTrace& trace);
PosteriorTrace read_trace_csv(const std::string& path);
void write_summary_csv(const std::string& path, const std::vector<ParamSummary>& rows);

}  // namespace lsnet
