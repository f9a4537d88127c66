#include "lsnet/model.hpp"

#include <algorithm>
#include <cmath>

#include "lsnet/error.hpp"
#include "lsnet/transforms.hpp"

namespace lsnet {

void Hyperparams::validate() const {
  for (double v : {alpha_gamma, tau_gamma, alpha_rho, tau_rho})
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, "hyperparameters must be positive");
}

double delta_weight(std::size_t h, std::span<const std::uint8_t> column, const Matrix& distances,
                    double default_value) {
  double sum = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (i == h || !column[i]) continue;
    const double d = distances(h, i);
    if (!(d > 0.0))
      throw Error(ErrorCode::NonPositiveDistance,
                  "distance between hosts " + std::to_string(h) + " and " + std::to_string(i) + " is not positive");
    sum += 1.0 / d;
    any = true;
  }
  return any ? sum : default_value;
}

double interaction_prob(double tau) {
  if (tau < 0.0 || std::isnan(tau)) throw Error(ErrorCode::NegativeRate, "rate must be >= 0");
  return -std::expm1(-tau);
}

double gumbel_zero_inflated_logpdf(double s, double tau) {
  if (s == 0.0) return -tau;
  return std::log(tau) - s - tau * std::exp(-s);
}

double sample_truncated_gumbel(double tau_log, Rng& rng) {
  // v uniform on (F(0), 1), F(0) = exp(-e^{tau_log}); -log v computed as
  // -log1p(u * expm1(-a)) so neither tail loses precision.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double neg_tail = std::expm1(-std::exp(tau_log));
  for (;;) {
    const double u = unif(rng);
    if (u == 0.0) continue;
    const double w = -std::log1p(u * neg_tail);
    if (!(w > 0.0)) continue;
    const double s = tau_log - std::log(w);
    if (s > 0.0 && std::isfinite(s)) return s;
  }
}

double hidden_positive_prob(double g, double psi) {
  const double num = g * psi;
  const double den = num + 1.0 - psi;
  return den > 0.0 ? num / den : 0.0;
}

DeltaCache::DeltaCache(const InteractionMatrix& z, const PairwiseMrcaDepths* depths, bool use_phylogeny,
                       DeltaDefault default_kind)
    : z_(&z), depths_(depths), use_phylogeny_(use_phylogeny), column_ones_(z.column_ones()) {
  if (use_phylogeny_) {
    if (!depths_) throw Error(ErrorCode::InvalidArgument, "phylogeny enabled but no tree given");
    if (depths_->labels() != z.hosts()) throw Error(ErrorCode::LabelMismatch, "tree tips and host rows differ");
    if (default_kind == DeltaDefault::MeanDistance) {
      const std::size_t n = depths_->size();
      double sum = 0.0;
      std::size_t pairs = 0;
      for (std::size_t h = 0; h < n; ++h)
        for (std::size_t i = h + 1; i < n; ++i) {
          sum += depths_->distance(h, i);
          ++pairs;
        }
      if (pairs == 0 || !(sum > 0.0)) throw Error(ErrorCode::DegenerateDistance, "mean pairwise distance is zero");
      default_value_ = sum / static_cast<double>(pairs);
    }
  }
  delta_ = Matrix(z.rows(), z.cols(), 1.0);
  if (!use_phylogeny_) valid_ = true;
}

void DeltaCache::inverse_row(std::size_t h, double eta, std::span<double> out) const {
  const double th = depths_->tip_depth(h);
  for (std::size_t i = 0; i < depths_->size(); ++i) {
    if (i == h) {
      out[i] = 0.0;
      continue;
    }
    const double tk = depths_->mrca_depth(h, i);
    const double phi = eb_branch(th, tk, eta) + eb_branch(depths_->tip_depth(i), tk, eta);
    if (!(phi > 0.0))
      throw Error(ErrorCode::NonPositiveDistance,
                  "transformed distance between '" + depths_->labels()[h] + "' and '" + depths_->labels()[i] +
                      "' is not positive");
    out[i] = 1.0 / phi;
  }
}

void DeltaCache::fill_row(std::size_t h, std::span<const double> inverse, std::span<double> out) const {
  for (std::size_t j = 0; j < column_ones_.size(); ++j) {
    double sum = 0.0;
    bool any = false;
    for (std::size_t i : column_ones_[j]) {
      if (i == h) continue;
      sum += inverse[i];
      any = true;
    }
    out[j] = any ? sum : default_value_;
  }
}

void DeltaCache::set_eta(double eta) {
  if (!use_phylogeny_) {
    eta_ = eta;
    return;
  }
  if (valid_ && eta == eta_) return;
  std::vector<double> inv(z_->rows());
  for (std::size_t h = 0; h < z_->rows(); ++h) {
    inverse_row(h, eta, inv);
    fill_row(h, inv, delta_.row(h));
  }
  eta_ = eta;
  valid_ = true;
  ++recomputations_;
}

void DeltaCache::row_for_eta(std::size_t h, double eta, std::span<double> out) const {
  if (!use_phylogeny_) {
    std::fill(out.begin(), out.end(), 1.0);
    return;
  }
  std::vector<double> inv(z_->rows());
  inverse_row(h, eta, inv);
  fill_row(h, inv, out);
}

Matrix DeltaCache::all_for_eta(double eta) const {
  Matrix out(z_->rows(), z_->cols(), 1.0);
  if (!use_phylogeny_) return out;
  for (std::size_t h = 0; h < z_->rows(); ++h) row_for_eta(h, eta, out.row(h));
  return out;
}

Matrix phylogeny_only_probabilities(const InteractionMatrix& z, const Matrix& distances, double default_value) {
  const auto cols = z.column_ones();
  Matrix p(z.rows(), z.cols());
  for (std::size_t j = 0; j < z.cols(); ++j)
    for (std::size_t h = 0; h < z.rows(); ++h) {
      double sum = 0.0;
      bool any = false;
      for (std::size_t i : cols[j]) {
        if (i == h) continue;
        const double d = distances(h, i);
        if (!(d > 0.0)) throw Error(ErrorCode::NonPositiveDistance, "non-positive transformed distance");
        sum += 1.0 / d;
        any = true;
      }
      p(h, j) = interaction_prob(any ? sum : default_value);
    }
  return p;
}

void require_multi_host_columns(const InteractionMatrix& z) {
  for (std::size_t j = 0; j < z.cols(); ++j)
    if (z.col_sum(j) == 1)
      throw Error(ErrorCode::SingleHostColumn,
                  "parasite '" + z.parasites()[j] + "' has a single documented host; drop such columns first");
}

void require_distinct_tips(const PairwiseMrcaDepths& depths) {
  for (std::size_t h = 0; h < depths.size(); ++h)
    for (std::size_t i = h + 1; i < depths.size(); ++i)
      if (!(depths.distance(h, i) > 0.0))
        throw Error(ErrorCode::DegenerateDistance,
                    "hosts '" + depths.labels()[h] + "' and '" + depths.labels()[i] + "' sit at distance 0");
}

}  // namespace lsnet
