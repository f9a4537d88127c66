#include "lsnet/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "lsnet/csv.hpp"
#include "lsnet/error.hpp"
#include "lsnet/transforms.hpp"

namespace lsnet {

void SamplerConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (iterations == 0) bad("iterations must be positive");
  if (thin == 0) bad("thin must be positive");
  if (iterations % thin != 0) bad("thin must divide iterations");
  if (burn_in + iterations < 2) bad("burn_in + iterations must be at least 2");
  if (adapt_window == 0) bad("adapt_window must be positive");
  if (!(eta_proposal_sd > 0.0) || !std::isfinite(eta_proposal_sd)) bad("eta_proposal_sd must be positive");
  if (!(adapt_epsilon >= 0.0)) bad("adapt_epsilon must be >= 0");
  if (!std::isfinite(eta_init)) bad("eta_init must be finite");
  if (!(g_init >= 0.0 && g_init <= 1.0)) bad("g_init must lie in [0,1]");
  if (fixed_g && !(*fixed_g >= 0.0 && *fixed_g <= 1.0)) bad("fixed g must lie in [0,1]");
  if (!flags.use_phylogeny && !flags.use_affinities) bad("model needs affinities, phylogeny or both");
  for (double v : gamma_init)
    if (!(v > 0.0)) bad("initial gamma must be positive");
  for (double v : rho_init)
    if (!(v > 0.0)) bad("initial rho must be positive");
  hyper.validate();
}

std::vector<double> PosteriorTrace::gamma_series(std::size_t h) const {
  std::vector<double> out(length);
  for (std::size_t t = 0; t < length; ++t) out[t] = gamma_at(t, h);
  return out;
}

std::vector<double> PosteriorTrace::rho_series(std::size_t j) const {
  std::vector<double> out(length);
  for (std::size_t t = 0; t < length; ++t) out[t] = rho_at(t, j);
  return out;
}

double predictive_cell(double gamma, double rho, double delta, bool documented, bool use_uncertainty, double g) {
  const double p = interaction_prob(gamma * rho * delta);
  if (!use_uncertainty || documented) return p;
  return hidden_positive_prob(g, p);
}

namespace {

double gamma_draw(double shape, double rate, Rng& rng) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

double beta_draw(double a, double b, Rng& rng) {
  const double x = gamma_draw(a, 1.0, rng);
  const double y = gamma_draw(b, 1.0, rng);
  return x / (x + y);
}

}  // namespace

double update_gamma(std::size_t h, const RowContext& row, std::span<const double> rho, const Hyperparams& hyper,
                    Rng& rng, const std::function<void(const GammaUpdate&)>& observer) {
  double n = 0.0;
  double rate = hyper.tau_gamma;
  for (std::size_t j = 0; j < row.z.size(); ++j) {
    n += row.z[j];
    rate += rho[j] * row.delta[j] * std::exp(-row.latent[j]);
  }
  const double shape = hyper.alpha_gamma + n;
  if (observer) observer({GammaUpdate::Target::Host, h, 0, shape, rate});
  return gamma_draw(shape, rate, rng);
}

void update_rho_row(std::size_t h, const RowContext& row, double gamma, const Hyperparams& hyper, Rng& rng,
                    std::span<double> out, const std::function<void(const GammaUpdate&)>& observer) {
  for (std::size_t j = 0; j < row.z.size(); ++j) {
    const double shape = hyper.alpha_rho + row.z[j];
    const double rate = hyper.tau_rho + gamma * row.delta[j] * std::exp(-row.latent[j]);
    if (observer) observer({GammaUpdate::Target::Parasite, h, j, shape, rate});
    out[j] = gamma_draw(shape, rate, rng);
  }
}

double update_latent(bool documented, double tau, bool use_uncertainty, double g, Rng& rng) {
  if (documented) return sample_truncated_gumbel(std::log(tau), rng);
  // g == 0 draws nothing, so the chain matches the no-uncertainty one exactly
  if (!use_uncertainty || g == 0.0) return 0.0;
  const double p = hidden_positive_prob(g, interaction_prob(tau));
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p) return sample_truncated_gumbel(std::log(tau), rng);
  return 0.0;
}

double update_g(const RowContext& row, Rng& rng) {
  double hidden = 0.0;
  double documented = 0.0;
  for (std::size_t j = 0; j < row.z.size(); ++j)
    if (row.latent[j] > 0.0) (row.z[j] ? documented : hidden) += 1.0;
  return beta_draw(hidden + 1.0, documented + 1.0, rng);
}

double eta_row_log_target(const RowContext& row, double gamma, std::span<const double> rho) {
  double lp = 0.0;
  for (std::size_t j = 0; j < row.z.size(); ++j) {
    if (row.z[j]) lp += std::log(row.delta[j]);
    lp -= gamma * rho[j] * row.delta[j] * std::exp(-row.latent[j]);
  }
  return lp;
}

namespace {

// Haario scale for the scalar eta proposal: 2.38^2 * var + epsilon, where
// the variance is taken over the latter half of the history seen so far so
// the initial transient does not inflate it. Refreshed every `window` sweeps.
class EtaAdapter {
 public:
  EtaAdapter(double sd, std::size_t window, double epsilon) : sd_(sd), window_(window), epsilon_(epsilon) {}

  void observe(double eta) {
    history_.push_back(eta);
    if (history_.size() % window_ != 0 || history_.size() < 4) return;
    const std::size_t from = history_.size() / 2;
    const double n = static_cast<double>(history_.size() - from);
    double mean = 0.0;
    for (std::size_t i = from; i < history_.size(); ++i) mean += history_[i] / n;
    double ss = 0.0;
    for (std::size_t i = from; i < history_.size(); ++i) ss += (history_[i] - mean) * (history_[i] - mean);
    const double var = ss / (n - 1.0);
    if (var > 0.0) sd_ = std::sqrt(2.38 * 2.38 * var + epsilon_);
  }
  double sd() const { return sd_; }

 private:
  double sd_;
  std::size_t window_;
  double epsilon_;
  std::vector<double> history_;
};

template <class F>
void parallel_rows(std::size_t rows, std::size_t jobs, F&& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, rows));
  if (jobs == 1) {
    for (std::size_t h = 0; h < rows; ++h) body(h);
    return;
  }
  std::vector<std::exception_ptr> errors(jobs);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t h = t; h < rows; h += jobs) body(h);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

bool is_numeric_failure(const Error& e) {
  return e.code() == ErrorCode::NonPositiveDistance || e.code() == ErrorCode::DegenerateDistance;
}

class Chain {
 public:
  Chain(const InteractionMatrix& z, const PairwiseMrcaDepths* depths, const SamplerConfig& cfg)
      : z_(z), cfg_(cfg), H_(z.rows()), J_(z.cols()), rng_(cfg.seed),
        cache_(z, depths, cfg.flags.use_phylogeny, cfg.delta_default), adapter_(cfg.eta_proposal_sd, cfg.adapt_window,
                                                                                cfg.adapt_epsilon) {
    const auto& hp = cfg.hyper;
    gamma_ = cfg.gamma_init.empty() ? std::vector<double>(H_, hp.alpha_gamma / hp.tau_gamma) : cfg.gamma_init;
    rho_ = cfg.rho_init.empty() ? std::vector<double>(J_, hp.alpha_rho / hp.tau_rho) : cfg.rho_init;
    if (gamma_.size() != H_ || rho_.size() != J_)
      throw Error(ErrorCode::InvalidConfig, "initial affinities do not match the matrix shape");
    if (!cfg.flags.use_affinities) {
      std::fill(gamma_.begin(), gamma_.end(), 1.0);
      std::fill(rho_.begin(), rho_.end(), 1.0);
    }
    eta_ = cfg.flags.use_phylogeny ? cfg.eta_init : 0.0;
    g_ = cfg.flags.use_uncertainty ? cfg.fixed_g.value_or(cfg.g_init) : 0.0;
    cache_.set_eta(eta_);
    latent_ = Matrix(H_, J_, 0.0);
    rho_rows_ = Matrix(H_, J_, 0.0);
    eta_rows_.assign(H_, eta_);
    g_rows_.assign(H_, g_);
    accepted_.assign(H_, 0);
    for (std::size_t h = 0; h < H_; ++h)
      for (std::size_t j = 0; j < J_; ++j)
        if (z_.at(h, j)) latent_(h, j) = sample_truncated_gumbel(std::log(tau(h, j)), rng_);
  }

  PosteriorTrace run() {
    PosteriorTrace trace;
    trace.hosts = z_.hosts();
    trace.parasites = z_.parasites();
    trace.flags = cfg_.flags;
    trace.delta_default = cfg_.delta_default;
    trace.predictive = Matrix(H_, J_, 0.0);
    const std::size_t total = cfg_.burn_in + cfg_.iterations;
    std::size_t proposals = 0;
    std::size_t accepts = 0;
    for (std::size_t t = 1; t <= total; ++t) {
      const bool burning = t <= cfg_.burn_in;
      std::fill(accepted_.begin(), accepted_.end(), 0);
      if (cfg_.averaging == RowAveraging::Literal)
        literal_sweep();
      else
        single_draw_sweep();
      if (eta_moves()) {
        proposals += burning ? 0 : proposals_per_sweep();
        if (!burning) accepts += std::accumulate(accepted_.begin(), accepted_.end(), std::size_t{0});
        if (burning) adapter_.observe(eta_);
      }
      if (!burning && (t - cfg_.burn_in) % cfg_.thin == 0) record(trace, t - cfg_.burn_in);
    }
    for (double& p : trace.predictive.data()) p /= static_cast<double>(trace.length);
    trace.eta_acceptance = proposals ? static_cast<double>(accepts) / static_cast<double>(proposals) : 0.0;
    trace.eta_proposal_sd = adapter_.sd();
    return trace;
  }

 private:
  bool eta_moves() const { return cfg_.flags.use_phylogeny && cfg_.update_eta; }
  std::size_t proposals_per_sweep() const { return cfg_.averaging == RowAveraging::Literal ? H_ : 1; }

  double tau(std::size_t h, std::size_t j) const { return gamma_[h] * rho_[j] * cache_.delta(h, j); }

  RowContext row(std::size_t h) {
    return {std::span<const std::uint8_t>(z_.cells().data() + h * J_, J_), cache_.values().row(h), latent_.row(h)};
  }

  void update_row_latents(std::size_t h, Rng& rng) {
    const bool unc = cfg_.flags.use_uncertainty;
    for (std::size_t j = 0; j < J_; ++j) latent_(h, j) = update_latent(z_.at(h, j), tau(h, j), unc, g_, rng);
  }

  std::vector<std::uint64_t> row_seeds() {
    std::vector<std::uint64_t> seeds(H_);
    for (auto& s : seeds) s = rng_();
    return seeds;
  }

  void literal_sweep() {
    const auto seeds = row_seeds();
    const bool aff = cfg_.flags.use_affinities;
    std::vector<double> new_gamma = gamma_;
    parallel_rows(H_, cfg_.jobs, [&](std::size_t h) {
      Rng rng(seeds[h]);
      update_row_latents(h, rng);
      const RowContext r = row(h);
      std::span<double> rho_h = rho_rows_.row(h);
      if (aff) {
        new_gamma[h] = update_gamma(h, r, rho_, cfg_.hyper, rng, cfg_.gamma_observer);
        update_rho_row(h, r, new_gamma[h], cfg_.hyper, rng, rho_h, cfg_.gamma_observer);
      } else {
        std::fill(rho_h.begin(), rho_h.end(), 1.0);
      }
      // the row's own gamma and rho^(h) condition its eta draw
      if (eta_moves()) eta_rows_[h] = row_eta_step(h, new_gamma[h], rho_, rng);
      if (cfg_.flags.use_uncertainty) g_rows_[h] = cfg_.fixed_g ? *cfg_.fixed_g : update_g(r, rng);
    });
    gamma_ = std::move(new_gamma);
    if (aff)
      for (std::size_t j = 0; j < J_; ++j) {
        double s = 0.0;
        for (std::size_t h = 0; h < H_; ++h) s += rho_rows_(h, j);
        rho_[j] = s / static_cast<double>(H_);
      }
    if (eta_moves()) {
      eta_ = std::accumulate(eta_rows_.begin(), eta_rows_.end(), 0.0) / static_cast<double>(H_);
      cache_.set_eta(eta_);
    }
    if (cfg_.flags.use_uncertainty) g_ = std::accumulate(g_rows_.begin(), g_rows_.end(), 0.0) / static_cast<double>(H_);
  }

  // One MH step from the previous sweep's eta against the row-h target.
  double row_eta_step(std::size_t h, double gamma_h, std::span<const double> rho_h, Rng& rng) {
    std::normal_distribution<double> step(0.0, adapter_.sd());
    const double proposal = eta_ + step(rng);
    const double log_u = std::log(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    const RowContext here = row(h);
    std::vector<double> delta(J_);
    try {
      cache_.row_for_eta(h, proposal, delta);
    } catch (const Error& e) {
      if (is_numeric_failure(e)) return eta_;
      throw;
    }
    const RowContext there{here.z, delta, here.latent};
    const double diff = eta_row_log_target(there, gamma_h, rho_h) - eta_row_log_target(here, gamma_h, rho_h);
    if (!std::isfinite(diff)) return eta_;
    if (log_u < diff) {
      accepted_[h] = 1;
      return proposal;
    }
    return eta_;
  }

  void single_draw_sweep() {
    const auto seeds = row_seeds();
    const bool aff = cfg_.flags.use_affinities;
    parallel_rows(H_, cfg_.jobs, [&](std::size_t h) {
      Rng rng(seeds[h]);
      update_row_latents(h, rng);
      if (aff) gamma_[h] = update_gamma(h, row(h), rho_, cfg_.hyper, rng, cfg_.gamma_observer);
    });
    if (aff)
      for (std::size_t j = 0; j < J_; ++j) {
        double shape = cfg_.hyper.alpha_rho;
        double rate = cfg_.hyper.tau_rho;
        for (std::size_t h = 0; h < H_; ++h) {
          shape += z_.at(h, j);
          rate += gamma_[h] * cache_.delta(h, j) * std::exp(-latent_(h, j));
        }
        if (cfg_.gamma_observer) cfg_.gamma_observer({GammaUpdate::Target::Parasite, H_, j, shape, rate});
        rho_[j] = gamma_draw(shape, rate, rng_);
      }
    if (eta_moves()) full_eta_step();
    if (cfg_.flags.use_uncertainty) {
      if (cfg_.fixed_g) {
        g_ = *cfg_.fixed_g;
      } else {
        double hidden = 0.0;
        double documented = 0.0;
        for (std::size_t h = 0; h < H_; ++h)
          for (std::size_t j = 0; j < J_; ++j)
            if (latent_(h, j) > 0.0) (z_.at(h, j) ? documented : hidden) += 1.0;
        g_ = beta_draw(hidden + 1.0, documented + 1.0, rng_);
      }
    }
  }

  double full_eta_target(const Matrix& delta) {
    double lp = 0.0;
    for (std::size_t h = 0; h < H_; ++h) {
      const RowContext r{std::span<const std::uint8_t>(z_.cells().data() + h * J_, J_), delta.row(h), latent_.row(h)};
      lp += eta_row_log_target(r, gamma_[h], rho_);
    }
    return lp;
  }

  void full_eta_step() {
    std::normal_distribution<double> step(0.0, adapter_.sd());
    const double proposal = eta_ + step(rng_);
    const double log_u = std::log(std::uniform_real_distribution<double>(0.0, 1.0)(rng_));
    Matrix delta;
    try {
      delta = cache_.all_for_eta(proposal);
    } catch (const Error& e) {
      if (is_numeric_failure(e)) return;
      throw;
    }
    const double diff = full_eta_target(delta) - full_eta_target(cache_.values());
    if (std::isfinite(diff) && log_u < diff) {
      eta_ = proposal;
      cache_.set_eta(eta_);
      accepted_[0] = 1;
    }
  }

  void record(PosteriorTrace& trace, std::size_t iteration) {
    trace.iteration.push_back(iteration);
    trace.gamma.insert(trace.gamma.end(), gamma_.begin(), gamma_.end());
    trace.rho.insert(trace.rho.end(), rho_.begin(), rho_.end());
    trace.eta.push_back(eta_);
    trace.g.push_back(g_);
    ++trace.length;
    const bool unc = cfg_.flags.use_uncertainty;
    for (std::size_t h = 0; h < H_; ++h)
      for (std::size_t j = 0; j < J_; ++j)
        trace.predictive(h, j) += predictive_cell(gamma_[h], rho_[j], cache_.delta(h, j), z_.at(h, j), unc, g_);
  }

  const InteractionMatrix& z_;
  const SamplerConfig& cfg_;
  std::size_t H_;
  std::size_t J_;
  Rng rng_;
  DeltaCache cache_;
  EtaAdapter adapter_;
  std::vector<double> gamma_;
  std::vector<double> rho_;
  double eta_ = 0.0;
  double g_ = 0.0;
  Matrix latent_;
  Matrix rho_rows_;
  std::vector<double> eta_rows_;
  std::vector<double> g_rows_;
  std::vector<std::uint8_t> accepted_;
};

void check_inputs(const InteractionMatrix& z, const PairwiseMrcaDepths* depths, const ModelFlags& flags) {
  if (z.rows() == 0 || z.cols() == 0) throw Error(ErrorCode::EmptyInput, "interaction matrix is empty");
  if (flags.use_phylogeny) {
    if (!depths) throw Error(ErrorCode::InvalidConfig, "the phylogeny model needs a tree");
    if (depths->labels() != z.hosts()) throw Error(ErrorCode::LabelMismatch, "tree tips and host rows differ");
    require_distinct_tips(*depths);
    if (!flags.use_affinities) require_multi_host_columns(z);
  }
}

}  // namespace

PosteriorTrace run_mcmc(const InteractionMatrix& z, const PairwiseMrcaDepths* depths, const SamplerConfig& config) {
  config.validate();
  check_inputs(z, depths, config.flags);
  Chain chain(z, depths, config);
  return chain.run();
}

Matrix posterior_predict(const PosteriorTrace& trace, const InteractionMatrix& z, const PairwiseMrcaDepths* depths) {
  if (trace.length == 0) throw Error(ErrorCode::EmptyTrace, "trace has no recorded sweeps");
  if (trace.hosts != z.hosts() || trace.parasites != z.parasites())
    throw Error(ErrorCode::LabelMismatch, "trace labels differ from the matrix");
  check_inputs(z, depths, trace.flags);
  DeltaCache cache(z, depths, trace.flags.use_phylogeny, trace.delta_default);
  const std::size_t H = z.rows();
  const std::size_t J = z.cols();
  Matrix out(H, J, 0.0);
  for (std::size_t t = 0; t < trace.length; ++t) {
    cache.set_eta(trace.eta[t]);
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t j = 0; j < J; ++j)
        out(h, j) += predictive_cell(trace.gamma_at(t, h), trace.rho_at(t, j), cache.delta(h, j), z.at(h, j),
                                     trace.flags.use_uncertainty, trace.g[t]);
  }
  for (double& p : out.data()) p /= static_cast<double>(trace.length);
  return out;
}

namespace {

void check_spec(const SyntheticSpec& spec) {
  if (spec.gamma.empty() || spec.rho.empty()) throw Error(ErrorCode::InvalidArgument, "synthetic matrix needs hosts and parasites");
  for (double v : spec.gamma)
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  for (double v : spec.rho)
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
}

}  // namespace

double ConditionalModel::prob_one(std::span<const std::uint8_t> cells, std::size_t h, std::size_t j) const {
  double delta = 1.0;
  if (weight.rows() > 0) {
    double sum = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < H; ++i)
      if (i != h && cells[i * J + j]) {
        sum += weight(h, i);
        any = true;
      }
    if (!any && forbid_empty_columns) return 1.0;
    delta = any ? sum : default_value;
  }
  return interaction_prob(gamma[h] * rho[j] * delta);
}

void ConditionalModel::sweep(std::span<std::uint8_t> cells, Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t h = 0; h < H; ++h)
    for (std::size_t j = 0; j < J; ++j) cells[h * J + j] = unif(rng) < prob_one(cells, h, j);
}

ConditionalModel conditional_model(const PairwiseMrcaDepths* depths, const SyntheticSpec& spec) {
  check_spec(spec);
  ConditionalModel m;
  m.H = spec.gamma.size();
  m.J = spec.rho.size();
  m.gamma = spec.gamma;
  m.rho = spec.rho;
  if (spec.use_phylogeny) {
    if (!depths || depths->size() != m.H) throw Error(ErrorCode::InvalidArgument, "tree does not match gamma");
    m.weight = Matrix(m.H, m.H, 0.0);
    double sum = 0.0;
    for (std::size_t h = 0; h < m.H; ++h)
      for (std::size_t i = 0; i < m.H; ++i) {
        if (h == i) continue;
        m.weight(h, i) = 1.0 / transform_pair(*depths, h, i, TransformSpec::eb(spec.eta), true);
        sum += depths->distance(h, i);
      }
    if (spec.delta_default == DeltaDefault::MeanDistance && m.H > 1)
      m.default_value = sum / static_cast<double>(m.H * (m.H - 1));
  }
  return m;
}

InteractionMatrix generate_synthetic(const PairwiseMrcaDepths* depths, const SyntheticSpec& spec, Rng& rng,
                                     std::size_t* reseeded) {
  check_spec(spec);
  if (spec.burn_sweeps < 1000) throw Error(ErrorCode::InvalidArgument, "burn_sweeps must be at least 1000");
  const ConditionalModel model = conditional_model(depths, spec);
  const std::size_t H = model.H;
  const std::size_t J = model.J;

  std::vector<std::string> hosts;
  if (spec.use_phylogeny)
    hosts = depths->labels();
  else
    for (std::size_t h = 0; h < H; ++h) hosts.push_back("h" + std::to_string(h + 1));
  std::vector<std::string> parasites;
  for (std::size_t j = 0; j < J; ++j) parasites.push_back("p" + std::to_string(j + 1));

  std::vector<std::uint8_t> cells(H * J);
  std::bernoulli_distribution coin(0.5);
  for (auto& c : cells) c = coin(rng);
  for (std::size_t sweep = 0; sweep < spec.burn_sweeps; ++sweep) model.sweep(cells, rng);

  std::uniform_int_distribution<std::size_t> any_host(0, H - 1);
  std::size_t count = 0;
  for (std::size_t j = 0; j < J; ++j) {
    bool empty = true;
    for (std::size_t h = 0; h < H && empty; ++h) empty = !cells[h * J + j];
    if (empty) {
      cells[any_host(rng) * J + j] = 1;
      ++count;
    }
  }
  if (reseeded) *reseeded = count;
  return InteractionMatrix(std::move(hosts), std::move(parasites), std::move(cells));
}

std::vector<double> autocorrelation(const std::vector<double>& x, std::size_t max_lag) {
  const std::size_t n = x.size();
  std::vector<double> out;
  if (n == 0) return out;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  for (std::size_t k = 0; k <= std::min(max_lag, n - 1); ++k) {
    if (c0 == 0.0) {
      out.push_back(k == 0 ? 1.0 : 0.0);
      continue;
    }
    double c = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) c += (x[t] - mean) * (x[t + k] - mean);
    out.push_back(c / c0);
  }
  return out;
}

double effective_sample_size(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  if (c0 == 0.0) return static_cast<double>(n);
  auto rho = [&](std::size_t k) {
    double c = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) c += (x[t] - mean) * (x[t + k] - mean);
    return c / c0;
  };
  // Geyer: sum consecutive pairs while positive, forcing them non-increasing.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = rho(2 * k) + rho(2 * k + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    tau += 2.0 * pair;
    prev_pair = pair;
  }
  return static_cast<double>(n) / std::max(tau, 1.0 / static_cast<double>(n));
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw Error(ErrorCode::EmptyTrace, "quantile of an empty series");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

ParamSummary summarize(const std::string& name, const std::vector<double>& x) {
  ParamSummary s;
  s.name = name;
  if (x.empty()) throw Error(ErrorCode::EmptyTrace, "cannot summarize an empty series");
  const double n = static_cast<double>(x.size());
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  s.sd = x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.lower = quantile(x, 0.025);
  s.upper = quantile(x, 0.975);
  s.ess = effective_sample_size(x);
  return s;
}

std::vector<ParamSummary> summarize_trace(const PosteriorTrace& trace) {
  std::vector<ParamSummary> out;
  if (trace.flags.use_phylogeny) out.push_back(summarize("eta", trace.eta));
  if (trace.flags.use_uncertainty) out.push_back(summarize("g", trace.g));
  if (trace.flags.use_affinities) {
    for (std::size_t h = 0; h < trace.H(); ++h) out.push_back(summarize("gamma:" + trace.hosts[h], trace.gamma_series(h)));
    for (std::size_t j = 0; j < trace.J(); ++j)
      out.push_back(summarize("rho:" + trace.parasites[j], trace.rho_series(j)));
  }
  return out;
}

void write_trace_csv(const std::string& path, const PosteriorTrace& trace) {
  std::vector<std::string> header{"iteration", "eta", "g"};
  for (const auto& h : trace.hosts) header.push_back("gamma:" + h);
  for (const auto& p : trace.parasites) header.push_back("rho:" + p);
  std::string out = csv::join(header) + "\n";
  for (std::size_t t = 0; t < trace.length; ++t) {
    out += std::to_string(trace.iteration[t]) + "," + csv::exact(trace.eta[t]) + "," + csv::exact(trace.g[t]);
    for (std::size_t h = 0; h < trace.H(); ++h) out += "," + csv::exact(trace.gamma_at(t, h));
    for (std::size_t j = 0; j < trace.J(); ++j) out += "," + csv::exact(trace.rho_at(t, j));
    out += "\n";
  }
  csv::write_file(path, out);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::InvalidRecord, "not a number in trace: '" + s + "'");
  return v;
}

}  // namespace

PosteriorTrace read_trace_csv(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw Error(ErrorCode::EmptyTrace, path + " is empty");
  const auto& header = rows.front();
  if (header.size() < 3 || header[0] != "iteration" || header[1] != "eta" || header[2] != "g")
    throw Error(ErrorCode::InvalidRecord, path + ": unexpected trace header");
  PosteriorTrace trace;
  for (std::size_t c = 3; c < header.size(); ++c) {
    if (header[c].rfind("gamma:", 0) == 0)
      trace.hosts.push_back(header[c].substr(6));
    else if (header[c].rfind("rho:", 0) == 0)
      trace.parasites.push_back(header[c].substr(4));
    else
      throw Error(ErrorCode::InvalidRecord, path + ": unexpected column '" + header[c] + "'");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != header.size()) throw Error(ErrorCode::InvalidRecord, path + ": ragged trace row");
    trace.iteration.push_back(static_cast<std::size_t>(parse_double(row[0])));
    trace.eta.push_back(parse_double(row[1]));
    trace.g.push_back(parse_double(row[2]));
    std::size_t c = 3;
    for (std::size_t h = 0; h < trace.hosts.size(); ++h) trace.gamma.push_back(parse_double(row[c++]));
    for (std::size_t j = 0; j < trace.parasites.size(); ++j) trace.rho.push_back(parse_double(row[c++]));
    ++trace.length;
  }
  if (trace.length == 0) throw Error(ErrorCode::EmptyTrace, path + " has no recorded sweeps");
  return trace;
}

void write_summary_csv(const std::string& path, const std::vector<ParamSummary>& rows) {
  std::string out = "parameter,mean,sd,lower_2.5,upper_97.5,ess\n";
  for (const auto& s : rows)
    out += csv::escape(s.name) + "," + csv::exact(s.mean) + "," + csv::exact(s.sd) + "," + csv::exact(s.lower) + "," +
           csv::exact(s.upper) + "," + csv::fixed(s.ess, 1) + "\n";
  csv::write_file(path, out);
}

}  // namespace lsnet
