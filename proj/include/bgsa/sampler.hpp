#pragma once

// Gibbs/slice sampler for the hierarchical gene-set model.
//
// One sweep updates, in this order:
//   sigma2_sg | .  ~ Inv-chi2(n, RSS_sg / n)
//   alpha_sg  | .  ~ N(sum_i (y - beta x) / n, sigma2 / n)
//   beta_sg   | .  ~ N(m / P, 1 / P),  P = 1/tau2_s + n1/sigma2,  m = n1 (ybar1 - alpha) / sigma2
//   tau2_s    | .  ~ Inv-chi2(nu + l_s, (nu * scale_s + sum_g beta^2) / (nu + l_s))
//   v_s       | .  ~ Bernoulli(lambda f1 / ((1 - lambda) f0 + lambda f1))        (mixture)
//   lambda    | .  ~ Beta(a + sum v, b + K - sum v)                              (mixture)
//   nu, phi0^2, phi1^2: one slice step each on the log scale.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bgsa/model.hpp"
#include "bgsa/rng.hpp"

namespace bgsa {

inline constexpr double kResidualFloor = 1e-12;

struct SamplerDiagnostics {
    // Number of sigma^2 draws whose residual sum was floored.
    std::size_t residual_floor_hits = 0;
};

void update_sigma_sq(ModelState& st, const BoundProblem& problem, const McmcConfig& cfg, Rng& rng,
                     SamplerDiagnostics& diag);
void update_alpha(ModelState& st, const BoundProblem& problem, const McmcConfig& cfg, Rng& rng);
void update_beta(ModelState& st, const BoundProblem& problem, Rng& rng);
void update_tau_sq(ModelState& st, const BoundProblem& problem, Rng& rng);

// P(v_s = 1 | tau2_s, nu, phi0^2, phi1^2, lambda), evaluated in log space.
double prob_alternative(double tau_sq, double lambda, double nu, double phi0_sq, double phi1_sq);

// Returns the per-set probabilities used for the draws.
std::vector<double> update_v(ModelState& st, Rng& rng);
void update_lambda(ModelState& st, const McmcConfig& cfg, Rng& rng);

enum class Hyperparameter { nu, phi0_sq, phi1_sq };

// Log full conditional of log(theta) for one hyperparameter at value theta,
// including the Exponential(1) prior and the log-transform Jacobian.
double hyper_log_conditional(const ModelState& st, Hyperparameter which, double theta);

void update_hyperparams(ModelState& st, const McmcConfig& cfg, Rng& rng);

void gibbs_sweep(ModelState& st, const BoundProblem& problem, const McmcConfig& cfg, Rng& rng,
                 SamplerDiagnostics& diag, std::vector<double>* prob_v1 = nullptr);

struct ChainTrace {
    std::size_t n_sets = 0;
    std::size_t n_slots = 0;
    std::size_t retained = 0;
    ModelVariant variant = ModelVariant::mixture;
    std::uint64_t seed = 0;

    // Row-major [iteration][set] / [iteration][slot].
    std::vector<double> tau_sq;
    std::vector<std::uint8_t> v;
    std::vector<double> prob_v1;  // Rao-Blackwell terms, mixture only
    std::vector<double> beta;     // only when McmcConfig::keep_beta_draws

    std::vector<double> lambda;
    std::vector<double> nu;
    std::vector<double> phi0_sq;
    std::vector<double> phi1_sq;

    // Running per-slot accumulators over retained draws.
    std::vector<double> beta_sum;
    std::vector<std::size_t> beta_positive;
    std::vector<std::size_t> beta_negative;

    SamplerDiagnostics diagnostics;

    double tau_sq_at(std::size_t iter, std::size_t s) const { return tau_sq[iter * n_sets + s]; }
    std::uint8_t v_at(std::size_t iter, std::size_t s) const { return v[iter * n_sets + s]; }
};

ChainTrace run_chain(const BoundProblem& problem, const McmcConfig& cfg);

// Same as above, starting from a caller-provided state.
ChainTrace run_chain(const BoundProblem& problem, const McmcConfig& cfg, ModelState state, Rng& rng);

struct SetSummary {
    std::string name;
    std::size_t size = 0;
    double mean_tau_sq = 0.0;
    std::optional<double> prob_null;  // mixture only
};

struct GeneSummary {
    std::size_t set = 0;
    std::string gene_id;
    double mean_beta = 0.0;
    double tail_prob = 1.0;  // 2 * min(P(beta > 0), P(beta < 0))
};

struct PosteriorSummary {
    std::vector<SetSummary> sets;
    std::vector<GeneSummary> genes;
    std::size_t retained = 0;
    std::uint64_t seed = 0;
    ModelVariant variant = ModelVariant::mixture;
    bool rao_blackwell = false;
    SamplerDiagnostics diagnostics;
};

PosteriorSummary summarize(const ChainTrace& trace, const BoundProblem& problem, bool rao_blackwell = false);

}  // namespace bgsa
