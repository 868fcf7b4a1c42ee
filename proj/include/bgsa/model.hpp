#pragma once

// Data model: expression data, gene sets, the bound (set, gene) problem, and
// the full parameter state of the hierarchical model
//
//   y_sgi = alpha_sg + beta_sg * x_i + eps_sgi,   eps_sgi ~ N(0, sigma2_sg)
//   beta_sg ~ N(0, tau2_s)
//   tau2_s  ~ Inv-chi2(nu, phi0^2)                         (simple)
//   tau2_s  ~ (1 - v_s) Inv-chi2(nu, phi0^2) + v_s Inv-chi2(nu, phi0^2 + phi1^2)
//   v_s ~ Bernoulli(lambda), lambda ~ Beta(a, b)           (mixture)
//   nu, phi0^2, phi1^2 ~ Exponential(1)
//
// with the improper prior p(alpha, sigma2) ~ 1/sigma2. Expression values are
// expected to be normalized upstream; nothing here rescales them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bgsa/distributions.hpp"
#include "bgsa/rng.hpp"

namespace bgsa {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct ExpressionDataset {
    Matrix values;  // genes x samples
    std::vector<std::string> gene_ids;
    std::vector<std::string> sample_ids;
    std::vector<std::uint8_t> class_labels;  // 0 = control, 1 = treatment

    std::size_t n_genes() const noexcept { return values.rows(); }
    std::size_t n_samples() const noexcept { return values.cols(); }

    // Throws InputError on any violated invariant.
    void validate() const;
};

struct GeneSetCollection {
    std::vector<std::vector<std::size_t>> sets;  // gene indices
    std::vector<std::string> names;

    std::size_t size() const noexcept { return sets.size(); }
    std::size_t set_size(std::size_t s) const { return sets[s].size(); }

    void validate(std::size_t n_genes) const;
};

/// Per-gene sufficient statistics: class means and within-class sums of squares.
struct GeneStats {
    double mean0 = 0.0;
    double mean1 = 0.0;
    double ss0 = 0.0;
    double ss1 = 0.0;
};

/// A dataset bound to a gene-set collection. Each (set, gene) membership is a
/// separate parameter slot; a gene that appears in three sets owns three slots.
struct BoundProblem {
    std::size_t n = 0;   // samples
    std::size_t n0 = 0;  // controls
    std::size_t n1 = 0;  // treated

    std::vector<std::string> set_names;
    std::vector<std::size_t> set_offset;  // K + 1 entries into the slot arrays
    std::vector<std::size_t> slot_gene;   // gene index of each slot
    std::vector<std::string> slot_gene_id;
    std::vector<GeneStats> slot_stats;

    std::size_t n_sets() const noexcept { return set_names.size(); }
    std::size_t n_slots() const noexcept { return slot_gene.size(); }
    std::size_t set_size(std::size_t s) const { return set_offset[s + 1] - set_offset[s]; }

    // Sum over samples of (y - alpha - beta x)^2 for one slot.
    double residual_ss(std::size_t slot, double alpha, double beta) const;
};

GeneStats gene_stats(std::span<const double> y, std::span<const std::uint8_t> labels);

BoundProblem validate_and_bind(const ExpressionDataset& data, const GeneSetCollection& sets);

enum class ModelVariant { simple, mixture };

std::string to_string(ModelVariant v);
ModelVariant parse_variant(const std::string& s);

/// Proper replacement for the improper p(alpha, sigma2) prior:
/// alpha ~ N(0, alpha_var), sigma2 ~ Inv-chi2(sigma_dof, sigma_scale_sq).
/// Only needed where forward simulation from the prior is required.
struct ProperBaselinePrior {
    double alpha_var = 100.0;
    double sigma_dof = 2.0;
    double sigma_scale_sq = 1.0;
};

struct McmcConfig {
    std::size_t n_iterations = 2000;
    std::size_t burn_in = 500;
    std::uint64_t seed = 0;
    ModelVariant model_variant = ModelVariant::mixture;
    double beta_prior_a = 1.0;
    double beta_prior_b = 1.0;
    SliceConfig slice;

    // Hold hyperparameters at fixed values instead of sampling them.
    std::optional<double> fixed_nu;
    std::optional<double> fixed_phi0_sq;
    std::optional<double> fixed_phi1_sq;

    std::optional<ProperBaselinePrior> proper_prior;

    bool rao_blackwell = false;
    // Keep every retained beta draw (memory: slots x retained doubles).
    bool keep_beta_draws = false;

    std::size_t retained() const noexcept { return n_iterations - burn_in; }
    void validate() const;
};

struct ModelState {
    std::vector<double> alpha;     // per slot
    std::vector<double> beta;      // per slot
    std::vector<double> sigma_sq;  // per slot
    std::vector<double> tau_sq;    // per set
    std::vector<std::uint8_t> v;   // per set; all zero in the simple variant
    double lambda = 0.5;
    double nu = 1.0;
    double phi0_sq = 1.0;
    double phi1_sq = 1.0;

    // Scale of the tau2 prior for set s given its indicator.
    double tau_scale(std::size_t s) const { return v[s] ? phi0_sq + phi1_sq : phi0_sq; }

    void validate(const BoundProblem& problem) const;
};

inline constexpr double kSigmaInitFloor = 1e-8;

ModelState init_state(const BoundProblem& problem, const McmcConfig& cfg, Rng& rng);

}  // namespace bgsa
