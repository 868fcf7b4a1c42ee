#include "bgsa/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "bgsa/errors.hpp"

namespace bgsa {

void ExpressionDataset::validate() const {
    if (gene_ids.size() != values.rows()) {
        throw InputError("dataset has " + std::to_string(values.rows()) + " rows but " +
                         std::to_string(gene_ids.size()) + " gene ids");
    }
    if (sample_ids.size() != values.cols() || class_labels.size() != values.cols()) {
        throw InputError("dataset sample ids / labels do not match the " + std::to_string(values.cols()) +
                         " matrix columns");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : gene_ids) {
        if (!seen.insert(id).second) {
            throw InputError("duplicate gene id '" + id + "'");
        }
    }
    std::size_t n1 = 0;
    for (auto x : class_labels) {
        if (x > 1) throw InputError("class labels must be 0 or 1");
        n1 += x;
    }
    const std::size_t n0 = class_labels.size() - n1;
    if (n0 < 2 || n1 < 2) {
        throw InputError("each class needs at least 2 samples (control=" + std::to_string(n0) +
                         ", treatment=" + std::to_string(n1) + ")");
    }
    for (std::size_t g = 0; g < values.rows(); ++g) {
        for (std::size_t i = 0; i < values.cols(); ++i) {
            if (!std::isfinite(values(g, i))) {
                throw InputError("non-finite expression value for gene '" + gene_ids[g] + "', sample '" +
                                 sample_ids[i] + "'");
            }
        }
    }
}

void GeneSetCollection::validate(std::size_t n_genes) const {
    if (names.size() != sets.size()) {
        throw InputError("gene set names and index lists differ in length");
    }
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto& idx = sets[s];
        if (idx.size() < 2) {
            throw InputError("gene set '" + names[s] + "' has fewer than 2 genes");
        }
        std::unordered_set<std::size_t> seen;
        for (auto g : idx) {
            if (g >= n_genes) {
                throw InputError("gene set '" + names[s] + "' references gene index " + std::to_string(g) +
                                 " but the dataset has " + std::to_string(n_genes) + " genes");
            }
            if (!seen.insert(g).second) {
                throw InputError("gene set '" + names[s] + "' lists gene index " + std::to_string(g) + " twice");
            }
        }
    }
}

GeneStats gene_stats(std::span<const double> y, std::span<const std::uint8_t> labels) {
    GeneStats st;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (labels[i]) {
            st.mean1 += y[i];
            ++n1;
        } else {
            st.mean0 += y[i];
            ++n0;
        }
    }
    st.mean0 /= static_cast<double>(n0);
    st.mean1 /= static_cast<double>(n1);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (labels[i]) {
            st.ss1 += (y[i] - st.mean1) * (y[i] - st.mean1);
        } else {
            st.ss0 += (y[i] - st.mean0) * (y[i] - st.mean0);
        }
    }
    return st;
}

double BoundProblem::residual_ss(std::size_t slot, double alpha, double beta) const {
    const GeneStats& st = slot_stats[slot];
    const double d0 = st.mean0 - alpha;
    const double d1 = st.mean1 - alpha - beta;
    return st.ss0 + st.ss1 + static_cast<double>(n0) * d0 * d0 + static_cast<double>(n1) * d1 * d1;
}

BoundProblem validate_and_bind(const ExpressionDataset& data, const GeneSetCollection& sets) {
    data.validate();
    sets.validate(data.n_genes());

    BoundProblem p;
    p.n = data.n_samples();
    for (auto x : data.class_labels) p.n1 += x;
    p.n0 = p.n - p.n1;

    std::vector<GeneStats> per_gene(data.n_genes());
    for (std::size_t g = 0; g < data.n_genes(); ++g) {
        per_gene[g] = gene_stats(data.values.row(g), data.class_labels);
    }

    p.set_names = sets.names;
    p.set_offset.reserve(sets.size() + 1);
    p.set_offset.push_back(0);
    for (const auto& idx : sets.sets) {
        for (auto g : idx) {
            p.slot_gene.push_back(g);
            p.slot_gene_id.push_back(data.gene_ids[g]);
            p.slot_stats.push_back(per_gene[g]);
        }
        p.set_offset.push_back(p.slot_gene.size());
    }
    return p;
}

std::string to_string(ModelVariant v) { return v == ModelVariant::simple ? "simple" : "mixture"; }

ModelVariant parse_variant(const std::string& s) {
    if (s == "simple") return ModelVariant::simple;
    if (s == "mixture") return ModelVariant::mixture;
    throw InputError("unknown model variant '" + s + "' (expected simple or mixture)");
}

void McmcConfig::validate() const {
    if (n_iterations == 0) throw InputError("n_iterations must be positive");
    if (burn_in >= n_iterations) {
        throw InputError("burn-in (" + std::to_string(burn_in) + ") must be smaller than the number of iterations (" +
                         std::to_string(n_iterations) + ")");
    }
    if (!(beta_prior_a > 0.0) || !(beta_prior_b > 0.0)) {
        throw InputError("Beta prior parameters must be positive");
    }
    for (const auto& f : {fixed_nu, fixed_phi0_sq, fixed_phi1_sq}) {
        if (f && !(*f > 0.0 && std::isfinite(*f))) throw InputError("fixed hyperparameter values must be positive");
    }
    slice.validate();
}

void ModelState::validate(const BoundProblem& problem) const {
    const std::size_t slots = problem.n_slots();
    const std::size_t k = problem.n_sets();
    if (alpha.size() != slots || beta.size() != slots || sigma_sq.size() != slots || tau_sq.size() != k ||
        v.size() != k) {
        throw StateError("model state shape does not match the bound problem");
    }
    for (double s : sigma_sq) {
        if (!(s > 0.0)) throw StateError("sigma^2 must be positive");
    }
    for (double t : tau_sq) {
        if (!(t > 0.0)) throw StateError("tau^2 must be positive");
    }
    if (!(lambda > 0.0 && lambda < 1.0)) throw StateError("lambda must lie in (0, 1)");
    if (!(nu > 0.0) || !(phi0_sq > 0.0) || !(phi1_sq > 0.0)) throw StateError("hyperparameters must be positive");
}

ModelState init_state(const BoundProblem& problem, const McmcConfig& cfg, Rng& rng) {
    ModelState st;
    const std::size_t slots = problem.n_slots();
    st.alpha.resize(slots);
    st.beta.resize(slots);
    st.sigma_sq.resize(slots);
    const double n = static_cast<double>(problem.n);
    const double n0 = static_cast<double>(problem.n0);
    const double n1 = static_cast<double>(problem.n1);
    for (std::size_t j = 0; j < slots; ++j) {
        const GeneStats& g = problem.slot_stats[j];
        st.alpha[j] = (n0 * g.mean0 + n1 * g.mean1) / n;
        st.beta[j] = g.mean1 - g.mean0;
        st.sigma_sq[j] = std::max((g.ss0 + g.ss1) / (n - 2.0), kSigmaInitFloor);
    }
    st.tau_sq.assign(problem.n_sets(), 1.0);
    st.v.assign(problem.n_sets(), 0);
    st.lambda = 0.5;
    st.nu = cfg.fixed_nu.value_or(1.0);
    st.phi0_sq = cfg.fixed_phi0_sq.value_or(1.0);
    st.phi1_sq = cfg.fixed_phi1_sq.value_or(1.0);
    if (cfg.model_variant == ModelVariant::mixture) {
        for (auto& v : st.v) v = bernoulli(0.5, rng) ? 1 : 0;
    }
    return st;
}

}  // namespace bgsa
