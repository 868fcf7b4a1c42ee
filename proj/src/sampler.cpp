#include "bgsa/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bgsa/distributions.hpp"
#include "bgsa/errors.hpp"

namespace bgsa {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void update_sigma_sq(ModelState& st, const BoundProblem& problem, const McmcConfig& cfg, Rng& rng,
                     SamplerDiagnostics& diag) {
    const double n = static_cast<double>(problem.n);
    for (std::size_t j = 0; j < problem.n_slots(); ++j) {
        double rss = problem.residual_ss(j, st.alpha[j], st.beta[j]);
        if (!std::isfinite(rss)) {
            throw StateError("non-finite residual sum for gene '" + problem.slot_gene_id[j] + "'");
        }
        if (rss < kResidualFloor) {
            rss = kResidualFloor;
            ++diag.residual_floor_hits;
        }
        if (cfg.proper_prior) {
            const auto& pp = *cfg.proper_prior;
            const double dof = pp.sigma_dof + n;
            st.sigma_sq[j] = sinvchisq_sample({dof, (pp.sigma_dof * pp.sigma_scale_sq + rss) / dof}, rng);
        } else {
            st.sigma_sq[j] = sinvchisq_sample({n, rss / n}, rng);
        }
    }
}

void update_alpha(ModelState& st, const BoundProblem& problem, const McmcConfig& cfg, Rng& rng) {
    const double n = static_cast<double>(problem.n);
    const double n0 = static_cast<double>(problem.n0);
    const double n1 = static_cast<double>(problem.n1);
    for (std::size_t j = 0; j < problem.n_slots(); ++j) {
        const GeneStats& g = problem.slot_stats[j];
        const double sum = n0 * g.mean0 + n1 * (g.mean1 - st.beta[j]);
        if (cfg.proper_prior) {
            const double prec = n / st.sigma_sq[j] + 1.0 / cfg.proper_prior->alpha_var;
            st.alpha[j] = normal(sum / st.sigma_sq[j] / prec, std::sqrt(1.0 / prec), rng);
        } else {
            st.alpha[j] = normal(sum / n, std::sqrt(st.sigma_sq[j] / n), rng);
        }
    }
}

void update_beta(ModelState& st, const BoundProblem& problem, Rng& rng) {
    const double n1 = static_cast<double>(problem.n1);
    for (std::size_t s = 0; s < problem.n_sets(); ++s) {
        const double tau_sq = st.tau_sq[s];
        if (!(tau_sq > 0.0)) {
            throw StateError("tau^2 of set '" + problem.set_names[s] + "' is not positive");
        }
        for (std::size_t j = problem.set_offset[s]; j < problem.set_offset[s + 1]; ++j) {
            const GeneStats& g = problem.slot_stats[j];
            const double prec = 1.0 / tau_sq + n1 / st.sigma_sq[j];
            const double m = n1 * (g.mean1 - st.alpha[j]) / st.sigma_sq[j];
            st.beta[j] = normal(m / prec, std::sqrt(1.0 / prec), rng);
        }
    }
}

void update_tau_sq(ModelState& st, const BoundProblem& problem, Rng& rng) {
    for (std::size_t s = 0; s < problem.n_sets(); ++s) {
        double sum_sq = 0.0;
        for (std::size_t j = problem.set_offset[s]; j < problem.set_offset[s + 1]; ++j) {
            sum_sq += st.beta[j] * st.beta[j];
        }
        const double dof = st.nu + static_cast<double>(problem.set_size(s));
        st.tau_sq[s] = sinvchisq_sample({dof, (st.nu * st.tau_scale(s) + sum_sq) / dof}, rng);
    }
}

double prob_alternative(double tau_sq, double lambda, double nu, double phi0_sq, double phi1_sq) {
    if (lambda <= 0.0) return 0.0;
    if (lambda >= 1.0) return 1.0;
    const double l0 = std::log1p(-lambda) + sinvchisq_logpdf(tau_sq, {nu, phi0_sq});
    const double l1 = std::log(lambda) + sinvchisq_logpdf(tau_sq, {nu, phi0_sq + phi1_sq});
    if (!std::isfinite(l0) && !std::isfinite(l1)) {
        throw StateError("both mixture component densities vanish at tau^2 = " + std::to_string(tau_sq));
    }
    if (l1 >= l0) {
        return 1.0 / (1.0 + std::exp(l0 - l1));
    }
    const double e = std::exp(l1 - l0);
    return e / (1.0 + e);
}

std::vector<double> update_v(ModelState& st, Rng& rng) {
    std::vector<double> p(st.tau_sq.size());
    for (std::size_t s = 0; s < st.tau_sq.size(); ++s) {
        p[s] = prob_alternative(st.tau_sq[s], st.lambda, st.nu, st.phi0_sq, st.phi1_sq);
        st.v[s] = uniform01(rng) < p[s] ? 1 : 0;
    }
    return p;
}

void update_lambda(ModelState& st, const McmcConfig& cfg, Rng& rng) {
    double ones = 0.0;
    for (auto v : st.v) ones += v;
    const double k = static_cast<double>(st.v.size());
    double lambda = beta_draw(cfg.beta_prior_a + ones, cfg.beta_prior_b + k - ones, rng);
    // keep strictly inside (0, 1)
    constexpr double eps = std::numeric_limits<double>::epsilon();
    st.lambda = std::clamp(lambda, eps, 1.0 - eps);
}

double hyper_log_conditional(const ModelState& st, Hyperparameter which, double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) return kNegInf;
    double nu = st.nu;
    double phi0 = st.phi0_sq;
    double phi1 = st.phi1_sq;
    switch (which) {
        case Hyperparameter::nu: nu = theta; break;
        case Hyperparameter::phi0_sq: phi0 = theta; break;
        case Hyperparameter::phi1_sq: phi1 = theta; break;
    }
    // Exponential(1) prior plus Jacobian of theta = exp(u)
    double lp = -theta + std::log(theta);
    for (std::size_t s = 0; s < st.tau_sq.size(); ++s) {
        if (which == Hyperparameter::phi1_sq && !st.v[s]) continue;
        const double scale = st.v[s] ? phi0 + phi1 : phi0;
        lp += sinvchisq_logpdf(st.tau_sq[s], {nu, scale});
    }
    return std::isnan(lp) ? kNegInf : lp;
}

namespace {

double slice_update(const ModelState& st, Hyperparameter which, double current, const McmcConfig& cfg, Rng& rng) {
    auto target = [&](double u) { return hyper_log_conditional(st, which, std::exp(u)); };
    return std::exp(slice_sample_step(target, std::log(current), cfg.slice, rng).x);
}

}  // namespace

void update_hyperparams(ModelState& st, const McmcConfig& cfg, Rng& rng) {
    if (cfg.fixed_nu) {
        st.nu = *cfg.fixed_nu;
    } else {
        st.nu = slice_update(st, Hyperparameter::nu, st.nu, cfg, rng);
    }
    if (cfg.fixed_phi0_sq) {
        st.phi0_sq = *cfg.fixed_phi0_sq;
    } else {
        st.phi0_sq = slice_update(st, Hyperparameter::phi0_sq, st.phi0_sq, cfg, rng);
    }
    if (cfg.model_variant == ModelVariant::mixture) {
        if (cfg.fixed_phi1_sq) {
            st.phi1_sq = *cfg.fixed_phi1_sq;
        } else {
            st.phi1_sq = slice_update(st, Hyperparameter::phi1_sq, st.phi1_sq, cfg, rng);
        }
    }
}

void gibbs_sweep(ModelState& st, const BoundProblem& problem, const McmcConfig& cfg, Rng& rng,
                 SamplerDiagnostics& diag, std::vector<double>* prob_v1) {
    update_sigma_sq(st, problem, cfg, rng, diag);
    update_alpha(st, problem, cfg, rng);
    update_beta(st, problem, rng);
    update_tau_sq(st, problem, rng);
    if (cfg.model_variant == ModelVariant::mixture) {
        auto p = update_v(st, rng);
        update_lambda(st, cfg, rng);
        if (prob_v1) *prob_v1 = std::move(p);
    }
    update_hyperparams(st, cfg, rng);
}

ChainTrace run_chain(const BoundProblem& problem, const McmcConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    ModelState state = init_state(problem, cfg, rng);
    return run_chain(problem, cfg, std::move(state), rng);
}

ChainTrace run_chain(const BoundProblem& problem, const McmcConfig& cfg, ModelState state, Rng& rng) {
    cfg.validate();
    state.validate(problem);

    ChainTrace tr;
    tr.n_sets = problem.n_sets();
    tr.n_slots = problem.n_slots();
    tr.retained = cfg.retained();
    tr.variant = cfg.model_variant;
    tr.seed = cfg.seed;

    const bool mixture = cfg.model_variant == ModelVariant::mixture;
    tr.tau_sq.reserve(tr.retained * tr.n_sets);
    tr.v.reserve(tr.retained * tr.n_sets);
    if (mixture) tr.prob_v1.reserve(tr.retained * tr.n_sets);
    if (cfg.keep_beta_draws) tr.beta.reserve(tr.retained * tr.n_slots);
    tr.beta_sum.assign(tr.n_slots, 0.0);
    tr.beta_positive.assign(tr.n_slots, 0);
    tr.beta_negative.assign(tr.n_slots, 0);

    std::vector<double> p1;
    for (std::size_t it = 0; it < cfg.n_iterations; ++it) {
        try {
            gibbs_sweep(state, problem, cfg, rng, tr.diagnostics, &p1);
        } catch (const Error& e) {
            throw ChainError(it, e.what());
        }
        if (it < cfg.burn_in) continue;

        tr.tau_sq.insert(tr.tau_sq.end(), state.tau_sq.begin(), state.tau_sq.end());
        tr.v.insert(tr.v.end(), state.v.begin(), state.v.end());
        if (mixture) tr.prob_v1.insert(tr.prob_v1.end(), p1.begin(), p1.end());
        if (cfg.keep_beta_draws) tr.beta.insert(tr.beta.end(), state.beta.begin(), state.beta.end());
        for (std::size_t j = 0; j < tr.n_slots; ++j) {
            const double b = state.beta[j];
            tr.beta_sum[j] += b;
            if (b > 0.0) ++tr.beta_positive[j];
            if (b < 0.0) ++tr.beta_negative[j];
        }
        tr.lambda.push_back(state.lambda);
        tr.nu.push_back(state.nu);
        tr.phi0_sq.push_back(state.phi0_sq);
        tr.phi1_sq.push_back(state.phi1_sq);
    }
    return tr;
}

PosteriorSummary summarize(const ChainTrace& trace, const BoundProblem& problem, bool rao_blackwell) {
    if (trace.retained == 0 || trace.tau_sq.empty()) {
        throw StateError("cannot summarize an empty chain trace");
    }
    if (trace.n_sets != problem.n_sets() || trace.n_slots != problem.n_slots()) {
        throw StateError("trace shape does not match the bound problem");
    }
    const bool mixture = trace.variant == ModelVariant::mixture;
    if (rao_blackwell && (!mixture || trace.prob_v1.size() != trace.retained * trace.n_sets)) {
        throw StateError("Rao-Blackwell estimate needs a mixture trace with recorded probabilities");
    }
    const double r = static_cast<double>(trace.retained);

    PosteriorSummary out;
    out.retained = trace.retained;
    out.seed = trace.seed;
    out.variant = trace.variant;
    out.rao_blackwell = rao_blackwell;
    out.diagnostics = trace.diagnostics;

    out.sets.resize(trace.n_sets);
    for (std::size_t s = 0; s < trace.n_sets; ++s) {
        SetSummary& ss = out.sets[s];
        ss.name = problem.set_names[s];
        ss.size = problem.set_size(s);
        double tau = 0.0;
        double null_mass = 0.0;
        for (std::size_t it = 0; it < trace.retained; ++it) {
            tau += trace.tau_sq_at(it, s);
            if (mixture) {
                null_mass += rao_blackwell ? 1.0 - trace.prob_v1[it * trace.n_sets + s]
                                           : (trace.v_at(it, s) == 0 ? 1.0 : 0.0);
            }
        }
        ss.mean_tau_sq = tau / r;
        if (mixture) ss.prob_null = null_mass / r;
    }

    out.genes.resize(trace.n_slots);
    for (std::size_t s = 0; s < trace.n_sets; ++s) {
        for (std::size_t j = problem.set_offset[s]; j < problem.set_offset[s + 1]; ++j) {
            GeneSummary& g = out.genes[j];
            g.set = s;
            g.gene_id = problem.slot_gene_id[j];
            g.mean_beta = trace.beta_sum[j] / r;
            const double lo = static_cast<double>(std::min(trace.beta_positive[j], trace.beta_negative[j]));
            g.tail_prob = std::min(1.0, 2.0 * lo / r);
        }
    }
    return out;
}

}  // namespace bgsa
