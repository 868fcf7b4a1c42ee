#include "geweke.hpp"

#include <cmath>
#include <random>

#include "bgsa/sampler.hpp"
#include "oracles.hpp"

namespace bgsa::testing {

namespace {

// Forward draws use std:: distributions rather than the library's helpers so
// that a bug in those helpers cannot cancel out.
double exp1(Rng& rng) { return std::exponential_distribution<double>(1.0)(rng); }

double inv_chisq(double dof, double scale_sq, Rng& rng) {
    const double c = std::chi_squared_distribution<double>(dof)(rng);
    const double x = dof * scale_sq / c;
    return std::isfinite(x) ? std::max(x, 1e-300) : 1e300;
}

struct Shape {
    std::size_t k, l, n0, n1;
    std::size_t slots() const { return k * l; }
    std::size_t n() const { return n0 + n1; }
};

ModelState draw_prior(const Shape& sh, const ProperBaselinePrior& pp, ModelVariant variant,
                      std::optional<double> fixed_nu, Rng& rng) {
    ModelState st;
    st.nu = exp1(rng);
    if (fixed_nu) st.nu = *fixed_nu;
    st.phi0_sq = exp1(rng);
    st.phi1_sq = variant == ModelVariant::mixture ? exp1(rng) : 1.0;
    st.lambda = variant == ModelVariant::mixture ? std::uniform_real_distribution<double>(0.0, 1.0)(rng) : 0.5;
    st.v.assign(sh.k, 0);
    st.tau_sq.resize(sh.k);
    for (std::size_t s = 0; s < sh.k; ++s) {
        if (variant == ModelVariant::mixture) st.v[s] = std::bernoulli_distribution(st.lambda)(rng);
        st.tau_sq[s] = inv_chisq(st.nu, st.tau_scale(s), rng);
    }
    st.alpha.resize(sh.slots());
    st.beta.resize(sh.slots());
    st.sigma_sq.resize(sh.slots());
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t j = 0; j < sh.slots(); ++j) {
        st.beta[j] = std::sqrt(st.tau_sq[j / sh.l]) * z(rng);
        st.alpha[j] = std::sqrt(pp.alpha_var) * z(rng);
        st.sigma_sq[j] = inv_chisq(pp.sigma_dof, pp.sigma_scale_sq, rng);
    }
    return st;
}

BoundProblem draw_data(const Shape& sh, const ModelState& st, Rng& rng) {
    ExpressionDataset d;
    d.values = Matrix(sh.slots(), sh.n());
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t i = 0; i < sh.n(); ++i) {
        d.sample_ids.push_back("s" + std::to_string(i));
        d.class_labels.push_back(i < sh.n0 ? 0 : 1);
    }
    GeneSetCollection sets;
    for (std::size_t s = 0; s < sh.k; ++s) {
        sets.names.push_back("set" + std::to_string(s));
        sets.sets.emplace_back();
    }
    for (std::size_t j = 0; j < sh.slots(); ++j) {
        d.gene_ids.push_back("g" + std::to_string(j));
        sets.sets[j / sh.l].push_back(j);
        for (std::size_t i = 0; i < sh.n(); ++i) {
            d.values(j, i) = st.alpha[j] + st.beta[j] * d.class_labels[i] + std::sqrt(st.sigma_sq[j]) * z(rng);
        }
    }
    return validate_and_bind(d, sets);
}

struct Tracked {
    std::vector<std::vector<double>> series;
    void push(const ModelState& st) {
        const double values[] = {st.nu, st.phi0_sq, st.lambda, st.nu * st.nu, st.phi0_sq * st.phi0_sq,
                                 st.tau_sq[0] < 1.0 ? 1.0 : 0.0};
        series.resize(std::size(values));
        for (std::size_t i = 0; i < std::size(values); ++i) series[i].push_back(values[i]);
    }
};

// Only statistics with finite prior moments: log tau^2 has an infinite prior
// mean once nu ~ Exp(1) is integrated out, so tau^2 enters as an indicator.
const char* const kNames[] = {"nu", "phi0_sq", "lambda", "nu^2", "phi0_sq^2", "tau_sq[0] < 1"};

double mean(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    return m / static_cast<double>(x.size());
}

double iid_se(const std::vector<double>& x) {
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

}  // namespace

std::vector<GewekeStat> run_geweke(const GewekeOptions& o) {
    const Shape sh{o.n_sets, o.genes_per_set, o.n_control, o.n_treatment};
    const ProperBaselinePrior pp{};
    McmcConfig cfg;
    cfg.model_variant = o.variant;
    cfg.proper_prior = pp;
    cfg.fixed_nu = o.fixed_nu;

    Tracked prior;
    Rng rng_mc = make_stream(o.seed, {1});
    for (std::size_t r = 0; r < o.rounds; ++r) prior.push(draw_prior(sh, pp, o.variant, o.fixed_nu, rng_mc));

    const std::size_t per_chain = o.rounds / o.chains;
    std::vector<Tracked> chains(o.chains);
    for (std::size_t c = 0; c < o.chains; ++c) {
        Rng rng_sc = make_stream(o.seed, {2, c});
        ModelState st = draw_prior(sh, pp, o.variant, o.fixed_nu, rng_sc);
        SamplerDiagnostics diag;
        for (std::size_t r = 0; r < per_chain; ++r) {
            const BoundProblem problem = draw_data(sh, st, rng_sc);
            gibbs_sweep(st, problem, cfg, rng_sc, diag);
            chains[c].push(st);
        }
    }

    std::vector<GewekeStat> out;
    for (std::size_t i = 0; i < prior.series.size(); ++i) {
        if (o.variant == ModelVariant::simple && std::string(kNames[i]) == "lambda") continue;
        GewekeStat g;
        g.name = kNames[i];
        g.prior_mean = mean(prior.series[i]);
        std::vector<double> chain_means;
        for (const auto& c : chains) chain_means.push_back(mean(c.series[i]));
        g.chain_mean = mean(chain_means);
        const double se = std::hypot(iid_se(prior.series[i]), iid_se(chain_means));
        g.z = (g.prior_mean - g.chain_mean) / se;
        g.p_value = normal_two_sided(g.z);
        out.push_back(g);
    }
    return out;
}

}  // namespace bgsa::testing
