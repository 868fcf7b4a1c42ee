#include "bgsa/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bgsa/distributions.hpp"
#include "bgsa/errors.hpp"
#include "bgsa/rng.hpp"

namespace bgsa {

namespace {

// Sub-stream tags; each concern of a generator draws from its own stream.
enum StreamTag : std::uint64_t { kNoise = 1, kStructure = 2, kShifts = 3, kSingletons = 4, kCoupling = 5, kCopies = 6 };

ExpressionDataset make_frame(std::size_t n_genes, std::size_t n_control, std::size_t n_treatment) {
    ExpressionDataset d;
    const std::size_t n = n_control + n_treatment;
    d.values = Matrix(n_genes, n);
    d.gene_ids.reserve(n_genes);
    for (std::size_t g = 0; g < n_genes; ++g) d.gene_ids.push_back("g" + std::to_string(g + 1));
    for (std::size_t i = 0; i < n; ++i) {
        d.sample_ids.push_back("s" + std::to_string(i + 1));
        d.class_labels.push_back(i < n_control ? 0 : 1);
    }
    return d;
}

std::vector<std::string> set_names(std::size_t k) {
    std::vector<std::string> names;
    names.reserve(k);
    for (std::size_t s = 0; s < k; ++s) names.push_back("set" + std::to_string(s + 1));
    return names;
}

void apply_shift(SimulatedData& sim, std::size_t set, std::size_t gene, double shift) {
    auto row = sim.data.values.row(gene);
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (sim.data.class_labels[i]) row[i] += shift;
    }
    sim.truth.shifted_genes[set].push_back({gene, shift});
}

SimulatedData block_design(std::uint64_t seed, Scenario scenario) {
    constexpr std::size_t kGenes = 1000, kHalf = 15, kSets = 50, kBlock = 20;
    SimulatedData sim;
    sim.data = make_frame(kGenes, kHalf, kHalf);
    Rng noise = make_stream(seed, {kNoise});
    for (double& y : sim.data.values.data()) y = std_normal(noise);
    sim.pre_shift = sim.data.values;

    sim.sets.names = set_names(kSets);
    sim.sets.sets.resize(kSets);
    for (std::size_t s = 0; s < kSets; ++s) {
        sim.sets.sets[s].resize(kBlock);
        std::iota(sim.sets.sets[s].begin(), sim.sets.sets[s].end(), s * kBlock);
    }
    sim.truth.scenario = scenario;
    sim.truth.seed = seed;
    sim.truth.shifted_genes.resize(kSets);
    return sim;
}

double std_normal_cdf(double z) { return 0.5 * boost::math::erfc(-z / std::sqrt(2.0)); }

// Gamma(a, 1) quantile of a standard normal latent value.
double gamma_from_latent(double a, double z) {
    if (z > 0.0) {
        return boost::math::gamma_q_inv(a, std_normal_cdf(-z));
    }
    return boost::math::gamma_p_inv(a, std_normal_cdf(z));
}

std::vector<std::vector<std::size_t>> random_partition(const SimulationOptions& o, Rng& rng) {
    if (o.min_set_size * o.n_sets > o.n_genes) {
        throw InputError("cannot partition genes into sets of the requested minimum size");
    }
    std::vector<std::size_t> owner(o.n_genes);
    std::vector<std::size_t> counts(o.n_sets);
    for (;;) {
        std::fill(counts.begin(), counts.end(), 0);
        for (auto& w : owner) {
            w = uniform_index(o.n_sets, rng);
            ++counts[w];
        }
        if (*std::min_element(counts.begin(), counts.end()) >= o.min_set_size) break;
    }
    std::vector<std::vector<std::size_t>> sets(o.n_sets);
    for (std::size_t g = 0; g < o.n_genes; ++g) sets[owner[g]].push_back(g);
    return sets;
}

}  // namespace

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::illustrative: return "illustrative";
        case Scenario::all_shifted: return "all-shifted";
        case Scenario::sim1: return "sim1";
        case Scenario::sim2: return "sim2";
        case Scenario::sim3: return "sim3";
        case Scenario::sim4: return "sim4";
        case Scenario::sim5: return "sim5";
        case Scenario::sim6: return "sim6";
    }
    return "?";
}

Scenario parse_scenario(const std::string& s) {
    for (auto sc : {Scenario::illustrative, Scenario::all_shifted, Scenario::sim1, Scenario::sim2, Scenario::sim3,
                    Scenario::sim4, Scenario::sim5, Scenario::sim6}) {
        if (s == to_string(sc)) return sc;
    }
    if (s == "all_shifted") return Scenario::all_shifted;
    throw InputError("unknown scenario '" + s + "'");
}

SimulatedData gen_illustrative(double shift, std::uint64_t seed) {
    SimulatedData sim = block_design(seed, Scenario::illustrative);
    constexpr std::size_t kShifted[] = {20, 10, 5, 2};
    for (std::size_t s = 0; s < 4; ++s) {
        sim.truth.positive_sets.push_back(s);
        for (std::size_t k = 0; k < kShifted[s]; ++k) {
            apply_shift(sim, s, sim.sets.sets[s][k], shift);
        }
    }
    return sim;
}

SimulatedData gen_all_shifted(std::uint64_t seed) {
    SimulatedData sim = block_design(seed, Scenario::all_shifted);
    for (std::size_t s = 0; s < sim.sets.size(); ++s) {
        for (std::size_t k = 0; k < 10; ++k) {
            apply_shift(sim, s, sim.sets.sets[s][k], 1.0);
        }
    }
    return sim;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

PriorCorrelationDemo gen_prior_correlation_demo(std::size_t n_reps, std::size_t n_draws, std::uint64_t seed) {
    PriorCorrelationDemo out;
    out.r_within.reserve(n_reps);
    out.r_between.reserve(n_reps);
    // Two sets of two genes; each draw runs the prior hierarchy afresh.
    std::vector<double> set0_gene0(n_draws), set0_gene1(n_draws), set1_gene0(n_draws);
    const ScaledInvChiSq eta_prior(1.0, 0.5);
    for (std::size_t rep = 0; rep < n_reps; ++rep) {
        Rng rng = make_stream(seed, {rep});
        for (std::size_t d = 0; d < n_draws; ++d) {
            double tau_sq[2];
            for (double& t : tau_sq) {
                const double eta = sinvchisq_sample(eta_prior, rng);
                t = sinvchisq_sample({1.0, eta}, rng);
            }
            set0_gene0[d] = std::abs(std::sqrt(tau_sq[0]) * std_normal(rng));
            set0_gene1[d] = std::abs(std::sqrt(tau_sq[0]) * std_normal(rng));
            set1_gene0[d] = std::abs(std::sqrt(tau_sq[1]) * std_normal(rng));
        }
        out.r_within.push_back(pearson_correlation(set0_gene0, set0_gene1));
        out.r_between.push_back(pearson_correlation(set0_gene0, set1_gene0));
    }
    return out;
}

SimulatedData gen_simulation(int k, std::uint64_t seed, const SimulationOptions& o) {
    if (k < 1 || k > 6) throw InputError("simulation index must be in 1..6");
    if (o.n_positive > o.n_sets) throw InputError("more positive sets than sets");
    const auto scenario = static_cast<Scenario>(static_cast<int>(Scenario::sim1) + (k - 1));

    SimulatedData sim;
    sim.data = make_frame(o.n_genes, o.n_control, o.n_treatment);
    sim.truth.scenario = scenario;
    sim.truth.seed = seed;
    sim.truth.shifted_genes.resize(o.n_sets);
    sim.sets.names = set_names(o.n_sets);

    Rng structure = make_stream(seed, {kStructure});
    sim.sets.sets = random_partition(o, structure);

    const std::size_t n = sim.data.n_samples();
    Rng noise = make_stream(seed, {kNoise});
    Matrix& y = sim.data.values;
    if (k == 1) {
        for (double& v : y.data()) v = std_normal(noise);
    } else {
        std::vector<double> shape(o.n_genes);
        for (double& a : shape) a = 1.0 + 2.0 * uniform01(noise);
        Matrix latent(o.n_genes, n);
        for (double& v : latent.data()) v = std_normal(noise);
        if (k >= 5) {
            Rng coupling = make_stream(seed, {kCoupling});
            for (std::size_t p = 0; p < o.n_correlated_pairs; ++p) {
                const std::size_t g1 = uniform_index(o.n_genes, coupling);
                std::size_t g2 = uniform_index(o.n_genes - 1, coupling);
                if (g2 >= g1) ++g2;
                const double rho = 2.0 * uniform01(coupling) - 1.0;
                const double c = std::sqrt(1.0 - rho * rho);
                for (std::size_t i = 0; i < n; ++i) {
                    latent(g2, i) = rho * latent(g1, i) + c * latent(g2, i);
                }
                sim.truth.correlated_pairs.push_back({g1, g2, rho});
            }
        }
        for (std::size_t g = 0; g < o.n_genes; ++g) {
            for (std::size_t i = 0; i < n; ++i) y(g, i) = gamma_from_latent(shape[g], latent(g, i));
        }
    }
    sim.pre_shift = y;

    Rng shifts = make_stream(seed, {kShifts});
    for (std::size_t s = 0; s < o.n_positive; ++s) {
        sim.truth.positive_sets.push_back(s);
        for (std::size_t g : sim.sets.sets[s]) {
            if (!bernoulli(o.shift_probability, shifts)) continue;
            double delta;
            if (k == 3 || k == 4) {
                const double sd = bernoulli(0.5, shifts) ? 0.5 : 1.0;
                delta = normal(0.0, sd, shifts);
            } else {
                delta = std_normal(shifts);
            }
            apply_shift(sim, s, g, delta);
        }
    }

    if (k == 4) {
        Rng extra = make_stream(seed, {kSingletons});
        std::vector<std::size_t> nulls(o.n_sets - o.n_positive);
        std::iota(nulls.begin(), nulls.end(), o.n_positive);
        shuffle(nulls, extra);
        nulls.resize(nulls.size() / 3);
        std::sort(nulls.begin(), nulls.end());
        for (std::size_t s : nulls) {
            const auto& members = sim.sets.sets[s];
            apply_shift(sim, s, members[uniform_index(members.size(), extra)], 2.0);
        }
    }

    if (k == 6) {
        Rng copies = make_stream(seed, {kCopies});
        std::vector<std::uint8_t> significant(o.n_genes, 0);
        for (std::size_t s : sim.truth.positive_sets) {
            for (const auto& sg : sim.truth.shifted_genes[s]) significant[sg.gene] = 1;
        }
        std::vector<std::size_t> sig, non_sig;
        for (std::size_t g = 0; g < o.n_genes; ++g) (significant[g] ? sig : non_sig).push_back(g);

        const std::size_t n_copied =
            o.min_copied_genes + uniform_index(o.max_copied_genes - o.min_copied_genes + 1, copies);
        for (std::size_t c = 0; c < n_copied; ++c) {
            const bool pick_sig = !sig.empty() && bernoulli(0.05, copies);
            const auto& pool = pick_sig ? sig : non_sig;
            const std::size_t gene = pool[uniform_index(pool.size(), copies)];
            std::vector<std::size_t> targets;
            for (std::size_t s = 0; s < o.n_sets; ++s) {
                const auto& m = sim.sets.sets[s];
                if (std::find(m.begin(), m.end(), gene) == m.end()) targets.push_back(s);
            }
            shuffle(targets, copies);
            const std::size_t n_targets = std::min<std::size_t>(2 + uniform_index(3, copies), targets.size());
            for (std::size_t t = 0; t < n_targets; ++t) sim.sets.sets[targets[t]].push_back(gene);
        }
        for (auto& m : sim.sets.sets) std::sort(m.begin(), m.end());
    }
    return sim;
}

SimulatedData generate(Scenario scenario, std::uint64_t seed) {
    switch (scenario) {
        case Scenario::illustrative: return gen_illustrative(1.0, seed);
        case Scenario::all_shifted: return gen_all_shifted(seed);
        default: return gen_simulation(static_cast<int>(scenario) - static_cast<int>(Scenario::sim1) + 1, seed);
    }
}

}  // namespace bgsa
