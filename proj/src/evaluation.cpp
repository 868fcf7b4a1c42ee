#include "bgsa/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "bgsa/errors.hpp"
#include "bgsa/parallel.hpp"

namespace bgsa {

std::string to_string(Method m) {
    switch (m) {
        case Method::bgsa_mixture: return "bgsa";
        case Method::bgsa_simple: return "bgsa-simple";
        case Method::maxmean: return "maxmean";
        case Method::mean_z: return "mean-z";
        case Method::mean_abs_z: return "mean-abs-z";
        case Method::ks_signed: return "ks";
    }
    return "?";
}

Method parse_method(const std::string& s) {
    if (s == "bgsa" || s == "bgsa-mixture") return Method::bgsa_mixture;
    if (s == "bgsa-simple") return Method::bgsa_simple;
    if (s == "maxmean") return Method::maxmean;
    if (s == "mean-z" || s == "mean_z") return Method::mean_z;
    if (s == "mean-abs-z" || s == "mean_abs_z") return Method::mean_abs_z;
    if (s == "ks" || s == "ks_signed" || s == "gsea-ks") return Method::ks_signed;
    throw InputError("unknown method '" + s + "'");
}

namespace {

// -1, 0, +1 comparison of (score, tie_break) pairs.
int compare(const MethodScores& m, std::size_t a, std::size_t b) {
    if (m.score[a] != m.score[b]) return m.score[a] > m.score[b] ? 1 : -1;
    if (!m.tie_break.empty() && m.tie_break[a] != m.tie_break[b]) return m.tie_break[a] > m.tie_break[b] ? 1 : -1;
    return 0;
}

std::vector<std::uint8_t> positive_mask(const MethodScores& scores, std::span<const std::size_t> positive_sets) {
    const std::size_t k = scores.score.size();
    if (!scores.tie_break.empty() && scores.tie_break.size() != k) {
        throw InputError("tie-break scores do not match the number of sets");
    }
    for (std::size_t s = 0; s < k; ++s) {
        if (!std::isfinite(scores.score[s])) throw InputError("method scores must be finite");
    }
    std::vector<std::uint8_t> pos(k, 0);
    for (auto s : positive_sets) {
        if (s >= k) throw InputError("positive set index out of range");
        pos[s] = 1;
    }
    const auto n_pos = static_cast<std::size_t>(std::count(pos.begin(), pos.end(), 1));
    if (n_pos == 0 || n_pos == k) throw InputError("AUC needs at least one positive and one negative set");
    return pos;
}

}  // namespace

double auc(const MethodScores& scores, std::span<const std::size_t> positive_sets) {
    const auto pos = positive_mask(scores, positive_sets);
    const std::size_t k = pos.size();
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
        if (!pos[p]) continue;
        for (std::size_t q = 0; q < k; ++q) {
            if (pos[q]) continue;
            const int c = compare(scores, p, q);
            wins += c > 0 ? 1.0 : (c == 0 ? 0.5 : 0.0);
            pairs += 1.0;
        }
    }
    return wins / pairs;
}

double auc(const MethodScores& scores, const SimulationTruth& truth) { return auc(scores, truth.positive_sets); }

std::vector<RocPoint> roc_curve(const MethodScores& scores, std::span<const std::size_t> positive_sets) {
    const auto pos = positive_mask(scores, positive_sets);
    const std::size_t k = pos.size();
    const double n_pos = static_cast<double>(std::count(pos.begin(), pos.end(), 1));
    const double n_neg = static_cast<double>(k) - n_pos;
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return compare(scores, a, b) > 0; });
    std::vector<RocPoint> out{{0.0, 0.0}};
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < k;) {
        std::size_t j = i;
        while (j < k && compare(scores, order[i], order[j]) == 0) {
            if (pos[order[j]]) tp += 1.0;
            else fp += 1.0;
            ++j;
        }
        out.push_back({fp / n_neg, tp / n_pos});
        i = j;
    }
    return out;
}

MethodScores score_bgsa(const PosteriorSummary& summary) {
    MethodScores m;
    const bool mixture = summary.variant == ModelVariant::mixture;
    m.method = mixture ? "bgsa" : "bgsa-simple";
    m.orientation = mixture ? "P(v=1|D), ties broken by E[tau^2|D]" : "E[tau^2|D]";
    for (const auto& s : summary.sets) {
        if (mixture) {
            m.score.push_back(1.0 - s.prob_null.value());
            m.tie_break.push_back(s.mean_tau_sq);
        } else {
            m.score.push_back(s.mean_tau_sq);
        }
    }
    return m;
}

MethodScores score_baseline(const BaselineResult& result) {
    MethodScores m;
    m.method = to_string(result.method);
    if (!result.restd_stat.empty()) m.method += "-restd";
    m.orientation = "1 - permutation p-value";
    for (double p : result.perm_pvalue) m.score.push_back(1.0 - p);
    return m;
}

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw InputError("paired t-test needs two equal samples of size >= 2");
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    PairedTTest out;
    out.mean_diff = mean;
    out.dof = static_cast<double>(n - 1);
    if (sd == 0.0) {
        out.t = mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
        out.p_two_sided = mean == 0.0 ? 1.0 : 0.0;
        return out;
    }
    out.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    boost::math::students_t dist(out.dof);
    out.p_two_sided = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t)));
    return out;
}

void BenchmarkConfig::validate() const {
    if (n_replicates < 2) throw InputError("a benchmark needs at least 2 replicates");
    if (scenarios.empty() || methods.empty()) throw InputError("a benchmark needs scenarios and methods");
    for (auto s : scenarios) {
        if (s == Scenario::all_shifted) throw InputError("the all-shifted design has no positive sets to score");
    }
    mcmc.validate();
}

const BenchmarkCell& BenchmarkReport::cell(Scenario s, Method m) const {
    for (const auto& c : cells) {
        if (c.scenario == s && c.method == m) return c;
    }
    throw InputError("no benchmark cell for " + to_string(s) + " / " + to_string(m));
}

std::uint64_t benchmark_cell_seed(std::uint64_t master, Scenario scenario, std::size_t replicate) {
    return derive_seed(master, {static_cast<std::uint64_t>(scenario), replicate});
}

MethodScores run_method(Method method, const SimulatedData& sim, const BenchmarkConfig& cfg, std::uint64_t seed) {
    switch (method) {
        case Method::bgsa_mixture:
        case Method::bgsa_simple: {
            McmcConfig mc = cfg.mcmc;
            mc.seed = seed;
            mc.model_variant = method == Method::bgsa_mixture ? ModelVariant::mixture : ModelVariant::simple;
            mc.keep_beta_draws = false;
            const BoundProblem problem = validate_and_bind(sim.data, sim.sets);
            const bool rb = mc.rao_blackwell && mc.model_variant == ModelVariant::mixture;
            return score_bgsa(summarize(run_chain(problem, mc), problem, rb));
        }
        default: {
            BaselineOptions opts;
            opts.method = method == Method::maxmean     ? SetStatistic::maxmean
                          : method == Method::mean_z    ? SetStatistic::mean_z
                          : method == Method::mean_abs_z ? SetStatistic::mean_abs_z
                                                         : SetStatistic::ks_signed;
            opts.n_permutations = cfg.n_permutations;
            opts.n_randomizations = cfg.n_randomizations;
            opts.restandardize = method == Method::maxmean && cfg.maxmean_restandardize;
            opts.seed = seed;
            return score_baseline(permutation_pvalues(sim.data, sim.sets, opts));
        }
    }
}

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
    cfg.validate();
    const std::size_t n_sc = cfg.scenarios.size();
    const std::size_t n_m = cfg.methods.size();
    const std::size_t n_r = cfg.n_replicates;

    // [scenario][replicate][method]
    std::vector<double> aucs(n_sc * n_r * n_m);
    std::vector<std::vector<RocPoint>> rocs(n_sc * n_r * n_m);
    parallel_for(n_sc * n_r, cfg.threads, [&](std::size_t cell) {
        const std::size_t si = cell / n_r;
        const std::size_t r = cell % n_r;
        const Scenario sc = cfg.scenarios[si];
        const std::uint64_t cell_seed = benchmark_cell_seed(cfg.seed, sc, r);
        try {
            const SimulatedData sim = generate(sc, cell_seed);
            for (std::size_t mi = 0; mi < n_m; ++mi) {
                const Method m = cfg.methods[mi];
                const MethodScores scores =
                    run_method(m, sim, cfg, derive_seed(cell_seed, {static_cast<std::uint64_t>(m)}));
                aucs[cell * n_m + mi] = auc(scores, sim.truth);
                rocs[cell * n_m + mi] = roc_curve(scores, sim.truth.positive_sets);
            }
        } catch (const Error& e) {
            throw Error(to_string(sc) + " replicate " + std::to_string(r) + ": " + e.what());
        }
    });

    BenchmarkReport rep;
    rep.config = cfg;
    for (std::size_t si = 0; si < n_sc; ++si) {
        for (std::size_t mi = 0; mi < n_m; ++mi) {
            BenchmarkCell c{cfg.scenarios[si], cfg.methods[mi], {}, 0.0, 0.0, {}};
            for (std::size_t r = 0; r < n_r; ++r) {
                const std::size_t idx = (si * n_r + r) * n_m + mi;
                c.auc_percent.push_back(100.0 * aucs[idx]);
                c.roc.push_back(rocs[idx]);
            }
            const double n = static_cast<double>(n_r);
            c.mean_auc = std::accumulate(c.auc_percent.begin(), c.auc_percent.end(), 0.0) / n;
            double ss = 0.0;
            for (double a : c.auc_percent) ss += (a - c.mean_auc) * (a - c.mean_auc);
            c.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
            rep.cells.push_back(std::move(c));
        }
    }
    for (std::size_t si = 0; si < n_sc; ++si) {
        for (std::size_t a = 0; a < n_m; ++a) {
            for (std::size_t b = a + 1; b < n_m; ++b) {
                const auto& ca = rep.cells[si * n_m + a];
                const auto& cb = rep.cells[si * n_m + b];
                rep.comparisons.push_back(
                    {cfg.scenarios[si], cfg.methods[a], cfg.methods[b], paired_t_test(ca.auc_percent, cb.auc_percent)});
            }
        }
    }
    return rep;
}

}  // namespace bgsa
