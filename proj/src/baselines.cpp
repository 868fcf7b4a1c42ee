#include "bgsa/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "bgsa/errors.hpp"
#include "bgsa/parallel.hpp"

namespace bgsa {

std::string to_string(SetStatistic m) {
    switch (m) {
        case SetStatistic::maxmean: return "maxmean";
        case SetStatistic::mean_z: return "mean-z";
        case SetStatistic::mean_abs_z: return "mean-abs-z";
        case SetStatistic::ks_signed: return "ks";
    }
    return "?";
}

SetStatistic parse_statistic(const std::string& s) {
    if (s == "maxmean") return SetStatistic::maxmean;
    if (s == "mean-z" || s == "mean_z") return SetStatistic::mean_z;
    if (s == "mean-abs-z" || s == "mean_abs_z") return SetStatistic::mean_abs_z;
    if (s == "ks" || s == "ks_signed" || s == "ks-signed") return SetStatistic::ks_signed;
    throw InputError("unknown set statistic '" + s + "' (expected maxmean, mean-z, mean-abs-z or ks)");
}

bool is_signed(SetStatistic m) { return m == SetStatistic::mean_z || m == SetStatistic::ks_signed; }

GeneScores gene_zscores(const Matrix& values, std::span<const std::uint8_t> labels) {
    if (labels.size() != values.cols()) throw InputError("label count does not match the number of samples");
    std::size_t n1 = 0;
    for (auto x : labels) n1 += x;
    const std::size_t n0 = labels.size() - n1;
    if (n0 < 2 || n1 < 2) throw InputError("t statistics need at least 2 samples per class");

    const double scale = std::sqrt(1.0 / static_cast<double>(n0) + 1.0 / static_cast<double>(n1));
    const double dof = static_cast<double>(labels.size() - 2);
    GeneScores out;
    out.z.resize(values.rows());
    out.degenerate.assign(values.rows(), 0);
    for (std::size_t g = 0; g < values.rows(); ++g) {
        const GeneStats st = gene_stats(values.row(g), labels);
        const double sp2 = (st.ss0 + st.ss1) / dof;
        const double mag = std::max({1.0, st.mean0 * st.mean0, st.mean1 * st.mean1});
        if (!(sp2 > 1e-24 * mag)) {
            out.z[g] = 0.0;
            out.degenerate[g] = 1;
            continue;
        }
        out.z[g] = (st.mean1 - st.mean0) / (std::sqrt(sp2) * scale);
    }
    return out;
}

GeneScores gene_zscores(const ExpressionDataset& data) { return gene_zscores(data.values, data.class_labels); }

double maxmean(std::span<const double> z) {
    double pos = 0.0, neg = 0.0;
    for (double v : z) {
        if (v > 0.0) pos += v;
        else neg += v;
    }
    const double n = static_cast<double>(z.size());
    return std::max(pos / n, -neg / n);
}

double mean_z(std::span<const double> z) {
    return std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
}

double mean_abs_z(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += std::abs(v);
    return s / static_cast<double>(z.size());
}

namespace {

// Walks values in ascending order, `in_set(i)` telling whether the i-th sorted
// value belongs to the set. Returns the signed maximum of F_comp - F_set.
template <class Value, class InSet>
double ks_walk(std::size_t total, std::size_t n_in, Value value, InSet in_set) {
    const std::size_t n_out = total - n_in;
    std::size_t c_in = 0, c_out = 0;
    double best = 0.0;
    std::size_t i = 0;
    while (i < total) {
        const double x = value(i);
        while (i < total && value(i) == x) {
            if (in_set(i)) ++c_in;
            else ++c_out;
            ++i;
        }
        const double d = static_cast<double>(c_out) / static_cast<double>(n_out) -
                         static_cast<double>(c_in) / static_cast<double>(n_in);
        if (std::abs(d) > std::abs(best)) best = d;
    }
    return best;
}

}  // namespace

double ks_signed(std::span<const double> z_set, std::span<const double> z_complement) {
    if (z_set.empty() || z_complement.empty()) {
        throw InputError("KS statistic needs non-empty set and complement");
    }
    std::vector<std::pair<double, bool>> pooled;
    pooled.reserve(z_set.size() + z_complement.size());
    for (double v : z_set) pooled.emplace_back(v, true);
    for (double v : z_complement) pooled.emplace_back(v, false);
    std::sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return ks_walk(
        pooled.size(), z_set.size(), [&](std::size_t i) { return pooled[i].first; },
        [&](std::size_t i) { return pooled[i].second; });
}

namespace {

double subset_statistic(SetStatistic method, std::span<const double> z, std::span<const std::size_t> members,
                        std::span<const std::size_t> order, std::vector<std::uint8_t>& mask,
                        std::vector<double>& buffer) {
    if (method == SetStatistic::ks_signed) {
        if (members.size() >= z.size()) throw InputError("KS statistic needs a non-empty complement");
        for (auto g : members) mask[g] = 1;
        const double d = ks_walk(
            z.size(), members.size(), [&](std::size_t i) { return z[order[i]]; },
            [&](std::size_t i) { return mask[order[i]] != 0; });
        for (auto g : members) mask[g] = 0;
        return d;
    }
    buffer.resize(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) buffer[k] = z[members[k]];
    switch (method) {
        case SetStatistic::maxmean: return maxmean(buffer);
        case SetStatistic::mean_z: return mean_z(buffer);
        default: return mean_abs_z(buffer);
    }
}

std::vector<std::size_t> sorted_order(std::span<const double> z) {
    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
    return order;
}

// Scratch space reused across the sets of one score vector.
struct Evaluator {
    SetStatistic method;
    std::span<const double> z;
    std::vector<std::size_t> order;
    std::vector<std::uint8_t> mask;
    std::vector<double> buffer;

    Evaluator(SetStatistic m, std::span<const double> z_) : method(m), z(z_) {
        if (method == SetStatistic::ks_signed) {
            order = sorted_order(z);
            mask.assign(z.size(), 0);
        }
    }

    double operator()(std::span<const std::size_t> members) {
        return subset_statistic(method, z, members, order, mask, buffer);
    }
};

}  // namespace

std::vector<double> set_statistics(SetStatistic method, std::span<const double> z, const GeneSetCollection& sets) {
    Evaluator eval(method, z);
    std::vector<double> out(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) {
        if (sets.sets[s].empty()) throw InputError("gene set '" + sets.names[s] + "' is empty");
        out[s] = eval(sets.sets[s]);
    }
    return out;
}

RandomizationPlan make_randomization_plan(const GeneSetCollection& sets, std::size_t n_genes,
                                          std::size_t n_randomizations, Rng& rng) {
    if (n_randomizations < 2) throw InputError("restandardization needs at least 2 randomizations");
    RandomizationPlan plan;
    for (const auto& m : sets.sets) plan.sizes.push_back(m.size());
    std::sort(plan.sizes.begin(), plan.sizes.end());
    plan.sizes.erase(std::unique(plan.sizes.begin(), plan.sizes.end()), plan.sizes.end());
    if (!plan.sizes.empty() && plan.sizes.back() > n_genes) {
        throw InputError("a gene set has more members than there are genes");
    }
    std::vector<std::size_t> pool(n_genes);
    plan.draws.resize(plan.sizes.size());
    for (std::size_t k = 0; k < plan.sizes.size(); ++k) {
        const std::size_t size = plan.sizes[k];
        plan.draws[k].resize(n_randomizations);
        for (auto& draw : plan.draws[k]) {
            std::iota(pool.begin(), pool.end(), 0);
            // partial Fisher-Yates
            for (std::size_t i = 0; i < size; ++i) {
                const std::size_t j = i + uniform_index(n_genes - i, rng);
                std::swap(pool[i], pool[j]);
            }
            draw.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
        }
    }
    return plan;
}

Restandardized restandardize(std::span<const double> raw_stats, SetStatistic method, std::span<const double> z,
                             const GeneSetCollection& sets, const RandomizationPlan& plan) {
    Evaluator eval(method, z);
    std::vector<double> mean(plan.sizes.size()), sd(plan.sizes.size());
    Restandardized out;
    for (std::size_t k = 0; k < plan.sizes.size(); ++k) {
        const auto& draws = plan.draws[k];
        std::vector<double> vals;
        vals.reserve(draws.size());
        for (const auto& d : draws) vals.push_back(eval(d));
        const double m = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
        double ss = 0.0;
        for (double v : vals) ss += (v - m) * (v - m);
        mean[k] = m;
        sd[k] = std::sqrt(ss / static_cast<double>(vals.size() - 1));
    }
    out.values.resize(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto it = std::lower_bound(plan.sizes.begin(), plan.sizes.end(), sets.sets[s].size());
        if (it == plan.sizes.end() || *it != sets.sets[s].size()) {
            throw StateError("randomization plan has no draws for set size " + std::to_string(sets.sets[s].size()));
        }
        const auto k = static_cast<std::size_t>(it - plan.sizes.begin());
        const double diff = raw_stats[s] - mean[k];
        if (sd[k] < kRestandardizeSdFloor) {
            out.degenerate = true;
            out.values[s] = std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(mean[k])) ? 0.0
                                                                                        : diff / kRestandardizeSdFloor;
        } else {
            out.values[s] = diff / sd[k];
        }
    }
    return out;
}

Restandardized restandardize(std::span<const double> raw_stats, SetStatistic method, std::span<const double> z,
                             const GeneSetCollection& sets, std::size_t n_randomizations, Rng& rng) {
    const RandomizationPlan plan = make_randomization_plan(sets, z.size(), n_randomizations, rng);
    return restandardize(raw_stats, method, z, sets, plan);
}

double permutation_pvalue(double observed, std::span<const double> permuted, bool two_sided) {
    const double obs = two_sided ? std::abs(observed) : observed;
    const double tol = 1e-12 * std::max(1.0, std::abs(obs));
    std::size_t hits = 0;
    for (double p : permuted) {
        const double v = two_sided ? std::abs(p) : p;
        if (v >= obs - tol) ++hits;
    }
    return (1.0 + static_cast<double>(hits)) / (static_cast<double>(permuted.size()) + 1.0);
}

namespace {

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

// Every 0/1 labelling with n1 ones except `observed`, in lexicographic order
// of the treated positions.
std::vector<std::vector<std::uint8_t>> enumerate_labellings(const std::vector<std::uint8_t>& observed) {
    const std::size_t n = observed.size();
    std::size_t n1 = 0;
    for (auto x : observed) n1 += x;
    std::vector<std::vector<std::uint8_t>> out;
    std::vector<std::size_t> pos(n1);
    std::iota(pos.begin(), pos.end(), 0);
    for (;;) {
        std::vector<std::uint8_t> lab(n, 0);
        for (auto p : pos) lab[p] = 1;
        if (lab != observed) out.push_back(std::move(lab));
        // next combination
        std::size_t i = n1;
        while (i > 0 && pos[i - 1] == n - n1 + i - 1) --i;
        if (i == 0) break;
        ++pos[i - 1];
        for (std::size_t j = i; j < n1; ++j) pos[j] = pos[j - 1] + 1;
    }
    return out;
}

}  // namespace

BaselineResult permutation_pvalues(const ExpressionDataset& data, const GeneSetCollection& sets,
                                   const BaselineOptions& opts) {
    data.validate();
    sets.validate(data.n_genes());
    const std::size_t n = data.n_samples();
    std::size_t n1 = 0;
    for (auto x : data.class_labels) n1 += x;
    const double distinct = binomial(n, n1) - 1.0;

    std::vector<std::vector<std::uint8_t>> labellings;
    std::size_t n_perm = opts.n_permutations;
    if (opts.exhaustive) {
        if (n > 12) throw InputError("exhaustive permutation is limited to at most 12 samples");
        labellings = enumerate_labellings(data.class_labels);
        n_perm = labellings.size();
    } else {
        if (n_perm < 100) throw InputError("at least 100 permutations are required");
        if (distinct < static_cast<double>(n_perm)) {
            throw InputError("only " + std::to_string(static_cast<long long>(distinct)) +
                             " distinct relabellings exist but " + std::to_string(n_perm) +
                             " permutations were requested; use exhaustive enumeration");
        }
    }

    BaselineResult res;
    res.method = opts.method;
    res.set_names = sets.names;
    for (const auto& m : sets.sets) res.set_sizes.push_back(m.size());
    res.n_permutations = n_perm;
    res.exhaustive = opts.exhaustive;

    const GeneScores observed = gene_zscores(data);
    res.degenerate_genes = static_cast<std::size_t>(std::count(observed.degenerate.begin(), observed.degenerate.end(), 1));
    res.raw_stat = set_statistics(opts.method, observed.z, sets);

    RandomizationPlan plan;
    if (opts.restandardize) {
        Rng plan_rng = make_stream(opts.seed, {0x72657374ULL});
        plan = make_randomization_plan(sets, data.n_genes(), opts.n_randomizations, plan_rng);
        auto r = restandardize(res.raw_stat, opts.method, observed.z, sets, plan);
        res.restd_stat = std::move(r.values);
        res.degenerate_restandardization = r.degenerate;
        res.n_randomizations = opts.n_randomizations;
    }
    const std::vector<double>& obs_stat = opts.restandardize ? res.restd_stat : res.raw_stat;

    const std::size_t k = sets.size();
    std::vector<double> perm_stats(n_perm * k);
    parallel_for(n_perm, opts.threads, [&](std::size_t b) {
        std::vector<std::uint8_t> labels;
        if (opts.exhaustive) {
            labels = labellings[b];
        } else {
            Rng rng = make_stream(opts.seed, {1, b});
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            shuffle(idx, rng);
            labels.resize(n);
            for (std::size_t i = 0; i < n; ++i) labels[i] = data.class_labels[idx[i]];
        }
        const GeneScores zs = gene_zscores(data.values, labels);
        std::vector<double> stats = set_statistics(opts.method, zs.z, sets);
        if (opts.restandardize) stats = restandardize(stats, opts.method, zs.z, sets, plan).values;
        std::copy(stats.begin(), stats.end(), perm_stats.begin() + static_cast<std::ptrdiff_t>(b * k));
    });

    res.perm_pvalue.resize(k);
    std::vector<double> column(n_perm);
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t b = 0; b < n_perm; ++b) column[b] = perm_stats[b * k + s];
        res.perm_pvalue[s] = permutation_pvalue(obs_stat[s], column, is_signed(opts.method));
    }
    return res;
}

}  // namespace bgsa
