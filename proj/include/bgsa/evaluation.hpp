#pragma once

// ROC/AUC scoring of gene-set rankings against simulation truth, and the
// replicate-averaged method comparison.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bgsa/baselines.hpp"
#include "bgsa/model.hpp"
#include "bgsa/sampler.hpp"
#include "bgsa/simgen.hpp"

namespace bgsa {

enum class Method { bgsa_mixture, bgsa_simple, maxmean, mean_z, mean_abs_z, ks_signed };

std::string to_string(Method m);
Method parse_method(const std::string& s);

/// Per-set significance scores, higher = more significant. Ties on `score`
/// are broken by `tie_break` (higher wins) when it is present.
struct MethodScores {
    std::string method;
    std::vector<double> score;
    std::vector<double> tie_break;
    std::string orientation;
};

// Mann-Whitney AUC in [0, 1]; ties count one half.
double auc(const MethodScores& scores, std::span<const std::size_t> positive_sets);
double auc(const MethodScores& scores, const SimulationTruth& truth);

struct RocPoint {
    double fpr;
    double tpr;
};

// Empirical ROC curve, one point per distinct score threshold.
std::vector<RocPoint> roc_curve(const MethodScores& scores, std::span<const std::size_t> positive_sets);

MethodScores score_bgsa(const PosteriorSummary& summary);
MethodScores score_baseline(const BaselineResult& result);

struct PairedTTest {
    double mean_diff = 0.0;
    double t = 0.0;
    double dof = 0.0;
    double p_two_sided = 1.0;
};

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b);

struct BenchmarkConfig {
    std::vector<Scenario> scenarios{Scenario::sim1};
    std::vector<Method> methods{Method::bgsa_mixture, Method::maxmean};
    std::size_t n_replicates = 20;
    McmcConfig mcmc;  // seed is ignored; per-cell seeds are derived
    std::size_t n_permutations = 200;
    std::size_t n_randomizations = 100;
    bool maxmean_restandardize = true;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    void validate() const;
};

struct BenchmarkCell {
    Scenario scenario;
    Method method;
    std::vector<double> auc_percent;  // per replicate
    double mean_auc = 0.0;            // percent
    double std_error = 0.0;           // sample sd / sqrt(n)
    std::vector<std::vector<RocPoint>> roc;  // per replicate
};

struct BenchmarkComparison {
    Scenario scenario;
    Method first;
    Method second;
    PairedTTest test;
};

struct BenchmarkReport {
    BenchmarkConfig config;
    std::vector<BenchmarkCell> cells;  // scenario-major, in config order
    std::vector<BenchmarkComparison> comparisons;

    const BenchmarkCell& cell(Scenario s, Method m) const;
};

std::uint64_t benchmark_cell_seed(std::uint64_t master, Scenario scenario, std::size_t replicate);

MethodScores run_method(Method method, const SimulatedData& sim, const BenchmarkConfig& cfg, std::uint64_t seed);

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg);

}  // namespace bgsa
