#pragma once

// Frequentist gene-set statistics and their permutation / restandardization
// machinery.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bgsa/model.hpp"
#include "bgsa/rng.hpp"

namespace bgsa {

enum class SetStatistic { maxmean, mean_z, mean_abs_z, ks_signed };

std::string to_string(SetStatistic m);
SetStatistic parse_statistic(const std::string& s);

// Signed statistics are compared two-sided in |.|, the others upper-tailed.
bool is_signed(SetStatistic m);

struct GeneScores {
    std::vector<double> z;
    std::vector<std::uint8_t> degenerate;  // zero pooled variance, z set to 0
};

/// Pooled-variance two-sample t statistic per gene, treatment minus control.
GeneScores gene_zscores(const ExpressionDataset& data);
GeneScores gene_zscores(const Matrix& values, std::span<const std::uint8_t> labels);

double maxmean(std::span<const double> z);
double mean_z(std::span<const double> z);
double mean_abs_z(std::span<const double> z);

/// Signed two-sample Kolmogorov-Smirnov statistic. Positive when the set's
/// values sit to the right of the complement's.
double ks_signed(std::span<const double> z_set, std::span<const double> z_complement);

/// Statistic of every set, given gene scores. For ks_signed the complement of
/// a set is every gene not in it.
std::vector<double> set_statistics(SetStatistic method, std::span<const double> z, const GeneSetCollection& sets);

/// Random gene subsets grouped by size, used as the reference for
/// restandardization. Reused across permutations.
struct RandomizationPlan {
    std::vector<std::size_t> sizes;                            // distinct set sizes, ascending
    std::vector<std::vector<std::vector<std::size_t>>> draws;  // [size][draw] -> gene indices
};

RandomizationPlan make_randomization_plan(const GeneSetCollection& sets, std::size_t n_genes,
                                          std::size_t n_randomizations, Rng& rng);

struct Restandardized {
    std::vector<double> values;
    bool degenerate = false;  // some size class had (near) zero randomization variance
};

inline constexpr double kRestandardizeSdFloor = 1e-12;

Restandardized restandardize(std::span<const double> raw_stats, SetStatistic method, std::span<const double> z,
                             const GeneSetCollection& sets, const RandomizationPlan& plan);

Restandardized restandardize(std::span<const double> raw_stats, SetStatistic method, std::span<const double> z,
                             const GeneSetCollection& sets, std::size_t n_randomizations, Rng& rng);

/// (1 + #{permuted statistics at least as extreme}) / (B + 1).
double permutation_pvalue(double observed, std::span<const double> permuted, bool two_sided);

struct BaselineOptions {
    SetStatistic method = SetStatistic::maxmean;
    std::size_t n_permutations = 1000;
    bool restandardize = false;
    std::size_t n_randomizations = 100;
    // Enumerate every distinct class assignment instead of sampling (n <= 12).
    bool exhaustive = false;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct BaselineResult {
    SetStatistic method = SetStatistic::maxmean;
    std::vector<std::string> set_names;
    std::vector<std::size_t> set_sizes;
    std::vector<double> raw_stat;
    std::vector<double> restd_stat;  // empty unless restandardized
    std::vector<double> perm_pvalue;
    std::size_t n_permutations = 0;
    std::size_t n_randomizations = 0;
    bool exhaustive = false;
    std::size_t degenerate_genes = 0;
    bool degenerate_restandardization = false;
};

BaselineResult permutation_pvalues(const ExpressionDataset& data, const GeneSetCollection& sets,
                                   const BaselineOptions& opts);

}  // namespace bgsa
