#pragma once

// Synthetic data generators with recorded ground truth.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bgsa/model.hpp"

namespace bgsa {

enum class Scenario { illustrative, all_shifted, sim1, sim2, sim3, sim4, sim5, sim6 };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& s);

struct ShiftedGene {
    std::size_t gene = 0;
    double shift = 0.0;

    bool operator==(const ShiftedGene&) const = default;
};

struct CorrelatedPair {
    std::size_t first = 0;
    std::size_t second = 0;
    double rho = 0.0;

    bool operator==(const CorrelatedPair&) const = default;
};

struct SimulationTruth {
    Scenario scenario = Scenario::illustrative;
    std::vector<std::size_t> positive_sets;               // 0-based set indices
    std::vector<std::vector<ShiftedGene>> shifted_genes;  // per set, in application order
    std::vector<CorrelatedPair> correlated_pairs;         // sim5 / sim6
    std::uint64_t seed = 0;

    bool operator==(const SimulationTruth&) const = default;
};

struct SimulatedData {
    ExpressionDataset data;
    GeneSetCollection sets;
    SimulationTruth truth;
    // Expression values before any treatment shift was added.
    Matrix pre_shift;
};

SimulatedData gen_illustrative(double shift, std::uint64_t seed);

SimulatedData gen_all_shifted(std::uint64_t seed);

struct PriorCorrelationDemo {
    std::vector<double> r_within;
    std::vector<double> r_between;
};

PriorCorrelationDemo gen_prior_correlation_demo(std::size_t n_reps, std::size_t n_draws, std::uint64_t seed);

struct SimulationOptions {
    std::size_t n_genes = 1000;
    std::size_t n_control = 5;
    std::size_t n_treatment = 5;
    std::size_t n_sets = 50;
    std::size_t n_positive = 5;
    std::size_t min_set_size = 5;
    double shift_probability = 0.5;
    std::size_t n_correlated_pairs = 100;
    std::size_t min_copied_genes = 10;
    std::size_t max_copied_genes = 100;
};

SimulatedData gen_simulation(int k, std::uint64_t seed, const SimulationOptions& opts = {});

SimulatedData generate(Scenario scenario, std::uint64_t seed);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace bgsa
