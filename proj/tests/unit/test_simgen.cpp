#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "bgsa/simgen.hpp"

using namespace bgsa;

namespace {

std::size_t total_shifted(const SimulationTruth& t) {
    std::size_t n = 0;
    for (const auto& s : t.shifted_genes) n += s.size();
    return n;
}

std::vector<double> ranks(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
    return r;
}

double class_mean(const ExpressionDataset& d, std::size_t g, std::uint8_t cls) {
    double sum = 0.0;
    int n = 0;
    const auto row = d.values.row(g);
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (d.class_labels[i] == cls) {
            sum += row[i];
            ++n;
        }
    }
    return sum / n;
}

}  // namespace

TEST(Illustrative, LayoutAndShiftCounts) {
    const SimulatedData sim = gen_illustrative(1.0, 1);
    EXPECT_EQ(sim.data.n_genes(), 1000u);
    EXPECT_EQ(sim.data.n_samples(), 30u);
    EXPECT_EQ(std::count(sim.data.class_labels.begin(), sim.data.class_labels.begin() + 15, 0), 15);
    ASSERT_EQ(sim.sets.size(), 50u);
    for (std::size_t s = 0; s < 50; ++s) {
        ASSERT_EQ(sim.sets.sets[s].size(), 20u);
        EXPECT_EQ(sim.sets.sets[s].front(), 20 * s);
    }
    EXPECT_EQ(total_shifted(sim.truth), 37u);
    EXPECT_EQ(sim.truth.shifted_genes[1].size(), 10u);
    EXPECT_EQ(sim.truth.positive_sets, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Illustrative, ZeroShiftIsPureNoise) {
    const SimulatedData a = gen_illustrative(0.0, 2), b = gen_illustrative(1.0, 2);
    EXPECT_EQ(a.data.values, a.pre_shift);
    EXPECT_EQ(a.pre_shift, b.pre_shift);
    EXPECT_EQ(a.truth.positive_sets.size(), 4u);
}

TEST(Illustrative, ShiftedGeneMeanDifference) {
    const SimulatedData sim = gen_illustrative(1.0, 3);
    double avg = 0.0;
    for (std::size_t g = 0; g < 20; ++g) {
        const double diff = class_mean(sim.data, g, 1) - class_mean(sim.data, g, 0);
        EXPECT_NEAR(diff, 1.0, 4.0 * std::sqrt(2.0 / 15.0));
        avg += diff / 20;
    }
    EXPECT_NEAR(avg, 1.0, 0.6);
}

TEST(Illustrative, TruthReproducesMatrix) {
    for (const SimulatedData& sim : {gen_illustrative(1.0, 4), gen_simulation(3, 4), gen_simulation(6, 4)}) {
        Matrix rebuilt = sim.pre_shift;
        for (const auto& set : sim.truth.shifted_genes) {
            for (const ShiftedGene& sg : set) {
                auto row = rebuilt.row(sg.gene);
                for (std::size_t i = 0; i < row.size(); ++i) {
                    if (sim.data.class_labels[i]) row[i] += sg.shift;
                }
            }
        }
        EXPECT_EQ(rebuilt, sim.data.values);
    }
}

TEST(AllShifted, TenGenesPerSet) {
    const SimulatedData sim = gen_all_shifted(5);
    EXPECT_EQ(total_shifted(sim.truth), 500u);
    for (const auto& s : sim.truth.shifted_genes) EXPECT_EQ(s.size(), 10u);
    EXPECT_TRUE(sim.truth.positive_sets.empty());
}

TEST(PriorDemo, WithinExceedsBetween) {
    const PriorCorrelationDemo d = gen_prior_correlation_demo(1000, 100, 6);
    ASSERT_EQ(d.r_within.size(), 1000u);
    ASSERT_EQ(d.r_between.size(), 1000u);
    double w = 0.0, b = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) {
        ASSERT_GE(d.r_within[i], -1.0);
        ASSERT_LE(d.r_within[i], 1.0);
        ASSERT_GE(d.r_between[i], -1.0);
        ASSERT_LE(d.r_between[i], 1.0);
        w += d.r_within[i] / 1000;
        b += d.r_between[i] / 1000;
    }
    EXPECT_GT(w, b);
    EXPECT_LT(std::abs(b), 0.05);
}

TEST(Simulations, CommonFrame) {
    for (int k = 1; k <= 6; ++k) {
        const SimulatedData sim = gen_simulation(k, 10 + k);
        EXPECT_EQ(sim.data.n_genes(), 1000u) << k;
        EXPECT_EQ(sim.data.n_samples(), 10u) << k;
        EXPECT_EQ(sim.sets.size(), 50u) << k;
        EXPECT_EQ(sim.truth.positive_sets, (std::vector<std::size_t>{0, 1, 2, 3, 4})) << k;
        std::vector<int> seen(1000, 0);
        for (const auto& s : sim.sets.sets) {
            if (k < 6) EXPECT_GE(s.size(), 5u) << k;
            for (std::size_t g : s) seen[g]++;
        }
        EXPECT_EQ(std::count(seen.begin(), seen.end(), 0), 0) << k;
        EXPECT_NO_THROW(sim.sets.validate(1000));
        EXPECT_NO_THROW(sim.data.validate());
    }
}

TEST(Simulations, GammaBaseIsPositive) {
    // Treatment shifts are Gaussian and may cross zero; the Gamma base may not.
    const SimulatedData sim = gen_simulation(2, 21);
    for (double v : sim.pre_shift.data()) ASSERT_GT(v, 0.0);
}

TEST(Simulations, OnlyPositiveSetsAreShiftedBeforeSim4) {
    for (int k = 1; k <= 3; ++k) {
        const SimulatedData sim = gen_simulation(k, 30 + k);
        for (std::size_t s = 5; s < 50; ++s) EXPECT_TRUE(sim.truth.shifted_genes[s].empty());
    }
    const SimulatedData sim4 = gen_simulation(4, 34);
    std::size_t extra = 0;
    for (std::size_t s = 5; s < 50; ++s) {
        ASSERT_LE(sim4.truth.shifted_genes[s].size(), 1u);
        if (!sim4.truth.shifted_genes[s].empty()) {
            EXPECT_EQ(sim4.truth.shifted_genes[s][0].shift, 2.0);
            ++extra;
        }
    }
    EXPECT_EQ(extra, 15u);  // one third of sets 6-50
}

TEST(Simulations, CopulaCouplingMatchesDrawnCoefficient) {
    SimulationOptions opts;
    opts.n_control = 500;
    opts.n_treatment = 500;
    const SimulatedData sim = gen_simulation(5, 41, opts);
    ASSERT_EQ(sim.truth.correlated_pairs.size(), 100u);
    std::map<std::size_t, int> uses;
    for (const auto& p : sim.truth.correlated_pairs) {
        uses[p.first]++;
        uses[p.second]++;
    }
    int checked = 0;
    for (const auto& p : sim.truth.correlated_pairs) {
        EXPECT_GE(p.rho, -1.0);
        EXPECT_LE(p.rho, 1.0);
        if (uses[p.first] > 1 || uses[p.second] > 1) continue;  // chained pairs are coupled more than once
        // control columns only, so treatment shifts do not enter
        std::vector<double> a, b;
        for (std::size_t i = 0; i < 500; ++i) {
            a.push_back(sim.data.values(p.first, i));
            b.push_back(sim.data.values(p.second, i));
        }
        // Gamma margins distort Pearson correlation but not ranks; under a
        // Gaussian copula Spearman's rho is (6 / pi) asin(rho / 2).
        const double expected = 6.0 / M_PI * std::asin(p.rho / 2.0);
        EXPECT_NEAR(pearson_correlation(ranks(a), ranks(b)), expected, 0.1) << p.first << "," << p.second;
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(Simulations, CopiedGenesAppearInSeveralSets) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SimulatedData sim = gen_simulation(6, seed);
        std::vector<int> count(1000, 0);
        for (const auto& s : sim.sets.sets) {
            EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), s.size());
            for (std::size_t g : s) count[g]++;
        }
        EXPECT_GE(*std::max_element(count.begin(), count.end()), 2);
    }
}

TEST(Simulations, NullNoiseIsUncorrelatedAcrossGenes) {
    double sum = 0.0;
    int n = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const SimulatedData sim = gen_simulation(1, seed);
        for (std::size_t g = 100; g < 110; ++g) {
            const auto a = sim.pre_shift.row(g), b = sim.pre_shift.row(g + 1);
            sum += pearson_correlation(a, b);
            ++n;
        }
    }
    EXPECT_LT(std::abs(sum / n), 3.0 / std::sqrt(9.0 * n));
}

TEST(Generators, DeterministicPerSeed) {
    for (Scenario s : {Scenario::illustrative, Scenario::all_shifted, Scenario::sim1, Scenario::sim4, Scenario::sim6}) {
        const SimulatedData a = generate(s, 77), b = generate(s, 77), c = generate(s, 78);
        EXPECT_EQ(a.data.values, b.data.values);
        EXPECT_EQ(a.sets.sets, b.sets.sets);
        EXPECT_EQ(a.truth, b.truth);
        EXPECT_NE(a.data.values, c.data.values);
    }
    EXPECT_EQ(parse_scenario(to_string(Scenario::sim3)), Scenario::sim3);
}
