#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/inverse_chi_squared.hpp>

#include "bgsa/distributions.hpp"
#include "oracles.hpp"

using namespace bgsa;
using bgsa::testing::ks_test;

namespace {

double sample_mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double sample_var(const std::vector<double>& x) {
    const double m = sample_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / (x.size() - 1);
}

}  // namespace

TEST(ScaledInvChiSq, RejectsInvalidParameters) {
    EXPECT_THROW(ScaledInvChiSq(0.0, 1.0), DomainError);
    EXPECT_THROW(ScaledInvChiSq(-1.0, 1.0), DomainError);
    EXPECT_THROW(ScaledInvChiSq(2.0, 0.0), DomainError);
    EXPECT_THROW(ScaledInvChiSq(2.0, std::nan("")), DomainError);
    EXPECT_THROW(ScaledInvChiSq(INFINITY, 1.0), DomainError);
    EXPECT_NO_THROW(ScaledInvChiSq(1e-3, 1e-8));
}

TEST(ScaledInvChiSq, SampleMeanMatchesAnalyticMean) {
    // nu s^2 / (nu - 2) = 2 for nu = 4, s^2 = 1
    const ScaledInvChiSq d(4.0, 1.0);
    Rng rng(11);
    std::vector<double> x(100000);
    for (auto& v : x) v = sinvchisq_sample(d, rng);
    const double se = std::sqrt(sample_var(x) / x.size());
    EXPECT_NEAR(sample_mean(x), 2.0, 3.0 * se);
    EXPECT_DOUBLE_EQ(d.mean(), 2.0);
}

TEST(ScaledInvChiSq, DrawsFollowReferenceCdf) {
    const std::pair<double, double> params[] = {{1.0, 0.5}, {0.3, 2.0}, {4.0, 1.0}, {25.0, 0.04}};
    for (auto [dof, scale] : params) {
        const ScaledInvChiSq d(dof, scale);
        const boost::math::inverse_chi_squared_distribution<double> ref(dof, scale);
        Rng rng(static_cast<std::uint64_t>(dof * 1000));
        std::vector<double> x(20000);
        for (auto& v : x) v = sinvchisq_sample(d, rng);
        const double p = ks_test(x, [&](double t) { return boost::math::cdf(ref, t); });
        EXPECT_GT(p, 1e-3) << "dof=" << dof << " scale=" << scale;
    }
}

TEST(ScaledInvChiSq, ScalingUnderSharedChiSquareStream) {
    const double c = 3.7;
    for (double log_chisq : {-5.0, -0.3, 0.0, 1.2, 4.0}) {
        const double a = sinvchisq_from_log_chisq({2.5, 0.8}, log_chisq);
        const double b = sinvchisq_from_log_chisq({2.5, 0.8 * c}, log_chisq);
        EXPECT_NEAR(b, c * a, 1e-14 * b);
    }
    Rng r1(5), r2(5);
    for (int i = 0; i < 100; ++i) {
        const double a = sinvchisq_sample({1.0, 0.5}, r1);
        const double b = sinvchisq_sample({1.0, 0.5 * c}, r2);
        EXPECT_NEAR(b, c * a, 1e-12 * b);
    }
}

TEST(ScaledInvChiSq, TinyDegreesOfFreedomStayFinite) {
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double x = sinvchisq_sample({0.01, 1.0}, rng);
        ASSERT_TRUE(std::isfinite(x));
        ASSERT_GT(x, 0.0);
    }
}

TEST(ScaledInvChiSq, LogPdfMatchesReferenceDensity) {
    const boost::math::inverse_chi_squared_distribution<double> ref(3.0, 1.0);
    for (double x : {0.01, 0.2, 1.0, 3.3, 50.0}) {
        EXPECT_NEAR(sinvchisq_logpdf(x, {3.0, 1.0}), std::log(boost::math::pdf(ref, x)), 1e-12);
        EXPECT_EQ(sinvchisq_logpdf(x, {3.0, 1.0}) - sinvchisq_logpdf(x, {3.0, 1.0}), 0.0);
    }
    EXPECT_THROW(sinvchisq_logpdf(0.0, {3.0, 1.0}), DomainError);
    EXPECT_THROW(sinvchisq_logpdf(-1.0, {3.0, 1.0}), DomainError);
}

TEST(ScaledInvChiSq, LogPdfIntegratesToOne) {
    // Midpoint rule in u = log x over a range holding all but ~1e-12 of the mass.
    const ScaledInvChiSq d(3.0, 1.0);
    auto integrate = [&](double lo, double hi) {
        const int n = 400000;
        const double a = std::log(lo), h = (std::log(hi) - a) / n;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double u = a + h * (i + 0.5);
            sum += std::exp(sinvchisq_logpdf(std::exp(u), d) + u);
        }
        return sum * h;
    };
    EXPECT_NEAR(integrate(1e-3, 1e9), 1.0, 1e-4);
    // On (0, 50) the integral equals the CDF at 50 (about 0.996, not 1).
    const boost::math::inverse_chi_squared_distribution<double> ref(3.0, 1.0);
    EXPECT_NEAR(integrate(1e-3, 50.0), boost::math::cdf(ref, 50.0), 1e-4);
}

TEST(ScaledInvChiSq, ModeMatchesGridArgmax) {
    const ScaledInvChiSq d(5.0, 2.0);
    double best = 0.0, best_lp = -INFINITY;
    for (int i = 1; i <= 200000; ++i) {
        const double x = i * 1e-5;
        const double lp = sinvchisq_logpdf(x, d);
        if (lp > best_lp) {
            best_lp = lp;
            best = x;
        }
    }
    EXPECT_NEAR(d.mode(), 10.0 / 7.0, 1e-15);
    EXPECT_NEAR(best, 10.0 / 7.0, 2e-5);
}

TEST(SliceSampler, StandardNormalMoments) {
    Rng rng(21);
    auto logdens = [](double x) { return -0.5 * x * x; };
    std::vector<double> x(100000);
    double cur = 0.0;
    const SliceConfig cfg;
    for (auto& v : x) {
        cur = slice_sample_step(logdens, cur, cfg, rng).x;
        v = cur;
    }
    EXPECT_NEAR(sample_mean(x), 0.0, 0.02);
    EXPECT_NEAR(sample_var(x), 1.0, 0.03);
}

TEST(SliceSampler, GammaOnLogAxisWithJacobian) {
    // Gamma(1, 1) density e^-t; on u = log t the target is -e^u + u.
    Rng rng(22);
    auto logdens = [](double u) { return -std::exp(u) + u; };
    double cur = 0.0, sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        cur = slice_sample_step(logdens, cur, SliceConfig{}, rng).x;
        sum += std::exp(cur);
    }
    EXPECT_NEAR(sum / n, 1.0, 0.02);
}

TEST(SliceSampler, ReturnedPointLiesInSlice) {
    Rng rng(23);
    auto peaked = [](double x) { return -0.5 * (x / 1e-6) * (x / 1e-6); };
    for (int i = 0; i < 100; ++i) {
        const SliceDraw d = slice_sample_step(peaked, 0.0, SliceConfig{}, rng);
        EXPECT_GE(d.log_density, d.level);
        EXPECT_EQ(d.log_density, peaked(d.x));
    }
}

TEST(SliceSampler, InvalidStartsAndCollapse) {
    Rng rng(24);
    auto nan_density = [](double) { return std::nan(""); };
    EXPECT_THROW(slice_sample_step(nan_density, 0.0, SliceConfig{}, rng), StateError);
    auto outside = [](double x) { return x > 0 ? 0.0 : -INFINITY; };
    EXPECT_THROW(slice_sample_step(outside, -1.0, SliceConfig{}, rng), StateError);
    // Positive density only at the starting point: the interval shrinks to nothing.
    auto spike = [](double x) { return x == 0.5 ? 0.0 : -INFINITY; };
    EXPECT_THROW(slice_sample_step(spike, 0.5, SliceConfig{}, rng), DegenerateDensityError);
}

TEST(SliceSampler, ConfigValidation) {
    EXPECT_THROW((SliceConfig{0.0, 10}.validate()), InputError);
    EXPECT_THROW((SliceConfig{1.0, 0}.validate()), InputError);
    EXPECT_NO_THROW(SliceConfig{}.validate());
}
