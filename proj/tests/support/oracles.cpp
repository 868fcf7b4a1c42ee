#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bgsa::testing {

double kolmogorov_sf(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    const double sn = std::sqrt(n);
    return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

double ks_uniform_test(std::vector<double> sample) {
    return ks_test(std::move(sample), [](double u) { return std::clamp(u, 0.0, 1.0); });
}

GridDensity::GridDensity(const std::function<double(double)>& log_density, double lo, double hi, bool log_axis,
                         std::size_t n_points) {
    const double a = log_axis ? std::log(lo) : lo;
    const double b = log_axis ? std::log(hi) : hi;
    const double h = (b - a) / static_cast<double>(n_points);
    std::vector<double> lp(n_points);
    x_.resize(n_points);
    edges_.resize(n_points + 1);
    for (std::size_t i = 0; i <= n_points; ++i) {
        const double u = a + h * static_cast<double>(i);
        edges_[i] = log_axis ? std::exp(u) : u;
    }
    for (std::size_t i = 0; i < n_points; ++i) {
        const double u = a + h * (static_cast<double>(i) + 0.5);
        x_[i] = log_axis ? std::exp(u) : u;
        lp[i] = log_density(x_[i]) + (log_axis ? u : 0.0);
    }
    const double mx = *std::max_element(lp.begin(), lp.end());
    cdf_.resize(n_points);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        acc += std::exp(lp[i] - mx);
        cdf_[i] = acc;
    }
    for (auto& c : cdf_) c /= acc;
}

double GridDensity::tv_distance(const std::vector<double>& draws, std::size_t n_bins) const {
    // Bin boundaries at grid quantiles; the outer bins extend to +-infinity.
    std::vector<double> cuts;
    std::vector<double> mass;
    double prev = 0.0;
    for (std::size_t b = 1; b < n_bins; ++b) {
        const double q = static_cast<double>(b) / static_cast<double>(n_bins);
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), q);
        const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
        if (i + 1 >= edges_.size()) break;
        const double cut = edges_[i + 1];
        if (!cuts.empty() && cut <= cuts.back()) continue;
        cuts.push_back(cut);
        mass.push_back(cdf_[i] - prev);
        prev = cdf_[i];
    }
    mass.push_back(1.0 - prev);
    std::vector<double> counts(mass.size(), 0.0);
    for (double d : draws) {
        const auto it = std::upper_bound(cuts.begin(), cuts.end(), d);
        counts[static_cast<std::size_t>(it - cuts.begin())] += 1.0;
    }
    double tv = 0.0;
    for (std::size_t b = 0; b < mass.size(); ++b) {
        tv += std::abs(counts[b] / static_cast<double>(draws.size()) - mass[b]);
    }
    return 0.5 * tv;
}

double GridDensity::mean() const {
    double m = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        m += x_[i] * (cdf_[i] - prev);
        prev = cdf_[i];
    }
    return m;
}

double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double batch_means_se(const std::vector<double>& series, std::size_t n_batches) {
    const std::size_t len = series.size() / n_batches;
    if (len == 0) throw std::invalid_argument("series too short for batch means");
    std::vector<double> means(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        means[b] = std::accumulate(series.begin() + static_cast<long>(b * len),
                                   series.begin() + static_cast<long>((b + 1) * len), 0.0) /
                   static_cast<double>(len);
    }
    const double mu = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(n_batches);
    double ss = 0.0;
    for (double m : means) ss += (m - mu) * (m - mu);
    return std::sqrt(ss / static_cast<double>(n_batches - 1) / static_cast<double>(n_batches));
}

}  // namespace bgsa::testing
