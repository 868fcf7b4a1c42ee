#include "bgsa/rng.hpp"

#include <cmath>
#include <utility>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace bgsa {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t p : path) {
        h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    }
    return h;
}

double uniform01(Rng& rng) {
    boost::random::uniform_real_distribution<double> u(0.0, 1.0);
    double x = u(rng);
    while (x <= 0.0) {
        x = u(rng);
    }
    return x;
}

double std_normal(Rng& rng) {
    boost::random::normal_distribution<double> n(0.0, 1.0);
    return n(rng);
}

double normal(double mean, double sd, Rng& rng) { return mean + sd * std_normal(rng); }

double gamma_draw(double shape, Rng& rng) {
    boost::random::gamma_distribution<double> g(shape, 1.0);
    return g(rng);
}

double log_gamma_draw(double shape, Rng& rng) {
    if (shape >= 1.0) {
        return std::log(gamma_draw(shape, rng));
    }
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double g = gamma_draw(shape + 1.0, rng);
    return std::log(g) + std::log(uniform01(rng)) / shape;
}

double beta_draw(double a, double b, Rng& rng) {
    boost::random::beta_distribution<double> d(a, b);
    return d(rng);
}

bool bernoulli(double p, Rng& rng) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01(rng) < p;
}

std::size_t uniform_index(std::size_t n, Rng& rng) {
    boost::random::uniform_int_distribution<std::size_t> d(0, n - 1);
    return d(rng);
}

void shuffle(std::span<std::size_t> values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = uniform_index(i, rng);
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace bgsa
