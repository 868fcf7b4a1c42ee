#pragma once

// Seeded random streams.
//
// Every stochastic routine takes an explicit Rng. Variates are drawn through
// Boost.Random distributions, whose algorithms are fixed across standard
// library implementations, so a given seed yields the same bits everywhere.
// Independent sub-streams are derived by hashing (master seed, path...) with
// splitmix64, which lets permutations, replicates and benchmark cells run in
// any order or in parallel without changing results.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace bgsa {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(master, path));
}

// Uniform on the open interval (0, 1).
double uniform01(Rng& rng);
double std_normal(Rng& rng);
double normal(double mean, double sd, Rng& rng);
double gamma_draw(double shape, Rng& rng);
// log of a Gamma(shape, 1) draw; stays finite for very small shapes.
double log_gamma_draw(double shape, Rng& rng);
double beta_draw(double a, double b, Rng& rng);
bool bernoulli(double p, Rng& rng);
// Uniform integer on [0, n).
std::size_t uniform_index(std::size_t n, Rng& rng);

void shuffle(std::span<std::size_t> values, Rng& rng);

}  // namespace bgsa
