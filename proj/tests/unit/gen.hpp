#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <doctest.h>

// Small seeded generator for property tests; each case logs its seed.
struct Gen {
  explicit Gen(std::uint64_t seed) : seed(seed), rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double log_uniform(double lo, double hi);
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin() { return integer(0, 1) == 1; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }

  std::uint64_t seed;
  std::mt19937_64 rng;
};

inline double Gen::log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

// for_all(n, base_seed, [](Gen& g) { ... }) runs n cases with derived seeds.
template <class F>
void for_all(int n, std::uint64_t base, F&& body) {
  for (int i = 0; i < n; ++i) {
    Gen g(base * 1000003ULL + static_cast<std::uint64_t>(i));
    INFO("property case seed = " << g.seed);
    body(g);
  }
}
