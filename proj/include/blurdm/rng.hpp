#pragma once

#include <cstdint>
#include <string_view>

#include "blurdm/signal.hpp"

namespace blurdm {

// Deterministic, portable random stream. The generator core is splitmix64,
// so the sample sequence depends only on the 64-bit seed, never on platform
// or standard-library internals. Streams split by label are independent of
// how much the parent stream has already produced: splits key off the
// original seed, not the evolving state.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    // [0, 1)
    double uniform();
    double uniform(double lo, double hi);
    // standard normal via Box-Muller (second deviate cached)
    double gaussian();

    Signal gaussian_signal(const std::vector<std::size_t>& shape);
    Signal uniform_signal(const std::vector<std::size_t>& shape, double lo, double hi);

    Rng split(std::string_view label) const;
    Rng split(std::uint64_t a, std::uint64_t b = 0) const;
    Rng split(std::string_view label, std::uint64_t n) const;

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t state_;
    double cached_gauss_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace blurdm
