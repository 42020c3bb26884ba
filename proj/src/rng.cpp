#include "blurdm/rng.hpp"

#include <cmath>

namespace blurdm {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    // one splitmix round to decorrelate adjacent labels
    return splitmix64(x);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
    // 53 mantissa bits -> [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_gauss_;
    }
    // u1 in (0,1] keeps the log finite
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    cached_gauss_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

Signal Rng::gaussian_signal(const std::vector<std::size_t>& shape) {
    Signal s = Signal::zeros(shape);
    for (double& v : s.values) v = gaussian();
    return s;
}

Signal Rng::uniform_signal(const std::vector<std::size_t>& shape, double lo, double hi) {
    Signal s = Signal::zeros(shape);
    for (double& v : s.values) v = uniform(lo, hi);
    return s;
}

Rng Rng::split(std::string_view label) const { return Rng(mix(seed_, fnv1a(label))); }

Rng Rng::split(std::uint64_t a, std::uint64_t b) const {
    return Rng(mix(seed_, mix(a + 0x632be59bd9b4e019ULL, b)));
}

Rng Rng::split(std::string_view label, std::uint64_t n) const { return split(label).split(n); }

}  // namespace blurdm
