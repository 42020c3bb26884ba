#include "blurdm/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace blurdm {

Schedule build_schedule(int T, double beta_max, double alpha_min, double alpha_max) {
    if (T < 1) throw std::invalid_argument("build_schedule: T must be >= 1");
    if (beta_max < 0.0) throw std::invalid_argument("build_schedule: beta_max must be >= 0");
    if (alpha_min <= 0.0)
        throw std::invalid_argument("build_schedule: alpha_min must be > 0 (alpha_0 appears in denominators)");
    if (alpha_min >= alpha_max)
        throw std::invalid_argument("build_schedule: alpha_min must be < alpha_max");

    Schedule s;
    s.T = T;
    s.alpha.resize(static_cast<std::size_t>(T) + 1);
    s.beta.resize(static_cast<std::size_t>(T));
    s.beta_bar.assign(static_cast<std::size_t>(T) + 1, 0.0);

    for (int t = 0; t <= T; ++t)
        s.alpha[static_cast<std::size_t>(t)] =
            alpha_min + (alpha_max - alpha_min) * static_cast<double>(t) / T;
    for (int t = 1; t <= T; ++t)
        s.beta[static_cast<std::size_t>(t - 1)] = beta_max * static_cast<double>(t) / T;

    // direct summation of the accumulated variance
    for (int t = 1; t <= T; ++t) {
        double acc = 0.0;
        for (int i = 1; i <= t; ++i) {
            double w = s.a(i) / s.a(t);
            acc += w * w * s.b(i) * s.b(i);
        }
        s.beta_bar[static_cast<std::size_t>(t)] = std::sqrt(acc);
    }
    return s;
}

Schedule default_schedule(int T, double beta_max) {
    return build_schedule(T, beta_max, 1.0 / (T + 1), 1.0);
}

ReverseCoeffs reverse_coefficients(const Schedule& s, int t) {
    if (t < 1 || t > s.T) throw std::invalid_argument("reverse_coefficients: t out of range");
    ReverseCoeffs c;
    c.c_img = s.a(t) / s.a(t - 1);
    c.c_blur = 1.0 / s.a(t - 1);
    c.c_noise = s.a(t) * s.bb(t) / s.a(t - 1) - s.bb(t - 1);
    return c;
}

std::optional<std::string> validate(const Schedule& s) {
    if (s.T < 1) return "T positive";
    if (s.alpha.size() != static_cast<std::size_t>(s.T) + 1 ||
        s.beta.size() != static_cast<std::size_t>(s.T) ||
        s.beta_bar.size() != static_cast<std::size_t>(s.T) + 1)
        return "array sizes";
    if (s.alpha[0] <= 0.0) return "alpha strictly positive";
    for (int t = 1; t <= s.T; ++t)
        if (s.a(t) <= s.a(t - 1)) return "alpha strictly increasing";
    for (int t = 1; t <= s.T; ++t)
        if (s.b(t) < 0.0) return "beta nonnegative";
    if (s.beta_bar[0] != 0.0) return "beta_bar starts at zero";
    for (int t = 1; t <= s.T; ++t) {
        double prev = s.a(t - 1) / s.a(t) * s.bb(t - 1);
        double expected_sq = prev * prev + s.b(t) * s.b(t);
        double actual_sq = s.bb(t) * s.bb(t);
        double tol = 1e-12 * std::max(1.0, std::max(expected_sq, actual_sq));
        if (std::fabs(actual_sq - expected_sq) > tol) return "beta_bar recursion";
    }
    return std::nullopt;
}

}  // namespace blurdm
