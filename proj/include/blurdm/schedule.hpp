#pragma once

#include <optional>
#include <string>
#include <vector>

namespace blurdm {

// Diffusion schedule: exposure fractions alpha_0..alpha_T (strictly
// increasing, strictly positive), per-step noise scales beta_1..beta_T, and
// the accumulated scales beta_bar_0..beta_bar_T with
//
//   beta_bar_t^2 = sum_{i=1..t} (alpha_i / alpha_t)^2 beta_i^2,
//   beta_bar_0   = 0.
//
// Immutable after construction; safe for concurrent reads.
struct Schedule {
    int T = 0;
    std::vector<double> alpha;     // size T+1
    std::vector<double> beta;      // size T, beta[t-1] holds beta_t
    std::vector<double> beta_bar;  // size T+1

    double a(int t) const { return alpha[static_cast<std::size_t>(t)]; }
    double b(int t) const { return beta[static_cast<std::size_t>(t - 1)]; }
    double bb(int t) const { return beta_bar[static_cast<std::size_t>(t)]; }
};

// Linear ramps: beta_t = beta_max * t/T, alpha_t = alpha_min +
// (alpha_max - alpha_min) * t/T. beta_bar is filled by direct summation.
// Rejects T = 0, alpha_min <= 0, and alpha_min >= alpha_max.
Schedule build_schedule(int T, double beta_max, double alpha_min, double alpha_max);

// alpha_min left at its default pins alpha_t = (t+1)/(T+1): uniform spacing
// with every denominator finite.
Schedule default_schedule(int T, double beta_max = 0.02);

// Coefficients of the deterministic reverse update
//   I_{t-1} = c_img * I_t - c_blur * e_hat - c_noise * eps_hat.
struct ReverseCoeffs {
    double c_img;    // alpha_t / alpha_{t-1}
    double c_blur;   // 1 / alpha_{t-1}
    double c_noise;  // alpha_t * beta_bar_t / alpha_{t-1} - beta_bar_{t-1}
};

ReverseCoeffs reverse_coefficients(const Schedule& s, int t);

// Checks every Schedule invariant (including the beta_bar recursion at
// relative tolerance 1e-12) and returns the name of the first violated
// invariant, or nullopt when the schedule is well formed.
std::optional<std::string> validate(const Schedule& s);

}  // namespace blurdm
