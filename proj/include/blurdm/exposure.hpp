#pragma once

#include <cstdint>
#include <vector>

#include "blurdm/schedule.hpp"
#include "blurdm/signal.hpp"

namespace blurdm {

// Discrete stand-in for the instantaneous scene radiance over one exposure
// window: frames[k] holds the radiance on [tau_grid[k], tau_grid[k+1]) (the
// last frame extends to total_exposure). All exposure integrals are exact
// for this piecewise-constant model, which is what turns the blur-formation
// identities into machine-precision tests. Immutable after construction.
struct FrameStack {
    std::vector<Signal> frames;
    std::vector<double> tau_grid;  // strictly increasing, tau_grid[0] == 0
    double total_exposure = 0.0;
};

// Throws when the stack violates its invariants (K >= 2, one shape,
// monotone grid starting at 0 and ending below total_exposure).
void check_stack(const FrameStack& stack);

// Exact integral of the piecewise-constant radiance over [tau0, tau1].
// Rejects reversed or out-of-range bounds.
Signal integrate(const FrameStack& stack, double tau0, double tau1);

// Full-exposure average: the blurred image.
Signal blur_image(const FrameStack& stack);

// Short-exposure average over [0, alpha0]: the sharp image.
Signal sharp_image(const FrameStack& stack, double alpha0);

// Unnormalized residual integrals over each schedule interval
// [alpha_{t-1}, alpha_t], t = 1..T. Requires alpha_T == total_exposure.
std::vector<Signal> blur_residuals(const FrameStack& stack, const Schedule& s);

// 1D Gaussian bump translating at constant velocity with circular wrap.
// total_exposure = 1, uniform tau grid, bump start position drawn from seed.
FrameStack make_bump_stack(std::size_t length, std::size_t num_frames, int bump_width,
                           double velocity, std::uint64_t seed);

// 2D band-limited noise texture translating by (dx, dy) per unit exposure,
// sampled with bilinear wrap. total_exposure = 1, uniform tau grid.
FrameStack make_texture_stack_2d(std::size_t h, std::size_t w, std::size_t num_frames,
                                 double dx, double dy, std::uint64_t seed);

}  // namespace blurdm
