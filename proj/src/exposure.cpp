#include "blurdm/exposure.hpp"

#include <cmath>
#include <stdexcept>

#include "blurdm/rng.hpp"

namespace blurdm {

void check_stack(const FrameStack& stack) {
    if (stack.frames.size() < 2) throw std::invalid_argument("FrameStack: need at least 2 frames");
    if (stack.tau_grid.size() != stack.frames.size())
        throw std::invalid_argument("FrameStack: tau_grid size must match frame count");
    for (std::size_t k = 1; k < stack.frames.size(); ++k)
        require_same_shape(stack.frames[0], stack.frames[k], "FrameStack frames");
    if (stack.tau_grid.front() != 0.0)
        throw std::invalid_argument("FrameStack: tau_grid must start at 0");
    for (std::size_t k = 1; k < stack.tau_grid.size(); ++k)
        if (stack.tau_grid[k] <= stack.tau_grid[k - 1])
            throw std::invalid_argument("FrameStack: tau_grid must be strictly increasing");
    if (stack.tau_grid.back() >= stack.total_exposure)
        throw std::invalid_argument("FrameStack: last sample must lie before total_exposure");
}

Signal integrate(const FrameStack& stack, double tau0, double tau1) {
    check_stack(stack);
    if (tau0 < 0.0 || tau1 > stack.total_exposure || tau0 > tau1)
        throw std::invalid_argument("integrate: bounds must satisfy 0 <= tau0 <= tau1 <= total_exposure");

    Signal out = Signal::zeros(stack.frames[0].shape);
    const std::size_t K = stack.frames.size();
    for (std::size_t k = 0; k < K; ++k) {
        double seg_lo = stack.tau_grid[k];
        double seg_hi = (k + 1 < K) ? stack.tau_grid[k + 1] : stack.total_exposure;
        double lo = std::max(seg_lo, tau0);
        double hi = std::min(seg_hi, tau1);
        if (hi > lo) {
            double w = hi - lo;
            const Signal& f = stack.frames[k];
            for (std::size_t i = 0; i < out.numel(); ++i) out.values[i] += w * f.values[i];
        }
    }
    return out;
}

Signal blur_image(const FrameStack& stack) {
    return scale(integrate(stack, 0.0, stack.total_exposure), 1.0 / stack.total_exposure);
}

Signal sharp_image(const FrameStack& stack, double alpha0) {
    if (alpha0 <= 0.0) throw std::invalid_argument("sharp_image: alpha0 must be > 0");
    if (alpha0 > stack.total_exposure)
        throw std::invalid_argument("sharp_image: alpha0 exceeds total_exposure");
    return scale(integrate(stack, 0.0, alpha0), 1.0 / alpha0);
}

std::vector<Signal> blur_residuals(const FrameStack& stack, const Schedule& s) {
    check_stack(stack);
    if (std::fabs(s.a(s.T) - stack.total_exposure) > 1e-12 * std::max(1.0, stack.total_exposure))
        throw std::invalid_argument("blur_residuals: schedule alpha_T must equal stack total_exposure");
    std::vector<Signal> e;
    e.reserve(static_cast<std::size_t>(s.T));
    for (int t = 1; t <= s.T; ++t) e.push_back(integrate(stack, s.a(t - 1), s.a(t)));
    return e;
}

FrameStack make_bump_stack(std::size_t length, std::size_t num_frames, int bump_width,
                           double velocity, std::uint64_t seed) {
    if (num_frames < 2) throw std::invalid_argument("make_bump_stack: num_frames must be >= 2");
    if (bump_width <= 0 || static_cast<std::size_t>(bump_width) >= length)
        throw std::invalid_argument("make_bump_stack: bump_width must be in (0, length)");

    Rng rng(seed);
    double x0 = rng.uniform(0.0, static_cast<double>(length));
    double sigma = static_cast<double>(bump_width);
    double half = static_cast<double>(length) / 2.0;

    FrameStack stack;
    stack.total_exposure = 1.0;
    stack.tau_grid.resize(num_frames);
    for (std::size_t k = 0; k < num_frames; ++k)
        stack.tau_grid[k] = static_cast<double>(k) / static_cast<double>(num_frames);

    stack.frames.reserve(num_frames);
    for (std::size_t k = 0; k < num_frames; ++k) {
        double center = std::fmod(x0 + velocity * stack.tau_grid[k], static_cast<double>(length));
        Signal f = Signal::zeros({length});
        for (std::size_t x = 0; x < length; ++x) {
            double d = std::fabs(static_cast<double>(x) - center);
            if (d > half) d = static_cast<double>(length) - d;  // circular distance
            f.values[x] = std::exp(-d * d / (2.0 * sigma * sigma));
        }
        stack.frames.push_back(std::move(f));
    }
    return stack;
}

namespace {

// bilinear sample with circular wrap
double sample_wrapped(const Signal& img, double y, double x) {
    auto wrap = [](long v, long n) { return ((v % n) + n) % n; };
    long h = static_cast<long>(img.shape[0]);
    long w = static_cast<long>(img.shape[1]);
    double fy = std::floor(y), fx = std::floor(x);
    double ty = y - fy, tx = x - fx;
    long y0 = wrap(static_cast<long>(fy), h), y1 = wrap(y0 + 1, h);
    long x0 = wrap(static_cast<long>(fx), w), x1 = wrap(x0 + 1, w);
    double v00 = img.at(static_cast<std::size_t>(y0), static_cast<std::size_t>(x0));
    double v01 = img.at(static_cast<std::size_t>(y0), static_cast<std::size_t>(x1));
    double v10 = img.at(static_cast<std::size_t>(y1), static_cast<std::size_t>(x0));
    double v11 = img.at(static_cast<std::size_t>(y1), static_cast<std::size_t>(x1));
    return (1 - ty) * ((1 - tx) * v00 + tx * v01) + ty * ((1 - tx) * v10 + tx * v11);
}

}  // namespace

FrameStack make_texture_stack_2d(std::size_t h, std::size_t w, std::size_t num_frames,
                                 double dx, double dy, std::uint64_t seed) {
    if (num_frames < 2) throw std::invalid_argument("make_texture_stack_2d: num_frames must be >= 2");
    if (h < 2 || w < 2) throw std::invalid_argument("make_texture_stack_2d: degenerate grid");

    Rng rng(seed);
    Signal base = rng.uniform_signal({h, w}, 0.0, 1.0);

    // three passes of a circular 3x3 box filter band-limit the texture so
    // bilinear sampling stays smooth
    for (int pass = 0; pass < 3; ++pass) {
        Signal next = Signal::zeros({h, w});
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int oy = -1; oy <= 1; ++oy) {
                    for (int ox = -1; ox <= 1; ++ox) {
                        std::size_t yy = (y + h + static_cast<std::size_t>(oy + 1) - 1) % h;
                        std::size_t xx = (x + w + static_cast<std::size_t>(ox + 1) - 1) % w;
                        acc += base.at(yy, xx);
                    }
                }
                next.at(y, x) = acc / 9.0;
            }
        }
        base = std::move(next);
    }

    // normalize into [0.05, 0.95]
    double lo = base.values[0], hi = base.values[0];
    for (double v : base.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span = (hi > lo) ? (hi - lo) : 1.0;
    for (double& v : base.values) v = 0.05 + 0.9 * (v - lo) / span;

    FrameStack stack;
    stack.total_exposure = 1.0;
    stack.tau_grid.resize(num_frames);
    for (std::size_t k = 0; k < num_frames; ++k)
        stack.tau_grid[k] = static_cast<double>(k) / static_cast<double>(num_frames);

    stack.frames.reserve(num_frames);
    for (std::size_t k = 0; k < num_frames; ++k) {
        double tau = stack.tau_grid[k];
        Signal f = Signal::zeros({h, w});
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x)
                f.at(y, x) = sample_wrapped(base, static_cast<double>(y) - dy * tau,
                                            static_cast<double>(x) - dx * tau);
        stack.frames.push_back(std::move(f));
    }
    return stack;
}

}  // namespace blurdm
