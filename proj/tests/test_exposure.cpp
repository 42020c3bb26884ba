#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blurdm/exposure.hpp"
#include "blurdm/rng.hpp"

using namespace blurdm;

namespace {

FrameStack constant_stack(double c, std::size_t len = 8, std::size_t K = 4) {
    FrameStack s;
    s.total_exposure = 1.0;
    for (std::size_t k = 0; k < K; ++k) {
        s.frames.push_back(Signal::full({len}, c));
        s.tau_grid.push_back(static_cast<double>(k) / static_cast<double>(K));
    }
    return s;
}

// hand summation of piecewise-constant areas, independent of integrate()
Signal quadrature_oracle(const FrameStack& s, double a, double b) {
    Signal out = Signal::zeros(s.frames[0].shape);
    std::size_t K = s.frames.size();
    for (std::size_t k = 0; k < K; ++k) {
        double lo = s.tau_grid[k];
        double hi = (k + 1 < K) ? s.tau_grid[k + 1] : s.total_exposure;
        double w = std::min(hi, b) - std::max(lo, a);
        if (w > 0.0)
            for (std::size_t i = 0; i < out.numel(); ++i) out.values[i] += w * s.frames[k].values[i];
    }
    return out;
}

double identity_error(const FrameStack& stack, const Schedule& s) {
    Signal B = blur_image(stack);
    Signal I0 = sharp_image(stack, s.a(0));
    std::vector<Signal> e = blur_residuals(stack, s);
    Signal rhs = scale(I0, s.a(0) / s.a(s.T));
    for (const Signal& et : e) rhs = add_scaled(rhs, 1.0 / s.a(s.T), et);
    return max_abs_diff(B, rhs);
}

}  // namespace

TEST_CASE("integrate: constant stack gives (b-a)*c per element") {
    FrameStack s = constant_stack(0.7);
    Signal r = integrate(s, 0.1, 0.65);
    for (double v : r.values) CHECK(v == doctest::Approx(0.55 * 0.7).epsilon(1e-14));
}

TEST_CASE("integrate: empty interval is the zero signal") {
    FrameStack s = constant_stack(0.3);
    Signal r = integrate(s, 0.4, 0.4);
    CHECK(max_abs(r) == 0.0);
}

TEST_CASE("integrate: two-frame step function") {
    FrameStack s;
    s.total_exposure = 1.0;
    s.frames = {Signal::full({4}, 0.0), Signal::full({4}, 1.0)};
    s.tau_grid = {0.0, 0.5};
    Signal r = integrate(s, 0.0, 1.0);
    for (double v : r.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
    Signal o = quadrature_oracle(s, 0.0, 1.0);
    CHECK(max_abs_diff(r, o) == 0.0);
}

TEST_CASE("integrate: rejects bad bounds") {
    FrameStack s = constant_stack(1.0);
    CHECK_THROWS_AS(integrate(s, -0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(integrate(s, 0.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(integrate(s, 0.6, 0.4), std::invalid_argument);
}

TEST_CASE("integrate: adjacent intervals sum to the union") {
    FrameStack s = make_bump_stack(32, 7, 3, 9.0, 11);
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        double a = rng.uniform(0.0, 1.0);
        double c = rng.uniform(0.0, 1.0);
        if (a > c) std::swap(a, c);
        double b = rng.uniform(a, c);
        Signal left = integrate(s, a, b);
        Signal right = integrate(s, b, c);
        Signal whole = integrate(s, a, c);
        CHECK(max_abs_diff(add(left, right), whole) <= 1e-13);
        CHECK(max_abs_diff(whole, quadrature_oracle(s, a, c)) <= 1e-14);
    }
}

TEST_CASE("blur_image") {
    SUBCASE("constant stack is unchanged") {
        FrameStack s = constant_stack(0.42);
        CHECK(max_abs_diff(blur_image(s), Signal::full({8}, 0.42)) <= 1e-15);
    }
    SUBCASE("two-frame step averages to one half") {
        FrameStack s;
        s.total_exposure = 1.0;
        s.frames = {Signal::full({4}, 0.0), Signal::full({4}, 1.0)};
        s.tau_grid = {0.0, 0.5};
        for (double v : blur_image(s).values) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("bump stack: blur equals the interval-weighted frame mean") {
        FrameStack s = make_bump_stack(48, 9, 4, 12.0, 3);
        Signal B = blur_image(s);
        Signal o = scale(quadrature_oracle(s, 0.0, 1.0), 1.0);
        CHECK(max_abs_diff(B, o) <= 1e-14);  // total exposure is 1
        // mean radiance is conserved relative to the weighted frame mean
        double mean_frames = 0.0;
        for (std::size_t k = 0; k < s.frames.size(); ++k) {
            double hi = (k + 1 < s.frames.size()) ? s.tau_grid[k + 1] : 1.0;
            mean_frames += (hi - s.tau_grid[k]) * mean_value(s.frames[k]);
        }
        CHECK(mean_value(B) == doctest::Approx(mean_frames).epsilon(1e-12));
    }
}

TEST_CASE("sharp_image") {
    FrameStack s = constant_stack(0.9);
    SUBCASE("constant stack") {
        CHECK(max_abs_diff(sharp_image(s, 0.3), Signal::full({8}, 0.9)) <= 1e-15);
    }
    SUBCASE("alpha0 = total exposure coincides with blur_image") {
        FrameStack b = make_bump_stack(32, 6, 3, 7.0, 9);
        CHECK(max_abs_diff(sharp_image(b, 1.0), blur_image(b)) <= 1e-15);
    }
    SUBCASE("small alpha0 stays within the first frame") {
        FrameStack b = make_bump_stack(32, 8, 3, 7.0, 9);
        double a0 = 0.5 * b.tau_grid[1];
        CHECK(max_abs_diff(sharp_image(b, a0), b.frames[0]) <= 1e-14);
    }
    SUBCASE("rejects nonpositive alpha0") {
        CHECK_THROWS_AS(sharp_image(s, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(sharp_image(s, -0.5), std::invalid_argument);
    }
}

TEST_CASE("blur_residuals") {
    Schedule sch = default_schedule(5);
    SUBCASE("constant stack residuals are interval lengths times c") {
        FrameStack s = constant_stack(0.6);
        auto e = blur_residuals(s, sch);
        REQUIRE(e.size() == 5);
        for (int t = 1; t <= 5; ++t) {
            double expect = (sch.a(t) - sch.a(t - 1)) * 0.6;
            for (double v : e[static_cast<std::size_t>(t - 1)].values)
                CHECK(v == doctest::Approx(expect).epsilon(1e-13));
        }
    }
    SUBCASE("zero stack: all residuals vanish") {
        FrameStack s = constant_stack(0.0);
        for (const Signal& et : blur_residuals(s, sch)) CHECK(max_abs(et) == 0.0);
    }
    SUBCASE("exposure mismatch is rejected") {
        FrameStack s = constant_stack(0.5);
        s.total_exposure = 2.0;
        CHECK_THROWS_AS(blur_residuals(s, sch), std::invalid_argument);
    }
}

TEST_CASE("exposure identity holds to 1e-12 across the stack/schedule grid") {
    std::vector<FrameStack> stacks;
    for (double v : {0.0, 5.5, 11.0}) {
        stacks.push_back(make_bump_stack(32, 12, 3, v, 17));
        stacks.push_back(make_bump_stack(64, 12, 4, v, 29));
    }
    stacks.push_back(make_texture_stack_2d(8, 8, 10, 0.0, 0.0, 41));
    stacks.push_back(make_texture_stack_2d(8, 8, 10, 2.0, 1.0, 42));
    stacks.push_back(make_texture_stack_2d(6, 10, 10, -3.0, 2.0, 43));

    std::vector<Schedule> schedules = {default_schedule(5), default_schedule(1),
                                       build_schedule(3, 0.0, 0.25, 1.0)};
    for (const auto& stack : stacks)
        for (const auto& sch : schedules) CHECK(identity_error(stack, sch) <= 1e-12);
}

TEST_CASE("make_bump_stack") {
    SUBCASE("zero velocity: static scene, no blur") {
        FrameStack s = make_bump_stack(32, 6, 3, 0.0, 123);
        for (std::size_t k = 1; k < s.frames.size(); ++k)
            CHECK(max_abs_diff(s.frames[0], s.frames[k]) == 0.0);
        CHECK(max_abs_diff(blur_image(s), s.frames[0]) <= 1e-14);
        CHECK(max_abs_diff(sharp_image(s, 0.25), s.frames[0]) <= 1e-14);
    }
    SUBCASE("bump peak translates with the grid") {
        // velocity chosen so each frame shifts by an integer pixel count
        std::size_t len = 40;
        FrameStack s = make_bump_stack(len, 8, 2, 16.0, 7);  // 2 px per frame
        auto argmax = [](const Signal& f) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < f.numel(); ++i)
                if (f.values[i] > f.values[best]) best = i;
            return best;
        };
        std::size_t p0 = argmax(s.frames[0]);
        for (std::size_t k = 1; k < 8; ++k)
            CHECK(argmax(s.frames[k]) == (p0 + 2 * k) % len);
    }
    SUBCASE("identical seeds give bit-identical stacks") {
        FrameStack a = make_bump_stack(32, 6, 3, 8.5, 99);
        FrameStack b = make_bump_stack(32, 6, 3, 8.5, 99);
        for (std::size_t k = 0; k < a.frames.size(); ++k)
            CHECK(a.frames[k].values == b.frames[k].values);
    }
    SUBCASE("degenerate sizes rejected") {
        CHECK_THROWS_AS(make_bump_stack(32, 1, 3, 1.0, 0), std::invalid_argument);
        CHECK_THROWS_AS(make_bump_stack(8, 4, 8, 1.0, 0), std::invalid_argument);
        CHECK_THROWS_AS(make_bump_stack(8, 4, 0, 1.0, 0), std::invalid_argument);
    }
}

TEST_CASE("make_texture_stack_2d") {
    SUBCASE("zero motion means zero blur") {
        FrameStack s = make_texture_stack_2d(8, 8, 6, 0.0, 0.0, 5);
        CHECK(max_abs_diff(blur_image(s), s.frames[0]) <= 1e-14);
    }
    SUBCASE("determinism") {
        FrameStack a = make_texture_stack_2d(8, 8, 6, 1.5, -0.5, 77);
        FrameStack b = make_texture_stack_2d(8, 8, 6, 1.5, -0.5, 77);
        for (std::size_t k = 0; k < a.frames.size(); ++k)
            CHECK(a.frames[k].values == b.frames[k].values);
    }
    SUBCASE("identity") {
        FrameStack s = make_texture_stack_2d(8, 8, 9, 2.0, 1.0, 6);
        CHECK(identity_error(s, default_schedule(4)) <= 1e-12);
    }
}
