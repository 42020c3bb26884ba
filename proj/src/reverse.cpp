#include "blurdm/reverse.hpp"

#include <cmath>
#include <stdexcept>

namespace blurdm {

NoisySample init_terminal(const Signal& B, const Schedule& s, Rng& rng) {
    NoisySample out;
    out.eps = rng.gaussian_signal(B.shape);
    out.value = add_scaled(B, s.bb(s.T), out.eps);
    return out;
}

Signal predict_x0(const Signal& I_t, const Signal& cum_e_hat, const Signal& eps_hat,
                  const Schedule& s, int t) {
    if (t < 1 || t > s.T) throw std::invalid_argument("predict_x0: t out of range");
    require_same_shape(I_t, cum_e_hat, "predict_x0");
    require_same_shape(I_t, eps_hat, "predict_x0");
    double a0 = s.a(0);
    Signal out = scale(I_t, s.a(t) / a0);
    out = add_scaled(out, -1.0 / a0, cum_e_hat);
    out = add_scaled(out, -s.a(t) * s.bb(t) / a0, eps_hat);
    return out;
}

namespace {

Signal apply_reverse_update(const Signal& I_t, const ResidualEstimator::Estimate& est,
                            const Schedule& s, int t, double eta, Rng& rng) {
    require_same_shape(I_t, est.e_hat, "reverse_step");
    require_same_shape(I_t, est.eps_hat, "reverse_step");

    double bb_t = s.bb(t);
    double bb_prev = s.bb(t - 1);
    double sigma = (bb_t > 0.0) ? std::sqrt(eta) * s.b(t) * bb_prev / bb_t : 0.0;
    double dir = std::sqrt(std::max(0.0, bb_prev * bb_prev - sigma * sigma));

    double a_ratio = s.a(t) / s.a(t - 1);
    Signal out = scale(I_t, a_ratio);
    out = add_scaled(out, -1.0 / s.a(t - 1), est.e_hat);
    out = add_scaled(out, -(a_ratio * bb_t - dir), est.eps_hat);
    if (sigma > 0.0) out = add_scaled(out, sigma, rng.gaussian_signal(I_t.shape));
    return out;
}

}  // namespace

Signal reverse_step(const Signal& I_t, const ResidualEstimator& est, const Signal& B,
                    const Schedule& s, int t, double eta, Rng& rng) {
    if (t < 1 || t > s.T) throw std::invalid_argument("reverse_step: t out of range");
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("reverse_step: eta must lie in [0, 1]");
    return apply_reverse_update(I_t, est.estimate(I_t, t, B), s, t, eta, rng);
}

ReverseTrace sample_chain_from(Signal I_T, const ResidualEstimator& est, const Signal& B,
                               const Schedule& s, double eta, Rng& rng) {
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("sample_chain: eta must lie in [0, 1]");
    ReverseTrace trace;
    trace.states.reserve(static_cast<std::size_t>(s.T) + 1);
    trace.steps.reserve(static_cast<std::size_t>(s.T));
    trace.states.push_back(std::move(I_T));
    for (int t = s.T; t >= 1; --t) {
        const Signal& cur = trace.states.back();
        trace.steps.push_back(est.estimate(cur, t, B));
        trace.states.push_back(apply_reverse_update(cur, trace.steps.back(), s, t, eta, rng));
    }
    return trace;
}

ReverseTrace sample_chain(const Signal& B, const ResidualEstimator& est, const Schedule& s,
                          double eta, Rng& rng) {
    return sample_chain_from(init_terminal(B, s, rng).value, est, B, s, eta, rng);
}

OracleEstimator::OracleEstimator(const FrameStack& stack, const Schedule& s, Signal fixed_eps)
    : residuals_(blur_residuals(stack, s)), fixed_eps_(std::move(fixed_eps)) {
    require_same_shape(stack.frames[0], fixed_eps_, "oracle_estimator");
}

ResidualEstimator::Estimate OracleEstimator::estimate(const Signal& I_t, int t,
                                                      const Signal& B) const {
    (void)I_t;
    (void)B;
    if (t < 1 || t > static_cast<int>(residuals_.size()))
        throw std::invalid_argument("oracle_estimator: t out of range");
    return {residuals_[static_cast<std::size_t>(t - 1)], fixed_eps_};
}

OracleEstimator oracle_estimator(const FrameStack& stack, const Schedule& s, Signal fixed_eps) {
    return OracleEstimator(stack, s, std::move(fixed_eps));
}

}  // namespace blurdm
