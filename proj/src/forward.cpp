#include "blurdm/forward.hpp"

#include <stdexcept>

namespace blurdm {

NoisySample forward_step(const Signal& I_prev, const Signal& e_t, const Schedule& s, int t,
                         Rng& rng) {
    if (t < 1 || t > s.T) throw std::invalid_argument("forward_step: t out of range");
    require_same_shape(I_prev, e_t, "forward_step");

    NoisySample out;
    out.eps = rng.gaussian_signal(I_prev.shape);
    out.value = scale(I_prev, s.a(t - 1) / s.a(t));
    out.value = add_scaled(out.value, 1.0 / s.a(t), e_t);
    out.value = add_scaled(out.value, s.b(t), out.eps);
    return out;
}

Signal forward_marginal_mean(const Signal& I0, const std::vector<Signal>& e, const Schedule& s,
                             int t) {
    if (t < 0 || t > s.T) throw std::invalid_argument("forward_marginal_mean: t out of range");
    if (e.size() < static_cast<std::size_t>(t))
        throw std::invalid_argument("forward_marginal_mean: need residuals up to step t");
    Signal mean = scale(I0, s.a(0) / s.a(t));
    for (int i = 1; i <= t; ++i) {
        require_same_shape(I0, e[static_cast<std::size_t>(i - 1)], "forward_marginal_mean");
        mean = add_scaled(mean, 1.0 / s.a(t), e[static_cast<std::size_t>(i - 1)]);
    }
    return mean;
}

NoisySample forward_marginal(const Signal& I0, const std::vector<Signal>& e, const Schedule& s,
                             int t, Rng& rng) {
    NoisySample out;
    out.eps = rng.gaussian_signal(I0.shape);
    out.value = add_scaled(forward_marginal_mean(I0, e, s, t), s.bb(t), out.eps);
    return out;
}

PosteriorParams posterior_params(const Signal& I_t, const Signal& I0,
                                 const std::vector<Signal>& e, const Schedule& s, int t) {
    if (t < 1 || t > s.T) throw std::invalid_argument("posterior_params: t out of range");
    require_same_shape(I_t, I0, "posterior_params");
    if (s.bb(t) == 0.0) throw std::invalid_argument("posterior_params: degenerate posterior");

    Signal prev_mean = forward_marginal_mean(I0, e, s, t - 1);

    PosteriorParams out;
    double bb_prev = s.bb(t - 1);
    double bt = s.b(t);
    out.var = bt * bt * bb_prev * bb_prev / (s.bb(t) * s.bb(t));

    if (bb_prev == 0.0) {
        // point-mass marginal at t-1 pins the posterior to its mean
        out.mean = std::move(prev_mean);
        return out;
    }

    // precision-weighted Gaussian product: likelihood center (I_t - e_t/alpha_t)
    // scaled by alpha_t/alpha_{t-1} with precision (alpha_{t-1}/alpha_t)^2/beta_t^2
    double a_ratio = s.a(t - 1) / s.a(t);
    double w_lik = a_ratio / (bt * bt);                 // alpha_{t-1}/(alpha_t beta_t^2)
    double w_prior = 1.0 / (bb_prev * bb_prev);
    double precision = a_ratio * a_ratio / (bt * bt) + w_prior;

    const Signal& e_t = e[static_cast<std::size_t>(t - 1)];
    out.mean = Signal::zeros(I_t.shape);
    for (std::size_t i = 0; i < out.mean.numel(); ++i) {
        double lik_term = w_lik * (I_t.values[i] - e_t.values[i] / s.a(t));
        double prior_term = w_prior * prev_mean.values[i];
        out.mean.values[i] = (lik_term + prior_term) / precision;
    }
    return out;
}

}  // namespace blurdm
