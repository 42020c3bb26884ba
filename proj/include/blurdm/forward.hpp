#pragma once

#include <vector>

#include "blurdm/rng.hpp"
#include "blurdm/schedule.hpp"
#include "blurdm/signal.hpp"

namespace blurdm {

// A Gaussian sample together with the standard-normal draw that produced it.
// The noise is part of the contract: oracle estimators and supervised
// training targets need it back.
struct NoisySample {
    Signal value;
    Signal eps;
};

// One forward transition:
//   I_t = (alpha_{t-1}/alpha_t) I_{t-1} + (1/alpha_t) e_t + beta_t * eps.
NoisySample forward_step(const Signal& I_prev, const Signal& e_t, const Schedule& s, int t,
                         Rng& rng);

// Mean of the t-step marginal, (alpha_0/alpha_t) I_0 + (1/alpha_t) sum_{i<=t} e_i.
Signal forward_marginal_mean(const Signal& I0, const std::vector<Signal>& e, const Schedule& s,
                             int t);

// Single-shot sample of the t-step marginal,
//   N( forward_marginal_mean, beta_bar_t^2 I ).
NoisySample forward_marginal(const Signal& I0, const std::vector<Signal>& e, const Schedule& s,
                             int t, Rng& rng);

struct PosteriorParams {
    Signal mean;
    double var;
};

// Closed-form parameters of q(I_{t-1} | I_t, I_0, e_{1:t}): the
// precision-weighted product of the step-t transition (viewed as a
// likelihood in I_{t-1}) and the (t-1)-step marginal. var is
// beta_t^2 beta_bar_{t-1}^2 / beta_bar_t^2; at t = 1 the marginal is a
// point mass and the posterior degenerates to (marginal mean at 0, var 0).
// Rejects schedules with beta_bar_t == 0 ("degenerate posterior").
PosteriorParams posterior_params(const Signal& I_t, const Signal& I0,
                                 const std::vector<Signal>& e, const Schedule& s, int t);

}  // namespace blurdm
