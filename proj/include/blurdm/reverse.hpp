#pragma once

#include <memory>
#include <vector>

#include "blurdm/exposure.hpp"
#include "blurdm/forward.hpp"
#include "blurdm/rng.hpp"
#include "blurdm/schedule.hpp"
#include "blurdm/signal.hpp"

namespace blurdm {

// Anything that answers (e_hat, eps_hat) for a state I_t at step t
// conditioned on the blurred observation B.
class ResidualEstimator {
  public:
    struct Estimate {
        Signal e_hat;
        Signal eps_hat;
    };

    virtual ~ResidualEstimator() = default;
    virtual Estimate estimate(const Signal& I_t, int t, const Signal& B) const = 0;
};

// Full reverse trajectory: states[0] = I_T down to states[T] = I_0, with the
// estimator outputs used at each step.
struct ReverseTrace {
    std::vector<Signal> states;
    std::vector<ResidualEstimator::Estimate> steps;
};

// Terminal draw I_T ~ N(B, beta_bar_T^2 I).
NoisySample init_terminal(const Signal& B, const Schedule& s, Rng& rng);

// Sharp-image prediction from the state at step t:
//   (alpha_t/alpha_0) I_t - (1/alpha_0) cum_e_hat - (alpha_t/alpha_0) beta_bar_t * eps_hat,
// where cum_e_hat is the accumulated residual estimate sum_{i<=t} e_hat_i.
Signal predict_x0(const Signal& I_t, const Signal& cum_e_hat, const Signal& eps_hat,
                  const Schedule& s, int t);

// One reverse transition. With eta = 0 this is the deterministic update
//   I_{t-1} = c_img I_t - c_blur e_hat - c_noise eps_hat
// (see reverse_coefficients); with eta in (0, 1] it is the implicit sampler
// with per-step noise sigma_t = sqrt(eta) beta_t beta_bar_{t-1} / beta_bar_t
// and direction coefficient sqrt(beta_bar_{t-1}^2 - sigma_t^2). Substituting
// the sharp-image prediction into the sampler cancels every cumulative
// residual term, so only the per-step e_hat survives:
//   I_{t-1} = (alpha_t/alpha_{t-1}) I_t - (1/alpha_{t-1}) e_hat
//             - ((alpha_t/alpha_{t-1}) beta_bar_t - dir) eps_hat + sigma_t z.
Signal reverse_step(const Signal& I_t, const ResidualEstimator& est, const Signal& B,
                    const Schedule& s, int t, double eta, Rng& rng);

// init_terminal followed by reverse_step for t = T..1.
ReverseTrace sample_chain(const Signal& B, const ResidualEstimator& est, const Schedule& s,
                          double eta, Rng& rng);

// Same chain but from a caller-supplied terminal state (the oracle-exactness
// tests need the terminal noise to build the estimator first).
ReverseTrace sample_chain_from(Signal I_T, const ResidualEstimator& est, const Signal& B,
                               const Schedule& s, double eta, Rng& rng);

// Ground-truth instrument: returns the exact residual integrals of the stack
// and a fixed noise signal (the one used to draw I_T), ignoring I_t. With
// eta = 0 the reverse chain driven by this estimator reproduces I_0 exactly.
class OracleEstimator : public ResidualEstimator {
  public:
    OracleEstimator(const FrameStack& stack, const Schedule& s, Signal fixed_eps);
    Estimate estimate(const Signal& I_t, int t, const Signal& B) const override;

  private:
    std::vector<Signal> residuals_;
    Signal fixed_eps_;
};

OracleEstimator oracle_estimator(const FrameStack& stack, const Schedule& s, Signal fixed_eps);

}  // namespace blurdm
