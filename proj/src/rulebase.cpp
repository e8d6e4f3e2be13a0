#include "dfs/rulebase.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dfs {

namespace {

void check_step(std::size_t t, const NoiseSchedule& s, const char* who,
                std::size_t lo = 1) {
    if (t < lo || t > s.steps)
        throw std::invalid_argument(std::string(who) + ": step " +
                                    std::to_string(t) + " outside [" +
                                    std::to_string(lo) + ", " +
                                    std::to_string(s.steps) + "]");
}

}  // namespace

NoiseSchedule linear_schedule(std::size_t steps, double beta_start, double beta_end) {
    if (steps < 1)
        throw std::invalid_argument("linear_schedule: steps must be >= 1");
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
        throw std::invalid_argument("linear_schedule: need 0 < beta_start <= beta_end < 1");

    NoiseSchedule s;
    s.steps = steps;
    s.beta.resize(steps);
    s.alpha.resize(steps);
    s.alpha_bar.resize(steps);
    double prod = 1.0;
    for (std::size_t t = 1; t <= steps; ++t) {
        const double frac =
            steps == 1 ? 0.0
                       : static_cast<double>(t - 1) / static_cast<double>(steps - 1);
        const double b = beta_start + (beta_end - beta_start) * frac;
        s.beta[t - 1] = b;
        s.alpha[t - 1] = 1.0 - b;
        prod *= 1.0 - b;
        s.alpha_bar[t - 1] = prod;
    }
    return s;
}

Latent forward_gen(const Latent& z_prev, std::size_t t,
                   const NoiseSchedule& schedule, const Latent& eps) {
    check_step(t, schedule, "forward_gen");
    check_same_shape(z_prev, eps, "forward_gen");
    const double a = std::sqrt(1.0 - schedule.beta_at(t));
    const double b = std::sqrt(schedule.beta_at(t));
    Latent out(z_prev.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = a * z_prev[i] + b * eps[i];
    return out;
}

Latent backward_gen(const Latent& z_t, std::size_t t,
                    const NoiseSchedule& schedule, const Latent& eps_hat) {
    check_step(t, schedule, "backward_gen");
    check_same_shape(z_t, eps_hat, "backward_gen");
    const double a = std::sqrt(1.0 - schedule.beta_at(t));
    const double b = std::sqrt(schedule.beta_at(t));
    Latent out(z_t.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (z_t[i] - b * eps_hat[i]) / a;
    return out;
}

Latent backward_posterior(const Latent& z_t, std::size_t t,
                          const NoiseSchedule& schedule, const Latent& eps_hat) {
    check_step(t, schedule, "backward_posterior");
    check_same_shape(z_t, eps_hat, "backward_posterior");
    const double coeff =
        schedule.beta_at(t) / std::sqrt(1.0 - schedule.alpha_bar_at(t));
    const double inv_sqrt_alpha = 1.0 / std::sqrt(schedule.alpha_at(t));
    Latent out(z_t.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = inv_sqrt_alpha * (z_t[i] - coeff * eps_hat[i]);
    return out;
}

Latent forward_marginal(const Latent& z0, std::size_t t,
                        const NoiseSchedule& schedule, const Latent& eps) {
    check_step(t, schedule, "forward_marginal", 0);
    check_same_shape(z0, eps, "forward_marginal");
    if (t == 0) return z0;
    const double a = std::sqrt(schedule.alpha_bar_at(t));
    const double b = std::sqrt(1.0 - schedule.alpha_bar_at(t));
    Latent out(z0.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = a * z0[i] + b * eps[i];
    return out;
}

}  // namespace dfs
