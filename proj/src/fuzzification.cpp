#include "dfs/fuzzification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dfs/numerics.hpp"

namespace dfs {

namespace {

double distance(const Latent& a, const Latent& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// k-medoids++ seeding: first medoid uniform, then distance-squared sampling.
std::vector<std::size_t> seed_medoids(const std::vector<Latent>& pts,
                                      std::size_t k, RngStream& rng) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> medoids;
    medoids.push_back(static_cast<std::size_t>(rng.next_int(0, n - 1)));
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = distance(pts[i], pts[medoids[0]]);
        d2[i] = d * d;
    }
    while (medoids.size() < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = 0;
        if (total <= 0.0) {
            pick = static_cast<std::size_t>(rng.next_int(0, n - 1));
        } else {
            const double r = rng.next_double() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
        }
        medoids.push_back(pick);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = distance(pts[i], pts[pick]);
            d2[i] = std::min(d2[i], d * d);
        }
    }
    return medoids;
}

double assignment_cost(const std::vector<Latent>& pts,
                       const std::vector<std::size_t>& medoids) {
    double cost = 0.0;
    for (const Latent& p : pts) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t m : medoids) best = std::min(best, distance(p, pts[m]));
        cost += best;
    }
    return cost;
}

}  // namespace

double kmedoids_cost(const std::vector<Latent>& latents,
                     const std::vector<std::size_t>& medoids) {
    return assignment_cost(latents, medoids);
}

std::vector<std::size_t> kmedoids(const std::vector<Latent>& latents,
                                  std::size_t k, RngStream& rng,
                                  std::size_t max_iter, std::size_t restarts) {
    const std::size_t n = latents.size();
    if (n == 0) throw std::invalid_argument("kmedoids: empty input");
    if (k < 1 || k > n)
        throw std::invalid_argument("kmedoids: k outside [1, n]");

    std::vector<std::size_t> best;
    double best_cost = std::numeric_limits<double>::infinity();

    for (std::size_t r = 0; r < restarts; ++r) {
        RngStream restart_rng = rng.fork(r);
        std::vector<std::size_t> medoids = seed_medoids(latents, k, restart_rng);
        std::sort(medoids.begin(), medoids.end());
        double cost = assignment_cost(latents, medoids);

        // Greedy swap: apply the best improving (medoid, point) exchange
        // until no swap improves the cost.
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            double best_delta = -1e-12;
            std::size_t swap_slot = 0, swap_point = 0;
            bool found = false;
            for (std::size_t slot = 0; slot < medoids.size(); ++slot) {
                for (std::size_t p = 0; p < n; ++p) {
                    if (std::find(medoids.begin(), medoids.end(), p) != medoids.end())
                        continue;
                    const std::size_t saved = medoids[slot];
                    medoids[slot] = p;
                    const double c = assignment_cost(latents, medoids);
                    medoids[slot] = saved;
                    const double delta = c - cost;
                    if (delta < best_delta) {
                        best_delta = delta;
                        swap_slot = slot;
                        swap_point = p;
                        found = true;
                    }
                }
            }
            if (!found) break;
            medoids[swap_slot] = swap_point;
            cost += best_delta;
        }

        cost = assignment_cost(latents, medoids);
        std::sort(medoids.begin(), medoids.end());
        if (cost < best_cost) {
            best_cost = cost;
            best = medoids;
        }
    }
    return best;
}

RepresentativeTrajectory build_trajectory(const Latent& d,
                                          const NoiseSchedule& schedule,
                                          TrajectoryMode mode, RngStream& rng,
                                          std::size_t path_id,
                                          int condition_label) {
    RepresentativeTrajectory traj;
    traj.path_id = path_id;
    traj.d = d;
    traj.condition_label = condition_label;
    traj.d_seq.resize(schedule.steps + 1);
    traj.d_seq[0] = d;
    for (std::size_t t = 1; t <= schedule.steps; ++t) {
        const double a = std::sqrt(schedule.alpha_bar_at(t));
        Latent v(d.size());
        if (mode == TrajectoryMode::Mean) {
            for (std::size_t i = 0; i < d.size(); ++i) v[i] = a * d[i];
        } else {
            RngStream step_rng = rng.fork("traj").fork(path_id).fork(t);
            const double b = std::sqrt(1.0 - schedule.alpha_bar_at(t));
            for (std::size_t i = 0; i < d.size(); ++i)
                v[i] = a * d[i] + b * step_rng.next_normal();
        }
        traj.d_seq[t] = std::move(v);
    }
    return traj;
}

double smc(const Latent& z, const Latent& d, const Condition& cond_z,
           const Condition& cond_d, const MembershipParams& params) {
    check_same_shape(z, d, "smc");
    if (params.alpha < 0.0 || params.alpha > 1.0)
        throw std::invalid_argument("smc: alpha outside [0, 1]");
    const double semantic = cosine01(cond_z.embedding, cond_d.embedding);
    const double feature = cosine01(z, d);
    return params.alpha * semantic + (1.0 - params.alpha) * feature;
}

}  // namespace dfs
