#include "microswim/ephe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "microswim/csv.hpp"
#include "microswim/errors.hpp"
#include "microswim/rng.hpp"

namespace microswim {

namespace {
constexpr double kTauFloor = 1e-3;     // s
constexpr double kRewardFloor = 1e-6;  // m/s
}  // namespace

void PolicyDistribution::validate() const {
    if (mu.empty() || mu.size() != sigma.size())
        throw DataError("PolicyDistribution: mu and sigma must be non-empty and equal length");
    for (double s : sigma)
        if (!(s >= 0.0)) throw DataError("PolicyDistribution: sigma must be >= 0");
}

std::vector<std::vector<double>> sample_policies(const PolicyDistribution& dist,
                                                 std::size_t count, std::uint64_t seed) {
    dist.validate();
    if (count < 1) throw DataError("sample_policies: count must be >= 1");
    Rng rng = Rng::substream(seed, "policy-samples");
    std::vector<std::vector<double>> out(count);
    for (std::size_t m = 0; m < count; ++m) {
        auto& v = out[m];
        v.resize(dist.dim());
        for (std::size_t i = 0; i < dist.dim(); ++i) v[i] = rng.normal(dist.mu[i], dist.sigma[i]);
        // component 0 is tau; redraw while non-physical
        for (int attempt = 0; v[0] <= kTauFloor && attempt < 100; ++attempt)
            v[0] = rng.normal(dist.mu[0], dist.sigma[0]);
        if (v[0] <= kTauFloor) v[0] = kTauFloor;
    }
    return out;
}

PolicyDistribution ephe_update(const std::vector<std::vector<double>>& samples,
                               const std::vector<double>& rewards, std::size_t elites) {
    if (samples.empty() || samples.size() != rewards.size())
        throw DataError("ephe_update: samples and rewards must be non-empty and equal length");
    if (elites < 1 || elites > samples.size())
        throw DataError("ephe_update: elites must satisfy 1 <= K <= sample count");
    for (double r : rewards)
        if (!(r > 0.0) || !std::isfinite(r))
            throw DataError("ephe_update: rewards must be positive and finite");
    const std::size_t dim = samples.front().size();
    for (const auto& s : samples)
        if (s.size() != dim) throw DataError("ephe_update: inconsistent sample dimension");

    // K best, ties broken by lower sample index
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rewards[a] > rewards[b]; });
    order.resize(elites);

    // The update is degree-0 homogeneous in the rewards. Working with the
    // ratios R_k/R_best keeps the output bit-identical when the caller hands
    // in an exactly rescaled reward vector (the common scale cancels before
    // any rounding can differ).
    const double r_best = rewards[order.front()];
    std::vector<double> w(elites);
    double w_sum = 0.0;
    for (std::size_t k = 0; k < elites; ++k) {
        w[k] = rewards[order[k]] / r_best;
        w_sum += w[k];
    }

    PolicyDistribution out;
    out.mu.assign(dim, 0.0);
    out.sigma.assign(dim, 0.0);
    for (std::size_t k = 0; k < elites; ++k)
        for (std::size_t i = 0; i < dim; ++i) out.mu[i] += w[k] * samples[order[k]][i];
    for (std::size_t i = 0; i < dim; ++i) out.mu[i] /= w_sum;
    for (std::size_t k = 0; k < elites; ++k)
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = samples[order[k]][i] - out.mu[i];
            out.sigma[i] += w[k] * d * d;
        }
    for (std::size_t i = 0; i < dim; ++i) out.sigma[i] = std::sqrt(out.sigma[i] / w_sum);
    return out;
}

double episode_reward(const Trajectory& traj, Task task, bool* fallback_flagged) {
    SteadyWindow w;
    try {
        w = steady_window(traj, 1.0);
    } catch (const DataError&) {
        throw DataError("episode_reward: trajectory too short for a 1 s steady window");
    }
    if (w.fallback && fallback_flagged) *fallback_flagged = true;

    // task-signed centroid displacement over the window, per second
    double x0 = 0.0, x1 = 0.0;
    const std::size_t m = traj.marker_count();
    for (std::size_t i = 0; i < m; ++i) {
        x0 += traj.marker_x[i][w.begin_frame];
        x1 += traj.marker_x[i][w.end_frame];
    }
    x0 /= static_cast<double>(m);
    x1 /= static_cast<double>(m);
    const double duration = traj.time[w.end_frame] - traj.time[w.begin_frame];
    double speed = (x1 - x0) / duration;
    if (task == Task::Backward) speed = -speed;
    return std::max(speed, kRewardFloor);
}

LearningTrace run_learning(const RewardFn& reward, const LearnConfig& config,
                           const PolicyDistribution& initial) {
    initial.validate();
    if (config.elites < 1 || config.elites > config.samples)
        throw DataError("run_learning: need 1 <= K <= M");

    LearningTrace trace;
    PolicyDistribution dist = initial;
    std::vector<double> best_speeds;

    for (std::size_t ep = 0; ep < config.max_episodes; ++ep) {
        EpisodeRecord rec;
        rec.episode = ep;
        rec.samples =
            sample_policies(dist, config.samples, Rng::substream(config.seed, "episode", ep).next_u64());
        rec.rewards.assign(config.samples, 0.0);

        const int jobs = std::max(1, config.jobs);
        if (jobs == 1) {
            for (std::size_t m = 0; m < config.samples; ++m)
                rec.rewards[m] = reward(rec.samples[m], ep * config.samples + m);
        } else {
            // rollouts are independent; results land at their sample index
            std::vector<std::thread> pool;
            std::atomic<std::size_t> next{0};
            std::vector<std::exception_ptr> errors(jobs);
            for (int t = 0; t < jobs; ++t) {
                pool.emplace_back([&, t] {
                    try {
                        for (;;) {
                            const std::size_t m = next.fetch_add(1);
                            if (m >= config.samples) break;
                            rec.rewards[m] = reward(rec.samples[m], ep * config.samples + m);
                        }
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }

        for (double r : rec.rewards)
            if (!(r > 0.0))
                throw DataError("run_learning: environment returned a non-positive reward");

        rec.best_index = 0;
        for (std::size_t m = 1; m < config.samples; ++m)
            if (rec.rewards[m] > rec.rewards[rec.best_index]) rec.best_index = m;
        rec.best_speed = rec.rewards[rec.best_index];
        rec.mean_reward = std::accumulate(rec.rewards.begin(), rec.rewards.end(), 0.0) /
                          static_cast<double>(config.samples);

        dist = ephe_update(rec.samples, rec.rewards, config.elites);
        rec.updated = dist;
        best_speeds.push_back(rec.best_speed);
        trace.best_policy = rec.samples[rec.best_index];
        trace.episodes.push_back(std::move(rec));

        // settled when the best speed moved < threshold between each of the
        // last `window` successive episodes
        const int win = std::max(2, config.convergence_window);
        if (static_cast<int>(best_speeds.size()) >= win) {
            bool settled = true;
            for (int k = 0; k + 1 < win; ++k) {
                const std::size_t i = best_speeds.size() - 1 - k;
                if (std::abs(best_speeds[i] - best_speeds[i - 1]) >= config.convergence_threshold)
                    settled = false;
            }
            if (settled) {
                trace.converged = true;
                break;
            }
        }
    }
    trace.final_distribution = dist;
    return trace;
}

CpgParams params_from_policy(std::span<const double> policy, std::size_t n_modules,
                             const CpgParams& base) {
    if (policy.size() != 2 * n_modules)
        throw DataError("params_from_policy: expected dimension 2n = " +
                        std::to_string(2 * n_modules));
    CpgParams p = base;
    p.n = n_modules;
    p.beta.resize(n_modules);
    p.stimulus.resize(n_modules);
    p.tau = std::max(policy[0], kTauFloor);
    p.beta[0] = base.beta.empty() ? 2.5 : base.beta.front();  // beta_1 stays fixed
    for (std::size_t i = 1; i < n_modules; ++i) p.beta[i] = std::max(0.0, policy[i]);
    for (std::size_t i = 0; i < n_modules; ++i)
        p.stimulus[i] = std::max(0.0, policy[n_modules + i]);
    return p;
}

LearningTrace run_learning(const RobotDesign& design, const LearnConfig& config,
                           const PolicyDistribution& initial, const SimConfig& sim_config) {
    const CpgParams base = CpgParams::defaults(design.dof);
    auto reward = [&](std::span<const double> policy, std::uint64_t rollout_id) {
        const CpgParams params = params_from_policy(policy, design.dof, base);
        const std::uint64_t rollout_seed =
            Rng::substream(config.seed, "rollout", rollout_id).next_u64();
        Trajectory traj = simulate(design, params, config.episode_duration, config.sim_dt,
                                   rollout_seed, sim_config);
        return episode_reward(traj, config.task);
    };
    return run_learning(reward, config, initial);
}

PolicyDistribution initial_distribution(std::size_t n_modules, double target_frequency,
                                        double sigma_scale) {
    CpgParams base = CpgParams::defaults(n_modules);
    const double tau = calibrate_tau(base, target_frequency);
    PolicyDistribution d;
    d.mu.push_back(tau);
    for (std::size_t i = 1; i < n_modules; ++i) d.mu.push_back(base.beta[i]);
    for (std::size_t i = 0; i < n_modules; ++i) d.mu.push_back(base.stimulus[i]);
    for (double m : d.mu) d.sigma.push_back(sigma_scale * std::abs(m));
    return d;
}

void default_population(std::size_t dof, std::size_t& samples, std::size_t& elites) {
    if (dof >= 6) {
        samples = 16;
        elites = 6;
    } else {
        samples = 10;
        elites = 5;
    }
}

void write_learning_trace_csv(const LearningTrace& trace, const std::filesystem::path& path) {
    if (trace.episodes.empty()) throw DataError("write_learning_trace_csv: empty trace");
    const std::size_t dim = trace.episodes.front().updated.dim();
    std::vector<std::string> cols{"episode", "best_reward", "mean_reward"};
    for (std::size_t i = 0; i < dim; ++i) cols.push_back("mu" + std::to_string(i));
    for (std::size_t i = 0; i < dim; ++i) cols.push_back("sigma" + std::to_string(i));

    CsvWriter w(path, "microswim.learning_trace.v1", cols);
    for (const auto& ep : trace.episodes) {
        std::vector<double> row{static_cast<double>(ep.episode), ep.best_speed, ep.mean_reward};
        row.insert(row.end(), ep.updated.mu.begin(), ep.updated.mu.end());
        row.insert(row.end(), ep.updated.sigma.begin(), ep.updated.sigma.end());
        w.row(row);
    }
}

}  // namespace microswim
