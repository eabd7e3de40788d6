#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "microswim/cpg.hpp"
#include "microswim/gait.hpp"
#include "microswim/robot.hpp"
#include "microswim/sim.hpp"

namespace microswim {

/// Search distribution over the learned parameter vector
/// v = [tau, beta_2..beta_n, E_1..E_n] (componentwise independent normals).
struct PolicyDistribution {
    std::vector<double> mu;
    std::vector<double> sigma;  ///< componentwise >= 0

    void validate() const;
    std::size_t dim() const { return mu.size(); }
};

enum class Task { Forward, Backward };

struct LearnConfig {
    std::size_t samples = 10;            ///< M rollouts per episode
    std::size_t elites = 5;              ///< K best kept for the update
    Task task = Task::Forward;
    double episode_duration = 8.0;       ///< s simulated per rollout
    double sim_dt = 1e-3;                ///< s
    int convergence_window = 3;          ///< successive episodes
    double convergence_threshold = 2e-3; ///< m/s change considered settled
    std::size_t max_episodes = 100;
    std::uint64_t seed = 1;
    int jobs = 1;                        ///< parallel rollouts (aggregation by index)
};

struct EpisodeRecord {
    std::size_t episode = 0;
    std::vector<std::vector<double>> samples;
    std::vector<double> rewards;
    PolicyDistribution updated;
    double best_speed = 0.0;   ///< reward of the episode's best rollout, m/s
    double mean_reward = 0.0;
    std::size_t best_index = 0;
};

struct LearningTrace {
    std::vector<EpisodeRecord> episodes;
    PolicyDistribution final_distribution;
    std::vector<double> best_policy;  ///< elite of the last episode
    bool converged = false;
};

/// Draws M parameter vectors from the distribution. The first component is
/// the sampled tau and is redrawn while <= 1 ms. Deterministic given seed.
std::vector<std::vector<double>> sample_policies(const PolicyDistribution& dist,
                                                 std::size_t count, std::uint64_t seed);

/// Reward-weighted elite update: keeps the K highest-reward samples (ties
/// broken toward the lower sample index), sets mu to their reward-weighted
/// mean and sigma to the reward-weighted standard deviation about the new
/// mu. All rewards must be > 0.
PolicyDistribution ephe_update(const std::vector<std::vector<double>>& samples,
                               const std::vector<double>& rewards, std::size_t elites);

/// Task-signed centroid speed over the steady 1 s window, floored at
/// 1e-6 m/s. Falls back to the final second (flag set) when the trajectory
/// never settles.
double episode_reward(const Trajectory& traj, Task task, bool* fallback_flagged = nullptr);

/// Generic episodic loop over an arbitrary reward function (rollout index
/// passed for seed bookkeeping in simulator-backed environments).
using RewardFn = std::function<double(std::span<const double> policy, std::uint64_t rollout_id)>;
LearningTrace run_learning(const RewardFn& reward, const LearnConfig& config,
                           const PolicyDistribution& initial);

/// Simulator-backed learning on a design.
LearningTrace run_learning(const RobotDesign& design, const LearnConfig& config,
                           const PolicyDistribution& initial, const SimConfig& sim_config = {});

/// Maps a sampled vector onto network parameters for a design
/// (negative sampled beta/E are clamped to zero; tau to 1 ms).
CpgParams params_from_policy(std::span<const double> policy, std::size_t n_modules,
                             const CpgParams& base);

/// Starting distribution: defaults with tau calibrated near the target
/// frequency, sigma = sigma_scale * |mu| per component.
PolicyDistribution initial_distribution(std::size_t n_modules, double target_frequency = 4.0,
                                        double sigma_scale = 0.3);

/// M/K defaults that scale with the parameter dimension.
void default_population(std::size_t dof, std::size_t& samples, std::size_t& elites);

void write_learning_trace_csv(const LearningTrace& trace, const std::filesystem::path& path);

}  // namespace microswim
