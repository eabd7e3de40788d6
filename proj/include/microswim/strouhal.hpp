#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace microswim {

/// One swimmer datum: forward speed and mean lateral undulatory velocity.
struct SwimPoint {
    std::string label;
    double speed = 0.0;                 ///< U, m/s (> 0)
    double undulatory_velocity = 0.0;   ///< V, m/s (>= 0)
    std::string group;                  ///< optional hint (robot | biological class)
};

/// Undulation-based Strouhal number V / (2 U).
double strouhal_bcf(double undulatory_velocity, double speed);

/// Least-squares fit of V = slope * U through the origin.
struct ProportionalFit {
    double slope = 0.0;
    double r_squared = 0.0;      ///< against the mean-of-V baseline
    double strouhal = 0.0;       ///< slope / 2
    bool single_point = false;   ///< R^2 undefined, reported as 1
};
ProportionalFit fit_proportional(const std::vector<SwimPoint>& points);

/// k origin-constrained regression lines found by alternating assignment
/// and per-cluster refit.
struct ClusterResult {
    std::vector<double> slopes;          ///< descending
    std::vector<double> strouhal;        ///< slope / 2 per line
    std::vector<std::size_t> assignments;
    double loss = 0.0;                   ///< sum min residual^2 / total V variance
    std::vector<double> loss_history;    ///< per iteration of the winning restart
    double silhouette = 0.0;             ///< filled by silhouette_score callers
};
ClusterResult regression_cluster(const std::vector<SwimPoint>& points, std::size_t k,
                                 std::size_t restarts = 20, std::uint64_t seed = 1);

/// Standard silhouette over the per-point ratio feature r = V/U with
/// absolute-difference distance. Requires k >= 2 and no empty cluster.
struct SilhouetteResult {
    std::vector<double> scores;  ///< per point, in [-1, 1]
    double mean = 0.0;
};
SilhouetteResult silhouette_score(const std::vector<SwimPoint>& points,
                                  const ClusterResult& result);

/// CSV schema: label,speed,undulatory_velocity[,group]. Errors carry the
/// offending line number.
std::vector<SwimPoint> read_swim_points(const std::filesystem::path& path);
void write_swim_points(const std::vector<SwimPoint>& points, const std::filesystem::path& path);

}  // namespace microswim
