#include "microswim/strouhal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "microswim/csv.hpp"
#include "microswim/errors.hpp"
#include "microswim/rng.hpp"

namespace microswim {

double strouhal_bcf(double undulatory_velocity, double speed) {
    if (!(speed > 0.0)) throw DataError("strouhal_bcf: speed must be > 0");
    return undulatory_velocity / (2.0 * speed);
}

namespace {

void check_points(const std::vector<SwimPoint>& points) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].speed > 0.0))
            throw DataError("point " + std::to_string(i) + " ('" + points[i].label +
                            "'): speed must be > 0");
        if (points[i].undulatory_velocity < 0.0)
            throw DataError("point " + std::to_string(i) + " ('" + points[i].label +
                            "'): undulatory_velocity must be >= 0");
    }
}

double origin_slope(const std::vector<SwimPoint>& pts, const std::vector<std::size_t>& idx) {
    double uv = 0.0, uu = 0.0;
    for (std::size_t i : idx) {
        uv += pts[i].speed * pts[i].undulatory_velocity;
        uu += pts[i].speed * pts[i].speed;
    }
    return uv / uu;
}

double total_v_variance(const std::vector<SwimPoint>& pts) {
    double mean = 0.0;
    for (const auto& p : pts) mean += p.undulatory_velocity;
    mean /= static_cast<double>(pts.size());
    double ss = 0.0;
    for (const auto& p : pts) {
        const double d = p.undulatory_velocity - mean;
        ss += d * d;
    }
    return ss;
}

}  // namespace

ProportionalFit fit_proportional(const std::vector<SwimPoint>& points) {
    if (points.empty()) throw DataError("fit_proportional: needs >= 1 point");
    check_points(points);

    std::vector<std::size_t> all(points.size());
    std::iota(all.begin(), all.end(), 0);
    ProportionalFit fit;
    fit.slope = origin_slope(points, all);
    fit.strouhal = fit.slope / 2.0;

    if (points.size() == 1) {
        fit.single_point = true;
        fit.r_squared = 1.0;
        return fit;
    }
    double ss_res = 0.0;
    for (const auto& p : points) {
        const double r = p.undulatory_velocity - fit.slope * p.speed;
        ss_res += r * r;
    }
    const double ss_tot = total_v_variance(points);
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

ClusterResult regression_cluster(const std::vector<SwimPoint>& points, std::size_t k,
                                 std::size_t restarts, std::uint64_t seed) {
    if (k < 1) throw DataError("regression_cluster: k must be >= 1");
    if (points.size() < k) throw DataError("regression_cluster: needs >= k points");
    check_points(points);
    restarts = std::max<std::size_t>(restarts, 1);

    const double ss_tot = std::max(total_v_variance(points), 1e-300);
    const std::size_t n = points.size();

    auto residual2 = [&](std::size_t i, double slope) {
        const double r = points[i].undulatory_velocity - slope * points[i].speed;
        return r * r;
    };

    ClusterResult best;
    best.loss = std::numeric_limits<double>::infinity();

    for (std::size_t restart = 0; restart < restarts; ++restart) {
        Rng rng = Rng::substream(seed, "cluster-restart", restart);
        // seed slopes from k distinct random points' ratios
        std::vector<std::size_t> pick(n);
        std::iota(pick.begin(), pick.end(), 0);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j =
                i + static_cast<std::size_t>(rng.uniform(0.0, 1.0) * static_cast<double>(n - i)) % (n - i);
            std::swap(pick[i], pick[j]);
        }
        std::vector<double> slopes(k);
        for (std::size_t c = 0; c < k; ++c)
            slopes[c] = points[pick[c]].undulatory_velocity / points[pick[c]].speed;

        std::vector<std::size_t> assign(n, 0), prev_assign;
        std::vector<double> history;
        for (int iter = 0; iter < 200; ++iter) {
            // assignment step
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t arg = 0;
                double bestr = residual2(i, slopes[0]);
                for (std::size_t c = 1; c < k; ++c) {
                    const double r = residual2(i, slopes[c]);
                    if (r < bestr) {
                        bestr = r;
                        arg = c;
                    }
                }
                assign[i] = arg;
            }
            // refit step; empty clusters reseed from the worst-fit point
            for (std::size_t c = 0; c < k; ++c) {
                std::vector<std::size_t> members;
                for (std::size_t i = 0; i < n; ++i)
                    if (assign[i] == c) members.push_back(i);
                if (members.empty()) {
                    std::size_t worst = 0;
                    double worst_r = -1.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double r = residual2(i, slopes[assign[i]]);
                        if (r > worst_r) {
                            worst_r = r;
                            worst = i;
                        }
                    }
                    slopes[c] = points[worst].undulatory_velocity / points[worst].speed;
                    assign[worst] = c;
                } else {
                    slopes[c] = origin_slope(points, members);
                }
            }
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double m = residual2(i, slopes[0]);
                for (std::size_t c = 1; c < k; ++c) m = std::min(m, residual2(i, slopes[c]));
                loss += m;
            }
            history.push_back(loss / ss_tot);
            if (assign == prev_assign) break;
            prev_assign = assign;
        }

        const double loss = history.back();
        if (loss < best.loss) {
            best.loss = loss;
            best.slopes = slopes;
            best.assignments = assign;
            best.loss_history = history;
        }
    }

    // present lines in descending slope order
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return best.slopes[a] > best.slopes[b]; });
    std::vector<std::size_t> rank(k);
    for (std::size_t r = 0; r < k; ++r) rank[order[r]] = r;
    std::vector<double> sorted(k);
    for (std::size_t r = 0; r < k; ++r) sorted[r] = best.slopes[order[r]];
    best.slopes = sorted;
    for (auto& a : best.assignments) a = rank[a];
    best.strouhal.clear();
    for (double s : best.slopes) best.strouhal.push_back(s / 2.0);
    return best;
}

SilhouetteResult silhouette_score(const std::vector<SwimPoint>& points,
                                  const ClusterResult& result) {
    const std::size_t n = points.size();
    if (result.assignments.size() != n)
        throw DataError("silhouette_score: assignments do not match points");
    const std::size_t k = result.slopes.size();
    if (k < 2) throw DataError("silhouette_score: undefined for k < 2");
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t a : result.assignments) {
        if (a >= k) throw DataError("silhouette_score: assignment index out of range");
        ++sizes[a];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (sizes[c] == 0) throw DataError("silhouette_score: empty cluster " + std::to_string(c));

    std::vector<double> ratio(n);
    for (std::size_t i = 0; i < n; ++i)
        ratio[i] = points[i].undulatory_velocity / points[i].speed;

    SilhouetteResult out;
    out.scores.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ci = result.assignments[i];
        if (sizes[ci] == 1) {
            out.scores[i] = 0.0;  // singleton convention
            continue;
        }
        std::vector<double> mean_dist(k, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_dist[result.assignments[j]] += std::abs(ratio[i] - ratio[j]);
        }
        const double a = mean_dist[ci] / static_cast<double>(sizes[ci] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == ci) continue;
            b = std::min(b, mean_dist[c] / static_cast<double>(sizes[c]));
        }
        const double denom = std::max(a, b);
        out.scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    out.mean = std::accumulate(out.scores.begin(), out.scores.end(), 0.0) /
               static_cast<double>(n);
    return out;
}

std::vector<SwimPoint> read_swim_points(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    if (table.header.size() < 3 || table.header[0] != "label" || table.header[1] != "speed" ||
        table.header[2] != "undulatory_velocity")
        throw DataError(path.string() + ": expected header label,speed,undulatory_velocity[,group]");
    const bool has_group = table.header.size() >= 4 && table.header[3] == "group";

    std::vector<SwimPoint> pts;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        SwimPoint p;
        p.label = row[0];
        p.speed = parse_double_cell(row[1], path, line);
        p.undulatory_velocity = parse_double_cell(row[2], path, line);
        if (has_group) p.group = row[3];
        if (!(p.speed > 0.0))
            throw DataError(path.string() + ":" + std::to_string(line) + ": speed must be > 0");
        if (p.undulatory_velocity < 0.0)
            throw DataError(path.string() + ":" + std::to_string(line) +
                            ": undulatory_velocity must be >= 0");
        pts.push_back(std::move(p));
    }
    if (pts.empty()) throw DataError(path.string() + ": no data rows");
    return pts;
}

void write_swim_points(const std::vector<SwimPoint>& points,
                       const std::filesystem::path& path) {
    CsvWriter w(path, "microswim.swimmers.v1", {"label", "speed", "undulatory_velocity", "group"});
    for (const auto& p : points)
        w.row_raw({p.label, format_double(p.speed), format_double(p.undulatory_velocity), p.group});
}

}  // namespace microswim
