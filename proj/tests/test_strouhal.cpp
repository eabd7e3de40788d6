#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "microswim/errors.hpp"
#include "microswim/rng.hpp"
#include "microswim/strouhal.hpp"

using namespace microswim;

namespace {

std::vector<SwimPoint> two_class_fixture(double noise, std::uint64_t seed, std::size_t per_class,
                                         std::vector<std::size_t>* truth = nullptr) {
    // slopes are twice the class Strouhal numbers 0.186 and 0.066
    const double slopes[2] = {0.372, 0.132};
    Rng rng(seed);
    std::vector<SwimPoint> pts;
    for (int cls = 0; cls < 2; ++cls) {
        for (std::size_t i = 0; i < per_class; ++i) {
            SwimPoint p;
            p.label = (cls == 0 ? "slow_stu_" : "fast_stu_") + std::to_string(i);
            p.group = cls == 0 ? "slow" : "fast";
            p.speed = rng.uniform(0.1, 2.0);
            p.undulatory_velocity =
                slopes[cls] * p.speed * (1.0 + (noise > 0.0 ? rng.normal(0.0, noise) : 0.0));
            if (p.undulatory_velocity < 0.0) p.undulatory_velocity = 0.0;
            pts.push_back(p);
            if (truth) truth->push_back(static_cast<std::size_t>(cls));
        }
    }
    return pts;
}

}  // namespace

TEST_SUITE("strouhal") {

TEST_CASE("St_BCF definition and unit invariance") {
    CHECK(strouhal_bcf(0.0, 1.0) == 0.0);
    CHECK(strouhal_bcf(0.2, 0.549) == doctest::Approx(0.182).epsilon(2e-3));
    CHECK_THROWS_AS(strouhal_bcf(0.1, 0.0), DataError);
    // common rescaling of both velocities cancels
    CHECK(strouhal_bcf(0.2, 0.5) == doctest::Approx(strouhal_bcf(200.0, 500.0)).epsilon(1e-15));
}

TEST_CASE("flapping-plate identity: strouhal_bcf(4Af, U) = 2fA/U") {
    const double A = 0.01, f = 5.0, U = 0.5;
    const double vbar = 4.0 * A * f;
    CHECK(strouhal_bcf(vbar, U) == doctest::Approx(f * 2.0 * A / U).epsilon(1e-12));
    CHECK(strouhal_bcf(vbar, U) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("noiseless proportional fit recovers the slope with R^2 = 1") {
    std::vector<SwimPoint> pts;
    for (double u : {0.2, 0.5, 0.9, 1.4}) pts.push_back({"p", u, 0.364 * u, ""});
    const ProportionalFit fit = fit_proportional(pts);
    CHECK(fit.slope == doctest::Approx(0.364).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.strouhal == doctest::Approx(0.182).epsilon(1e-12));
}

TEST_CASE("single point: slope is the ratio, flagged") {
    const ProportionalFit fit = fit_proportional({{"only", 0.5, 0.2, ""}});
    CHECK(fit.slope == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(fit.single_point);
    CHECK(fit.r_squared == 1.0);
}

TEST_CASE("5% multiplicative noise keeps the slope within 2%") {
    Rng rng(31);
    std::vector<SwimPoint> pts;
    for (int i = 0; i < 50; ++i) {
        const double u = rng.uniform(0.2, 1.5);
        pts.push_back({"n", u, 0.364 * u * (1.0 + rng.normal(0.0, 0.05)), ""});
    }
    const ProportionalFit fit = fit_proportional(pts);
    CHECK(fit.slope == doctest::Approx(0.364).epsilon(0.02));
}

TEST_CASE("fit rejects empty and non-positive speeds") {
    CHECK_THROWS_AS(fit_proportional({}), DataError);
    CHECK_THROWS_AS(fit_proportional({{"bad", -0.1, 0.2, ""}}), DataError);
}

TEST_CASE("slope equivariance: scaling V scales the slope") {
    std::vector<SwimPoint> pts;
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        const double u = rng.uniform(0.1, 2.0);
        pts.push_back({"e", u, 0.3 * u + 0.01 * rng.normal(0.0, 1.0), ""});
    }
    const double s1 = fit_proportional(pts).slope;
    for (auto& p : pts) p.undulatory_velocity *= 3.0;
    CHECK(fit_proportional(pts).slope == doctest::Approx(3.0 * s1).epsilon(1e-12));
}

TEST_CASE("noiseless two-line fixture is recovered exactly") {
    const auto pts = two_class_fixture(0.0, 1, 20);
    const ClusterResult r = regression_cluster(pts, 2, 10, 7);
    CHECK(r.slopes[0] == doctest::Approx(0.372).epsilon(1e-9));
    CHECK(r.slopes[1] == doctest::Approx(0.132).epsilon(1e-9));
    CHECK(r.strouhal[0] == doctest::Approx(0.186).epsilon(1e-9));
    CHECK(r.strouhal[1] == doctest::Approx(0.066).epsilon(1e-9));
    CHECK(r.loss < 1e-18);
}

TEST_CASE("k = 1 reduces to the proportional fit") {
    const auto pts = two_class_fixture(0.05, 3, 15);
    const ClusterResult r = regression_cluster(pts, 1, 5, 1);
    const ProportionalFit fit = fit_proportional(pts);
    CHECK(r.slopes.size() == 1);
    CHECK(r.slopes[0] == doctest::Approx(fit.slope).epsilon(1e-12));
}

TEST_CASE("noisy fixture: slopes within 3%, assignments >= 98% correct") {
    std::vector<std::size_t> truth;
    const auto pts = two_class_fixture(0.05, 5, 40, &truth);
    const ClusterResult r = regression_cluster(pts, 2, 20, 11);
    CHECK(r.slopes[0] == doctest::Approx(0.372).epsilon(0.03));
    CHECK(r.slopes[1] == doctest::Approx(0.132).epsilon(0.03));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (r.assignments[i] == truth[i]) ++correct;
    CHECK(static_cast<double>(correct) / static_cast<double>(pts.size()) >= 0.98);
}

TEST_CASE("per-iteration loss is non-increasing") {
    const auto pts = two_class_fixture(0.08, 9, 30);
    const ClusterResult r = regression_cluster(pts, 2, 20, 13);
    REQUIRE(r.loss_history.size() >= 2);
    for (std::size_t i = 1; i < r.loss_history.size(); ++i)
        CHECK(r.loss_history[i] <= r.loss_history[i - 1] + 1e-15);
}

TEST_CASE("point order permutation leaves the converged result unchanged") {
    const auto pts = two_class_fixture(0.05, 21, 25);
    std::vector<SwimPoint> shuffled = pts;
    Rng rng(77);
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1],
                  shuffled[static_cast<std::size_t>(rng.uniform(0.0, 1.0) * i) % i]);
    const ClusterResult a = regression_cluster(pts, 2, 20, 3);
    const ClusterResult b = regression_cluster(shuffled, 2, 20, 3);
    CHECK(a.slopes[0] == doctest::Approx(b.slopes[0]).epsilon(1e-9));
    CHECK(a.slopes[1] == doctest::Approx(b.slopes[1]).epsilon(1e-9));
}

TEST_CASE("silhouette: separated groups score high, boundary point scores ~0") {
    const auto pts = two_class_fixture(0.01, 2, 10);
    const ClusterResult r = regression_cluster(pts, 2, 10, 2);
    const SilhouetteResult s = silhouette_score(pts, r);
    CHECK(s.mean > 0.9);

    // a point exactly between the two clusters' ratio means
    std::vector<SwimPoint> with_mid = pts;
    const double mid_ratio = 0.5 * (0.372 + 0.132);
    with_mid.push_back({"mid", 1.0, mid_ratio, ""});
    ClusterResult r2 = regression_cluster(with_mid, 2, 10, 2);
    const SilhouetteResult s2 = silhouette_score(with_mid, r2);
    CHECK(std::abs(s2.scores.back()) < 0.25);
}

TEST_CASE("silhouette of duplicates approaches 1 as separation grows") {
    std::vector<SwimPoint> pts;
    for (int i = 0; i < 4; ++i) pts.push_back({"a", 1.0, 0.1, ""});
    for (int i = 0; i < 4; ++i) pts.push_back({"b", 1.0, 2.0, ""});
    ClusterResult r;
    r.slopes = {2.0, 0.1};
    r.strouhal = {1.0, 0.05};
    r.assignments = {1, 1, 1, 1, 0, 0, 0, 0};
    const SilhouetteResult s = silhouette_score(pts, r);
    for (double v : s.scores) CHECK(v > 0.99);
}

TEST_CASE("silhouette rejects k = 1 and empty clusters") {
    const auto pts = two_class_fixture(0.0, 1, 5);
    ClusterResult r1 = regression_cluster(pts, 1, 5, 1);
    CHECK_THROWS_AS(silhouette_score(pts, r1), DataError);
}

TEST_CASE("swim point CSV: round trip and line-numbered errors") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path();
    const auto good = dir / "msw_points_good.csv";
    {
        std::ofstream out(good);
        out << "label,speed,undulatory_velocity,group\n";
        out << "a,0.5,0.2,robot\n";
        out << "b,1.0,0.3,fish\n";
    }
    const auto pts = read_swim_points(good);
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].group == "fish");

    const auto bad = dir / "msw_points_bad.csv";
    {
        std::ofstream out(bad);
        out << "label,speed,undulatory_velocity\n";
        out << "a,0.5,0.2\n";
        out << "b,oops,0.3\n";
    }
    CHECK_THROWS_WITH_AS(read_swim_points(bad), doctest::Contains(":3"), DataError);
    fs::remove(good);
    fs::remove(bad);
}

}  // TEST_SUITE
