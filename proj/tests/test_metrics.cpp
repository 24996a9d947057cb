#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "support/oracles.hpp"
#include "textchar/error.hpp"
#include "textchar/metrics.hpp"
#include "textchar/simulation.hpp"

using namespace textchar;
using namespace textchar::testing;

namespace {

// (0,0), (1,0), (10,0): weights d^(ln 2) evaluated with mpmath at 40 digits.
EmbeddedCluster three_on_a_line() { return EmbeddedCluster::from_rows({{0, 0}, {1, 0}, {10, 0}}); }
constexpr double kLineStrength[] = {5.9334096679145963015, 5.5859625618919526328, 9.5193722298065489343};
constexpr double kLineNu[] = {0.28202299235606151748, 0.26550836113889841807, 0.45246864650504006445};
constexpr double kLineEntropy = 0.56600357535442416315;
constexpr double kLineHomogeneity = 0.81657055128925044916;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(EmbeddedCluster, RejectsNonFiniteAndRaggedRows) {
    EXPECT_THROW(EmbeddedCluster::from_rows({{1.0, NAN}}), InvalidCluster);
    EXPECT_THROW(EmbeddedCluster::from_rows({{1.0, INFINITY}}), InvalidCluster);
    EXPECT_THROW(EmbeddedCluster::from_rows({{1.0, 2.0}, {1.0}}), InvalidCluster);
    EXPECT_THROW(EmbeddedCluster(2, 2, {1, 2, 3}), InvalidCluster);
}

TEST(AxisStats, TwoPointPopulationStd) {
    const auto stats = axis_stats(EmbeddedCluster::from_rows({{0.0}, {2.0}}));
    EXPECT_EQ(stats.means[0], 1.0);
    EXPECT_EQ(stats.stds[0], 1.0);
    EXPECT_EQ(stats.count, 2u);
}

TEST(AxisStats, SinglePointHasZeroSpread) {
    const auto stats = axis_stats(EmbeddedCluster::from_rows({{3.0, -1.0, 7.5}}));
    for (double s : stats.stds) EXPECT_EQ(s, 0.0);
    const auto sample = axis_stats(EmbeddedCluster::from_rows({{3.0, -1.0}}), StdDivisor::sample);
    for (double s : sample.stds) EXPECT_EQ(s, 0.0);
}

TEST(AxisStats, SampleDivisorSwitch) {
    const auto stats = axis_stats(EmbeddedCluster::from_rows({{0.0}, {2.0}}), StdDivisor::sample);
    EXPECT_DOUBLE_EQ(stats.stds[0], std::sqrt(2.0));
}

TEST(AxisStats, IsotropicBlobMatchesGeneratorStd) {
    BlobSpec spec;
    spec.count = 10000;
    spec.dim = 2;
    spec.seed = 42;
    const auto blob = gaussian_blob(spec);
    const auto stats = axis_stats(blob);
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<double> column;
        for (std::size_t i = 0; i < blob.size(); ++i) column.push_back(blob.row(i)[j]);
        EXPECT_NEAR(stats.stds[j], sample_std_oracle(column), 1e-12);
        EXPECT_NEAR(stats.stds[j], 1.0, 0.03);
    }
}

TEST(Diversity, HandValues) {
    ClusterStats s;
    s.count = 2;
    s.stds = {1.0, 1.0};
    EXPECT_DOUBLE_EQ(diversity(s), 1.0);
    s.stds = {2.0, 8.0};
    EXPECT_DOUBLE_EQ(diversity(s), 4.0);
    s.stds = {1.0, 0.0};
    EXPECT_EQ(diversity(s), 0.0);
}

TEST(Density, UnitVolumeInOneDimension) {
    const auto d = density(axis_stats(EmbeddedCluster::from_rows({{-1.0}, {1.0}})));
    EXPECT_DOUBLE_EQ(d.density, 2.0);
    EXPECT_DOUBLE_EQ(d.density_log, std::log(2.0));
    EXPECT_EQ(d.degenerate_axes, 0u);
}

TEST(Density, SymmetricPointsGiveExactStd) {
    // 50 points at +2 and 50 at -2 on every axis: population std exactly 2.
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 100; ++i) rows.push_back(std::vector<double>(4, i % 2 == 0 ? 2.0 : -2.0));
    const auto stats = axis_stats(EmbeddedCluster::from_rows(rows));
    for (double s : stats.stds) EXPECT_EQ(s, 2.0);
    const double oracle = 100.0 / std::pow(2.0 * 2.0 * 2.0 * 2.0, 1.0 / std::sqrt(4.0));
    EXPECT_NEAR(density(stats).density, oracle, 1e-12);
    EXPECT_NEAR(density(stats).density, 25.0, 1e-12);
}

TEST(Density, DuplicationDoublesDensity) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = random_cluster(gen, 5 + trial, 1 + trial % 6);
        const auto doubled = c.concat(c);
        const auto a = density(axis_stats(c));
        const auto b = density(axis_stats(doubled));
        EXPECT_NEAR(b.density / a.density, 2.0, 1e-12);
    }
}

TEST(Density, FloorsZeroAxes) {
    const auto d = density(axis_stats(EmbeddedCluster::from_rows({{1.0, 5.0}, {3.0, 5.0}})));
    EXPECT_EQ(d.degenerate_axes, 1u);
    EXPECT_TRUE(std::isfinite(d.density));
    EXPECT_NEAR(d.density_log, std::log(2.0) - std::log(1e-12) / std::sqrt(2.0), 1e-12);
    ClusterStats s;
    s.count = 4;
    s.stds = {0.0, 0.0};
    EXPECT_EQ(density(s, 1e-3).degenerate_axes, 2u);
}

TEST(PairwiseWeight, HandValues) {
    const std::vector<double> a{0.0, 0.0}, b{3.0, 4.0}, c{1.0, 0.0};
    EXPECT_EQ(pairwise_weight(a, a, 2), 0.0);
    EXPECT_DOUBLE_EQ(pairwise_weight(a, c, 2), 1.0);
    EXPECT_NEAR(pairwise_weight(a, b, 2), 3.0513293596658087677, 1e-13);
    EXPECT_EQ(pairwise_weight(a, a, 1), 0.0);
}

TEST(StationaryDistribution, SymmetricConfigurations) {
    const auto tri = stationary_distribution(equilateral_triangle());
    for (double v : tri) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
    const auto two = stationary_distribution(EmbeddedCluster::from_rows({{0.0, 1.0}, {4.0, -2.0}}));
    EXPECT_NEAR(two[0], 0.5, 1e-15);
    EXPECT_NEAR(two[1], 0.5, 1e-15);
}

TEST(StationaryDistribution, ThreePointsOnALine) {
    const auto nu = stationary_distribution(three_on_a_line());
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(nu[i], kLineNu[i], 1e-14);
    const double total = kLineStrength[0] + kLineStrength[1] + kLineStrength[2];
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(nu[i], kLineStrength[i] / total, 1e-14);
    const auto oracle = power_iteration(transition_matrix(to_rows(three_on_a_line())), 10000);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(nu[i], oracle[i], 1e-10);
}

TEST(StationaryDistribution, AllCoincidentIsDegenerate) {
    EXPECT_THROW(stationary_distribution(EmbeddedCluster::from_rows({{1, 1}, {1, 1}, {1, 1}})), DegenerateCluster);
    EXPECT_THROW(stationary_distribution(EmbeddedCluster::from_rows({{1, 1}})), TooFewSamples);
}

TEST(EntropyRate, UniformTriangle) {
    const auto chain = entropy_rate(equilateral_triangle());
    EXPECT_NEAR(chain.entropy_rate, std::log(2.0), 1e-15);
    EXPECT_NEAR(chain.upper_bound, std::log(2.0), 1e-15);
}

TEST(EntropyRate, TwoPointsAreDeterministic) {
    const auto chain = entropy_rate(EmbeddedCluster::from_rows({{0.0}, {3.0}}));
    EXPECT_NEAR(chain.entropy_rate, 0.0, 1e-15);
    EXPECT_EQ(chain.upper_bound, 0.0);
}

TEST(EntropyRate, MatchesBruteForceMatrix) {
    const auto chain = entropy_rate(three_on_a_line());
    EXPECT_NEAR(chain.entropy_rate, kLineEntropy, 1e-14);
    EXPECT_NEAR(chain.entropy_rate, brute_entropy(to_rows(three_on_a_line())).entropy, 1e-12);
}

TEST(EntropyRate, PointCoincidentWithAllOthersIsDegenerate) {
    // Points 0 and 1 coincide but 2 is distinct, so every row still has weight.
    EXPECT_NO_THROW(entropy_rate(EmbeddedCluster::from_rows({{0, 0}, {0, 0}, {1, 1}})));
    EXPECT_THROW(entropy_rate(EmbeddedCluster::from_rows({{2, 2}, {2, 2}})), DegenerateCluster);
}

TEST(Homogeneity, RegularSimplicesAttainTheBound) {
    EXPECT_NEAR(homogeneity(equilateral_triangle()), 1.0, 1e-12);
    for (std::size_t m : {3u, 4u, 5u}) {
        const auto s = simplex(m);
        EXPECT_EQ(s.dim(), m - 1);
        EXPECT_NEAR(homogeneity(s), 1.0, 1e-12) << "m = " << m;
    }
}

TEST(Homogeneity, ThreePointsOnALineBelowOne) {
    const double h = homogeneity(three_on_a_line());
    EXPECT_NEAR(h, kLineHomogeneity, 1e-14);
    EXPECT_LT(h, 1.0);
}

TEST(Homogeneity, TooFewSamples) {
    EXPECT_THROW(homogeneity(EmbeddedCluster::from_rows({{0.0}, {1.0}})), TooFewSamples);
}

TEST(Homogeneity, StableAcrossWorkerCounts) {
    std::mt19937_64 gen(5);
    const auto c = random_cluster(gen, 301, 7);
    const auto one = entropy_rate(c, 1);
    for (std::size_t w : {2u, 3u, 8u}) {
        const auto many = entropy_rate(c, w);
        EXPECT_NEAR(many.entropy_rate, one.entropy_rate, 1e-12);
        EXPECT_EQ(entropy_rate(c, w).entropy_rate, many.entropy_rate) << "bitwise repeatable at " << w;
        for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(many.stationary[i], one.stationary[i], 1e-15);
    }
}

TEST(Homogeneity, WorkersFromEnvironment) {
    ::setenv("TEXTCHAR_THREADS", "3", 1);
    std::mt19937_64 gen(9);
    const auto c = random_cluster(gen, 40, 3);
    const double env = homogeneity(c, 0);
    ::unsetenv("TEXTCHAR_THREADS");
    EXPECT_NEAR(env, homogeneity(c, 1), 1e-12);
}

TEST(Homogeneity, LargeScaleDoesNotOverflow) {
    std::mt19937_64 gen(3);
    const auto c = random_cluster(gen, 50, 768);
    const double base = homogeneity(c);
    EXPECT_NEAR(homogeneity(affine(c, 1e6, 0.0)), base, 1e-9);
    EXPECT_NEAR(homogeneity(affine(c, 1e-6, 0.0)), base, 1e-9);
}

TEST(TransitionRow, RowsAreStochastic) {
    std::mt19937_64 gen(21);
    const auto c = random_cluster(gen, 30, 4);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto row = transition_row(c, i);
        double s = 0.0;
        for (double p : row) s += p;
        EXPECT_NEAR(s, 1.0, 1e-12);
        EXPECT_EQ(row[i], 0.0);
    }
}

TEST(MetricReport, SinglePointTakesEveryDegeneratePath) {
    const auto r = metric_report(EmbeddedCluster::from_rows({{1.0, 2.0, 3.0}}));
    EXPECT_EQ(r.diversity, 0.0);
    EXPECT_EQ(r.degenerate_axes, 3u);
    EXPECT_FALSE(r.homogeneity.has_value());
    ASSERT_TRUE(r.homogeneity_skipped_reason.has_value());
    EXPECT_NE(r.homogeneity_skipped_reason->find("too few"), std::string::npos);
    EXPECT_TRUE(std::isfinite(r.density));
}

TEST(MetricReport, EquilateralTriangle) {
    const auto r = metric_report(equilateral_triangle());
    ASSERT_TRUE(r.homogeneity.has_value());
    EXPECT_NEAR(*r.homogeneity, 1.0, 1e-12);
    EXPECT_NEAR(r.density_log, std::log(r.density), 1e-12);
}

TEST(MetricReport, DegenerateClusterIsRecordedNotThrown) {
    const auto r = metric_report(EmbeddedCluster::from_rows({{1, 1}, {1, 1}, {1, 1}}));
    EXPECT_FALSE(r.homogeneity.has_value());
    ASSERT_TRUE(r.homogeneity_skipped_reason.has_value());
    EXPECT_NE(r.homogeneity_skipped_reason->find("degenerate"), std::string::npos);
}

TEST(MetricReport, OneDimensionCarriesANote) {
    const auto r = metric_report(EmbeddedCluster::from_rows({{0.0}, {1.0}, {5.0}, {6.0}}));
    ASSERT_TRUE(r.homogeneity.has_value());
    EXPECT_NEAR(*r.homogeneity, 1.0, 1e-12);
    ASSERT_FALSE(r.notes.empty());
    EXPECT_NE(r.notes.front().find("H = 1"), std::string::npos);
}

TEST(MetricReport, HighDimensionalBlobDiversity) {
    BlobSpec spec;
    spec.count = 10000;
    spec.dim = 768;
    spec.seed = 42;
    MetricOptions opts;
    opts.compute_homogeneity = false;
    const auto r = metric_report(gaussian_blob(spec), opts);
    EXPECT_NEAR(r.diversity, 1.0, 0.03);
    EXPECT_EQ(r.homogeneity_skipped_reason.value(), "homogeneity disabled");
}

// Property suite over random clusters.

TEST(MetricProperties, ScaleAndTranslation) {
    std::mt19937_64 gen(1234);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t m = 3 + trial % 40;
        const std::size_t dim = 1 + trial % 9;
        const auto c = random_cluster(gen, m, dim);
        const double a = 0.1 + 0.2 * trial;
        const auto base = metric_report(c);
        const auto scaled = metric_report(affine(c, a, 0.0));
        const auto shifted = metric_report(affine(c, 1.0, 17.25));
        EXPECT_LT(rel(scaled.diversity, a * base.diversity), 1e-9);
        EXPECT_LT(rel(shifted.diversity, base.diversity), 1e-9);
        EXPECT_LT(rel(shifted.density, base.density), 1e-9);
        ASSERT_TRUE(base.homogeneity && scaled.homogeneity && shifted.homogeneity);
        EXPECT_NEAR(*scaled.homogeneity, *base.homogeneity, 1e-9);
        EXPECT_NEAR(*shifted.homogeneity, *base.homogeneity, 1e-9);
    }
}

TEST(MetricProperties, RotationInvarianceOfHomogeneity) {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t dim = 2 + trial % 6;
        const auto c = random_cluster(gen, 10 + trial, dim);
        const auto q = random_orthogonal(gen, dim);
        EXPECT_NEAR(homogeneity(transform(c, q)), homogeneity(c), 1e-9);
    }
}

TEST(MetricProperties, HomogeneityRangeFuzz) {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<std::size_t> msize(3, 60), dsize(1, 12);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto c = random_cluster(gen, msize(gen), dsize(gen));
        const double h = homogeneity(c, 1);
        EXPECT_GE(h, 0.0);
        EXPECT_LE(h, 1.0 + 1e-9);
    }
}

TEST(MetricProperties, LogBaseIndependence) {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pts = to_rows(random_cluster(gen, 4 + trial, 3));
        const auto nats = brute_entropy(pts);
        const auto bits = brute_entropy(pts, 2.0);
        const double h = homogeneity(EmbeddedCluster::from_rows(pts));
        EXPECT_NEAR(bits.entropy / bits.upper_bound, nats.entropy / nats.upper_bound, 1e-12);
        EXPECT_NEAR(h, bits.entropy / bits.upper_bound, 1e-12);
    }
}
