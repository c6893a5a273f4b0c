#include <algorithm>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "cat0/errors.hpp"
#include "cat0/experiments/sampling.hpp"
#include "cat0/rescaling.hpp"
#include "oracles.hpp"

using namespace cat0;
using experiments::Sampler;
using std::numbers::pi;

namespace {

GeodesicRay planar(double angle) {
    return GeodesicRay::euclidean(Eigen::Vector2d(std::cos(angle), std::sin(angle)));
}

GeodesicRay word_ray(std::vector<EdgeId> head, std::vector<EdgeId> cycle) {
    return GeodesicRay::tree(EdgeWord(std::move(head), std::move(cycle)));
}

Point plane(double x, double y) { return Point(Eigen::Vector2d(x, y).eval()); }

std::vector<SpaceModel> all_models(Sampler& rng) {
    return {SpaceModel::euclidean(2), SpaceModel::tree(experiments::random_tree(rng)),
            SpaceModel::tree(MetricTree::regular(3)), SpaceModel::seaweed(),
            SpaceModel::product(SpaceModel::tree(MetricTree::regular(3)), SpaceModel::euclidean(1))};
}

}  // namespace

TEST_CASE("ray points at rescaled radius") {
    const auto e2 = SpaceModel::euclidean(2);
    CHECK(std::get<Eigen::VectorXd>(psi_eval(e2, 100, 2, planar(0)).value).isApprox(Eigen::Vector2d(200, 0)));
    Sampler rng(1);
    for (const auto& space : all_models(rng)) {
        CHECK(same_point(space, psi_eval(space, 7.0, 0.0, experiments::random_ray(space, rng)), space.basepoint()));
    }
    const auto t2 = SpaceModel::tree(MetricTree::regular(2));
    const EdgeWord word({1, 0}, {1});
    const auto p = std::get<TreePoint>(psi_eval(t2, 8, 0.5, GeodesicRay::tree(word)).value);
    const auto walked = oracles::walk(t2.metric_tree(), word, 4.0);
    CHECK(p.word.size() == walked.word.size());
    CHECK(p.offset == doctest::Approx(walked.offset));
    CHECK_THROWS_AS(psi_eval(e2, 0.0, 1.0, planar(0)), std::invalid_argument);
    CHECK_THROWS_AS(psi_eval(e2, 1.0, -1.0, planar(0)), std::invalid_argument);
}

TEST_CASE("retraction between scales") {
    const auto e2 = SpaceModel::euclidean(2);
    CHECK(std::get<Eigen::VectorXd>(theta_map(e2, 10, 5, plane(10, 0)).value).isApprox(Eigen::Vector2d(5, 0)));
    CHECK(std::get<Eigen::VectorXd>(theta_map(e2, 3, 3, plane(1, 2)).value) == Eigen::Vector2d(1, 2));
    CHECK_THROWS_AS(theta_map(e2, 5, 10, plane(1, 0)), std::invalid_argument);

    Sampler rng(2);
    for (const auto& space : all_models(rng)) {
        for (int k = 0; k < 100; ++k) {
            const Point x = experiments::random_point(space, rng);
            const double s = rng.uniform(1, 1e3), s1 = rng.uniform(0.5, s), s2 = rng.uniform(0.25, s1);
            const Point composed = theta_map(space, s1, s2, theta_map(space, s, s1, x));
            const Point direct = theta_map(space, s, s2, x);
            CHECK(distance(space, composed, direct) <= 1e-12 * std::max(1.0, distance(space, space.basepoint(), x)));
        }
    }
}

TEST_CASE("commutation, Lipschitz bound and radius preservation") {
    Sampler rng(3);
    for (const auto& space : all_models(rng)) {
        CAPTURE(space.name());
        for (int k = 0; k < 200; ++k) {
            const auto ray = experiments::random_ray(space, rng);
            const double s = rng.uniform(1, 1e4), s_lower = rng.uniform(0.5, s), t = rng.uniform(0, 5);
            const Point pushed = theta_map(space, s, s_lower, psi_eval(space, s, t, ray));
            const Point direct = psi_eval(space, s_lower, t, ray);
            CHECK(distance(space, pushed, direct) / s_lower <= 1e-12);

            const Point x = experiments::random_point(space, rng);
            const Point y = experiments::random_point(space, rng);
            const double before = distance(space, x, y) / s;
            const double after = distance(space, theta_map(space, s, s_lower, x), theta_map(space, s, s_lower, y)) / s_lower;
            CHECK(after <= before + 1e-9);
            const double radius = distance(space, space.basepoint(), x) / s;
            CHECK(distance(space, space.basepoint(), theta_map(space, s, s_lower, x)) / s_lower ==
                  doctest::Approx(radius).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("cone distance examples") {
    const auto schedule = doubling_schedule(1.0, 1048576.0);
    const auto e2 = SpaceModel::euclidean(2);
    const auto right = cone_distance_at_scale(e2, {1, planar(0)}, {1, planar(pi / 2)}, schedule);
    for (double v : right.values) {
        CHECK(v == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    }

    const auto t3 = SpaceModel::tree(MetricTree::regular(3));
    const auto tree = cone_distance_at_scale(t3, {1, word_ray({0, 0, 1}, {1})}, {1, word_ray({0, 0, 2}, {2})}, schedule);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        // exact up to the shared prefix 2 measured at scale s
        CHECK(tree.values[i] == doctest::Approx(2.0 - 2.0 * std::min(1.0, 2.0 / schedule[i])).epsilon(1e-12));
    }

    const auto sw = SpaceModel::seaweed();
    const auto wrap = cone_distance_at_scale(sw, {1, GeodesicRay::straight(0)}, {1, GeodesicRay::straight(1)}, schedule);
    CHECK(wrap.value == doctest::Approx(2 * std::sin(0.5)).epsilon(1e-4));
    CHECK(std::abs(wrap.value - cone_metric(1, 1, 1.0)) < 1e-4);
    CHECK_THROWS_AS(cone_distance_at_scale(e2, {1, planar(0)}, {1, planar(1)}, std::vector<double>{}),
                    std::invalid_argument);
}

TEST_CASE("cone distances increase and settle on the cone metric") {
    Sampler rng(4);
    const auto schedule = doubling_schedule(1.0, 1048576.0);
    const std::vector<SpaceModel> models{SpaceModel::euclidean(2), SpaceModel::seaweed(),
                                         SpaceModel::product(SpaceModel::tree(MetricTree::regular(3)),
                                                             SpaceModel::euclidean(1))};
    for (const auto& space : models) {
        CAPTURE(space.name());
        for (int k = 0; k < 40; ++k) {
            const ConePoint a{rng.uniform(0.2, 2), experiments::random_ray(space, rng)};
            const ConePoint b{rng.uniform(0.2, 2), experiments::random_ray(space, rng)};
            const auto est = cone_distance_at_scale(space, a, b, schedule, 1e-4);
            for (std::size_t i = 1; i < est.values.size(); ++i) {
                CHECK(est.values[i] >= est.values[i - 1] - 1e-12 * (1.0 + est.values[i]));
            }
            const double angle = experiments::descriptor_angle(space, a.ray, b.ray);
            CHECK(est.value == doctest::Approx(cone_metric(a, b, angle)).epsilon(2e-4));
            CHECK(inverse_limit_distance(space, a, b, schedule) == doctest::Approx(*std::max_element(est.values.begin(), est.values.end())));
        }
    }
}

TEST_CASE("collapse schedules") {
    const auto e2 = SpaceModel::euclidean(2);
    std::vector<GeodesicRay> family;
    for (int n = 1; n <= 10; ++n) {
        family.push_back(planar(1.0 / n));
    }
    const auto report = collapse_schedule(e2, family, planar(0), 1.0);
    for (int n = 1; n <= 10; ++n) {
        CHECK(report.schedule[n - 1] == doctest::Approx(std::sqrt(1.0 / (2 * std::sin(1.0 / (2 * n))))).epsilon(1e-9));
    }
    CHECK(report.bound_holds);
    CHECK(report.converse_holds);

    const auto t3 = SpaceModel::tree(MetricTree::regular(3));
    std::vector<GeodesicRay> branches;
    for (std::size_t n = 1; n <= 8; ++n) {
        std::vector<EdgeId> head(n, 0);
        head.push_back(1);
        branches.push_back(word_ray(head, {1}));
    }
    const auto tree_report = collapse_schedule(t3, branches, word_ray({}, {0}), 1.0);
    for (std::size_t n = 1; n <= 8; ++n) {
        CHECK(tree_report.schedule[n - 1] == doctest::Approx(std::sqrt(n + 0.5)).epsilon(1e-9));
    }
    CHECK(tree_report.bound_holds);
    CHECK(tree_report.converse_holds);

    const std::vector<GeodesicRay> constant(3, planar(0));
    try {
        collapse_schedule(e2, constant, planar(0), 1.0);
        FAIL("constant family accepted");
    } catch (const ConvergenceError& e) {
        CHECK(e.index() == 1);
    }
    const std::vector<GeodesicRay> receding{planar(0.1), planar(0.5)};
    try {
        collapse_schedule(e2, receding, planar(0), 1.0);
        FAIL("receding family accepted");
    } catch (const ConvergenceError& e) {
        CHECK(e.index() == 2);
    }
}

TEST_CASE("scale sequences") {
    const auto geo = ScaleSequence::geometric(1.0, 2.0);
    CHECK(geo(1) == 1.0);
    CHECK(geo(11) == 1024.0);
    CHECK_THROWS_AS(geo(0), std::out_of_range);
    CHECK_THROWS_AS(ScaleSequence::geometric(1.0, 1.0), std::invalid_argument);
    const auto listed = ScaleSequence::from_values({1, 2, 3});
    CHECK(listed.size() == 3);
    CHECK_THROWS_AS(listed(4), std::out_of_range);

    const ScaleSequence liar([](std::size_t n) { return n < 5 ? double(n * n) : 1.0; },
                             [](std::size_t n) { return double(n); });
    try {
        liar.prefix(10);
        FAIL("certificate not enforced");
    } catch (const ConvergenceError& e) {
        CHECK(e.index() == 5);
    }
}

TEST_CASE("scale lattice examples") {
    const std::vector<ScaleSequence> pair{ScaleSequence::polynomial(1.0), ScaleSequence::polynomial(2.0)};
    const auto bounds = scale_lattice_bounds(pair, 10000);
    for (std::size_t n = 1; n <= 10000; ++n) {
        CHECK(bounds.upper[n - 1] == (n == 1 ? 1.0 : double(n) * n));
    }
    CHECK(bounds.lower.back() <= 10000.0);
    CHECK(bounds.lower.back() > 1000.0);
    CHECK(std::is_sorted(bounds.lower.begin(), bounds.lower.end()));

    const std::vector<ScaleSequence> single{ScaleSequence::polynomial(1.5)};
    const auto same = scale_lattice_bounds(single, 500);
    for (std::size_t n = 1; n <= 500; ++n) {
        CHECK(same.upper[n - 1] == std::pow(double(n), 1.5));
        CHECK(same.lower[n - 1] == std::pow(double(n), 1.5));
    }
}

TEST_CASE("scale lattice contract on random families") {
    Sampler rng(10);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<ScaleSequence> family;
        for (int i = 0; i < 6; ++i) {
            if (rng.chance(0.5)) {
                family.push_back(ScaleSequence::polynomial(rng.uniform(0.3, 2.0), rng.uniform(0.1, 3.0)));
            } else {
                family.push_back(ScaleSequence::geometric(rng.uniform(0.1, 2.0), rng.uniform(1.001, 1.01)));
            }
        }
        const std::size_t length = 3000;
        const auto bounds = scale_lattice_bounds(family, length);
        for (std::size_t n = 1; n <= length; ++n) {
            // membership in A_i recomputed from its definition
            for (std::size_t i = 1; i <= family.size(); ++i) {
                if (i <= n) {
                    CHECK(bounds.upper[n - 1] >= family[i - 1](n));
                }
                bool member = true;
                for (std::size_t j = 1; j <= i; ++j) {
                    member = member && family[j - 1](n) > double(i) - 1.0;
                }
                if (member) {
                    CHECK(bounds.lower[n - 1] <= family[i - 1](n));
                    CHECK(bounds.lower[n - 1] > double(i) - 1.0);
                }
            }
        }
    }
}

TEST_CASE("cut point witness") {
    const auto t3 = SpaceModel::tree(MetricTree::regular(3));
    for (double s : {0.01, 1.0, 1e6}) {
        CHECK(cut_point_witness(t3, word_ray({}, {0}), word_ray({}, {1}), 1.0, s).separated);
    }
    CHECK_THROWS_AS(cut_point_witness(t3, word_ray({}, {0}), word_ray({}, {0}), 1.0, 2.0), PreconditionError);
    for (std::size_t prefix = 1; prefix <= 6; ++prefix) {
        std::vector<EdgeId> head(prefix, 2);
        auto a = head, b = head;
        a.push_back(0);
        b.push_back(1);
        const auto w = cut_point_witness(t3, word_ray(a, {0}), word_ray(b, {1}), 1.0, 2.0 * prefix);
        CHECK(w.separated);
        CHECK(w.branch_depth == double(prefix));
        CHECK_THROWS_AS(cut_point_witness(t3, word_ray(a, {0}), word_ray(b, {1}), 1.0, double(prefix)),
                        PreconditionError);
    }
    CHECK_THROWS_AS(cut_point_witness(SpaceModel::euclidean(2), planar(0), planar(1), 1.0, 1.0), UnsupportedError);
}
