#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include <altmin/core.hpp>
#include <altmin/problems.hpp>

#include "oracles.hpp"

using namespace altmin;
using Catch::Approx;

TEST_CASE("extended reals") {
    ExtReal a(2.5), b(-1.0);
    CHECK((a + b).value() == Approx(1.5));
    CHECK(a.is_finite());

    ExtReal inf = ExtReal::infinity();
    CHECK_FALSE(inf.is_finite());
    CHECK_FALSE((a + inf).is_finite());
    CHECK_FALSE((inf + inf).is_finite());
    CHECK_THROWS_AS(inf.value(), UsageError);
    CHECK(inf.as_double() == std::numeric_limits<double>::infinity());
    CHECK(a.as_double() == 2.5);

    CHECK_THROWS_AS(ExtReal(std::numeric_limits<double>::quiet_NaN()), UsageError);
    CHECK_THROWS_AS(ExtReal(std::numeric_limits<double>::infinity()), UsageError);

    CHECK(a < inf);
    CHECK_FALSE(inf < a);
    CHECK(b < a);
    CHECK(inf == ExtReal::infinity());
}

TEST_CASE("vector helpers") {
    Vec u{3.0, 0.0}, v{0.0, 4.0};
    CHECK(squared_norm(u) == 9.0);
    CHECK(norm(sub(u, v)) == 5.0);
    Point p{{1.0, 2.0}, {3.0}}, q{{1.0, 0.0}, {0.0}};
    CHECK(distance(p, q) == Approx(std::sqrt(4.0 + 9.0)));
    CHECK(max_norm_distance(p, q) == 3.0);
    CHECK(all_finite(p.x));
    Vec bad{std::numeric_limits<double>::quiet_NaN()};
    CHECK_FALSE(all_finite(bad));
}

TEST_CASE("objective evaluation on catalog entries") {
    const auto& baseline = find_entry("baseline_quadratic");
    const auto& ex1 = find_entry("example1");
    const auto& ex4 = find_entry("example4");

    // x^2 + y^2 + (x-y)^2 at (1,1) is 2.
    CHECK(evaluate(baseline.objective, Point{{1.0}, {1.0}}).value() == Approx(2.0));
    CHECK(evaluate(baseline.objective, Point{{0.0}, {0.0}}).value() == 0.0);

    // |x|^{3/2} + x^2 at x = 4 is 8 + 16.
    CHECK(evaluate(ex1.objective, Point{{4.0}, {}}).value() == Approx(24.0));
    CHECK(evaluate(ex4.objective, Point{{0.0}, {0.0}}).value() == 0.0);
    CHECK(evaluate(ex4.objective, Point{{1.0}, {1.0}}).value() == Approx(2.0));

    SECTION("dimension and finiteness guards") {
        CHECK_THROWS_AS(evaluate(baseline.objective, Point{{1.0, 2.0}, {1.0}}), UsageError);
        CHECK_THROWS_AS(evaluate(baseline.objective, Point{{1.0}, {}}), UsageError);
        Point nan_pt{{std::numeric_limits<double>::quiet_NaN()}, {1.0}};
        CHECK_THROWS_AS(evaluate(baseline.objective, nan_pt), UsageError);
    }

    SECTION("evaluation is deterministic") {
        Point p{{0.37}, {-0.81}};
        double v1 = evaluate(ex4.objective, p).value();
        double v2 = evaluate(ex4.objective, p).value();
        CHECK(std::memcmp(&v1, &v2, sizeof(double)) == 0);
    }
}

TEST_CASE("coupling gradients match central differences") {
    std::mt19937_64 rng(31);
    for (const auto& entry : catalog()) {
        const auto& obj = entry.objective;
        if (obj.m == 0) continue;
        std::uniform_real_distribution<double> coord(-1.0, 1.0);
        for (int trial = 0; trial < 25; ++trial) {
            Vec x(obj.n), y(obj.m);
            for (auto& c : x) c = coord(rng);
            for (auto& c : y) c = coord(rng);
            auto [gx, gy] = obj.q_grad(x, y);
            auto [fx, fy] = oracles::central_diff_q(obj.q_eval, x, y);
            for (std::size_t i = 0; i < x.size(); ++i)
                CHECK(gx[i] == Approx(fx[i]).margin(1e-6));
            for (std::size_t i = 0; i < y.size(); ++i)
                CHECK(gy[i] == Approx(fy[i]).margin(1e-6));
        }
    }
}

TEST_CASE("residual formula") {
    const auto& baseline = find_entry("baseline_quadratic");

    SECTION("stationary point gives zero residual") {
        Point z{{0.0}, {0.0}};
        auto r = residual(baseline.objective, z, z, 0.5, 0.5);
        CHECK(r.first[0] == 0.0);
        CHECK(r.second[0] == 0.0);
        CHECK(residual_norm(r) == 0.0);
    }

    SECTION("worked coupled example") {
        // Q = (x-y)^2, prev (1,2), curr (1,3), lambda = mu = 1:
        // x part: dQ/dx(1,3) - dQ/dx(1,2) - 0 = -4 - (-2) = -2
        // y part: -(3-2)/1 = -1
        Point prev{{1.0}, {2.0}}, curr{{1.0}, {3.0}};
        auto r = residual(baseline.objective, prev, curr, 1.0, 1.0);
        CHECK(r.first[0] == Approx(-2.0));
        CHECK(r.second[0] == Approx(-1.0));
        CHECK(residual_norm(r) == Approx(std::sqrt(5.0)));
    }

    SECTION("decoupled objective leaves only step terms") {
        const auto& ex2 = find_entry("example2");
        Point prev{{2.0}, {2.0}}, curr{{1.0}, {1.0}};
        auto r = residual(ex2.objective, prev, curr, 0.5, 0.5);
        CHECK(r.first[0] == Approx(2.0));
        CHECK(r.second[0] == Approx(2.0));
        CHECK(residual_norm(r) == Approx(2.0 * std::sqrt(2.0)));
    }

    SECTION("one-block objective has empty y residual") {
        const auto& ex1 = find_entry("example1");
        Point prev{{1.0}, {}}, curr{{0.5}, {}};
        auto r = residual(ex1.objective, prev, curr, 0.5, 0.5);
        CHECK(r.second.empty());
        CHECK(r.first[0] == Approx(1.0));
    }

    SECTION("nonpositive stepsize rejected") {
        Point z{{0.0}, {0.0}};
        CHECK_THROWS_AS(residual(baseline.objective, z, z, 0.0, 0.5), UsageError);
    }
}

TEST_CASE("stepsize policy bounds") {
    auto ok = StepsizePolicy::constant(0.5, 0.5);
    CHECK(ok.lambda(0) == 0.5);
    CHECK(ok.mu(123) == 0.5);

    auto low = StepsizePolicy::constant(0.05, 0.5);
    CHECK_THROWS_AS(low.lambda(0), UsageError);
    auto high = StepsizePolicy::constant(0.5, 1.0);
    CHECK_THROWS_AS(high.mu(0), UsageError);
    CHECK_THROWS_AS(StepsizePolicy::constant(0.5, 0.5, 0.9, 0.2), UsageError);

    StepsizePolicy varying;
    varying.lambda_seq = [](std::size_t k) { return 0.2 + 0.001 * static_cast<double>(k); };
    varying.mu_seq = [](std::size_t) { return 0.9; };
    CHECK(varying.lambda(10) == Approx(0.21));
    CHECK(varying.mu(5) == 0.9);
}

TEST_CASE("termination reason strings round-trip") {
    for (auto r : {TerminationReason::step_tol, TerminationReason::value_tol,
                   TerminationReason::max_iter, TerminationReason::finite_termination}) {
        CHECK(termination_from_string(to_string(r)) == r);
    }
    CHECK_THROWS_AS(termination_from_string("bogus"), UsageError);
}
