#include "doctest.h"

#include <cmath>
#include <set>

#include "npuf/challenge.hpp"
#include "npuf/errors.hpp"

using namespace npuf;

namespace {

// Stable root of y = a1 y + a2 m y^2 + b x^2 + c for constant input x.
double fixed_point(const NarmaParams& p, double x) {
    const double qa = p.a2 * p.m, qb = p.a1 - 1.0, qc = p.b * x * x + p.c;
    return (-qb - std::sqrt(qb * qb - 4 * qa * qc)) / (2 * qa);
}

// Direct transcription of the recursion with explicit history sums.
std::vector<double> narma_naive(const std::vector<double>& x, const NarmaParams& p) {
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double prev = t ? y[t - 1] : 0.0;
        double sum = 0;
        for (int i = 1; i <= p.m; ++i)
            if (static_cast<long>(t) - i >= 0) sum += y[t - i];
        const long lag = static_cast<long>(t) - p.m + 1;
        y[t] = p.a1 * prev + p.a2 * prev * sum + p.b * (lag >= 0 ? x[lag] : 0.0) * x[t] + p.c;
    }
    return y;
}

}  // namespace

TEST_CASE("gen_input: range, mean and determinism") {
    const auto x = gen_input(17, 200000, 0.0, 0.5);
    double sum = 0;
    for (double v : x) {
        CHECK(v >= 0.0);
        CHECK(v < 0.5);
        sum += v;
    }
    CHECK(sum / x.size() == doctest::Approx(0.25).epsilon(0.02));
    CHECK(std::abs(sum / x.size() - 0.25) <= 0.005);
    CHECK(gen_input(17, 100, 0, 0.5) == gen_input(17, 100, 0, 0.5));
    CHECK(gen_input(17, 100, 0, 0.5) != gen_input(18, 100, 0, 0.5));
    CHECK_THROWS_AS(gen_input(1, 0, 0, 1), ConfigError);
    CHECK_THROWS_AS(gen_input(1, 10, 1, 1), ConfigError);
}

TEST_CASE("narma_target matches the naive recursion") {
    const NarmaParams p;
    const auto x = gen_input(3, 2000, 0.0, 0.5);
    const auto a = narma_target(x, p), b = narma_target(x, p);
    const auto ref = narma_naive(x, p);
    for (std::size_t t = 0; t < x.size(); ++t) CHECK(a[t] == doctest::Approx(ref[t]).epsilon(1e-12));
    CHECK(a == b);
}

TEST_CASE("narma_target: constant inputs converge to the fixed point") {
    const NarmaParams p;
    for (double xv : {0.0, 0.25}) {
        const auto y = narma_target(std::vector<double>(3000, xv), p);
        CHECK(y.back() == doctest::Approx(fixed_point(p, xv)).epsilon(1e-9));
    }
    CHECK(fixed_point(p, 0.0) == doctest::Approx(0.16148).epsilon(1e-4));
}

TEST_CASE("narma_target: zero input and zero offset stay at zero") {
    NarmaParams p;
    p.c = 0;
    for (double v : narma_target(std::vector<double>(500, 0.0), p)) CHECK(v == 0.0);
}

TEST_CASE("narma_target: divergence is detected with its index") {
    NarmaParams p;
    p.a2 = 1.0;
    const auto x = gen_input(9, 500, 0.0, 0.5);
    try {
        narma_target(x, p);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.index() < 500);
    }
    std::vector<double> bad(20, 0.1);
    bad[5] = std::nan("");
    CHECK_THROWS_AS(narma_target(bad, NarmaParams{}), InputError);
    p = NarmaParams{};
    p.m = 0;
    CHECK_THROWS_AS(narma_target(x, p), ConfigError);
}

TEST_CASE("make_challenge: stability and uniqueness over 1000 seeds") {
    std::set<std::vector<double>> seen;
    int stable = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto ch = make_challenge(s);
        CHECK(ch.x_in.size() == 2000);
        CHECK(ch.y_out.size() == 2000);
        for (double v : ch.y_out) CHECK(std::isfinite(v));
        stable += ch.retries == 0;
        seen.insert(ch.x_in);
    }
    CHECK(stable >= 990);
    CHECK(seen.size() == 1000);
}

TEST_CASE("make_challenge: pure function of its inputs") {
    const auto a = make_challenge(77), b = make_challenge(77);
    CHECK(a.x_in == b.x_in);
    CHECK(a.y_out == b.y_out);
    const auto mod = a.modulator_input();
    for (std::size_t i = 0; i < mod.size(); ++i) CHECK(mod[i] == doctest::Approx(a.x_in[i] * 2));
}

TEST_CASE("make_challenge: exhausted retries and short lengths") {
    NarmaParams p;
    p.a2 = 5.0;
    ChallengeConfig cfg;
    cfg.max_retries = 3;
    CHECK_THROWS_AS(make_challenge(1, p, cfg), NumericalError);
    cfg = ChallengeConfig{};
    cfg.length = 10;
    CHECK_THROWS_AS(make_challenge(1, NarmaParams{}, cfg), ConfigError);
}
