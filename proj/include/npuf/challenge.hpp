#pragma once

#include <cstdint>
#include <vector>

namespace npuf {

struct NarmaParams {
    double a1 = 0.3;
    double a2 = 0.05;
    double b = 1.5;
    double c = 0.1;
    int m = 10;
    double divergence_bound = 10.0;

    void validate() const;
};

struct ChallengeConfig {
    std::size_t length = 2000;
    double input_lo = 0.0;   // range driving the recursion
    double input_hi = 0.5;
    int max_retries = 32;
};

struct Challenge {
    std::uint64_t seed = 0;
    std::uint64_t sub_seed = 0;  // seed actually used after divergence retries
    int retries = 0;
    std::vector<double> x_in;
    std::vector<double> y_out;
    double input_lo = 0.0, input_hi = 0.5;

    std::size_t length() const { return x_in.size(); }
    // x_in mapped affinely onto [0, 1] for the modulator.
    std::vector<double> modulator_input() const;
};

std::vector<double> gen_input(std::uint64_t seed, std::size_t n, double lo, double hi);

// y[t] = a1 y[t-1] + a2 y[t-1] sum_{i=1..m} y[t-i] + b x[t-m+1] x[t] + c, zero history.
// y[t] is the first output that depends on x[t]. Throws DivergenceError past the bound.
std::vector<double> narma_target(const std::vector<double>& x, const NarmaParams& params);

Challenge make_challenge(std::uint64_t seed, const NarmaParams& params = {}, const ChallengeConfig& cfg = {});

}  // namespace npuf
