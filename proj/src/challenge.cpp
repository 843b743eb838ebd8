#include "npuf/challenge.hpp"

#include <cmath>
#include <string>

#include "npuf/errors.hpp"
#include "npuf/seeding.hpp"

namespace npuf {

void NarmaParams::validate() const {
    if (m < 1) throw ConfigError("NARMA order must be at least 1");
    if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(b) || !std::isfinite(c))
        throw ConfigError("NARMA coefficients must be finite");
    if (!(divergence_bound > 0)) throw ConfigError("divergence bound must be positive");
}

std::vector<double> Challenge::modulator_input() const {
    std::vector<double> out(x_in.size());
    for (std::size_t i = 0; i < x_in.size(); ++i) out[i] = (x_in[i] - input_lo) / (input_hi - input_lo);
    return out;
}

std::vector<double> gen_input(std::uint64_t seed, std::size_t n, double lo, double hi) {
    if (n < 1) throw ConfigError("input length must be positive");
    if (!(lo < hi)) throw ConfigError("input range needs lo < hi");
    Rng rng(derive_seed(seed, "challenge-input"));
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    return x;
}

std::vector<double> narma_target(const std::vector<double>& x, const NarmaParams& p) {
    p.validate();
    const std::size_t n = x.size();
    const auto m = static_cast<std::size_t>(p.m);
    std::vector<double> y(n, 0.0);
    double window = 0.0;  // sum of y[t-1] .. y[t-m]
    for (std::size_t t = 0; t < n; ++t) {
        if (!std::isfinite(x[t])) throw InputError("non-finite NARMA input at index " + std::to_string(t));
        const double prev = t >= 1 ? y[t - 1] : 0.0;
        const double lagged = t + 1 >= m ? x[t + 1 - m] : 0.0;
        y[t] = p.a1 * prev + p.a2 * prev * window + p.b * lagged * x[t] + p.c;
        if (!std::isfinite(y[t]) || std::abs(y[t]) > p.divergence_bound) throw DivergenceError("NARMA series diverged", t);
        window += y[t];
        if (t >= m) window -= y[t - m];
    }
    return y;
}

Challenge make_challenge(std::uint64_t seed, const NarmaParams& params, const ChallengeConfig& cfg) {
    if (cfg.length < static_cast<std::size_t>(params.m) + 1) throw ConfigError("challenge length must exceed NARMA order");
    Challenge ch;
    ch.seed = seed;
    ch.input_lo = cfg.input_lo;
    ch.input_hi = cfg.input_hi;
    std::uint64_t sub = seed;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) sub = derive_seed(seed, "challenge-retry", static_cast<std::uint64_t>(attempt));
        auto x = gen_input(sub, cfg.length, cfg.input_lo, cfg.input_hi);
        try {
            ch.y_out = narma_target(x, params);
        } catch (const DivergenceError&) {
            continue;
        }
        ch.x_in = std::move(x);
        ch.sub_seed = sub;
        ch.retries = attempt;
        return ch;
    }
    throw NumericalError("challenge generation failed: retry budget exhausted for seed " + std::to_string(seed));
}

}  // namespace npuf
