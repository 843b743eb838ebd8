#include "npuf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "npuf/errors.hpp"
#include "npuf/seeding.hpp"

namespace npuf {

double hamming_frac(const BitVector& a, const BitVector& b) {
    if (a.size() != b.size()) throw InputError("keys differ in length");
    if (a.empty()) throw InputError("empty keys");
    return static_cast<double>(a.hamming(b)) / static_cast<double>(a.size());
}

HammingStats summarize(const std::vector<double>& samples, double bin_width) {
    HammingStats s;
    s.count = samples.size();
    s.bin_width = bin_width;
    s.histogram.assign(static_cast<std::size_t>(std::ceil(1.0 / bin_width)) + 1, 0);
    if (samples.empty()) return s;
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    double ss = 0.0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.std = samples.size() > 1 ? std::sqrt(ss / static_cast<double>(samples.size() - 1)) : 0.0;
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    s.min = *lo;
    s.max = *hi;
    for (double v : samples) {
        auto b = static_cast<std::size_t>(std::floor(v / bin_width + 1e-9));
        s.histogram[std::min(b, s.histogram.size() - 1)]++;
    }
    return s;
}

std::vector<double> pairwise_distances(const std::vector<BitVector>& keys, std::size_t max_pairs, std::uint64_t seed) {
    const std::size_t k = keys.size();
    if (k < 2) throw InputError("need at least two keys for pairwise statistics");
    const std::size_t total = k * (k - 1) / 2;
    std::vector<double> out;
    if (total <= max_pairs) {
        out.reserve(total);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) out.push_back(hamming_frac(keys[i], keys[j]));
        return out;
    }
    Rng rng(derive_seed(seed, "pair-subsample"));
    std::uniform_int_distribution<std::size_t> first(0, k - 1), second(0, k - 2);
    out.reserve(max_pairs);
    for (std::size_t p = 0; p < max_pairs; ++p) {
        const std::size_t i = first(rng);
        std::size_t j = second(rng);
        if (j >= i) ++j;
        out.push_back(hamming_frac(keys[i], keys[j]));
    }
    return out;
}

double normal_q(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

EerReport eer_fit(const HammingStats& intra, const HammingStats& inter) {
    EerReport r;
    r.intra = intra;
    r.inter = inter;
    const double mi = intra.mean, si = intra.std, me = inter.mean, se = inter.std;
    if (!(si > 0) || !(se > 0)) {
        r.degenerate = true;
        r.threshold = 0.5 * (mi + me);
        r.eer = mi == me ? 0.5 : 0.0;
    } else {
        r.threshold = (mi * se + me * si) / (si + se);
        r.eer = normal_q((r.threshold - mi) / si);
    }
    const std::size_t n = std::min(intra.count, inter.count);
    r.below_resolution = n > 0 && r.eer < 1.0 / static_cast<double>(n);
    return r;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("spearman needs two equal series of length >= 2");
    const auto rx = ranks(x), ry = ranks(y);
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::uint64_t intra_challenge_seed(std::uint64_t master) { return derive_seed(master, "intra-challenge"); }
std::uint64_t intra_noise_seed(std::uint64_t master, std::size_t trial) { return derive_seed(master, "intra-noise", trial); }
std::uint64_t inter_challenge_seed(std::uint64_t master, std::size_t i) { return derive_seed(master, "inter-challenge", i); }
std::uint64_t inter_noise_seed(std::uint64_t master, std::size_t i) { return derive_seed(master, "inter-noise", i); }

std::vector<WeightSet> collect_weights(const ResponseEngine& engine, const std::vector<int>& adc_bits,
                                       const SweepBudget& budget) {
    const std::uint64_t ms = budget.master_seed;
    const std::size_t nc = budget.calibration_crps, ni = budget.inter_challenges, nr = budget.intra_trials;
    std::vector<WeightSet> out(adc_bits.size());
    for (std::size_t b = 0; b < adc_bits.size(); ++b) {
        out[b].adc_bits = adc_bits[b];
        out[b].calibration.resize(nc);
        out[b].inter.resize(ni);
        out[b].intra.resize(nr);
        out[b].inter_nmse.resize(ni);
        out[b].intra_nmse.resize(nr);
    }
    // calibration and inter items each need their own analog pass
    parallel_for(nc + ni, budget.jobs, [&](std::size_t item) {
        const bool cal = item < nc;
        const std::size_t i = cal ? item : item - nc;
        const Challenge ch = engine.challenge(cal ? derive_seed(ms, "calibration-challenge", i) : inter_challenge_seed(ms, i));
        const std::uint64_t noise = cal ? derive_seed(ms, "calibration-noise", i) : inter_noise_seed(ms, i);
        const Eigen::MatrixXd a = engine.analog(ch);
        for (std::size_t b = 0; b < adc_bits.size(); ++b) {
            Response r = engine.train(ch, a, noise, adc_bits[b]);
            if (cal) {
                out[b].calibration[i] = std::move(r.weights);
            } else {
                out[b].inter_nmse[i] = r.nmse;
                out[b].inter[i] = std::move(r.weights);
            }
        }
    });
    const Challenge ch = engine.challenge(intra_challenge_seed(ms));
    const Eigen::MatrixXd a = engine.analog(ch);
    parallel_for(nr, budget.jobs, [&](std::size_t t) {
        for (std::size_t b = 0; b < adc_bits.size(); ++b) {
            Response r = engine.train(ch, a, intra_noise_seed(ms, t), adc_bits[b]);
            out[b].intra_nmse[t] = r.nmse;
            out[b].intra[t] = std::move(r.weights);
        }
    });
    return out;
}

std::vector<BinaryKey> keys_for(const std::vector<Eigen::VectorXd>& weights, const CalibrationProfile& profile) {
    std::vector<BinaryKey> keys;
    keys.reserve(weights.size());
    for (const auto& w : weights) keys.push_back(derive_key(w, profile));
    return keys;
}

namespace {

std::vector<BitVector> bit_views(const std::vector<BinaryKey>& keys) {
    std::vector<BitVector> v;
    v.reserve(keys.size());
    for (const auto& k : keys) v.push_back(k.bits);
    return v;
}

}  // namespace

HammingStats collect_intra(const std::vector<BinaryKey>& keys, std::size_t max_pairs, std::uint64_t seed) {
    return summarize(pairwise_distances(bit_views(keys), max_pairs, derive_seed(seed, "intra-pairs")));
}

HammingStats collect_inter(const std::vector<BinaryKey>& keys, std::size_t max_pairs, std::uint64_t seed) {
    return summarize(pairwise_distances(bit_views(keys), max_pairs, derive_seed(seed, "inter-pairs")));
}

HammingStats collect_intra(const ResponseEngine& engine, const Challenge& ch, std::size_t trials,
                           const CalibrationProfile& profile, std::uint64_t master_seed, unsigned jobs) {
    if (trials < 2) throw ConfigError("intra statistics need at least two trials");
    const Eigen::MatrixXd a = engine.analog(ch);
    std::vector<BinaryKey> keys(trials);
    parallel_for(trials, jobs, [&](std::size_t t) {
        const Response r = engine.train(ch, a, intra_noise_seed(master_seed, t), engine.config().detection.adc_bits);
        keys[t] = derive_key(r.weights, profile);
    });
    return collect_intra(keys, 1000000, master_seed);
}

HammingStats collect_inter(const ResponseEngine& engine, const std::vector<std::uint64_t>& challenge_seeds,
                           const CalibrationProfile& profile, std::uint64_t master_seed, unsigned jobs) {
    if (challenge_seeds.size() < 2) throw ConfigError("inter statistics need at least two challenges");
    std::vector<BinaryKey> keys(challenge_seeds.size());
    parallel_for(keys.size(), jobs, [&](std::size_t i) {
        const Response r = engine.respond(engine.challenge(challenge_seeds[i]), inter_noise_seed(master_seed, i));
        keys[i] = derive_key(r.weights, profile);
    });
    return collect_inter(keys, 1000000, master_seed);
}

CellResult evaluate_cell(const WeightSet& ws, int n_bit, Encoding encoding, CalibrationMode mode,
                         const SweepBudget& budget) {
    const CalibrationProfile profile = calibrate(ws.calibration, n_bit, encoding, mode);
    const auto intra_keys = keys_for(ws.intra, profile);
    const auto inter_keys = keys_for(ws.inter, profile);
    CellResult c;
    c.m_bit = ws.adc_bits;
    c.n_bit = n_bit;
    c.key_bits = inter_keys.empty() ? 0 : inter_keys.front().size();
    c.report = eer_fit(collect_intra(intra_keys, budget.max_pairs, budget.master_seed),
                       collect_inter(inter_keys, budget.max_pairs, budget.master_seed));
    if (!ws.inter_nmse.empty())
        c.mean_nmse = std::accumulate(ws.inter_nmse.begin(), ws.inter_nmse.end(), 0.0) /
                      static_cast<double>(ws.inter_nmse.size());
    c.feasible = ws.adc_bits <= 10;
    return c;
}

std::vector<CellResult> sweep_bit_grid(const ResponseEngine& engine, const std::vector<int>& m_bits,
                                       const std::vector<int>& n_bits, const SweepBudget& budget, Encoding encoding,
                                       CalibrationMode mode) {
    for (int m : m_bits)
        if (m < 1 || m > 16) throw ConfigError("m_bit must lie in [1, 16]");
    for (int n : n_bits)
        if (n < 1 || n > 16) throw ConfigError("n_bit must lie in [1, 16]");
    const auto sets = collect_weights(engine, m_bits, budget);
    std::vector<CellResult> cells;
    for (const auto& ws : sets)
        for (int n : n_bits) cells.push_back(evaluate_cell(ws, n, encoding, mode, budget));
    return cells;
}

std::vector<MrrCountRow> sweep_mrr_count(const NominalConfig& nominal, std::uint64_t fab_seed,
                                         const PipelineConfig& cfg, const std::vector<int>& counts, int m_bit,
                                         int n_bit, const SweepBudget& budget, Encoding encoding) {
    std::vector<MrrCountRow> rows;
    for (int count : counts) {
        if (count < 1) throw ConfigError("MRR count must be positive");
        NominalConfig nc = nominal;
        nc.mrrs_per_node = count;
        DeviceProfile dev = fabricate(nc, fab_seed);
        calibrate_device_adc(dev, cfg);
        const ResponseEngine engine(std::move(dev), cfg);
        const auto sets = collect_weights(engine, {m_bit}, budget);
        rows.push_back({count, nc.channels(), evaluate_cell(sets.front(), n_bit, encoding, CalibrationMode::Pooled, budget)});
    }
    return rows;
}

}  // namespace npuf
