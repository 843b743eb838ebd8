#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "npuf/bits.hpp"
#include "npuf/keygen.hpp"

namespace npuf {

struct HammingStats {
    double mean = 0.0;
    double std = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
    double bin_width = 0.01;
    std::vector<std::size_t> histogram;  // bins of bin_width starting at 0
};

struct EerReport {
    HammingStats intra, inter;
    double threshold = 0.0;
    double eer = 0.0;
    bool degenerate = false;        // a class had zero spread
    bool below_resolution = false;  // eer smaller than 1/(samples) so only the fit supports it
};

double hamming_frac(const BitVector& a, const BitVector& b);
inline double hamming_frac(const BinaryKey& a, const BinaryKey& b) { return hamming_frac(a.bits, b.bits); }

HammingStats summarize(const std::vector<double>& samples, double bin_width = 0.01);
// All pairs up to max_pairs, otherwise uniformly subsampled pairs with a fixed seed.
std::vector<double> pairwise_distances(const std::vector<BitVector>& keys, std::size_t max_pairs = 1000000,
                                       std::uint64_t seed = 0);

double normal_q(double z);
EerReport eer_fit(const HammingStats& intra, const HammingStats& inter);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Seed schedule for one evaluation: everything derives from master_seed.
struct SweepBudget {
    std::size_t calibration_crps = 200;
    std::size_t inter_challenges = 200;
    std::size_t intra_trials = 50;
    std::size_t max_pairs = 1000000;
    std::uint64_t master_seed = 1;
    unsigned jobs = 1;
};

std::uint64_t intra_challenge_seed(std::uint64_t master);
std::uint64_t intra_noise_seed(std::uint64_t master, std::size_t trial);
std::uint64_t inter_challenge_seed(std::uint64_t master, std::size_t i);
std::uint64_t inter_noise_seed(std::uint64_t master, std::size_t i);

// Readout weights for one ADC resolution under a sweep budget.
struct WeightSet {
    int adc_bits = 0;
    std::vector<Eigen::VectorXd> calibration, inter, intra;
    std::vector<double> inter_nmse, intra_nmse;
};

// Computes weights for every listed resolution, reusing analog detector currents.
std::vector<WeightSet> collect_weights(const ResponseEngine& engine, const std::vector<int>& adc_bits,
                                       const SweepBudget& budget);

std::vector<BinaryKey> keys_for(const std::vector<Eigen::VectorXd>& weights, const CalibrationProfile& profile);
HammingStats collect_intra(const std::vector<BinaryKey>& keys, std::size_t max_pairs = 1000000, std::uint64_t seed = 0);
HammingStats collect_inter(const std::vector<BinaryKey>& keys, std::size_t max_pairs = 1000000, std::uint64_t seed = 0);
// Convenience wrappers that run the pipeline.
HammingStats collect_intra(const ResponseEngine& engine, const Challenge& ch, std::size_t trials,
                           const CalibrationProfile& profile, std::uint64_t master_seed, unsigned jobs = 1);
HammingStats collect_inter(const ResponseEngine& engine, const std::vector<std::uint64_t>& challenge_seeds,
                           const CalibrationProfile& profile, std::uint64_t master_seed, unsigned jobs = 1);

struct CellResult {
    int m_bit = 0;
    int n_bit = 0;
    std::size_t key_bits = 0;
    EerReport report;
    double mean_nmse = 0.0;
    bool feasible = true;  // m_bit within reach of a 40 GSa/s ADC
};

CellResult evaluate_cell(const WeightSet& ws, int n_bit, Encoding encoding, CalibrationMode mode,
                         const SweepBudget& budget);

std::vector<CellResult> sweep_bit_grid(const ResponseEngine& engine, const std::vector<int>& m_bits,
                                       const std::vector<int>& n_bits, const SweepBudget& budget,
                                       Encoding encoding = Encoding::Natural,
                                       CalibrationMode mode = CalibrationMode::Pooled);

struct MrrCountRow {
    int mrrs_per_node = 0;
    int channels = 0;
    CellResult cell;
};

std::vector<MrrCountRow> sweep_mrr_count(const NominalConfig& nominal, std::uint64_t fab_seed,
                                         const PipelineConfig& cfg, const std::vector<int>& counts, int m_bit,
                                         int n_bit, const SweepBudget& budget, Encoding encoding = Encoding::Natural);

}  // namespace npuf
