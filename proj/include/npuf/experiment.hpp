#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "npuf/io.hpp"
#include "npuf/keygen.hpp"
#include "npuf/metrics.hpp"

namespace npuf {

inline constexpr const char* kExperimentSchema = "npuf.experiment/1";

struct KeygenSettings {
    int n_bit = 4;
    Encoding encoding = Encoding::Natural;
    CalibrationMode mode = CalibrationMode::Pooled;
    std::size_t calibration_crps = 1000;
};

struct SweepSettings {
    std::vector<int> m_bits{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    std::vector<int> n_bits{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> mrr_counts{1, 2, 3, 4, 5, 6};
    int mrr_m_bit = 3;
    int mrr_n_bit = 4;
    std::size_t calibration_crps = 200;
    std::size_t inter_challenges = 200;
    std::size_t intra_trials = 100;
    std::size_t max_pairs = 1000000;

    // ECC operating point: fine ADC, Gray bins and a stiffer ridge keep intra flips low.
    int ecc_m_bit = 16;
    int ecc_n_bit = 4;
    Encoding ecc_encoding = Encoding::Gray;
    double ecc_lambda = 1.0;
    std::size_t ecc_intra_trials = 201;  // first repeat is enrolled
    std::size_t ecc_inter_challenges = 200;
    std::vector<int> ecc_t{0, 8, 16, 20, 24, 26, 28, 30, 32, 34, 36, 40, 48};
};

struct ExperimentConfig {
    std::uint64_t master_seed = 1;
    std::uint64_t fab_seed = 6;
    NominalConfig nominal;
    PipelineConfig pipeline;
    KeygenSettings keygen;
    SweepSettings sweep;
    std::string output_dir = ".";

    void validate() const;
    SweepBudget budget(unsigned jobs) const;
    // Pipeline used at the ECC operating point.
    PipelineConfig ecc_pipeline() const;
};

io::Json to_json(const ExperimentConfig& c);
// Missing keys keep their defaults.
ExperimentConfig experiment_from_json(const io::Json& j);

}  // namespace npuf
