#include "npuf/experiment.hpp"

#include "npuf/errors.hpp"

namespace npuf {

namespace {

template <typename T>
T get_or(const io::Json& j, const char* key, const T& fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void check_bits(const std::vector<int>& v, const char* what) {
    if (v.empty()) throw ConfigError(std::string(what) + " grid is empty");
    for (int b : v)
        if (b < 1 || b > 16) throw ConfigError(std::string(what) + " values must lie in [1, 16]");
}

}  // namespace

void ExperimentConfig::validate() const {
    nominal.validate();
    pipeline.detection.validate();
    pipeline.ridge.validate();
    pipeline.narma.validate();
    if (keygen.n_bit < 1 || keygen.n_bit > 16) throw ConfigError("n_bit must lie in [1, 16]");
    if (keygen.calibration_crps < 2) throw ConfigError("calibration needs at least two CRPs");
    check_bits(sweep.m_bits, "m_bit");
    check_bits(sweep.n_bits, "n_bit");
    check_bits({sweep.ecc_m_bit, sweep.mrr_m_bit}, "m_bit");
    check_bits({sweep.ecc_n_bit, sweep.mrr_n_bit}, "n_bit");
    for (int c : sweep.mrr_counts)
        if (c < 1) throw ConfigError("MRR counts must be positive");
    for (int t : sweep.ecc_t)
        if (t < 0) throw ConfigError("ECC t values must be non-negative");
    if (sweep.calibration_crps < 2 || sweep.inter_challenges < 2 || sweep.intra_trials < 2)
        throw ConfigError("sweep budgets need at least two items each");
    if (sweep.ecc_intra_trials < 2 || sweep.ecc_inter_challenges < 1)
        throw ConfigError("ECC sweep needs an enrolled key, one repeat and one other challenge");
    if (!(sweep.ecc_lambda >= 0)) throw ConfigError("ecc_lambda must be non-negative");
}

SweepBudget ExperimentConfig::budget(unsigned jobs) const {
    SweepBudget b;
    b.calibration_crps = sweep.calibration_crps;
    b.inter_challenges = sweep.inter_challenges;
    b.intra_trials = sweep.intra_trials;
    b.max_pairs = sweep.max_pairs;
    b.master_seed = master_seed;
    b.jobs = jobs;
    return b;
}

PipelineConfig ExperimentConfig::ecc_pipeline() const {
    PipelineConfig p = pipeline;
    p.ridge.lambda = sweep.ecc_lambda;
    p.detection.adc_bits = sweep.ecc_m_bit;
    return p;
}

io::Json to_json(const ExperimentConfig& c) {
    const auto& s = c.sweep;
    return io::Json{{"schema", kExperimentSchema},
                    {"master_seed", c.master_seed},
                    {"fab_seed", c.fab_seed},
                    {"nominal", io::to_json(c.nominal)},
                    {"pipeline", io::to_json(c.pipeline)},
                    {"keygen",
                     {{"n_bit", c.keygen.n_bit},
                      {"encoding", to_string(c.keygen.encoding)},
                      {"calibration_mode", to_string(c.keygen.mode)},
                      {"calibration_crps", c.keygen.calibration_crps}}},
                    {"sweep",
                     {{"m_bits", s.m_bits},
                      {"n_bits", s.n_bits},
                      {"mrr_counts", s.mrr_counts},
                      {"mrr_m_bit", s.mrr_m_bit},
                      {"mrr_n_bit", s.mrr_n_bit},
                      {"calibration_crps", s.calibration_crps},
                      {"inter_challenges", s.inter_challenges},
                      {"intra_trials", s.intra_trials},
                      {"max_pairs", s.max_pairs},
                      {"ecc_m_bit", s.ecc_m_bit},
                      {"ecc_n_bit", s.ecc_n_bit},
                      {"ecc_encoding", to_string(s.ecc_encoding)},
                      {"ecc_lambda", s.ecc_lambda},
                      {"ecc_intra_trials", s.ecc_intra_trials},
                      {"ecc_inter_challenges", s.ecc_inter_challenges},
                      {"ecc_t", s.ecc_t}}},
                    {"output_dir", c.output_dir}};
}

ExperimentConfig experiment_from_json(const io::Json& j) {
    if (j.contains("schema") && j.at("schema") != kExperimentSchema)
        throw FormatError("expected schema " + std::string(kExperimentSchema));
    ExperimentConfig c;
    try {
        c.master_seed = get_or(j, "master_seed", c.master_seed);
        c.fab_seed = get_or(j, "fab_seed", c.fab_seed);
        if (j.contains("nominal")) c.nominal = io::nominal_from_json(j.at("nominal"));
        if (j.contains("pipeline")) c.pipeline = io::pipeline_from_json(j.at("pipeline"));
        if (j.contains("keygen")) {
            const auto& k = j.at("keygen");
            c.keygen.n_bit = get_or(k, "n_bit", c.keygen.n_bit);
            if (k.contains("encoding")) c.keygen.encoding = parse_encoding(k.at("encoding").get<std::string>());
            if (k.contains("calibration_mode"))
                c.keygen.mode = parse_calibration_mode(k.at("calibration_mode").get<std::string>());
            c.keygen.calibration_crps = get_or(k, "calibration_crps", c.keygen.calibration_crps);
        }
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            auto& d = c.sweep;
            d.m_bits = get_or(s, "m_bits", d.m_bits);
            d.n_bits = get_or(s, "n_bits", d.n_bits);
            d.mrr_counts = get_or(s, "mrr_counts", d.mrr_counts);
            d.mrr_m_bit = get_or(s, "mrr_m_bit", d.mrr_m_bit);
            d.mrr_n_bit = get_or(s, "mrr_n_bit", d.mrr_n_bit);
            d.calibration_crps = get_or(s, "calibration_crps", d.calibration_crps);
            d.inter_challenges = get_or(s, "inter_challenges", d.inter_challenges);
            d.intra_trials = get_or(s, "intra_trials", d.intra_trials);
            d.max_pairs = get_or(s, "max_pairs", d.max_pairs);
            d.ecc_m_bit = get_or(s, "ecc_m_bit", d.ecc_m_bit);
            d.ecc_n_bit = get_or(s, "ecc_n_bit", d.ecc_n_bit);
            if (s.contains("ecc_encoding")) d.ecc_encoding = parse_encoding(s.at("ecc_encoding").get<std::string>());
            d.ecc_lambda = get_or(s, "ecc_lambda", d.ecc_lambda);
            d.ecc_intra_trials = get_or(s, "ecc_intra_trials", d.ecc_intra_trials);
            d.ecc_inter_challenges = get_or(s, "ecc_inter_challenges", d.ecc_inter_challenges);
            d.ecc_t = get_or(s, "ecc_t", d.ecc_t);
        }
        c.output_dir = get_or(j, "output_dir", c.output_dir);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("experiment config: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace npuf
