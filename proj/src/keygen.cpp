#include "npuf/keygen.hpp"

#include <cmath>

#include "npuf/errors.hpp"
#include "npuf/seeding.hpp"

namespace npuf {

std::string to_string(Encoding e) { return e == Encoding::Gray ? "gray" : "natural"; }
std::string to_string(CalibrationMode m) { return m == CalibrationMode::PerWeight ? "per_weight" : "pooled"; }

Encoding parse_encoding(const std::string& s) {
    if (s == "natural") return Encoding::Natural;
    if (s == "gray") return Encoding::Gray;
    throw ConfigError("unknown encoding '" + s + "'");
}

CalibrationMode parse_calibration_mode(const std::string& s) {
    if (s == "pooled") return CalibrationMode::Pooled;
    if (s == "per_weight") return CalibrationMode::PerWeight;
    throw ConfigError("unknown calibration mode '" + s + "'");
}

void CalibrationProfile::validate() const {
    if (n_bit < 1 || n_bit > 16) throw ConfigError("n_bit must lie in [1, 16]");
    if (mode == CalibrationMode::Pooled) {
        if (!(sigma > 0)) throw ConfigError("calibration sigma must be positive");
    } else {
        if (weight_mu.size() == 0 || weight_mu.size() != weight_sigma.size())
            throw ConfigError("per-weight calibration needs matching mu/sigma vectors");
        if (!(weight_sigma.array() > 0).all()) throw ConfigError("calibration sigma must be positive");
    }
}

CalibrationProfile calibrate(const std::vector<Eigen::VectorXd>& ensemble, int n_bit, Encoding encoding,
                             CalibrationMode mode) {
    if (ensemble.size() < 2) throw InputError("calibration needs at least two weight vectors");
    const Eigen::Index w = ensemble.front().size();
    for (const auto& v : ensemble)
        if (v.size() != w) throw InputError("weight vectors differ in length");
    CalibrationProfile p;
    p.mode = mode;
    p.n_bit = n_bit;
    p.encoding = encoding;
    p.ensemble_size = ensemble.size();

    const double count = static_cast<double>(ensemble.size());
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(w);
    for (const auto& v : ensemble) sum += v;
    const Eigen::VectorXd mean = sum / count;
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(w);
    for (const auto& v : ensemble) sq.array() += (v - mean).array().square();

    // pooled statistics over all ensemble entries
    p.mu = mean.mean();
    double pooled = 0.0;
    for (const auto& v : ensemble) pooled += (v.array() - p.mu).square().sum();
    p.sigma = std::sqrt(pooled / (count * static_cast<double>(w) - 1.0));
    if (!(p.sigma > 0)) throw NumericalError("degenerate calibration ensemble: sigma = 0");

    if (mode == CalibrationMode::PerWeight) {
        p.weight_mu = mean;
        p.weight_sigma = (sq / (count - 1.0)).array().sqrt();
        if (!(p.weight_sigma.array() > 0).all()) throw NumericalError("degenerate calibration ensemble: a weight has sigma = 0");
    }
    p.validate();
    return p;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<double> to_uniform(const Eigen::VectorXd& weights, const CalibrationProfile& profile) {
    profile.validate();
    std::vector<double> u(static_cast<std::size_t>(weights.size()));
    if (profile.mode == CalibrationMode::PerWeight && profile.weight_mu.size() != weights.size())
        throw InputError("weight count does not match the calibration profile");
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const double z = profile.mode == CalibrationMode::Pooled
                             ? (weights[i] - profile.mu) / profile.sigma
                             : (weights[i] - profile.weight_mu[i]) / profile.weight_sigma[i];
        u[static_cast<std::size_t>(i)] = normal_cdf(z);
    }
    return u;
}

unsigned gray_encode(unsigned b) { return b ^ (b >> 1); }

unsigned gray_decode(unsigned g) {
    unsigned b = 0;
    for (; g; g >>= 1) b ^= g;
    return b;
}

BinaryKey quantize_bits(const std::vector<double>& u, int n_bit, Encoding encoding) {
    if (n_bit < 1 || n_bit > 16) throw ConfigError("n_bit must lie in [1, 16]");
    const unsigned bins = 1u << n_bit;
    BinaryKey key;
    key.bits_per_weight = n_bit;
    key.weight_count = u.size();
    for (double v : u) {
        if (!(v >= 0.0 && v <= 1.0)) throw InputError("uniform value outside [0, 1]");
        unsigned bin = static_cast<unsigned>(std::floor(v * bins));
        if (bin >= bins) bin = bins - 1;
        if (encoding == Encoding::Gray) bin = gray_encode(bin);
        for (int b = n_bit - 1; b >= 0; --b) key.bits.push_back((bin >> b) & 1u);
    }
    return key;
}

BinaryKey derive_key(const Eigen::VectorXd& weights, const CalibrationProfile& profile) {
    return quantize_bits(to_uniform(weights, profile), profile.n_bit, profile.encoding);
}

ResponseEngine::ResponseEngine(DeviceProfile device, PipelineConfig cfg) : device_(std::move(device)), cfg_(std::move(cfg)) {
    cfg_.detection.validate();
    cfg_.ridge.validate();
    cfg_.narma.validate();
}

const OpticalFrontEnd& ResponseEngine::front_end(std::size_t n_symbols) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& slot = front_ends_[n_symbols];
    if (!slot) slot = std::make_unique<OpticalFrontEnd>(device_, cfg_.detection, n_symbols);
    return *slot;
}

Challenge ResponseEngine::challenge(std::uint64_t seed) const { return make_challenge(seed, cfg_.narma, cfg_.challenge); }

Eigen::MatrixXd ResponseEngine::analog(const Challenge& ch) const {
    return front_end(ch.length()).detect(ch.modulator_input());
}

Response ResponseEngine::train(const Challenge& ch, const Eigen::MatrixXd& analog, std::uint64_t noise_seed,
                               int adc_bits) const {
    DetectionConfig det = cfg_.detection;
    det.noise_seed = noise_seed;
    det.adc_bits = adc_bits;
    det.validate();
    Eigen::MatrixXd currents = analog;
    add_detector_noise(currents, det);
    const AdcRange range = device_.adc_range ? *device_.adc_range : observe_range(currents);
    const Eigen::MatrixXd states = quantize_adc(currents, range, adc_bits);
    const FeatureMatrix f = build_features(states, ch.x_in, cfg_.ridge);
    return train_readout(f, ch.y_out, cfg_.ridge.lambda);
}

Response ResponseEngine::respond(const Challenge& ch, std::uint64_t noise_seed) const {
    return train(ch, analog(ch), noise_seed, cfg_.detection.adc_bits);
}

std::uint64_t adc_calibration_seed(std::uint64_t fab_seed) { return derive_seed(fab_seed, "adc-calibration"); }

void calibrate_device_adc(DeviceProfile& device, const PipelineConfig& cfg) {
    const Challenge ch = make_challenge(adc_calibration_seed(device.fab_seed), cfg.narma, cfg.challenge);
    calibrate_adc(device, ch.modulator_input(), cfg.detection);
}

std::vector<Eigen::VectorXd> weight_ensemble(const ResponseEngine& engine, std::uint64_t master_seed, std::size_t count,
                                             unsigned jobs) {
    std::vector<Eigen::VectorXd> out(count);
    parallel_for(count, jobs, [&](std::size_t i) {
        const Challenge ch = engine.challenge(derive_seed(master_seed, "calibration-challenge", i));
        out[i] = engine.respond(ch, derive_seed(master_seed, "calibration-noise", i)).weights;
    });
    return out;
}

KeyedResponse respond(const DeviceProfile& device, const Challenge& challenge, const DetectionConfig& det_cfg,
                      const RidgeConfig& ridge_cfg, const CalibrationProfile& profile) {
    det_cfg.validate();
    const StateMatrix s = simulate_states(device, challenge.modulator_input(), det_cfg);
    const FeatureMatrix f = build_features(s, challenge.x_in, ridge_cfg);
    KeyedResponse out;
    out.response = train_readout(f, challenge.y_out, ridge_cfg.lambda);
    out.key = derive_key(out.response.weights, profile);
    return out;
}

}  // namespace npuf
