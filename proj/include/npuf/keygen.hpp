#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "npuf/bits.hpp"
#include "npuf/challenge.hpp"
#include "npuf/photonics.hpp"
#include "npuf/readout.hpp"

namespace npuf {

enum class Encoding { Natural, Gray };
// Pooled: one mu/sigma for all weights. PerWeight: mu/sigma per weight index.
enum class CalibrationMode { Pooled, PerWeight };

std::string to_string(Encoding e);
std::string to_string(CalibrationMode m);
Encoding parse_encoding(const std::string& s);
CalibrationMode parse_calibration_mode(const std::string& s);

struct CalibrationProfile {
    CalibrationMode mode = CalibrationMode::Pooled;
    double mu = 0.0;
    double sigma = 1.0;
    Eigen::VectorXd weight_mu, weight_sigma;  // PerWeight only
    int n_bit = 4;
    Encoding encoding = Encoding::Natural;
    std::size_t ensemble_size = 0;

    void validate() const;
};

struct BinaryKey {
    BitVector bits;
    int bits_per_weight = 0;
    std::size_t weight_count = 0;

    std::size_t size() const { return bits.size(); }
};

struct KeyedResponse {
    Response response;
    BinaryKey key;
};

CalibrationProfile calibrate(const std::vector<Eigen::VectorXd>& ensemble, int n_bit = 4,
                             Encoding encoding = Encoding::Natural, CalibrationMode mode = CalibrationMode::Pooled);

double normal_cdf(double z);
std::vector<double> to_uniform(const Eigen::VectorXd& weights, const CalibrationProfile& profile);

unsigned gray_encode(unsigned b);
unsigned gray_decode(unsigned g);
BinaryKey quantize_bits(const std::vector<double>& u, int n_bit, Encoding encoding);
BinaryKey derive_key(const Eigen::VectorXd& weights, const CalibrationProfile& profile);

struct PipelineConfig {
    DetectionConfig detection;
    RidgeConfig ridge;
    NarmaParams narma;
    ChallengeConfig challenge;
};

// Challenge -> weights engine for one device. Transfer tables are built once per
// series length and shared; all methods are safe to call concurrently.
class ResponseEngine {
public:
    ResponseEngine(DeviceProfile device, PipelineConfig cfg);

    const DeviceProfile& device() const { return device_; }
    const PipelineConfig& config() const { return cfg_; }

    Challenge challenge(std::uint64_t seed) const;
    // Noiseless photocurrents before the ADC.
    Eigen::MatrixXd analog(const Challenge& ch) const;
    // Noise, ADC and readout on top of cached analog currents.
    Response train(const Challenge& ch, const Eigen::MatrixXd& analog, std::uint64_t noise_seed, int adc_bits) const;
    Response respond(const Challenge& ch, std::uint64_t noise_seed) const;

private:
    const OpticalFrontEnd& front_end(std::size_t n_symbols) const;

    DeviceProfile device_;
    PipelineConfig cfg_;
    mutable std::mutex mutex_;
    mutable std::map<std::size_t, std::unique_ptr<OpticalFrontEnd>> front_ends_;
};

// Calibration challenge used to fix the ADC full scale of a device.
std::uint64_t adc_calibration_seed(std::uint64_t fab_seed);
void calibrate_device_adc(DeviceProfile& device, const PipelineConfig& cfg);

// Weight ensemble from `count` challenges with seeds derived from master_seed.
std::vector<Eigen::VectorXd> weight_ensemble(const ResponseEngine& engine, std::uint64_t master_seed, std::size_t count,
                                             unsigned jobs = 1);

KeyedResponse respond(const DeviceProfile& device, const Challenge& challenge, const DetectionConfig& det_cfg,
                      const RidgeConfig& ridge_cfg, const CalibrationProfile& profile);

}  // namespace npuf
