#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace npuf {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kElectronCharge = 1.602176634e-19;

struct MrrParams {
    double kappa = 0.25;               // field coupling per coupler
    double radius = 55e-6;             // m
    double n_eff = 3.4;
    double n_g = 4.2;                  // sets the phase slope (FSR)
    double alpha = 10.0;               // power loss, 1/m
    double resonance_offset = 0.0;     // Hz relative to carrier
    double coupling_strength = 0.97;   // C_MRR, field amplitude to the next ring
    double segment_phase = 0.0;        // rad, static phase of the following waveguide segment

    double circumference() const;
    double fsr() const;
    void validate() const;
};

struct RossNode {
    std::vector<MrrParams> mrrs;
    double loop_delay = 25e-12;        // T_d, s
    double feedback_strength = 0.9;    // F_str
    double inter_mrr_delay = 2.5e-12;  // T_MRR, s
    double loop_phase = 0.0;           // rad, static phase from loop index deviation

    void validate() const;
};

// Everything fabricate() needs besides the seed.
struct NominalConfig {
    int nodes = 4;
    int mrrs_per_node = 6;
    double carrier_wavelength = 1556e-9;
    double mean_power_dbm = 10.0;
    int splitter_ways = 4;
    double detuning_spacing = 1e9;
    MrrParams mrr{};
    double loop_delay = 25e-12;
    double feedback_strength = 0.9;
    double inter_mrr_delay = 2.5e-12;
    double coupler_amplitude = 0.7071067811865476;  // c_io, two 3 dB couplers

    double dn_eff_halfwidth = 0.015;
    double resonance_jitter_sigma = 0.1e9;
    double coupling_mean = 0.97;
    double coupling_sigma = 0.1;
    bool fold_to_fsr = true;

    int channels() const { return nodes * mrrs_per_node; }
    double carrier_frequency() const { return kSpeedOfLight / carrier_wavelength; }
    double mean_power() const;
    void validate() const;
};

struct MrrDeviation {
    double dn_eff_ring = 0.0;
    double dn_eff_segment = 0.0;
    double resonance_jitter = 0.0;   // Hz
    double coupling = 0.0;           // sampled C_MRR after clipping
};

struct DeviationRecord {
    std::vector<double> dn_eff_loop;                 // per node
    std::vector<std::vector<MrrDeviation>> mrrs;     // [node][mrr]
};

struct AdcRange {
    std::vector<double> lo, hi;
};

struct DeviceProfile {
    NominalConfig nominal;
    std::uint64_t fab_seed = 0;
    DeviationRecord deviation_record;
    std::vector<RossNode> nodes;
    std::optional<AdcRange> adc_range;

    int channels() const;
    double carrier_frequency() const { return nominal.carrier_frequency(); }
    double mean_power() const { return nominal.mean_power(); }
    int splitter_ways() const { return nominal.splitter_ways; }
    // (node, mrr) per state column
    std::vector<std::pair<int, int>> channel_map() const;
};

// Intensity: |field|^2 follows bias + depth*x. Amplitude: field follows bias + depth*x.
enum class Modulation { Intensity, Amplitude };

std::string to_string(Modulation m);
Modulation parse_modulation(const std::string& s);

struct DetectionConfig {
    Modulation modulation = Modulation::Amplitude;
    double pd_bandwidth = 40e9;
    double responsivity = 1.0;
    double thermal_noise_density = 0.01e-12;  // A/sqrt(Hz)
    bool shot_noise_enabled = false;
    bool noise_enabled = true;
    int adc_bits = 3;
    int samples_per_symbol = 16;
    double symbol_rate = 40e9;
    double mod_bias = 0.0;
    double mod_depth = 1.0;
    std::uint64_t noise_seed = 0;

    void validate() const;
};

struct StateMatrix {
    Eigen::MatrixXd samples;  // [n_symbols x n_channels]
    std::vector<std::pair<int, int>> channel_map;
    double symbol_rate = 40e9;

    Eigen::Index n_symbols() const { return samples.rows(); }
    Eigen::Index n_channels() const { return samples.cols(); }
};

DeviceProfile fabricate(const NominalConfig& nominal, std::uint64_t fab_seed);
// Rebuilds node parameters from nominal values plus a stored deviation record.
DeviceProfile build_device(const NominalConfig& nominal, std::uint64_t fab_seed, DeviationRecord record);

// Add-drop ring response on baseband frequencies (Hz relative to carrier).
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> mrr_response(const MrrParams& mrr, const Eigen::VectorXd& freqs);

// [n_freq x n_mrrs]; throws NumericalError if the loop gain reaches 1.
Eigen::MatrixXcd node_transfer(const RossNode& node, const Eigen::VectorXd& freqs, double coupler_amplitude);

// Drop-port -3 dB full width measured on a uniform grid with the given step.
double measure_linewidth(const MrrParams& mrr, double step_hz = 1e6);

std::size_t grid_length(std::size_t n_symbols, int samples_per_symbol);
// FFT-ordered frequencies for a grid of n points sampled at fs.
Eigen::VectorXd fft_frequencies(std::size_t n, double fs);

// Oversampled field (length = grid_length), zero padded past the last symbol.
Eigen::VectorXcd modulate(const std::vector<double>& x, const DetectionConfig& cfg, const DeviceProfile& device);

// Transfer tables for one device and one grid size. Immutable; share freely.
class OpticalFrontEnd {
public:
    OpticalFrontEnd(const DeviceProfile& device, const DetectionConfig& cfg, std::size_t n_symbols);

    std::size_t n_symbols() const { return n_symbols_; }
    std::size_t grid() const { return grid_; }

    // Pre-noise photocurrents at symbol centres, [n_symbols x channels].
    Eigen::MatrixXd detect(const Eigen::VectorXcd& field) const;
    Eigen::MatrixXd detect(const std::vector<double>& x) const;

private:
    const DeviceProfile* device_;
    DetectionConfig cfg_;
    std::size_t n_symbols_, grid_;
    std::vector<Eigen::VectorXcd> transfer_;  // per channel, already includes the splitter
};

void add_detector_noise(Eigen::MatrixXd& currents, const DetectionConfig& cfg);
AdcRange observe_range(const Eigen::MatrixXd& currents);
Eigen::MatrixXd quantize_adc(const Eigen::MatrixXd& currents, const AdcRange& range, int bits);

// Full pipeline. Without a stored or explicit range the ADC uses the range observed in this run.
StateMatrix simulate_states(const DeviceProfile& device, const std::vector<double>& x, const DetectionConfig& cfg);
StateMatrix simulate_states(const OpticalFrontEnd& front_end, const DeviceProfile& device,
                            const std::vector<double>& x, const DetectionConfig& cfg);

// Calibration pass: noiseless run over x, min/max per channel stored in the profile.
void calibrate_adc(DeviceProfile& device, const std::vector<double>& x, const DetectionConfig& cfg);

}  // namespace npuf
