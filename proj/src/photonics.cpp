#include "npuf/photonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "npuf/errors.hpp"
#include "npuf/seeding.hpp"

namespace npuf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform_pm(Rng& rng, double halfwidth) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return halfwidth * (2.0 * u(rng) - 1.0);
}

double gaussian(Rng& rng, double sigma) {
    std::normal_distribution<double> n(0.0, 1.0);
    return sigma * n(rng);
}

double fold(double shift, double period) {
    double r = std::fmod(shift + period / 2, period);
    if (r < 0) r += period;
    return r - period / 2;
}

}  // namespace

double MrrParams::circumference() const { return kTwoPi * radius; }

double MrrParams::fsr() const { return kSpeedOfLight / (n_g * circumference()); }

void MrrParams::validate() const {
    if (!(kappa > 0 && kappa < 1)) throw ConfigError("kappa must lie in (0, 1)");
    if (!(radius > 0)) throw ConfigError("radius must be positive");
    if (!(alpha >= 0)) throw ConfigError("alpha must be non-negative");
    if (!(n_g > 0) || !(n_eff > 0)) throw ConfigError("refractive indices must be positive");
    if (!(coupling_strength > 0 && coupling_strength <= 1)) throw ConfigError("coupling_strength must lie in (0, 1]");
}

void RossNode::validate() const {
    if (mrrs.empty()) throw ConfigError("node needs at least one MRR");
    if (!(feedback_strength >= 0 && feedback_strength < 1)) throw ConfigError("feedback_strength must lie in [0, 1)");
    if (!(loop_delay >= 0) || !(inter_mrr_delay >= 0)) throw ConfigError("delays must be non-negative");
    for (const auto& m : mrrs) m.validate();
}

double NominalConfig::mean_power() const { return 1e-3 * std::pow(10.0, mean_power_dbm / 10.0); }

void NominalConfig::validate() const {
    if (nodes < 1 || mrrs_per_node < 1) throw ConfigError("need at least one node and one MRR per node");
    if (splitter_ways < 1) throw ConfigError("splitter_ways must be positive");
    if (!(carrier_wavelength > 0)) throw ConfigError("carrier wavelength must be positive");
    if (!(loop_delay >= 0) || !(inter_mrr_delay >= 0)) throw ConfigError("delays must be non-negative");
    if (!(feedback_strength >= 0 && feedback_strength < 1)) throw ConfigError("feedback_strength must lie in [0, 1)");
    if (!(coupler_amplitude > 0 && coupler_amplitude <= 1)) throw ConfigError("coupler amplitude must lie in (0, 1]");
    if (dn_eff_halfwidth < 0 || resonance_jitter_sigma < 0 || coupling_sigma < 0)
        throw ConfigError("deviation widths must be non-negative");
    MrrParams probe = mrr;
    probe.coupling_strength = 1.0;
    probe.validate();
}

int DeviceProfile::channels() const {
    int n = 0;
    for (const auto& node : nodes) n += static_cast<int>(node.mrrs.size());
    return n;
}

std::vector<std::pair<int, int>> DeviceProfile::channel_map() const {
    std::vector<std::pair<int, int>> map;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t k = 0; k < nodes[i].mrrs.size(); ++k)
            map.emplace_back(static_cast<int>(i), static_cast<int>(k));
    return map;
}

std::string to_string(Modulation m) { return m == Modulation::Intensity ? "intensity" : "amplitude"; }

Modulation parse_modulation(const std::string& s) {
    if (s == "intensity") return Modulation::Intensity;
    if (s == "amplitude") return Modulation::Amplitude;
    throw ConfigError("unknown modulation: " + s);
}

void DetectionConfig::validate() const {
    if (adc_bits < 1 || adc_bits > 16) throw ConfigError("adc_bits must lie in [1, 16]");
    if (samples_per_symbol < 4) throw ConfigError("samples_per_symbol must be at least 4");
    if (!(pd_bandwidth > 0) || !(symbol_rate > 0)) throw ConfigError("bandwidth and symbol rate must be positive");
    if (!(responsivity > 0)) throw ConfigError("responsivity must be positive");
    if (thermal_noise_density < 0) throw ConfigError("thermal noise density must be non-negative");
    if (mod_bias < 0 || mod_depth < 0 || mod_bias + mod_depth <= 0) throw ConfigError("invalid modulation bias/depth");
}

DeviceProfile build_device(const NominalConfig& nominal, std::uint64_t fab_seed, DeviationRecord record) {
    nominal.validate();
    const int n_nodes = nominal.nodes, per = nominal.mrrs_per_node;
    if (record.dn_eff_loop.size() != static_cast<std::size_t>(n_nodes) ||
        record.mrrs.size() != static_cast<std::size_t>(n_nodes))
        throw ConfigError("deviation record does not match node count");

    const double fc = nominal.carrier_frequency();
    const double ng = nominal.mrr.n_g;
    const double fsr = nominal.mrr.fsr();
    const int total = nominal.channels();

    DeviceProfile dev;
    dev.nominal = nominal;
    dev.fab_seed = fab_seed;
    for (int i = 0; i < n_nodes; ++i) {
        if (record.mrrs[i].size() != static_cast<std::size_t>(per))
            throw ConfigError("deviation record does not match MRR count");
        RossNode node;
        node.loop_delay = nominal.loop_delay;
        node.feedback_strength = nominal.feedback_strength;
        node.inter_mrr_delay = nominal.inter_mrr_delay;
        node.loop_phase = kTwoPi * fc * record.dn_eff_loop[i] * nominal.loop_delay / ng;
        for (int k = 0; k < per; ++k) {
            const auto& d = record.mrrs[i][k];
            MrrParams m = nominal.mrr;
            const int g = i * per + k;
            double shift = fc * d.dn_eff_ring / ng;
            if (nominal.fold_to_fsr) shift = fold(shift, fsr);
            m.n_eff = nominal.mrr.n_eff + d.dn_eff_ring;
            m.resonance_offset = (g - (total - 1) / 2.0) * nominal.detuning_spacing + d.resonance_jitter + shift;
            m.coupling_strength = d.coupling;
            m.segment_phase = kTwoPi * fc * d.dn_eff_segment * nominal.inter_mrr_delay / ng;
            node.mrrs.push_back(m);
        }
        node.validate();
        dev.nodes.push_back(std::move(node));
    }
    dev.deviation_record = std::move(record);
    return dev;
}

DeviceProfile fabricate(const NominalConfig& nominal, std::uint64_t fab_seed) {
    nominal.validate();
    Rng rng(derive_seed(fab_seed, "fabricate"));
    DeviationRecord rec;
    for (int i = 0; i < nominal.nodes; ++i) {
        rec.dn_eff_loop.push_back(uniform_pm(rng, nominal.dn_eff_halfwidth));
        std::vector<MrrDeviation> row;
        for (int k = 0; k < nominal.mrrs_per_node; ++k) {
            MrrDeviation d;
            d.resonance_jitter = gaussian(rng, nominal.resonance_jitter_sigma);
            d.dn_eff_ring = uniform_pm(rng, nominal.dn_eff_halfwidth);
            d.coupling = std::clamp(nominal.coupling_mean + gaussian(rng, nominal.coupling_sigma), 1e-6, 1.0);
            d.dn_eff_segment = uniform_pm(rng, nominal.dn_eff_halfwidth);
            row.push_back(d);
        }
        rec.mrrs.push_back(std::move(row));
    }
    return build_device(nominal, fab_seed, std::move(rec));
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> mrr_response(const MrrParams& mrr, const Eigen::VectorXd& freqs) {
    const double L = mrr.circumference();
    const double r = std::sqrt(1.0 - mrr.kappa * mrr.kappa);
    const double a = std::exp(-mrr.alpha * L / 2.0);
    const double slope = kTwoPi * mrr.n_g * L / kSpeedOfLight;
    Eigen::VectorXcd thru(freqs.size()), drop(freqs.size());
    for (Eigen::Index i = 0; i < freqs.size(); ++i) {
        const double phi = slope * (freqs[i] - mrr.resonance_offset);
        const std::complex<double> e = std::polar(1.0, phi);
        const std::complex<double> den = 1.0 - r * r * a * e;
        thru[i] = (r * a * e - r) / den;
        drop[i] = -mrr.kappa * mrr.kappa * std::sqrt(a) * std::polar(1.0, phi / 2) / den;
    }
    return {thru, drop};
}

Eigen::MatrixXcd node_transfer(const RossNode& node, const Eigen::VectorXd& freqs, double coupler_amplitude) {
    node.validate();
    const Eigen::Index nf = freqs.size();
    const std::size_t nm = node.mrrs.size();
    Eigen::MatrixXcd out(nf, static_cast<Eigen::Index>(nm));
    Eigen::VectorXcd prefix = Eigen::VectorXcd::Ones(nf);
    for (std::size_t k = 0; k < nm; ++k) {
        const auto& m = node.mrrs[k];
        auto [thru, drop] = mrr_response(m, freqs);
        out.col(static_cast<Eigen::Index>(k)) = coupler_amplitude * drop.cwiseProduct(prefix);
        for (Eigen::Index i = 0; i < nf; ++i)
            prefix[i] *= m.coupling_strength * thru[i] *
                         std::polar(1.0, -(kTwoPi * freqs[i] * node.inter_mrr_delay - m.segment_phase));
    }
    // prefix now holds F(f), the full through-port cascade
    for (Eigen::Index i = 0; i < nf; ++i) {
        const std::complex<double> loop =
            node.feedback_strength * prefix[i] *
            std::polar(1.0, -(kTwoPi * freqs[i] * node.loop_delay - node.loop_phase));
        if (std::abs(loop) >= 1.0) throw NumericalError("divergent recirculation loop: |F_str * F| >= 1");
        out.row(i) /= (1.0 - loop);
    }
    return out;
}

double measure_linewidth(const MrrParams& mrr, double step_hz) {
    const double half_span = mrr.fsr() / 4;
    const auto n = static_cast<Eigen::Index>(std::ceil(2 * half_span / step_hz)) + 1;
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) f[i] = mrr.resonance_offset - half_span + step_hz * static_cast<double>(i);
    const Eigen::VectorXd p = mrr_response(mrr, f).second.cwiseAbs2();
    Eigen::Index peak = 0;
    p.maxCoeff(&peak);
    const double half = p[peak] / 2;
    auto crossing = [&](Eigen::Index inside, Eigen::Index outside) {
        // linear interpolation between the last point above and the first below half maximum
        const double t = (p[inside] - half) / (p[inside] - p[outside]);
        return f[inside] + t * (f[outside] - f[inside]);
    };
    Eigen::Index lo = peak, hi = peak;
    while (lo > 0 && p[lo - 1] >= half) --lo;
    while (hi < n - 1 && p[hi + 1] >= half) ++hi;
    if (lo == 0 || hi == n - 1) throw NumericalError("linewidth exceeds the scan window");
    return crossing(hi, hi + 1) - crossing(lo, lo - 1);
}

std::size_t grid_length(std::size_t n_symbols, int samples_per_symbol) {
    std::size_t need = n_symbols * static_cast<std::size_t>(samples_per_symbol), n = 1;
    while (n < need) n <<= 1;
    return n;
}

Eigen::VectorXd fft_frequencies(std::size_t n, double fs) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(n));
    const auto half = static_cast<std::ptrdiff_t>((n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i) < half ? static_cast<std::ptrdiff_t>(i)
                                                               : static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(n);
        f[static_cast<Eigen::Index>(i)] = static_cast<double>(k) * fs / static_cast<double>(n);
    }
    return f;
}

Eigen::VectorXcd modulate(const std::vector<double>& x, const DetectionConfig& cfg, const DeviceProfile& device) {
    cfg.validate();
    if (x.empty()) throw InputError("modulate needs at least one symbol");
    double sum = 0.0;
    for (double v : x) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw InputError("modulator input must lie in [0, 1]");
        const double drive = cfg.mod_bias + cfg.mod_depth * v;
        sum += cfg.modulation == Modulation::Intensity ? drive : drive * drive;
    }
    // normalised so the batch-average power equals the configured mean power
    const double norm = sum / static_cast<double>(x.size());
    const auto sps = static_cast<std::size_t>(cfg.samples_per_symbol);
    Eigen::VectorXcd field = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid_length(x.size(), cfg.samples_per_symbol)));
    if (norm <= 0.0) return field;
    const double p = device.mean_power();
    for (std::size_t s = 0; s < x.size(); ++s) {
        const double drive = cfg.mod_bias + cfg.mod_depth * x[s];
        const double amp = cfg.modulation == Modulation::Intensity ? std::sqrt(p * drive / norm) : std::sqrt(p / norm) * drive;
        for (std::size_t j = 0; j < sps; ++j) field[static_cast<Eigen::Index>(s * sps + j)] = amp;
    }
    return field;
}

OpticalFrontEnd::OpticalFrontEnd(const DeviceProfile& device, const DetectionConfig& cfg, std::size_t n_symbols)
    : device_(&device), cfg_(cfg), n_symbols_(n_symbols), grid_(grid_length(n_symbols, cfg.samples_per_symbol)) {
    cfg.validate();
    const double fs = cfg.symbol_rate * cfg.samples_per_symbol;
    const Eigen::VectorXd f = fft_frequencies(grid_, fs);
    const double split = 1.0 / std::sqrt(static_cast<double>(device.splitter_ways()));
    for (const auto& node : device.nodes) {
        const Eigen::MatrixXcd h = node_transfer(node, f, device.nominal.coupler_amplitude);
        for (Eigen::Index k = 0; k < h.cols(); ++k) transfer_.push_back(split * h.col(k));
    }
}

Eigen::MatrixXd OpticalFrontEnd::detect(const std::vector<double>& x) const {
    if (x.size() != n_symbols_) throw InputError("input length does not match the front end grid");
    return detect(modulate(x, cfg_, *device_));
}

Eigen::MatrixXd OpticalFrontEnd::detect(const Eigen::VectorXcd& field) const {
    if (static_cast<std::size_t>(field.size()) != grid_) throw InputError("field length does not match the grid");
    if (!field.allFinite()) throw NumericalError("NaN or Inf in optical field");
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> time(field.data(), field.data() + field.size()), spec, out;
    fft.fwd(spec, time);

    const auto sps = static_cast<std::size_t>(cfg_.samples_per_symbol);
    const double fs = cfg_.symbol_rate * static_cast<double>(sps);
    const double beta = 1.0 - std::exp(-kTwoPi * cfg_.pd_bandwidth / fs);
    const std::size_t last = n_symbols_ * sps;

    Eigen::MatrixXd currents(static_cast<Eigen::Index>(n_symbols_), static_cast<Eigen::Index>(transfer_.size()));
    std::vector<std::complex<double>> prod(grid_);
    for (std::size_t c = 0; c < transfer_.size(); ++c) {
        for (std::size_t i = 0; i < grid_; ++i) prod[i] = spec[i] * transfer_[c][static_cast<Eigen::Index>(i)];
        fft.inv(out, prod);
        double y = 0.0;
        std::size_t s = 0;
        for (std::size_t i = 0; i < last; ++i) {
            y += beta * (cfg_.responsivity * std::norm(out[i]) - y);
            if (i == s * sps + sps / 2) {
                currents(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(c)) = y;
                ++s;
            }
        }
    }
    return currents;
}

void add_detector_noise(Eigen::MatrixXd& currents, const DetectionConfig& cfg) {
    if (!cfg.noise_enabled) return;
    Rng rng(derive_seed(cfg.noise_seed, "detector"));
    std::normal_distribution<double> n(0.0, 1.0);
    const double thermal = cfg.thermal_noise_density * std::sqrt(cfg.pd_bandwidth);
    for (Eigen::Index r = 0; r < currents.rows(); ++r)
        for (Eigen::Index c = 0; c < currents.cols(); ++c) {
            double var = thermal * thermal;
            if (cfg.shot_noise_enabled) var += 2.0 * kElectronCharge * std::max(currents(r, c), 0.0) * cfg.pd_bandwidth;
            currents(r, c) += std::sqrt(var) * n(rng);
        }
}

AdcRange observe_range(const Eigen::MatrixXd& currents) {
    AdcRange range;
    for (Eigen::Index c = 0; c < currents.cols(); ++c) {
        range.lo.push_back(currents.col(c).minCoeff());
        range.hi.push_back(currents.col(c).maxCoeff());
    }
    return range;
}

Eigen::MatrixXd quantize_adc(const Eigen::MatrixXd& currents, const AdcRange& range, int bits) {
    if (bits < 1 || bits > 16) throw ConfigError("adc_bits must lie in [1, 16]");
    if (range.lo.size() != static_cast<std::size_t>(currents.cols()) || range.hi.size() != range.lo.size())
        throw InputError("ADC range does not match channel count");
    const double levels = std::ldexp(1.0, bits);
    Eigen::MatrixXd out(currents.rows(), currents.cols());
    for (Eigen::Index c = 0; c < currents.cols(); ++c) {
        const double lo = range.lo[c], span = range.hi[c] - range.lo[c];
        for (Eigen::Index r = 0; r < currents.rows(); ++r) {
            if (!(span > 0)) {
                out(r, c) = lo;
                continue;
            }
            const double q = std::clamp(std::floor((currents(r, c) - lo) / span * levels), 0.0, levels - 1);
            out(r, c) = lo + (q + 0.5) * span / levels;
        }
    }
    return out;
}

StateMatrix simulate_states(const OpticalFrontEnd& front_end, const DeviceProfile& device,
                            const std::vector<double>& x, const DetectionConfig& cfg) {
    cfg.validate();
    Eigen::MatrixXd currents = front_end.detect(x);
    add_detector_noise(currents, cfg);
    const AdcRange range = device.adc_range ? *device.adc_range : observe_range(currents);
    StateMatrix out;
    out.samples = quantize_adc(currents, range, cfg.adc_bits);
    out.channel_map = device.channel_map();
    out.symbol_rate = cfg.symbol_rate;
    return out;
}

StateMatrix simulate_states(const DeviceProfile& device, const std::vector<double>& x, const DetectionConfig& cfg) {
    OpticalFrontEnd fe(device, cfg, x.size());
    return simulate_states(fe, device, x, cfg);
}

void calibrate_adc(DeviceProfile& device, const std::vector<double>& x, const DetectionConfig& cfg) {
    OpticalFrontEnd fe(device, cfg, x.size());
    device.adc_range = observe_range(fe.detect(x));
}

}  // namespace npuf
