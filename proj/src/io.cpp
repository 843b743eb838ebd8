#include "npuf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "npuf/errors.hpp"

namespace npuf::io {

namespace {

Json vec(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vec_from(const Json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

void check_schema(const Json& j, const char* schema) {
    if (!j.contains("schema") || j["schema"].get<std::string>() != schema)
        throw FormatError(std::string("expected schema ") + schema);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? j[key].get<T>() : fallback;
}

}  // namespace

Json to_json(const NominalConfig& c) {
    return Json{{"nodes", c.nodes},
                {"mrrs_per_node", c.mrrs_per_node},
                {"carrier_wavelength", c.carrier_wavelength},
                {"mean_power_dbm", c.mean_power_dbm},
                {"splitter_ways", c.splitter_ways},
                {"detuning_spacing", c.detuning_spacing},
                {"mrr",
                 {{"kappa", c.mrr.kappa},
                  {"radius", c.mrr.radius},
                  {"n_eff", c.mrr.n_eff},
                  {"n_g", c.mrr.n_g},
                  {"alpha", c.mrr.alpha}}},
                {"loop_delay", c.loop_delay},
                {"feedback_strength", c.feedback_strength},
                {"inter_mrr_delay", c.inter_mrr_delay},
                {"coupler_amplitude", c.coupler_amplitude},
                {"dn_eff_halfwidth", c.dn_eff_halfwidth},
                {"resonance_jitter_sigma", c.resonance_jitter_sigma},
                {"coupling_mean", c.coupling_mean},
                {"coupling_sigma", c.coupling_sigma},
                {"fold_to_fsr", c.fold_to_fsr}};
}

NominalConfig nominal_from_json(const Json& j) {
    NominalConfig c;
    c.nodes = get_or(j, "nodes", c.nodes);
    c.mrrs_per_node = get_or(j, "mrrs_per_node", c.mrrs_per_node);
    c.carrier_wavelength = get_or(j, "carrier_wavelength", c.carrier_wavelength);
    c.mean_power_dbm = get_or(j, "mean_power_dbm", c.mean_power_dbm);
    c.splitter_ways = get_or(j, "splitter_ways", c.splitter_ways);
    c.detuning_spacing = get_or(j, "detuning_spacing", c.detuning_spacing);
    if (j.contains("mrr")) {
        const auto& m = j["mrr"];
        c.mrr.kappa = get_or(m, "kappa", c.mrr.kappa);
        c.mrr.radius = get_or(m, "radius", c.mrr.radius);
        c.mrr.n_eff = get_or(m, "n_eff", c.mrr.n_eff);
        c.mrr.n_g = get_or(m, "n_g", c.mrr.n_g);
        c.mrr.alpha = get_or(m, "alpha", c.mrr.alpha);
    }
    c.loop_delay = get_or(j, "loop_delay", c.loop_delay);
    c.feedback_strength = get_or(j, "feedback_strength", c.feedback_strength);
    c.inter_mrr_delay = get_or(j, "inter_mrr_delay", c.inter_mrr_delay);
    c.coupler_amplitude = get_or(j, "coupler_amplitude", c.coupler_amplitude);
    c.dn_eff_halfwidth = get_or(j, "dn_eff_halfwidth", c.dn_eff_halfwidth);
    c.resonance_jitter_sigma = get_or(j, "resonance_jitter_sigma", c.resonance_jitter_sigma);
    c.coupling_mean = get_or(j, "coupling_mean", c.coupling_mean);
    c.coupling_sigma = get_or(j, "coupling_sigma", c.coupling_sigma);
    c.fold_to_fsr = get_or(j, "fold_to_fsr", c.fold_to_fsr);
    c.validate();
    return c;
}

Json to_json(const DetectionConfig& c) {
    return Json{{"modulation", to_string(c.modulation)},
                {"pd_bandwidth", c.pd_bandwidth},
                {"responsivity", c.responsivity},
                {"thermal_noise_density", c.thermal_noise_density},
                {"shot_noise_enabled", c.shot_noise_enabled},
                {"noise_enabled", c.noise_enabled},
                {"adc_bits", c.adc_bits},
                {"samples_per_symbol", c.samples_per_symbol},
                {"symbol_rate", c.symbol_rate},
                {"mod_bias", c.mod_bias},
                {"mod_depth", c.mod_depth},
                {"noise_seed", c.noise_seed}};
}

DetectionConfig detection_from_json(const Json& j) {
    DetectionConfig c;
    if (j.contains("modulation")) c.modulation = parse_modulation(j.at("modulation").get<std::string>());
    c.pd_bandwidth = get_or(j, "pd_bandwidth", c.pd_bandwidth);
    c.responsivity = get_or(j, "responsivity", c.responsivity);
    c.thermal_noise_density = get_or(j, "thermal_noise_density", c.thermal_noise_density);
    c.shot_noise_enabled = get_or(j, "shot_noise_enabled", c.shot_noise_enabled);
    c.noise_enabled = get_or(j, "noise_enabled", c.noise_enabled);
    c.adc_bits = get_or(j, "adc_bits", c.adc_bits);
    c.samples_per_symbol = get_or(j, "samples_per_symbol", c.samples_per_symbol);
    c.symbol_rate = get_or(j, "symbol_rate", c.symbol_rate);
    c.mod_bias = get_or(j, "mod_bias", c.mod_bias);
    c.mod_depth = get_or(j, "mod_depth", c.mod_depth);
    c.noise_seed = get_or(j, "noise_seed", c.noise_seed);
    c.validate();
    return c;
}

Json to_json(const RidgeConfig& c) { return Json{{"lambda", c.lambda}, {"taps", c.taps}, {"washout", c.washout}}; }

RidgeConfig ridge_from_json(const Json& j) {
    RidgeConfig c;
    c.lambda = get_or(j, "lambda", c.lambda);
    c.taps = get_or(j, "taps", c.taps);
    c.washout = get_or(j, "washout", c.washout);
    c.validate();
    return c;
}

Json to_json(const NarmaParams& p) {
    return Json{{"a1", p.a1}, {"a2", p.a2}, {"b", p.b}, {"c", p.c}, {"m", p.m}, {"divergence_bound", p.divergence_bound}};
}

NarmaParams narma_from_json(const Json& j) {
    NarmaParams p;
    p.a1 = get_or(j, "a1", p.a1);
    p.a2 = get_or(j, "a2", p.a2);
    p.b = get_or(j, "b", p.b);
    p.c = get_or(j, "c", p.c);
    p.m = get_or(j, "m", p.m);
    p.divergence_bound = get_or(j, "divergence_bound", p.divergence_bound);
    p.validate();
    return p;
}

Json to_json(const ChallengeConfig& c) {
    return Json{{"length", c.length}, {"input_lo", c.input_lo}, {"input_hi", c.input_hi}, {"max_retries", c.max_retries}};
}

ChallengeConfig challenge_config_from_json(const Json& j) {
    ChallengeConfig c;
    c.length = get_or(j, "length", c.length);
    c.input_lo = get_or(j, "input_lo", c.input_lo);
    c.input_hi = get_or(j, "input_hi", c.input_hi);
    c.max_retries = get_or(j, "max_retries", c.max_retries);
    return c;
}

Json to_json(const PipelineConfig& c) {
    return Json{{"detection", to_json(c.detection)},
                {"ridge", to_json(c.ridge)},
                {"narma", to_json(c.narma)},
                {"challenge", to_json(c.challenge)}};
}

PipelineConfig pipeline_from_json(const Json& j) {
    PipelineConfig c;
    if (j.contains("detection")) c.detection = detection_from_json(j["detection"]);
    if (j.contains("ridge")) c.ridge = ridge_from_json(j["ridge"]);
    if (j.contains("narma")) c.narma = narma_from_json(j["narma"]);
    if (j.contains("challenge")) c.challenge = challenge_config_from_json(j["challenge"]);
    return c;
}

Json to_json(const DeviceProfile& d) {
    Json rec = Json::object();
    rec["dn_eff_loop"] = d.deviation_record.dn_eff_loop;
    Json mrrs = Json::array();
    for (const auto& node : d.deviation_record.mrrs) {
        Json row = Json::array();
        for (const auto& m : node)
            row.push_back(Json{{"dn_eff_ring", m.dn_eff_ring},
                               {"dn_eff_segment", m.dn_eff_segment},
                               {"resonance_jitter", m.resonance_jitter},
                               {"coupling", m.coupling}});
        mrrs.push_back(row);
    }
    rec["mrrs"] = mrrs;
    Json resonances = Json::array();
    for (const auto& node : d.nodes) {
        Json row = Json::array();
        for (const auto& m : node.mrrs) row.push_back(m.resonance_offset);
        resonances.push_back(row);
    }
    Json j{{"schema", kDeviceSchema},
           {"fab_seed", d.fab_seed},
           {"nominal", to_json(d.nominal)},
           {"deviation_record", rec},
           {"resonance_offsets", resonances}};
    if (d.adc_range) j["adc_range"] = Json{{"lo", d.adc_range->lo}, {"hi", d.adc_range->hi}};
    return j;
}

DeviceProfile device_from_json(const Json& j) {
    check_schema(j, kDeviceSchema);
    DeviationRecord rec;
    rec.dn_eff_loop = j["deviation_record"]["dn_eff_loop"].get<std::vector<double>>();
    for (const auto& row : j["deviation_record"]["mrrs"]) {
        std::vector<MrrDeviation> r;
        for (const auto& m : row)
            r.push_back({m["dn_eff_ring"].get<double>(), m["dn_eff_segment"].get<double>(),
                         m["resonance_jitter"].get<double>(), m["coupling"].get<double>()});
        rec.mrrs.push_back(std::move(r));
    }
    DeviceProfile d = build_device(nominal_from_json(j["nominal"]), j["fab_seed"].get<std::uint64_t>(), std::move(rec));
    if (j.contains("adc_range"))
        d.adc_range = AdcRange{j["adc_range"]["lo"].get<std::vector<double>>(), j["adc_range"]["hi"].get<std::vector<double>>()};
    return d;
}

Json to_json(const Challenge& c, bool inline_series) {
    Json j{{"schema", kChallengeSchema},
           {"seed", c.seed},
           {"sub_seed", c.sub_seed},
           {"retries", c.retries},
           {"length", c.length()},
           {"input_lo", c.input_lo},
           {"input_hi", c.input_hi}};
    if (inline_series) {
        j["x_in"] = c.x_in;
        j["y_out"] = c.y_out;
    }
    return j;
}

Challenge challenge_from_json(const Json& j, const NarmaParams& params, const ChallengeConfig& cfg) {
    check_schema(j, kChallengeSchema);
    ChallengeConfig c = cfg;
    c.length = j["length"].get<std::size_t>();
    c.input_lo = get_or(j, "input_lo", c.input_lo);
    c.input_hi = get_or(j, "input_hi", c.input_hi);
    Challenge ch = make_challenge(j["seed"].get<std::uint64_t>(), params, c);
    if (j.contains("x_in") && j["x_in"].get<std::vector<double>>() != ch.x_in)
        throw FormatError("inline challenge series does not match its seed");
    return ch;
}

Json to_json(const CalibrationProfile& p) {
    Json j{{"schema", kCalibrationSchema},
           {"mode", to_string(p.mode)},
           {"mu", p.mu},
           {"sigma", p.sigma},
           {"n_bit", p.n_bit},
           {"encoding", to_string(p.encoding)},
           {"ensemble_size", p.ensemble_size}};
    if (p.mode == CalibrationMode::PerWeight) {
        j["weight_mu"] = vec(p.weight_mu);
        j["weight_sigma"] = vec(p.weight_sigma);
    }
    return j;
}

CalibrationProfile calibration_from_json(const Json& j) {
    check_schema(j, kCalibrationSchema);
    CalibrationProfile p;
    p.mode = parse_calibration_mode(j["mode"].get<std::string>());
    p.mu = j["mu"].get<double>();
    p.sigma = j["sigma"].get<double>();
    p.n_bit = j["n_bit"].get<int>();
    p.encoding = parse_encoding(j["encoding"].get<std::string>());
    p.ensemble_size = j["ensemble_size"].get<std::size_t>();
    if (p.mode == CalibrationMode::PerWeight) {
        p.weight_mu = vec_from(j["weight_mu"]);
        p.weight_sigma = vec_from(j["weight_sigma"]);
    }
    p.validate();
    return p;
}

Json to_json(const HelperData& h) {
    return Json{{"schema", kHelperSchema},
                {"code", {{"family", "bch-narrow-sense-shortened"}, {"key_len", h.key_len}, {"t", h.t}, {"m", h.m}}},
                {"parity_bits", h.parity_bits()},
                {"parity", h.parity.to_string()},
                {"digest_sha256", to_hex(h.digest)}};
}

HelperData helper_from_json(const Json& j) {
    check_schema(j, kHelperSchema);
    HelperData h;
    h.key_len = j["code"]["key_len"].get<int>();
    h.t = j["code"]["t"].get<int>();
    h.m = j["code"]["m"].get<int>();
    h.parity = BitVector::from_string(j["parity"].get<std::string>());
    if (h.parity_bits() != j["parity_bits"].get<int>()) throw FormatError("parity length mismatch in helper data");
    h.digest = digest_from_hex(j["digest_sha256"].get<std::string>());
    return h;
}

Json to_json(const nist::BatteryReport& r) {
    Json tests = Json::array();
    for (const auto& t : r.tests)
        tests.push_back(Json{{"name", t.name},
                             {"applicable", t.applicable},
                             {"passed", t.passed},
                             {"proportion", t.proportion},
                             {"proportion_min", t.proportion_min},
                             {"uniformity_p", t.uniformity_p},
                             {"uniformity_applicable", t.uniformity_applicable},
                             {"verdict", t.verdict},
                             {"p_values", t.p_values},
                             {"skipped", t.skipped}});
    return Json{{"schema", kBatterySchema},
                {"alpha", r.alpha},
                {"sequences", r.sequences},
                {"sequence_bits", r.sequence_bits},
                {"all_passed", r.all_passed()},
                {"tests", tests}};
}

Json to_json(const HammingStats& s) {
    return Json{{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}, {"count", s.count}};
}

std::string config_digest(const Json& j) {
    const std::string s = j.dump();
    return to_hex(sha256(std::vector<std::uint8_t>(s.begin(), s.end())));
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string bit_grid_csv(const std::vector<CellResult>& cells) {
    std::ostringstream os;
    os << "m_bit,n_bit,intra_mean,intra_std,inter_mean,inter_std,eer,feasible\n";
    for (const auto& c : cells)
        os << c.m_bit << ',' << c.n_bit << ',' << num(c.report.intra.mean) << ',' << num(c.report.intra.std) << ','
           << num(c.report.inter.mean) << ',' << num(c.report.inter.std) << ',' << num(c.report.eer) << ','
           << (c.feasible ? 1 : 0) << '\n';
    return os.str();
}

std::string mrr_count_csv(const std::vector<MrrCountRow>& rows) {
    std::ostringstream os;
    os << "mrrs_per_node,channels,key_bits,intra_mean,intra_std,inter_mean,inter_std,eer,mean_nmse\n";
    for (const auto& r : rows)
        os << r.mrrs_per_node << ',' << r.channels << ',' << r.cell.key_bits << ',' << num(r.cell.report.intra.mean) << ','
           << num(r.cell.report.intra.std) << ',' << num(r.cell.report.inter.mean) << ',' << num(r.cell.report.inter.std)
           << ',' << num(r.cell.report.eer) << ',' << num(r.cell.mean_nmse) << '\n';
    return os.str();
}

std::string ecc_csv(const std::vector<EccSweepRow>& rows) {
    std::ostringstream os;
    os << "t,m,parity_bits,intra_corrected,inter_accepted\n";
    for (const auto& r : rows)
        os << r.t << ',' << r.m << ',' << r.parity_bits << ',' << num(r.intra_corrected) << ',' << num(r.inter_accepted) << '\n';
    return os.str();
}

std::string histogram_csv(const HammingStats& s) {
    std::ostringstream os;
    os << "bin_left,count\n";
    for (std::size_t i = 0; i < s.histogram.size(); ++i) os << num(static_cast<double>(i) * s.bin_width) << ',' << s.histogram[i] << '\n';
    return os.str();
}

}  // namespace npuf::io
