// npuf: command-line driver for the photonic reservoir PUF simulator.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "npuf/errors.hpp"
#include "npuf/experiment.hpp"
#include "npuf/io.hpp"
#include "npuf/seeding.hpp"

namespace fs = std::filesystem;
using npuf::io::Json;

namespace {

constexpr int kExitRejected = 3;

struct Common {
    std::string config_path;
    unsigned jobs = 1;
    std::string out;
};

npuf::ExperimentConfig load_config(const Common& c) {
    if (c.config_path.empty()) return npuf::ExperimentConfig{};
    return npuf::experiment_from_json(npuf::io::read_json(c.config_path));
}

std::string output_path(const npuf::ExperimentConfig& cfg, const Common& c, const std::string& default_name) {
    fs::path p = c.out.empty() ? fs::path(cfg.output_dir) / default_name : fs::path(c.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p.string();
}

Json provenance(const npuf::ExperimentConfig& cfg, const std::string& command) {
    return Json{{"command", command},
                {"config_digest", npuf::io::config_digest(npuf::to_json(cfg))},
                {"master_seed", cfg.master_seed}};
}

std::string csv_header(const npuf::ExperimentConfig& cfg, const std::string& command) {
    return "# command=" + command + " config_digest=" + npuf::io::config_digest(npuf::to_json(cfg)) +
           " master_seed=" + std::to_string(cfg.master_seed) + "\n";
}

void write_artifact(const std::string& path, Json j, const npuf::ExperimentConfig& cfg, const std::string& command) {
    j["provenance"] = provenance(cfg, command);
    npuf::io::write_json(path, j);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

npuf::DeviceProfile load_or_fabricate(const std::string& device_path, const npuf::ExperimentConfig& cfg,
                                      bool allow_calibration) {
    npuf::DeviceProfile dev = device_path.empty() ? npuf::fabricate(cfg.nominal, cfg.fab_seed)
                                                  : npuf::io::device_from_json(npuf::io::read_json(device_path));
    if (!dev.adc_range) {
        if (!allow_calibration) throw npuf::ConfigError("device has no ADC calibration and --no-calibrate was given");
        npuf::calibrate_device_adc(dev, cfg.pipeline);
    }
    return dev;
}

struct CalibrationFile {
    npuf::CalibrationProfile profile;
    int adc_bits = 0;
};

Json calibration_json(const npuf::CalibrationProfile& p, int adc_bits, std::uint64_t fab_seed) {
    Json j = npuf::io::to_json(p);
    j["adc_bits"] = adc_bits;
    j["fab_seed"] = fab_seed;
    return j;
}

CalibrationFile read_calibration(const std::string& path) {
    const Json j = npuf::io::read_json(path);
    return {npuf::io::calibration_from_json(j), j.at("adc_bits").get<int>()};
}

npuf::CalibrationProfile run_calibration(const npuf::ResponseEngine& eng, const npuf::ExperimentConfig& cfg,
                                         unsigned jobs) {
    const auto ens = npuf::weight_ensemble(eng, cfg.master_seed, cfg.keygen.calibration_crps, jobs);
    return npuf::calibrate(ens, cfg.keygen.n_bit, cfg.keygen.encoding, cfg.keygen.mode);
}

// ---- commands ----

int cmd_init_config(const npuf::ExperimentConfig& cfg, const Common& c) {
    const std::string path = c.out.empty() ? "experiment.json" : c.out;
    npuf::io::write_json(path, npuf::to_json(cfg));
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_fabricate(const npuf::ExperimentConfig& cfg, const Common& c) {
    npuf::DeviceProfile dev = npuf::fabricate(cfg.nominal, cfg.fab_seed);
    npuf::calibrate_device_adc(dev, cfg.pipeline);
    const std::string path = output_path(cfg, c, "device.json");
    write_artifact(path, npuf::io::to_json(dev), cfg, "fabricate");

    const auto& ring = dev.nodes.front().mrrs.front();
    std::cout << "device fab_seed=" << dev.fab_seed << " channels=" << dev.channels() << " nodes=" << dev.nodes.size()
              << "\n";
    std::cout << "ring FSR " << fmt("%.2f", ring.fsr() / 1e9) << " GHz, linewidth "
              << fmt("%.3f", npuf::measure_linewidth(ring, 1e6) / 1e9) << " GHz\n";
    for (std::size_t n = 0; n < dev.nodes.size(); ++n) {
        std::cout << "node " << n << " resonances (GHz):";
        for (const auto& m : dev.nodes[n].mrrs) std::cout << ' ' << fmt("%.2f", m.resonance_offset / 1e9);
        std::cout << "\n";
    }
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_challenge(const npuf::ExperimentConfig& cfg, const Common& c, std::uint64_t seed, bool inline_series) {
    const auto ch = npuf::make_challenge(seed, cfg.pipeline.narma, cfg.pipeline.challenge);
    const std::string path = output_path(cfg, c, "challenge-" + std::to_string(seed) + ".json");
    write_artifact(path, npuf::io::to_json(ch, inline_series), cfg, "challenge");
    const auto [lo, hi] = std::minmax_element(ch.y_out.begin(), ch.y_out.end());
    std::cout << "challenge seed=" << seed << " length=" << ch.length() << " retries=" << ch.retries << " y in ["
              << fmt("%.4f", *lo) << ", " << fmt("%.4f", *hi) << "]\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_calibrate(const npuf::ExperimentConfig& cfg, const Common& c, const std::string& device_path) {
    const auto dev = load_or_fabricate(device_path, cfg, true);
    const npuf::ResponseEngine eng(dev, cfg.pipeline);
    const auto prof = run_calibration(eng, cfg, c.jobs);
    const std::string path = output_path(cfg, c, "calibration.json");
    write_artifact(path, calibration_json(prof, cfg.pipeline.detection.adc_bits, dev.fab_seed), cfg, "calibrate");
    std::cout << "calibration over " << prof.ensemble_size << " CRPs (" << to_string(prof.mode) << "): mu="
              << fmt("%.6g", prof.mu) << " sigma=" << fmt("%.6g", prof.sigma) << "\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_respond(const npuf::ExperimentConfig& cfg, const Common& c, const std::string& device_path,
                std::uint64_t challenge_seed, const std::string& noise_opt, const std::string& calibration_path,
                bool no_calibrate) {
    const auto dev = load_or_fabricate(device_path, cfg, !no_calibrate);
    const npuf::ResponseEngine eng(dev, cfg.pipeline);
    const int adc_bits = cfg.pipeline.detection.adc_bits;

    npuf::CalibrationProfile prof;
    std::string source;
    if (!calibration_path.empty()) {
        const auto f = read_calibration(calibration_path);
        if (f.adc_bits != adc_bits)
            throw npuf::ConfigError("calibration was made at m_bit=" + std::to_string(f.adc_bits) + ", response uses " +
                                    std::to_string(adc_bits));
        prof = f.profile;
        source = "file";
    } else if (no_calibrate) {
        throw npuf::ConfigError("no calibration file given and --no-calibrate set");
    } else {
        prof = run_calibration(eng, cfg, c.jobs);
        source = "computed";
    }

    const std::uint64_t noise_seed =
        noise_opt.empty() ? npuf::derive_seed(cfg.master_seed, "respond-noise", challenge_seed) : std::stoull(noise_opt);
    const auto ch = eng.challenge(challenge_seed);
    const auto r = eng.respond(ch, noise_seed);
    const auto key = npuf::derive_key(r.weights, prof);

    Json j{{"schema", npuf::io::kResponseSchema},
           {"fab_seed", dev.fab_seed},
           {"challenge_seed", challenge_seed},
           {"noise_seed", noise_seed},
           {"adc_bits", adc_bits},
           {"nmse", r.nmse},
           {"intercept", r.intercept},
           {"weights", std::vector<double>(r.weights.data(), r.weights.data() + r.weights.size())},
           {"key_bits", key.size()},
           {"key", key.bits.to_string()},
           {"calibration_source", source},
           {"calibration", npuf::io::to_json(prof)}};
    const std::string path = output_path(cfg, c, "response-" + std::to_string(challenge_seed) + ".json");
    write_artifact(path, j, cfg, "respond");
    std::cout << "key length " << key.size() << " bits, nmse " << fmt("%.4f", r.nmse) << " (m_bit=" << adc_bits
              << ", n_bit=" << prof.n_bit << ")\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_sweep_bitgrid(const npuf::ExperimentConfig& cfg, const Common& c, const std::string& device_path) {
    const auto dev = load_or_fabricate(device_path, cfg, true);
    const npuf::ResponseEngine eng(dev, cfg.pipeline);
    const auto cells = npuf::sweep_bit_grid(eng, cfg.sweep.m_bits, cfg.sweep.n_bits, cfg.budget(c.jobs),
                                            cfg.keygen.encoding, cfg.keygen.mode);
    const std::string path = output_path(cfg, c, "bitgrid.csv");
    npuf::io::write_text(path, csv_header(cfg, "sweep bitgrid") + npuf::io::bit_grid_csv(cells));

    std::ostringstream hist;
    hist << csv_header(cfg, "sweep bitgrid") << "m_bit,n_bit,kind,bin_left,count\n";
    for (const auto& cell : cells)
        for (const auto* s : {&cell.report.intra, &cell.report.inter}) {
            const char* kind = s == &cell.report.intra ? "intra" : "inter";
            for (std::size_t b = 0; b < s->histogram.size(); ++b)
                if (s->histogram[b])
                    hist << cell.m_bit << ',' << cell.n_bit << ',' << kind << ','
                         << fmt("%.10g", static_cast<double>(b) * s->bin_width) << ',' << s->histogram[b] << '\n';
        }
    const fs::path hist_path = fs::path(path).parent_path() / (fs::path(path).stem().string() + "_hist.csv");
    npuf::io::write_text(hist_path.string(), hist.str());

    std::cout << "m_bit n_bit   intra          inter          EER\n";
    for (const auto& cell : cells)
        std::cout << fmt("%5.0f", cell.m_bit) << fmt("%6.0f", cell.n_bit) << "   "
                  << fmt("%.3f", cell.report.intra.mean) << "±" << fmt("%.3f", cell.report.intra.std) << "    "
                  << fmt("%.3f", cell.report.inter.mean) << "±" << fmt("%.3f", cell.report.inter.std) << "    "
                  << fmt("%.2e", cell.report.eer) << (cell.feasible ? "" : "  (beyond ADC reach)") << "\n";
    std::cout << "wrote " << path << " and " << hist_path.string() << "\n";
    return 0;
}

int cmd_sweep_mrr(const npuf::ExperimentConfig& cfg, const Common& c) {
    const auto rows = npuf::sweep_mrr_count(cfg.nominal, cfg.fab_seed, cfg.pipeline, cfg.sweep.mrr_counts,
                                            cfg.sweep.mrr_m_bit, cfg.sweep.mrr_n_bit, cfg.budget(c.jobs),
                                            cfg.keygen.encoding);
    const std::string path = output_path(cfg, c, "mrr.csv");
    npuf::io::write_text(path, csv_header(cfg, "sweep mrr") + npuf::io::mrr_count_csv(rows));
    std::cout << "mrrs/node channels key_bits  intra   inter   EER       nmse\n";
    for (const auto& r : rows)
        std::cout << fmt("%9.0f", r.mrrs_per_node) << fmt("%9.0f", r.channels) << fmt("%9.0f", r.cell.key_bits) << "  "
                  << fmt("%.3f", r.cell.report.intra.mean) << "   " << fmt("%.3f", r.cell.report.inter.mean) << "   "
                  << fmt("%.2e", r.cell.report.eer) << "  " << fmt("%.3f", r.cell.mean_nmse) << "\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_sweep_ecc(const npuf::ExperimentConfig& cfg, const Common& c, const std::string& device_path) {
    const auto dev = load_or_fabricate(device_path, cfg, true);
    const npuf::ResponseEngine eng(dev, cfg.ecc_pipeline());
    npuf::SweepBudget b = cfg.budget(c.jobs);
    b.intra_trials = cfg.sweep.ecc_intra_trials;
    b.inter_challenges = cfg.sweep.ecc_inter_challenges;
    const auto ws = npuf::collect_weights(eng, {cfg.sweep.ecc_m_bit}, b).front();
    const auto prof = npuf::calibrate(ws.calibration, cfg.sweep.ecc_n_bit, cfg.sweep.ecc_encoding, cfg.keygen.mode);

    std::vector<npuf::BitVector> intra, inter;
    for (const auto& w : ws.intra) intra.push_back(npuf::derive_key(w, prof).bits);
    for (const auto& w : ws.inter) inter.push_back(npuf::derive_key(w, prof).bits);
    const npuf::BitVector enrolled = intra.front();
    intra.erase(intra.begin());
    std::size_t max_intra = 0, min_inter = enrolled.size();
    for (const auto& k : intra) max_intra = std::max(max_intra, k.hamming(enrolled));
    for (const auto& k : inter) min_inter = std::min(min_inter, k.hamming(enrolled));

    const auto rows = npuf::ecc_sweep(enrolled, intra, inter, cfg.sweep.ecc_t, c.jobs);
    const std::string path = output_path(cfg, c, "ecc.csv");
    npuf::io::write_text(path, csv_header(cfg, "sweep ecc") + npuf::io::ecc_csv(rows));

    std::cout << "key " << enrolled.size() << " bits; worst intra flips " << max_intra << " of " << intra.size()
              << " repeats; closest inter key " << min_inter << " flips of " << inter.size() << " challenges\n";
    std::cout << "   t   m  parity  intra_ok  inter_accepted\n";
    int lo = -1, hi = -1;
    for (const auto& r : rows) {
        std::cout << fmt("%4.0f", r.t) << fmt("%4.0f", r.m) << fmt("%8.0f", r.parity_bits) << fmt("%10.3f", r.intra_corrected)
                  << fmt("%16.3f", r.inter_accepted) << "\n";
        if (r.intra_corrected == 1.0 && r.inter_accepted == 0.0) {
            if (lo < 0) lo = r.parity_bits;
            hi = r.parity_bits;
        }
    }
    if (lo >= 0)
        std::cout << "margin: parity " << lo << ".." << hi << " bits corrects every repeat and rejects every other key\n";
    else
        std::cout << "margin: no tested code separates the classes\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

npuf::BitVector key_from_response(const std::string& path) {
    const Json j = npuf::io::read_json(path);
    if (j.value("schema", "") != npuf::io::kResponseSchema) throw npuf::FormatError(path + ": not a response file");
    return npuf::BitVector::from_string(j.at("key").get<std::string>());
}

int cmd_enroll(const npuf::ExperimentConfig& cfg, const Common& c, const std::string& response_path, int t) {
    const auto key = key_from_response(response_path);
    const auto h = npuf::enroll(key, t);
    const std::string path = output_path(cfg, c, "helper.json");
    write_artifact(path, npuf::io::to_json(h), cfg, "enroll");
    std::cout << "enrolled " << key.size() << "-bit key: t=" << h.t << " m=" << h.m << " parity " << h.parity_bits()
              << " bits\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_reconstruct(const npuf::ExperimentConfig& cfg, const Common& c, const std::string& helper_path,
                    const std::string& response_path) {
    const auto h = npuf::io::helper_from_json(npuf::io::read_json(helper_path));
    const auto r = npuf::reconstruct(h, key_from_response(response_path));
    Json j{{"schema", "npuf.reconstruction/1"}, {"status", to_string(r.status)}, {"corrected", r.corrected}};
    if (r.accepted()) j["key"] = r.key.to_string();
    const std::string path = output_path(cfg, c, "reconstruction.json");
    write_artifact(path, j, cfg, "reconstruct");
    std::cout << "status " << to_string(r.status);
    if (r.accepted()) std::cout << " (" << r.corrected << " bits corrected)";
    std::cout << "\nwrote " << path << "\n";
    return r.accepted() ? 0 : kExitRejected;
}

int cmd_nist(const npuf::ExperimentConfig& cfg, const Common& c, const std::string& bits_path, const std::string& corpus,
             const std::string& format, std::size_t sequence_bits, double alpha, const std::vector<std::string>& tests) {
    const auto fmt_kind = npuf::nist::parse_format(format);
    std::vector<npuf::BitVector> seqs;
    if (!bits_path.empty()) {
        seqs = npuf::nist::split_sequences(npuf::nist::import_bits(bits_path, fmt_kind), sequence_bits);
    } else {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(corpus))
            if (e.is_regular_file() && e.path().extension() != ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) seqs.push_back(npuf::nist::import_bits(f.string(), fmt_kind));
    }
    if (seqs.empty()) throw npuf::InputError("no sequences to test");
    std::vector<npuf::nist::TestKind> kinds;
    for (const auto& t : tests) kinds.push_back(npuf::nist::parse_test(t));
    if (kinds.empty()) kinds = npuf::nist::all_tests();
    const auto rep = npuf::nist::run_battery(seqs, alpha, {}, kinds, c.jobs);
    const std::string path = output_path(cfg, c, "nist.json");
    write_artifact(path, npuf::io::to_json(rep), cfg, "nist");
    std::cout << rep.sequences << " sequences of " << rep.sequence_bits << " bits, alpha " << alpha << "\n"
              << rep.table() << (rep.all_passed() ? "all tests passed\n" : "some tests FAILED\n");
    for (const auto& t : rep.tests)
        for (const auto& s : t.skipped) std::cout << "note: " << t.name << ": " << s << "\n";
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_export_bits(const npuf::ExperimentConfig& cfg, const Common& c, const std::string& device_path,
                    const std::string& calibration_path, const std::vector<std::string>& responses, std::size_t count,
                    bool extend, const std::string& format) {
    std::vector<npuf::BitVector> keys;
    if (!responses.empty()) {
        for (const auto& r : responses) keys.push_back(key_from_response(r));
    } else {
        const auto dev = load_or_fabricate(device_path, cfg, true);
        const npuf::ResponseEngine eng(dev, cfg.pipeline);
        npuf::CalibrationProfile prof;
        if (!calibration_path.empty()) {
            const auto f = read_calibration(calibration_path);
            if (f.adc_bits != cfg.pipeline.detection.adc_bits) throw npuf::ConfigError("calibration m_bit mismatch");
            prof = f.profile;
        } else {
            prof = run_calibration(eng, cfg, c.jobs);
        }
        keys.resize(count);
        npuf::parallel_for(count, c.jobs, [&](std::size_t i) {
            const auto ch = eng.challenge(npuf::derive_seed(cfg.master_seed, "corpus-challenge", i));
            keys[i] = npuf::derive_key(eng.respond(ch, npuf::derive_seed(cfg.master_seed, "corpus-noise", i)).weights, prof).bits;
        });
    }
    if (keys.empty()) throw npuf::InputError("no keys to export");
    npuf::BitVector all;
    if (extend) {
        all = npuf::nist::permute_extend(keys, npuf::derive_seed(cfg.master_seed, "corpus-extend"));
    } else {
        for (const auto& k : keys) all.append(k);
    }
    const auto kind = npuf::nist::parse_format(format);
    const std::string path = output_path(cfg, c, kind == npuf::nist::BitFormat::Packed ? "corpus.bin" : "corpus.txt");
    npuf::nist::export_bits(all, path, kind);
    Json side = kind == npuf::nist::BitFormat::Packed ? npuf::io::read_json(path + ".json")
                                                     : Json{{"format", "ascii01"}, {"bits", all.size()}};
    side["keys"] = keys.size();
    side["permute_extended"] = extend;
    write_artifact(path + ".json", side, cfg, "export-bits");
    std::cout << "exported " << all.size() << " bits from " << keys.size() << " keys (ones: " << all.popcount()
              << ")\nwrote " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"npuf: photonic reservoir PUF simulator"};
    app.require_subcommand(1);
    Common common;
    std::uint64_t master_seed = 0, fab_seed = 0;
    int mrrs_per_node = 0, adc_bits = 0, n_bit = 0;
    std::string encoding, modulation;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "experiment config (JSON); defaults apply when omitted")
            ->check(CLI::ExistingFile);
        sub->add_option("-j,--jobs", common.jobs, "worker threads for CRP evaluation")->check(CLI::Range(1u, 256u));
        sub->add_option("-o,--out", common.out, "output file (default: <output_dir>/<name>)");
        sub->add_option("--master-seed", master_seed, "override the config master seed");
        sub->add_option("--fab-seed", fab_seed, "override the fabrication seed (default 6)");
        sub->add_option("--mrrs-per-node", mrrs_per_node, "override MRRs per node (6 gives 24 channels)");
        sub->add_option("--adc-bits", adc_bits, "override the ADC resolution m_bit (default 3)")->check(CLI::Range(1, 16));
        sub->add_option("--n-bit", n_bit, "override bits per weight (default 4)")->check(CLI::Range(1, 16));
        sub->add_option("--encoding", encoding, "bin encoding: natural | gray");
        sub->add_option("--modulation", modulation, "modulator: amplitude | intensity");
    };

    auto* init = app.add_subcommand("init-config", "write the effective experiment config");
    add_common(init);

    auto* fab = app.add_subcommand("fabricate", "sample a device and calibrate its ADC range");
    add_common(fab);

    std::uint64_t ch_seed = 0;
    bool inline_series = false;
    auto* chal = app.add_subcommand("challenge", "generate a NARMA challenge record");
    add_common(chal);
    chal->add_option("--seed", ch_seed, "challenge seed")->required();
    chal->add_flag("--inline", inline_series, "store the input and target series");

    std::string device_path;
    auto* cal = app.add_subcommand("calibrate", "estimate weight statistics over a challenge ensemble");
    add_common(cal);
    cal->add_option("--device", device_path, "device profile (fabricated from config when omitted)");

    std::string noise_opt, calibration_path;
    bool no_calibrate = false;
    auto* resp = app.add_subcommand("respond", "train the readout for one challenge and derive the key");
    add_common(resp);
    resp->add_option("--device", device_path, "device profile");
    resp->add_option("--challenge-seed", ch_seed, "challenge seed")->required();
    resp->add_option("--noise-seed", noise_opt, "detector noise seed (derived from the master seed by default)");
    resp->add_option("--calibration", calibration_path, "calibration file from `calibrate`");
    resp->add_flag("--no-calibrate", no_calibrate, "fail instead of calibrating when inputs lack calibration");

    std::string sweep_kind;
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep: bitgrid | mrr | ecc");
    add_common(sweep);
    sweep->add_option("kind", sweep_kind, "bitgrid, mrr or ecc")->required()->check(CLI::IsMember({"bitgrid", "mrr", "ecc"}));
    sweep->add_option("--device", device_path, "device profile");

    std::string response_path, helper_path;
    int t = 32;
    auto* enr = app.add_subcommand("enroll", "produce BCH helper data for a response key");
    add_common(enr);
    enr->add_option("--response", response_path, "response file")->required()->check(CLI::ExistingFile);
    enr->add_option("-t,--t", t, "correctable errors (0: digest only)")->check(CLI::Range(0, 4096));

    auto* rec = app.add_subcommand("reconstruct", "recover the enrolled key from a noisy response");
    add_common(rec);
    rec->add_option("--helper", helper_path, "helper data")->required()->check(CLI::ExistingFile);
    rec->add_option("--response", response_path, "response file")->required()->check(CLI::ExistingFile);

    std::string bits_path, corpus_dir, format = "packed";
    std::size_t sequence_bits = 1000000;
    double alpha = 0.01;
    std::vector<std::string> tests;
    auto* nist = app.add_subcommand("nist", "run the randomness test battery");
    add_common(nist);
    auto* bits_opt = nist->add_option("--bits", bits_path, "bit stream split into sequences")->check(CLI::ExistingFile);
    auto* corpus_opt = nist->add_option("--corpus", corpus_dir, "directory with one sequence per file")->check(CLI::ExistingDirectory);
    bits_opt->excludes(corpus_opt);
    nist->add_option("--format", format, "packed | ascii");
    nist->add_option("--sequence-bits", sequence_bits, "sequence length when splitting --bits");
    nist->add_option("--alpha", alpha, "significance level");
    nist->add_option("--tests", tests, "subset of tests by name");

    std::vector<std::string> responses;
    std::size_t count = 500;
    bool extend = false;
    auto* exp = app.add_subcommand("export-bits", "concatenate response keys into a test corpus");
    add_common(exp);
    exp->add_option("--device", device_path, "device profile");
    exp->add_option("--calibration", calibration_path, "calibration file");
    exp->add_option("--responses", responses, "response files to concatenate instead of generating keys");
    exp->add_option("--count", count, "number of challenges when generating keys");
    exp->add_flag("--extend", extend, "append a seeded block permutation of the corpus");
    exp->add_option("--format", format, "packed | ascii");

    CLI11_PARSE(app, argc, argv);

    try {
        npuf::ExperimentConfig cfg = load_config(common);
        auto* sub = app.get_subcommands().front();
        if (sub->count("--master-seed")) cfg.master_seed = master_seed;
        if (sub->count("--fab-seed")) cfg.fab_seed = fab_seed;
        if (sub->count("--mrrs-per-node")) cfg.nominal.mrrs_per_node = mrrs_per_node;
        if (sub->count("--adc-bits")) cfg.pipeline.detection.adc_bits = adc_bits;
        if (sub->count("--n-bit")) cfg.keygen.n_bit = n_bit;
        if (sub->count("--encoding")) cfg.keygen.encoding = npuf::parse_encoding(encoding);
        if (sub->count("--modulation")) cfg.pipeline.detection.modulation = npuf::parse_modulation(modulation);
        cfg.validate();

        if (sub == init) return cmd_init_config(cfg, common);
        if (sub == fab) return cmd_fabricate(cfg, common);
        if (sub == chal) return cmd_challenge(cfg, common, ch_seed, inline_series);
        if (sub == cal) return cmd_calibrate(cfg, common, device_path);
        if (sub == resp)
            return cmd_respond(cfg, common, device_path, ch_seed, noise_opt, calibration_path, no_calibrate);
        if (sub == sweep) {
            if (sweep_kind == "bitgrid") return cmd_sweep_bitgrid(cfg, common, device_path);
            if (sweep_kind == "mrr") return cmd_sweep_mrr(cfg, common);
            return cmd_sweep_ecc(cfg, common, device_path);
        }
        if (sub == enr) return cmd_enroll(cfg, common, response_path, t);
        if (sub == rec) return cmd_reconstruct(cfg, common, helper_path, response_path);
        if (sub == nist) {
            if (bits_path.empty() && corpus_dir.empty()) throw npuf::ConfigError("nist needs --bits or --corpus");
            return cmd_nist(cfg, common, bits_path, corpus_dir, format, sequence_bits, alpha, tests);
        }
        if (sub == exp) return cmd_export_bits(cfg, common, device_path, calibration_path, responses, count, extend, format);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
