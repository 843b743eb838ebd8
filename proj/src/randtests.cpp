#include "npuf/randtests.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include "json.hpp"
#include <unsupported/Eigen/FFT>

#include "npuf/errors.hpp"
#include "npuf/seeding.hpp"

namespace npuf::nist {

namespace {

int floor_log2(std::size_t n) {
    int r = -1;
    while (n) {
        n >>= 1;
        ++r;
    }
    return r;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ApplicabilityError(msg);
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Overlapping m-bit pattern counts with wrap-around.
std::vector<std::size_t> pattern_counts(const BitVector& e, int m) {
    const std::size_t n = e.size();
    std::vector<std::size_t> counts(std::size_t{1} << m, 0);
    if (m == 0) {
        counts[0] = n;
        return counts;
    }
    const std::size_t mask = (std::size_t{1} << m) - 1;
    std::size_t v = 0;
    for (int j = 0; j < m - 1; ++j) v = (v << 1) | e.get(static_cast<std::size_t>(j) % n);
    for (std::size_t i = 0; i < n; ++i) {
        v = ((v << 1) | e.get((i + static_cast<std::size_t>(m) - 1) % n)) & mask;
        counts[v]++;
    }
    return counts;
}

double psi_sq(const BitVector& e, int m) {
    if (m <= 0) return 0.0;
    const double n = static_cast<double>(e.size());
    double s = 0.0;
    for (auto c : pattern_counts(e, m)) s += static_cast<double>(c) * static_cast<double>(c);
    return std::ldexp(s, m) / n - n;
}

double ap_phi(const BitVector& e, int m) {
    const double n = static_cast<double>(e.size());
    double s = 0.0;
    for (auto c : pattern_counts(e, m))
        if (c) {
            const double p = static_cast<double>(c) / n;
            s += p * std::log(p);
        }
    return s;
}

}  // namespace

const std::vector<TestKind>& all_tests() {
    static const std::vector<TestKind> k{TestKind::Frequency, TestKind::BlockFrequency, TestKind::CumulativeSums,
                                         TestKind::Runs,      TestKind::LongestRun,     TestKind::Rank,
                                         TestKind::FFT,       TestKind::ApproximateEntropy, TestKind::Serial};
    return k;
}

std::string name(TestKind k) {
    switch (k) {
        case TestKind::Frequency: return "Frequency";
        case TestKind::BlockFrequency: return "BlockFrequency";
        case TestKind::CumulativeSums: return "CumulativeSums";
        case TestKind::Runs: return "Runs";
        case TestKind::LongestRun: return "LongestRun";
        case TestKind::Rank: return "Rank";
        case TestKind::FFT: return "FFT";
        case TestKind::ApproximateEntropy: return "ApproximateEntropy";
        case TestKind::Serial: return "Serial";
    }
    return "?";
}

TestKind parse_test(const std::string& s) {
    for (auto k : all_tests())
        if (name(k) == s) return k;
    throw ConfigError("unknown test '" + s + "'");
}

double igamc(double a, double x) {
    if (x <= 0) return 1.0;
    return boost::math::gamma_q(a, x);
}

double frequency(const BitVector& e) {
    const double n = static_cast<double>(e.size());
    const double s = 2.0 * static_cast<double>(e.popcount()) - n;
    return std::erfc(std::abs(s) / std::sqrt(n) / std::sqrt(2.0));
}

double block_frequency(const BitVector& e, int m) {
    const std::size_t blocks = e.size() / static_cast<std::size_t>(m);
    require(blocks >= 1, "BlockFrequency needs at least one full block");
    double chi = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t ones = 0;
        for (int j = 0; j < m; ++j) ones += e.get(b * static_cast<std::size_t>(m) + static_cast<std::size_t>(j));
        const double pi = static_cast<double>(ones) / m - 0.5;
        chi += pi * pi;
    }
    chi *= 4.0 * m;
    return igamc(static_cast<double>(blocks) / 2.0, chi / 2.0);
}

double runs(const BitVector& e) {
    const std::size_t n = e.size();
    const double pi = static_cast<double>(e.popcount()) / static_cast<double>(n);
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n))) return 0.0;  // frequency prerequisite
    std::size_t v = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) v += e.get(k) != e.get(k + 1);
    const double num = std::abs(static_cast<double>(v) - 2.0 * static_cast<double>(n) * pi * (1 - pi));
    return std::erfc(num / (2.0 * std::sqrt(2.0 * static_cast<double>(n)) * pi * (1 - pi)));
}

double longest_run(const BitVector& e, int m) {
    std::vector<int> bounds;  // run length classes: <= bounds[0], ..., >= bounds.back()
    std::vector<double> probs;
    switch (m) {
        case 8:
            bounds = {1, 2, 3, 4};
            probs = {0.21484375, 0.3671875, 0.23046875, 0.1875};
            break;
        case 128:
            bounds = {4, 5, 6, 7, 8, 9};
            probs = {0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847};
            break;
        case 10000:
            bounds = {10, 11, 12, 13, 14, 15, 16};
            probs = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
            break;
        default: throw ConfigError("LongestRun block size must be 8, 128 or 10000");
    }
    const std::size_t blocks = e.size() / static_cast<std::size_t>(m);
    require(blocks >= 1, "LongestRun needs at least one block");
    std::vector<double> v(bounds.size(), 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        int best = 0, cur = 0;
        for (int j = 0; j < m; ++j) {
            cur = e.get(b * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)) ? cur + 1 : 0;
            best = std::max(best, cur);
        }
        std::size_t cls = 0;
        while (cls + 1 < bounds.size() && best > bounds[cls]) ++cls;
        v[cls] += 1;
    }
    double chi = 0.0;
    const double nb = static_cast<double>(blocks);
    for (std::size_t i = 0; i < v.size(); ++i) chi += (v[i] - nb * probs[i]) * (v[i] - nb * probs[i]) / (nb * probs[i]);
    return igamc(static_cast<double>(v.size() - 1) / 2.0, chi / 2.0);
}

std::vector<double> rank_probabilities(int rows, int cols) {
    auto p = [&](int r) {
        double prod = 1.0;
        for (int i = 0; i < r; ++i)
            prod *= (1 - std::ldexp(1.0, i - cols)) * (1 - std::ldexp(1.0, i - rows)) / (1 - std::ldexp(1.0, i - r));
        return std::ldexp(prod, r * (cols + rows - r) - rows * cols);
    };
    const int full = std::min(rows, cols);
    const double pf = p(full), pf1 = p(full - 1);
    return {pf, pf1, 1.0 - pf - pf1};
}

int gf2_rank(std::vector<std::vector<std::uint8_t>> m) {
    const int rows = static_cast<int>(m.size());
    const int cols = rows ? static_cast<int>(m[0].size()) : 0;
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r)
            if (m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(m[static_cast<std::size_t>(pivot)], m[static_cast<std::size_t>(rank)]);
        for (int r = 0; r < rows; ++r)
            if (r != rank && m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)])
                for (int k = 0; k < cols; ++k)
                    m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] ^= m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(k)];
        ++rank;
    }
    return rank;
}

double rank(const BitVector& e, int rows, int cols) {
    const std::size_t per = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    const std::size_t count = e.size() / per;
    require(count >= 1, "Rank needs at least one matrix");
    const int full = std::min(rows, cols);
    double f_full = 0, f_minus = 0;
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<std::vector<std::uint8_t>> mat(static_cast<std::size_t>(rows), std::vector<std::uint8_t>(static_cast<std::size_t>(cols)));
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                    e.get(k * per + static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c));
        const int rk = gf2_rank(std::move(mat));
        if (rk == full)
            f_full += 1;
        else if (rk == full - 1)
            f_minus += 1;
    }
    const auto p = rank_probabilities(32, 32);  // asymptotic class probabilities, as in the reference suite
    const double n = static_cast<double>(count);
    const double rest = n - f_full - f_minus;
    const double chi = (f_full - p[0] * n) * (f_full - p[0] * n) / (p[0] * n) +
                       (f_minus - p[1] * n) * (f_minus - p[1] * n) / (p[1] * n) +
                       (rest - p[2] * n) * (rest - p[2] * n) / (p[2] * n);
    return std::exp(-chi / 2.0);
}

double spectral(const BitVector& e) {
    const std::size_t n = e.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = e.get(i) ? 1.0 : -1.0;
    std::vector<std::complex<double>> s;
    Eigen::FFT<double> fft;
    fft.fwd(s, x);
    const double nd = static_cast<double>(n);
    const double threshold = std::sqrt(std::log(1.0 / 0.05) * nd);
    const double n0 = 0.95 * nd / 2.0;
    double n1 = 0;
    for (std::size_t i = 0; i < n / 2; ++i) n1 += std::abs(s[i]) < threshold;
    const double d = (n1 - n0) / std::sqrt(nd * 0.95 * 0.05 / 4.0);
    return std::erfc(std::abs(d) / std::sqrt(2.0));
}

double approximate_entropy(const BitVector& e, int m) {
    const double ap = ap_phi(e, m) - ap_phi(e, m + 1);
    const double chi = 2.0 * static_cast<double>(e.size()) * (std::log(2.0) - ap);
    return igamc(std::ldexp(1.0, m - 1), chi / 2.0);
}

std::pair<double, double> serial(const BitVector& e, int m) {
    require(m >= 2, "Serial needs m >= 2");
    const double p0 = psi_sq(e, m), p1 = psi_sq(e, m - 1), p2 = psi_sq(e, m - 2);
    const double del1 = p0 - p1, del2 = p0 - 2.0 * p1 + p2;
    return {igamc(std::ldexp(1.0, m - 2), del1 / 2.0), igamc(std::ldexp(1.0, m - 3), del2 / 2.0)};
}

namespace {

double cusum_p(long long n, long long z) {
    if (z == 0) return 1.0;
    const double nd = static_cast<double>(n), zd = static_cast<double>(z), sq = std::sqrt(nd);
    double s1 = 0.0, s2 = 0.0;
    // integer bounds follow the reference implementation
    for (long long k = (-n / z + 1) / 4; k <= (n / z - 1) / 4; ++k)
        s1 += phi((4.0 * k + 1) * zd / sq) - phi((4.0 * k - 1) * zd / sq);
    for (long long k = (-n / z - 3) / 4; k <= (n / z - 1) / 4; ++k)
        s2 += phi((4.0 * k + 3) * zd / sq) - phi((4.0 * k + 1) * zd / sq);
    return 1.0 - s1 + s2;
}

}  // namespace

std::pair<double, double> cumulative_sums(const BitVector& e) {
    const auto n = static_cast<long long>(e.size());
    long long s = 0, fwd = 0;
    for (long long i = 0; i < n; ++i) {
        s += e.get(static_cast<std::size_t>(i)) ? 1 : -1;
        fwd = std::max(fwd, std::llabs(s));
    }
    s = 0;
    long long rev = 0;
    for (long long i = n - 1; i >= 0; --i) {
        s += e.get(static_cast<std::size_t>(i)) ? 1 : -1;
        rev = std::max(rev, std::llabs(s));
    }
    return {cusum_p(n, fwd), cusum_p(n, rev)};
}

TestResult nist_test(TestKind kind, const BitVector& bits, const Params& params) {
    const std::size_t n = bits.size();
    require(n > 0, "empty sequence");
    const bool chk = params.check_applicability;
    const int lg = floor_log2(n);
    TestResult r{kind, {}};
    switch (kind) {
        case TestKind::Frequency:
            if (chk) require(n >= 100, "Frequency needs n >= 100");
            r.p_values = {frequency(bits)};
            break;
        case TestKind::BlockFrequency: {
            const int m = params.block_frequency_m;
            require(m >= 1, "BlockFrequency needs M >= 1");
            if (chk) require(n >= 100 && m >= 20 && n >= static_cast<std::size_t>(m),
                             "BlockFrequency needs n >= 100, 20 <= M <= n");
            r.p_values = {block_frequency(bits, m)};
            break;
        }
        case TestKind::CumulativeSums: {
            if (chk) require(n >= 100, "CumulativeSums needs n >= 100");
            auto [f, b] = cumulative_sums(bits);
            r.p_values = {f, b};
            break;
        }
        case TestKind::Runs:
            if (chk) require(n >= 100, "Runs needs n >= 100");
            r.p_values = {runs(bits)};
            break;
        case TestKind::LongestRun: {
            int m = params.longest_run_m.value_or(n >= 750000 ? 10000 : n >= 6272 ? 128 : 8);
            if (chk) require(n >= 128, "LongestRun needs n >= 128");
            r.p_values = {longest_run(bits, m)};
            break;
        }
        case TestKind::Rank: {
            const std::size_t per = static_cast<std::size_t>(params.rank_rows) * static_cast<std::size_t>(params.rank_cols);
            if (chk) require(n / per >= 38, "Rank needs at least 38 matrices");
            r.p_values = {rank(bits, params.rank_rows, params.rank_cols)};
            break;
        }
        case TestKind::FFT:
            if (chk) require(n >= 1000, "FFT needs n >= 1000");
            r.p_values = {spectral(bits)};
            break;
        case TestKind::ApproximateEntropy: {
            const int m = params.approximate_entropy_m.value_or(std::min(10, lg - 6));
            require(m >= 1, "ApproximateEntropy needs m >= 1");
            if (chk) require(m < lg - 5, "ApproximateEntropy needs m < floor(log2 n) - 5");
            r.p_values = {approximate_entropy(bits, m)};
            break;
        }
        case TestKind::Serial: {
            const int m = params.serial_m.value_or(std::min(16, lg - 3));
            if (chk) require(m >= 2 && m < lg - 2, "Serial needs 2 <= m < floor(log2 n) - 2");
            auto [a, b] = serial(bits, m);
            r.p_values = {a, b};
            break;
        }
    }
    for (double& p : r.p_values) p = std::clamp(p, 0.0, 1.0);
    return r;
}

bool BatteryReport::all_passed() const {
    return !tests.empty() && std::all_of(tests.begin(), tests.end(), [](const TestSummary& t) { return t.verdict; });
}

const TestSummary* BatteryReport::find(const std::string& n) const {
    for (const auto& t : tests)
        if (t.name == n) return &t;
    return nullptr;
}

std::string BatteryReport::table() const {
    std::ostringstream os;
    os << std::left << std::setw(26) << "STATISTICAL TEST" << std::right << std::setw(12) << "P-VALUE" << std::setw(14)
       << "PROPORTION" << std::setw(10) << "PASSED" << '\n';
    for (const auto& t : tests) {
        os << std::left << std::setw(26) << t.name << std::right << std::setw(12);
        if (t.uniformity_applicable)
            os << std::fixed << std::setprecision(6) << t.uniformity_p;
        else
            os << "-";
        os << std::setw(14) << (std::to_string(t.passed) + "/" + std::to_string(t.applicable)) << std::setw(10)
           << (t.verdict ? "yes" : "NO") << '\n';
    }
    return os.str();
}

BatteryReport run_battery(const std::vector<BitVector>& sequences, double alpha, const Params& params,
                          const std::vector<TestKind>& kinds, unsigned jobs) {
    if (sequences.empty()) throw InputError("battery needs at least one sequence");
    if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
    BatteryReport rep;
    rep.alpha = alpha;
    rep.sequences = sequences.size();
    rep.sequence_bits = sequences.front().size();

    // results[kind][sequence]
    std::vector<std::vector<std::optional<TestResult>>> results(kinds.size(), std::vector<std::optional<TestResult>>(sequences.size()));
    std::vector<std::vector<std::string>> errors(kinds.size(), std::vector<std::string>(sequences.size()));
    parallel_for(kinds.size() * sequences.size(), jobs, [&](std::size_t item) {
        const std::size_t k = item / sequences.size(), s = item % sequences.size();
        try {
            results[k][s] = nist_test(kinds[k], sequences[s], params);
        } catch (const ApplicabilityError& e) {
            errors[k][s] = e.what();
        }
    });

    for (std::size_t k = 0; k < kinds.size(); ++k) {
        const bool two = kinds[k] == TestKind::CumulativeSums || kinds[k] == TestKind::Serial;
        const std::vector<std::string> suffix = kinds[k] == TestKind::CumulativeSums ? std::vector<std::string>{"-forward", "-reverse"}
                                                : kinds[k] == TestKind::Serial        ? std::vector<std::string>{"-1", "-2"}
                                                                                      : std::vector<std::string>{""};
        for (std::size_t sub = 0; sub < (two ? 2u : 1u); ++sub) {
            TestSummary t;
            t.name = name(kinds[k]) + suffix[sub];
            for (std::size_t s = 0; s < sequences.size(); ++s) {
                if (results[k][s]) {
                    t.p_values.push_back(results[k][s]->p_values[sub]);
                } else if (t.skipped.empty() || t.skipped.back() != errors[k][s]) {
                    t.skipped.push_back(errors[k][s]);
                }
            }
            t.applicable = t.p_values.size();
            for (double p : t.p_values) t.passed += p >= alpha;
            if (t.applicable > 0) {
                const double m = static_cast<double>(t.applicable);
                const double ph = 1.0 - alpha;
                t.proportion = static_cast<double>(t.passed) / m;
                t.proportion_min = ph - 3.0 * std::sqrt(ph * (1 - ph) / m);
                t.passed_proportion = t.proportion >= t.proportion_min;
                std::vector<double> bins(10, 0.0);
                for (double p : t.p_values) bins[std::min<std::size_t>(9, static_cast<std::size_t>(p * 10.0))] += 1;
                double chi = 0.0;
                for (double b : bins) chi += (b - m / 10) * (b - m / 10) / (m / 10);
                t.uniformity_p = igamc(4.5, chi / 2.0);
                t.uniformity_applicable = t.applicable >= 55;
                t.passed_uniformity = !t.uniformity_applicable || t.uniformity_p >= 1e-4;
            }
            t.verdict = t.applicable > 0 && t.passed_proportion && t.passed_uniformity;
            rep.tests.push_back(std::move(t));
        }
    }
    return rep;
}

std::vector<BitVector> split_sequences(const BitVector& bits, std::size_t sequence_bits) {
    if (sequence_bits == 0) throw ConfigError("sequence length must be positive");
    std::vector<BitVector> out;
    for (std::size_t start = 0; start + sequence_bits <= bits.size(); start += sequence_bits)
        out.push_back(bits.slice(start, sequence_bits));
    return out;
}

BitVector permute_extend(const std::vector<BitVector>& blocks, std::uint64_t seed) {
    if (blocks.empty()) throw InputError("permute_extend needs a non-empty dataset");
    std::vector<std::size_t> order(blocks.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, "permute-extend"));
    // Fisher-Yates with an explicit draw so the permutation does not depend on the library's shuffle
    for (std::size_t i = order.size(); i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng)]);
    }
    BitVector out;
    for (const auto& b : blocks) out.append(b);
    for (auto i : order) out.append(blocks[i]);
    return out;
}

BitVector permute_extend(const BitVector& dataset, std::size_t block_bits, std::uint64_t seed) {
    if (block_bits == 0 || dataset.size() % block_bits != 0) throw InputError("dataset is not a whole number of blocks");
    return permute_extend(split_sequences(dataset, block_bits), seed);
}

BitFormat parse_format(const std::string& s) {
    if (s == "ascii01") return BitFormat::Ascii01;
    if (s == "packed") return BitFormat::Packed;
    throw ConfigError("unknown bit format '" + s + "'");
}

void export_bits(const BitVector& bits, const std::string& path, BitFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    if (format == BitFormat::Ascii01) {
        out << bits.to_string();
    } else {
        const auto bytes = bits.to_bytes_msb();
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        std::ofstream side(path + ".json");
        if (!side) throw std::runtime_error("cannot open sidecar for " + path);
        nlohmann::ordered_json j;
        j["format"] = "packed";
        j["bit_order"] = "msb_first";
        j["bits"] = bits.size();
        j["bytes"] = bytes.size();
        side << j.dump(2) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

BitVector import_bits(const std::string& path, BitFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (format == BitFormat::Ascii01) return BitVector::from_string(std::string(bytes.begin(), bytes.end()));
    std::ifstream side(path + ".json");
    if (!side) throw FormatError("missing sidecar " + path + ".json");
    const auto j = nlohmann::json::parse(side);
    return BitVector::from_bytes_msb(bytes, j.at("bits").get<std::size_t>());
}

}  // namespace npuf::nist
