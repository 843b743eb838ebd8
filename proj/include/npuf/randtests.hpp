#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "npuf/bits.hpp"

namespace npuf::nist {

enum class TestKind { Frequency, BlockFrequency, CumulativeSums, Runs, LongestRun, Rank, FFT, ApproximateEntropy, Serial };

const std::vector<TestKind>& all_tests();
std::string name(TestKind k);
TestKind parse_test(const std::string& s);

struct Params {
    int block_frequency_m = 128;
    std::optional<int> approximate_entropy_m;  // default min(10, floor(log2 n) - 6)
    std::optional<int> serial_m;               // default min(16, floor(log2 n) - 3)
    std::optional<int> longest_run_m;          // 8, 128 or 10000; default by length
    int rank_rows = 32;
    int rank_cols = 32;
    bool check_applicability = true;
};

// Sequence too short or parameters outside the applicable range.
class ApplicabilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct TestResult {
    TestKind kind;
    std::vector<double> p_values;  // two for CumulativeSums (forward, reverse) and Serial
};

TestResult nist_test(TestKind kind, const BitVector& bits, const Params& params = {});

double igamc(double a, double x);

double frequency(const BitVector& e);
double block_frequency(const BitVector& e, int m);
double runs(const BitVector& e);
double longest_run(const BitVector& e, int m);
double rank(const BitVector& e, int rows, int cols);
double spectral(const BitVector& e);
double approximate_entropy(const BitVector& e, int m);
std::pair<double, double> serial(const BitVector& e, int m);
std::pair<double, double> cumulative_sums(const BitVector& e);

// Probabilities of full rank, rank-1 and lower for a random rows x cols GF(2) matrix.
std::vector<double> rank_probabilities(int rows, int cols);
int gf2_rank(std::vector<std::vector<std::uint8_t>> m);

struct TestSummary {
    std::string name;        // e.g. "CumulativeSums-forward"
    std::vector<double> p_values;
    std::size_t applicable = 0;
    std::size_t passed = 0;
    double proportion = 0.0;
    double proportion_min = 0.0;  // lower end of the acceptance band
    double uniformity_p = 0.0;
    bool uniformity_applicable = false;  // needs at least 55 sequences
    bool passed_proportion = false;
    bool passed_uniformity = true;
    bool verdict = false;
    std::vector<std::string> skipped;    // applicability messages
};

struct BatteryReport {
    double alpha = 0.01;
    std::size_t sequences = 0;
    std::size_t sequence_bits = 0;
    std::vector<TestSummary> tests;

    bool all_passed() const;
    const TestSummary* find(const std::string& name) const;
    std::string table() const;  // text table in the usual layout
};

BatteryReport run_battery(const std::vector<BitVector>& sequences, double alpha = 0.01, const Params& params = {},
                          const std::vector<TestKind>& kinds = all_tests(), unsigned jobs = 1);

// Splits a long stream into equal sequences, dropping the tail.
std::vector<BitVector> split_sequences(const BitVector& bits, std::size_t sequence_bits);

// dataset followed by a seeded permutation of its blocks.
BitVector permute_extend(const std::vector<BitVector>& blocks, std::uint64_t seed);
BitVector permute_extend(const BitVector& dataset, std::size_t block_bits, std::uint64_t seed);

enum class BitFormat { Ascii01, Packed };
BitFormat parse_format(const std::string& s);
// Packed output writes bytes MSB-first to `path` and a JSON sidecar `path + ".json"`.
void export_bits(const BitVector& bits, const std::string& path, BitFormat format);
BitVector import_bits(const std::string& path, BitFormat format);

}  // namespace npuf::nist
