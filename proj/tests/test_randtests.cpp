#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <algorithm>
#include <random>
#include <string>

#include "npuf/randtests.hpp"
#include "npuf/seeding.hpp"

using namespace npuf;
using namespace npuf::nist;

namespace {

const char* kEps100 =
    "1100100100001111110110101010001000100001011010001100001000110100110001001100011001100010100010111000";
const char* kEps128 =
    "11001100000101010110110001001100111000000000001001001101010100010001001111010110100000001101011111001100"
    "111001101101100010110010";

BitVector bits(const char* s) { return BitVector::from_string(s); }

BitVector random_bits(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    BitVector b;
    for (std::size_t i = 0; i < n; ++i) b.push_back(rng() >> 63);
    return b;
}

Params unchecked() {
    Params p;
    p.check_applicability = false;
    return p;
}

}  // namespace

TEST_CASE("worked examples: frequency") {
    CHECK(frequency(bits("1011010101")) == doctest::Approx(0.527089).epsilon(1e-4));
    CHECK(frequency(bits(kEps100)) == doctest::Approx(0.109599).epsilon(1e-4));
}

TEST_CASE("worked examples: block frequency") {
    CHECK(block_frequency(bits("0110011010"), 3) == doctest::Approx(0.801252).epsilon(1e-4));
    CHECK(block_frequency(bits(kEps100), 10) == doctest::Approx(0.706438).epsilon(1e-4));
}

TEST_CASE("worked examples: runs") {
    CHECK(runs(bits("1001101011")) == doctest::Approx(0.147232).epsilon(1e-4));
    CHECK(runs(bits(kEps100)) == doctest::Approx(0.500798).epsilon(1e-4));
}

TEST_CASE("worked examples: longest run") {
    CHECK(longest_run(bits(kEps128), 8) == doctest::Approx(0.180609).epsilon(1e-4));
}

TEST_CASE("worked examples: rank") {
    CHECK(rank(bits("01011001001010101101"), 3, 3) == doctest::Approx(0.741948).epsilon(1e-4));
}

// The printed spectral examples are not reproducible from the stated statistic; these
// values come from an independent numpy evaluation of that statistic (N1 = 5 and 48).
TEST_CASE("spectral statistic matches the formula oracle") {
    CHECK(spectral(bits("1001010011")) == doctest::Approx(0.468160).epsilon(1e-5));
    CHECK(spectral(bits(kEps100)) == doctest::Approx(0.646355).epsilon(1e-5));
}

TEST_CASE("worked examples: approximate entropy") {
    CHECK(approximate_entropy(bits("0100110101"), 3) == doctest::Approx(0.261961).epsilon(1e-4));
    CHECK(approximate_entropy(bits(kEps100), 2) == doctest::Approx(0.235301).epsilon(1e-4));
}

TEST_CASE("worked examples: serial") {
    auto [p1, p2] = serial(bits("0011011101"), 3);
    CHECK(p1 == doctest::Approx(0.808792).epsilon(1e-4));
    CHECK(p2 == doctest::Approx(0.670320).epsilon(1e-4));
}

TEST_CASE("worked examples: cumulative sums") {
    CHECK(cumulative_sums(bits("1011010111")).first == doctest::Approx(0.4116588).epsilon(1e-4));
    auto [f, r] = cumulative_sums(bits(kEps100));
    CHECK(f == doctest::Approx(0.219194).epsilon(1e-4));
    CHECK(r == doctest::Approx(0.114866).epsilon(1e-4));
}

TEST_CASE("rank class probabilities for 32x32") {
    const auto p = rank_probabilities(32, 32);
    CHECK(p[0] == doctest::Approx(0.2888).epsilon(1e-3));
    CHECK(p[1] == doctest::Approx(0.5776).epsilon(1e-3));
    CHECK(p[2] == doctest::Approx(0.1336).epsilon(1e-3));
}

TEST_CASE("gf2 rank") {
    CHECK(gf2_rank({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == 3);
    CHECK(gf2_rank({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}) == 2);
    CHECK(gf2_rank({{0, 0}, {0, 0}}) == 0);
}

TEST_CASE("controls: all zeros and alternating") {
    BitVector zeros(100);
    CHECK(nist_test(TestKind::Frequency, zeros).p_values[0] < 1e-10);
    CHECK(nist_test(TestKind::Frequency, zeros).p_values[0] == doctest::Approx(std::erfc(std::sqrt(50.0))));
    BitVector alt;
    for (int i = 0; i < 100; ++i) alt.push_back(i % 2);
    CHECK(nist_test(TestKind::Frequency, alt).p_values[0] == doctest::Approx(1.0));
    CHECK(nist_test(TestKind::Runs, alt).p_values[0] < 0.01);
}

TEST_CASE("applicability limits") {
    CHECK_THROWS_AS(nist_test(TestKind::Frequency, random_bits(99, 1)), ApplicabilityError);
    CHECK_THROWS_AS(nist_test(TestKind::Rank, random_bits(1024 * 37, 1)), ApplicabilityError);
    Params p;
    p.serial_m = 14;  // floor(log2 1e5) - 2 = 14 is not allowed
    CHECK_THROWS_AS(nist_test(TestKind::Serial, random_bits(100000, 1), p), ApplicabilityError);
    p.serial_m = 13;
    CHECK_NOTHROW(nist_test(TestKind::Serial, random_bits(100000, 1), p));
    p.approximate_entropy_m = 11;
    CHECK_THROWS_AS(nist_test(TestKind::ApproximateEntropy, random_bits(100000, 1), p), ApplicabilityError);
}

TEST_CASE("every p-value lies in [0, 1]") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto b = random_bits(50000, s);
        for (auto k : all_tests())
            for (double p : nist_test(k, b).p_values) {
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
            }
    }
}

TEST_CASE("battery: PRNG control passes, constant sequences fail frequency") {
    std::vector<BitVector> seqs;
    for (std::uint64_t s = 0; s < 60; ++s) seqs.push_back(random_bits(40000, 1000 + s));
    const auto rep = run_battery(seqs, 0.01);
    CHECK(rep.tests.size() == 11);
    for (const auto& t : rep.tests) {
        INFO(t.name);
        CHECK(t.applicable == 60);
        CHECK(t.uniformity_applicable);
        CHECK(t.verdict);
    }
    CHECK(rep.all_passed());

    std::vector<BitVector> constant(10, BitVector(1000));
    const auto bad = run_battery(constant, 0.01, {}, {TestKind::Frequency});
    CHECK(bad.tests[0].passed == 0);
    CHECK_FALSE(bad.all_passed());
}

TEST_CASE("proportion band") {
    std::vector<BitVector> seqs;
    for (std::uint64_t s = 0; s < 10; ++s) seqs.push_back(random_bits(1000, s));
    const auto rep = run_battery(seqs, 0.01, {}, {TestKind::Frequency});
    const double expected = 0.99 - 3 * std::sqrt(0.99 * 0.01 / 10);
    CHECK(rep.tests[0].proportion_min == doctest::Approx(expected));
    CHECK_FALSE(rep.tests[0].uniformity_applicable);
}

TEST_CASE("permute_extend conserves counts") {
    std::vector<BitVector> blocks;
    for (std::uint64_t s = 0; s < 20; ++s) blocks.push_back(random_bits(1060, s));
    const auto ext = permute_extend(blocks, 9);
    std::size_t ones = 0, len = 0;
    for (const auto& b : blocks) {
        ones += b.popcount();
        len += b.size();
    }
    CHECK(ext.size() == 2 * len);
    CHECK(ext.popcount() == 2 * ones);
    CHECK(ext.slice(0, len).popcount() == ones);
    CHECK(permute_extend(blocks, 9) == ext);

    // the appended half is a permutation of whole blocks
    std::vector<std::string> orig, tail;
    for (const auto& b : blocks) orig.push_back(b.to_string());
    for (std::size_t i = 0; i < blocks.size(); ++i) tail.push_back(ext.slice(len + i * 1060, 1060).to_string());
    std::sort(orig.begin(), orig.end());
    std::sort(tail.begin(), tail.end());
    CHECK(orig == tail);

    const std::vector<BitVector> single{blocks[0]};
    BitVector twice = blocks[0];
    twice.append(blocks[0]);
    CHECK(permute_extend(single, 3) == twice);
}

TEST_CASE("export and import") {
    const auto dir = std::filesystem::temp_directory_path() / "npuf_test_export";
    std::filesystem::create_directories(dir);
    const auto b = BitVector::from_string("10110001");
    export_bits(b, (dir / "k.bin").string(), BitFormat::Packed);
    CHECK(std::filesystem::file_size(dir / "k.bin") == 1);
    CHECK(b.to_bytes_msb()[0] == 0xB1);
    const auto r = random_bits(12345, 5);
    for (auto fmt : {BitFormat::Packed, BitFormat::Ascii01}) {
        export_bits(r, (dir / "r.dat").string(), fmt);
        CHECK(import_bits((dir / "r.dat").string(), fmt) == r);
    }
    std::filesystem::remove_all(dir);
}
