#include <doctest.h>

#include <algorithm>
#include <random>

#include "model.hpp"
#include "oracles.hpp"

using namespace coresig;

namespace {

InteractionStats fold(const std::vector<std::int64_t>& xs) {
    InteractionStats s;
    for (auto x : xs) s = update_stats(s, x);
    return s;
}

}  // namespace

TEST_CASE("finalize on no packets is flagged empty") {
    const auto s = finalize_stats(InteractionStats{});
    CHECK(s.empty);
    CHECK(s.count == 0);
    CHECK(s.mean == 0.0);
    CHECK(s.stddev == 0.0);
}

TEST_CASE("constant stream has zero spread") {
    const auto s = fold({120, 120, 120}).finalize();
    CHECK(s.count == 3);
    CHECK(s.mean == doctest::Approx(120));
    CHECK(s.max == 120);
    CHECK(s.stddev == 0.0);
}

TEST_CASE("three lengths against the two-pass formula") {
    const std::vector<std::int64_t> xs{100, 200, 600};
    const auto expect = oracle::two_pass(xs);
    CHECK(expect.pop_stddev == doctest::Approx(216.0247).epsilon(1e-6));

    const auto s = fold(xs).finalize();
    CHECK(s.mean == doctest::Approx(300).epsilon(1e-12));
    CHECK(s.max == 600);
    CHECK(oracle::rel_err(s.stddev, expect.pop_stddev) < 1e-12);

    auto perm = xs;
    std::sort(perm.begin(), perm.end());
    do {
        const auto p = fold(perm).finalize();
        CHECK(oracle::rel_err(p.mean, s.mean) < 1e-9);
        CHECK(oracle::rel_err(p.stddev, s.stddev) < 1e-9);
        CHECK(p.max == s.max);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("first update") {
    const auto s = update_stats({}, 100).finalize();
    CHECK(s.count == 1);
    CHECK(s.mean == 100.0);
    CHECK(s.max == 100);
    CHECK(s.stddev == 0.0);
    CHECK_FALSE(s.empty);
}

TEST_CASE("sample form divides by n-1") {
    const std::vector<std::int64_t> xs{100, 200, 600};
    const auto s = fold(xs).finalize(StddevMode::Sample);
    CHECK(oracle::rel_err(s.stddev, oracle::two_pass(xs).sample_stddev) < 1e-12);
    CHECK(fold({42}).finalize(StddevMode::Sample).stddev == 0.0);
}

TEST_CASE("out-of-range lengths are rejected") {
    InteractionStats s;
    CHECK_THROWS_AS(s.update(0), DataError);
    CHECK_THROWS_AS(s.update(-5), DataError);
    CHECK_THROWS_AS(s.update(std::int64_t{1} << 33), DataError);
    CHECK(s.count() == 0);
}

TEST_CASE("property: streaming fold matches two-pass batch on random multisets") {
    std::mt19937_64 gen(20260101);
    std::uniform_int_distribution<std::int64_t> len(1, 65535);
    std::uniform_int_distribution<int> size(1, 10000);
    for (int trial = 0; trial < 150; ++trial) {
        std::vector<std::int64_t> xs(size(gen));
        for (auto& x : xs) x = len(gen);
        const auto expect = oracle::two_pass(xs);
        const auto got = fold(xs).finalize();
        REQUIRE(oracle::rel_err(got.mean, expect.mean) < 1e-9);
        REQUIRE(got.max == expect.max);
        if (expect.pop_stddev > 0) REQUIRE(oracle::rel_err(got.stddev, expect.pop_stddev) < 1e-9);

        // max >= mean >= min, and zero spread exactly when all equal.
        REQUIRE(got.max >= got.mean);
        REQUIRE(got.mean >= expect.min - 1e-9);
        const bool all_equal = expect.min == expect.max;
        REQUIRE((got.stddev == 0.0) == all_equal);

        std::shuffle(xs.begin(), xs.end(), gen);
        const auto shuffled = fold(xs).finalize();
        REQUIRE(oracle::rel_err(shuffled.mean, got.mean) < 1e-9);
        REQUIRE(oracle::rel_err(shuffled.stddev + 1, got.stddev + 1) < 1e-9);
    }
}

TEST_CASE("merging partial folds matches a single fold") {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<std::int64_t> len(1, 2000);
    std::vector<std::int64_t> xs(5000);
    for (auto& x : xs) x = len(gen);
    const std::vector<std::int64_t> a(xs.begin(), xs.begin() + 1234);
    const std::vector<std::int64_t> b(xs.begin() + 1234, xs.end());
    auto merged = fold(a);
    merged.merge(fold(b));
    const auto whole = fold(xs).finalize();
    CHECK(merged.count() == whole.count);
    CHECK(oracle::rel_err(merged.finalize().stddev, whole.stddev) < 1e-9);
    CHECK(merged.max() == whole.max);

    InteractionStats empty;
    empty.merge(fold(a));
    CHECK(empty == fold(a));
}

TEST_CASE("enum names round trip and parse case-insensitively") {
    for (NfKind nf : kAllNfs) CHECK(parse_nf(to_string(nf)) == nf);
    CHECK(parse_nf("amf") == NfKind::AMF);
    CHECK_FALSE(parse_nf("MME").has_value());
    for (std::size_t i = 0; i < kMsgKindCount; ++i) {
        const auto k = static_cast<MsgKind>(i);
        CHECK(parse_msg_kind(to_string(k)) == k);
    }
    CHECK(parse_proto("udp") == TransportProto::UDP);
    CHECK(is_pfcp(MsgKind::PfcpHeartbeat));
    CHECK_FALSE(is_pfcp(MsgKind::HeartbeatPatch));
}

TEST_CASE("matrix refuses self interactions and counts core packets") {
    StatsMatrix m;
    CHECK_THROWS_AS(m.add(NfKind::AMF, NfKind::AMF, 100), DataError);
    m.add(NfKind::AMF, NfKind::NRF, 500);
    m.add(NfKind::NRF, NfKind::AMF, 300);
    CHECK(m.total_core_packets() == 2);
    CHECK(m.cell(NfKind::AMF, NfKind::NRF).count() == 1);
    CHECK(m.cell(NfKind::AMF, NfKind::AMF).count() == 0);
}

TEST_CASE("record validation") {
    PacketRecord rec{0, Endpoint::core(NfKind::AMF), Endpoint::core(NfKind::NRF), TransportProto::TCP, 520,
                     MsgKind::RegistrationPut};
    CHECK_NOTHROW(validate(rec));
    rec.timestamp_us = -1;
    CHECK_THROWS_AS(validate(rec), DataError);
    rec.timestamp_us = 0;
    rec.length_bytes = 0;
    CHECK_THROWS_AS(validate(rec), DataError);
    CHECK(Endpoint::external("gNB").name() == "gNB");
    CHECK(Endpoint::core(NfKind::UPF).name() == "UPF");
}
