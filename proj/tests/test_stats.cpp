#include <doctest.h>

#include <algorithm>
#include <random>

#include "analysis.hpp"
#include "oracles.hpp"
#include "sim.hpp"
#include "stats.hpp"

using namespace coresig;

namespace {

PacketRecord pkt(NfKind src, NfKind dst, std::uint32_t len, std::int64_t t = 0) {
    return PacketRecord{t, Endpoint::core(src), Endpoint::core(dst), TransportProto::TCP, len, MsgKind::Other};
}

const PacketList& default_trace() {
    static const PacketList trace = simulate(SimConfig{});
    return trace;
}

const StatsMatrix& default_matrix() {
    static const StatsMatrix m = build_matrix(default_trace());
    return m;
}

Histogram hist(std::map<std::int64_t, std::uint64_t> bins) {
    Histogram h;
    h.bins = std::move(bins);
    return h;
}

const Histogram& find_hist(const std::vector<Histogram>& hs, NfKind peer, NrfDirection dir) {
    for (const auto& h : hs) {
        if (h.peer == peer && h.direction == dir) return h;
    }
    FAIL("histogram missing");
    return hs.front();
}

}  // namespace

TEST_CASE("two-packet cell") {
    const auto m = build_matrix({pkt(NfKind::AMF, NfKind::NRF, 500), pkt(NfKind::AMF, NfKind::NRF, 700)});
    const auto s = m.cell(NfKind::AMF, NfKind::NRF).finalize();
    // Hand computation: mean 600, deviations +-100.
    CHECK(s.count == 2);
    CHECK(s.mean == doctest::Approx(600));
    CHECK(s.max == 700);
    CHECK(s.stddev == doctest::Approx(100));
}

TEST_CASE("empty input leaves every cell empty") {
    const auto m = build_matrix({});
    for (NfKind a : kAllNfs) {
        for (NfKind b : kAllNfs) CHECK(m.cell(a, b).count() == 0);
    }
}

TEST_CASE("matrix input must be core NF pairs") {
    PacketRecord ext = pkt(NfKind::AMF, NfKind::NRF, 10);
    ext.src = Endpoint::external("gNB");
    CHECK_THROWS_AS(build_matrix({ext}), DataError);
    CHECK_THROWS_AS(build_matrix({pkt(NfKind::UDM, NfKind::UDM, 10)}), DataError);
}

TEST_CASE("single ACK-sized packet lands in bin 4") {
    const auto hs = nrf_histograms({pkt(NfKind::NRF, NfKind::UDM, 66)}, 16);
    REQUIRE(hs.size() == 1);
    CHECK(hs[0].peer == NfKind::UDM);
    CHECK(hs[0].direction == NrfDirection::SourceNRF);
    CHECK(hs[0].bins == std::map<std::int64_t, std::uint64_t>{{4, 1}});
    CHECK_THROWS_AS(nrf_histograms({}, 0), DataError);
}

TEST_CASE("histogram ordering: all source-NRF peers, then destination") {
    const auto hs = nrf_histograms({pkt(NfKind::UPF, NfKind::NRF, 10), pkt(NfKind::NRF, NfKind::UPF, 10),
                                    pkt(NfKind::AMF, NfKind::NRF, 10), pkt(NfKind::NRF, NfKind::SMF, 10),
                                    pkt(NfKind::SMF, NfKind::UPF, 10)});
    REQUIRE(hs.size() == 4);
    CHECK(hs[0].peer == NfKind::SMF);
    CHECK(hs[1].peer == NfKind::UPF);
    CHECK(hs[2].direction == NrfDirection::DestNRF);
    CHECK(hs[2].peer == NfKind::AMF);
    CHECK(hs[3].peer == NfKind::UPF);
}

TEST_CASE("peak counting") {
    CHECK(peak_count(hist({{7, 3}})) == 1);
    CHECK(peak_count(hist({{0, 50}, {10, 50}}), 2, 0.1) == 2);
    // Closer than the separation: only the heavier one survives.
    CHECK(peak_count(hist({{0, 50}, {2, 40}}), 4, 0.1) == 1);
    // A flat top counts once.
    CHECK(peak_count(hist({{3, 20}, {4, 20}, {5, 20}}), 1, 0.0) == 1);
    // Light bumps are ignored.
    CHECK(peak_count(hist({{0, 100}, {20, 2}, {40, 100}}), 4, 0.05) == 2);
    CHECK_THROWS_AS(peak_count(Histogram{}), DataError);
}

TEST_CASE("property: matrix totals and histogram mass") {
    const auto& trace = default_trace();
    const auto& m = default_matrix();
    CHECK(m.total_core_packets() == trace.size());
    std::uint64_t sum = 0;
    for (NfKind a : kAllNfs) {
        for (NfKind b : kAllNfs) sum += m.cell(a, b).count();
    }
    CHECK(sum == trace.size());
    for (const auto& h : nrf_histograms(trace)) {
        const auto& cell = h.direction == NrfDirection::SourceNRF ? m.cell(NfKind::NRF, h.peer)
                                                                   : m.cell(h.peer, NfKind::NRF);
        CHECK(h.total() == cell.count());
    }
}

TEST_CASE("property: statistics ignore record order") {
    auto shuffled = default_trace();
    std::mt19937_64 gen(3);
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const auto a = build_matrix(shuffled);
    const auto& b = default_matrix();
    for (NfKind x : kAllNfs) {
        for (NfKind y : kAllNfs) {
            const auto sa = a.cell(x, y).finalize();
            const auto sb = b.cell(x, y).finalize();
            REQUIRE(sa.count == sb.count);
            REQUIRE(sa.max == sb.max);
            REQUIRE(oracle::rel_err(sa.mean + 1, sb.mean + 1) < 1e-9);
            REQUIRE(oracle::rel_err(sa.stddev + 1, sb.stddev + 1) < 1e-9);
        }
    }
    CHECK(nrf_histograms(shuffled) == nrf_histograms(default_trace()));
}

TEST_CASE("default trace: NF-to-NRF traffic has the larger mean") {
    const auto& m = default_matrix();
    for (NfKind x : kAllNfs) {
        if (x == NfKind::NRF) continue;
        CAPTURE(to_string(x));
        CHECK(m.cell(x, NfKind::NRF).mean() > m.cell(NfKind::NRF, x).mean());
    }
}

TEST_CASE("default trace: subscription notifications dominate NRF maxima") {
    const auto& m = default_matrix();
    for (NfKind x : {NfKind::AMF, NfKind::SMF, NfKind::AUSF}) {
        CAPTURE(to_string(x));
        CHECK(m.cell(NfKind::NRF, x).max() > m.cell(x, NfKind::NRF).max());
    }
}

TEST_CASE("default trace: policy association is asymmetric") {
    const auto& m = default_matrix();
    CHECK(m.cell(NfKind::PCF, NfKind::AMF).mean() != doctest::Approx(m.cell(NfKind::AMF, NfKind::PCF).mean()));
}

TEST_CASE("default trace: AMF to SMF spread ranks high outside the NRF") {
    const auto& m = default_matrix();
    std::vector<double> spreads;
    for (NfKind a : kAllNfs) {
        for (NfKind b : kAllNfs) {
            if (a == NfKind::NRF || b == NfKind::NRF || a == b) continue;
            spreads.push_back(m.cell(a, b).finalize().stddev);
        }
    }
    std::sort(spreads.rbegin(), spreads.rend());
    CHECK(m.cell(NfKind::AMF, NfKind::SMF).finalize().stddev >= spreads[2]);
}

TEST_CASE("default trace: heartbeat pairs carry the most packets") {
    const auto& m = default_matrix();
    std::uint64_t min_top = UINT64_MAX;
    std::uint64_t max_rest = 0;
    for (NfKind a : kAllNfs) {
        for (NfKind b : kAllNfs) {
            if (a == b) continue;
            const bool top = a == NfKind::NRF || b == NfKind::NRF || (a == NfKind::SMF && b == NfKind::UPF) ||
                             (a == NfKind::UPF && b == NfKind::SMF);
            const auto n = m.cell(a, b).count();
            if (top) {
                min_top = std::min(min_top, n);
            } else {
                max_rest = std::max(max_rest, n);
            }
        }
    }
    CHECK(min_top > max_rest);
    const double ratio = static_cast<double>(m.cell(NfKind::SMF, NfKind::UPF).count()) /
                         static_cast<double>(m.cell(NfKind::AMF, NfKind::NRF).count());
    CHECK(ratio > 0.1);
    CHECK(ratio < 10.0);
}

TEST_CASE("default trace: NRF histograms are bimodal") {
    const auto hs = nrf_histograms(default_trace());
    CHECK(peak_count(find_hist(hs, NfKind::PCF, NrfDirection::SourceNRF)) == 2);
    CHECK(peak_count(find_hist(hs, NfKind::AUSF, NrfDirection::SourceNRF)) == 2);

    // Destination side: the heaviest bin above the ACK region is the PATCH.
    for (NfKind peer : kAllNfs) {
        if (peer == NfKind::NRF) continue;
        const auto& h = find_hist(hs, peer, NrfDirection::DestNRF);
        std::int64_t best_bin = -1;
        std::uint64_t best = 0;
        for (const auto& [bin, n] : h.bins) {
            if (bin * 16 >= 128 && n > best) {
                best = n;
                best_bin = bin;
            }
        }
        CAPTURE(to_string(peer));
        CHECK(best_bin * 16 >= 190);
        CHECK(best_bin * 16 < 300);
    }
}
