#include <doctest.h>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "coresig/coresig.h"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("coresig_capi_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct SimHandle {
    coresig_sim_config* p = nullptr;
    SimHandle() { REQUIRE(coresig_sim_config_create(&p) == CORESIG_OK); }
    ~SimHandle() { coresig_sim_config_destroy(p); }
};

struct AnalyzerHandle {
    coresig_analyzer* p = nullptr;
    explicit AnalyzerHandle(const coresig_analysis_options* o = nullptr) {
        REQUIRE(coresig_analyzer_create(o, &p) == CORESIG_OK);
    }
    ~AnalyzerHandle() { coresig_analyzer_destroy(p); }
};

}  // namespace

TEST_CASE("null arguments are rejected with a message") {
    CHECK(coresig_sim_config_create(nullptr) == CORESIG_E_INVALID_ARGUMENT);
    CHECK(std::strlen(coresig_last_error()) > 0);
    CHECK(coresig_simulate_to_file(nullptr, "x", CORESIG_FORMAT_CSV, nullptr) == CORESIG_E_INVALID_ARGUMENT);
    CHECK(coresig_analyzer_write_report(nullptr, "x") == CORESIG_E_INVALID_ARGUMENT);
    coresig_sim_config_destroy(nullptr);
    coresig_analyzer_destroy(nullptr);
    CHECK(std::string(coresig_status_name(CORESIG_E_IO)) == "I/O error");
}

TEST_CASE("simulate to file is deterministic and summarized") {
    const auto dir = scratch("sim");
    SimHandle cfg;
    REQUIRE(coresig_sim_config_set_duration(cfg.p, "60s") == CORESIG_OK);
    coresig_sim_summary a{}, b{};
    REQUIRE(coresig_simulate_to_file(cfg.p, (dir / "a.csv").c_str(), CORESIG_FORMAT_CSV, &a) == CORESIG_OK);
    REQUIRE(coresig_simulate_to_file(cfg.p, (dir / "b.csv").c_str(), CORESIG_FORMAT_CSV, &b) == CORESIG_OK);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(a.total_packets > 0);
    std::uint64_t sum = 0;
    for (auto n : a.per_kind) sum += n;
    CHECK(sum == a.total_packets);

    const auto text = slurp(dir / "a.csv");
    CHECK(text.rfind("timestamp_us,src,dst,proto,length_bytes,kind\n", 0) == 0);
    CHECK(static_cast<std::uint64_t>(std::count(text.begin(), text.end(), '\n')) == a.total_packets + 1);

    coresig_sim_config_set_seed(cfg.p, 2);
    REQUIRE(coresig_simulate_to_file(cfg.p, (dir / "c.csv").c_str(), CORESIG_FORMAT_CSV, nullptr) == CORESIG_OK);
    CHECK(slurp(dir / "c.csv") != text);
    fs::remove_all(dir);
}

TEST_CASE("zero duration without registration writes only the header") {
    const auto dir = scratch("empty");
    SimHandle cfg;
    coresig_sim_config_set_duration_us(cfg.p, 0);
    coresig_sim_config_set_registration(cfg.p, 0);
    coresig_sim_summary s{};
    REQUIRE(coresig_simulate_to_file(cfg.p, (dir / "e.csv").c_str(), CORESIG_FORMAT_CSV, &s) == CORESIG_OK);
    CHECK(s.total_packets == 0);
    CHECK(slurp(dir / "e.csv") == "timestamp_us,src,dst,proto,length_bytes,kind\n");
    fs::remove_all(dir);
}

TEST_CASE("config errors map to status codes") {
    SimHandle cfg;
    CHECK(coresig_sim_config_set_duration(cfg.p, "soon") == CORESIG_E_CONFIG);
    CHECK(coresig_sim_config_set_duration_us(cfg.p, -1) == CORESIG_E_CONFIG);
    CHECK(coresig_sim_config_load(cfg.p, "/nonexistent/cfg.json") == CORESIG_E_IO);
    const auto dir = scratch("cfg");
    std::ofstream(dir / "bad.json") << R"({"heartbeat_interval_us": 0})";
    CHECK(coresig_sim_config_load(cfg.p, (dir / "bad.json").c_str()) == CORESIG_E_CONFIG);
    std::ofstream(dir / "ok.json") << R"({"duration": "90s", "rng_seed": 4})";
    CHECK(coresig_sim_config_load(cfg.p, (dir / "ok.json").c_str()) == CORESIG_OK);
    CHECK(std::strlen(coresig_last_error()) == 0);
    fs::remove_all(dir);
}

TEST_CASE("message kind names") {
    CHECK(std::string(coresig_msg_kind_name(0)) == "RegistrationPut");
    CHECK(std::string(coresig_msg_kind_name(CORESIG_MSG_KIND_COUNT - 1)) == "Other");
    CHECK(coresig_msg_kind_name(CORESIG_MSG_KIND_COUNT) == nullptr);
    CHECK(coresig_msg_kind_name(-1) == nullptr);
}

TEST_CASE("analyzer end to end") {
    const auto dir = scratch("an");
    SimHandle cfg;
    coresig_sim_config_set_duration(cfg.p, "10m");
    REQUIRE(coresig_simulate_to_file(cfg.p, (dir / "t.csv").c_str(), CORESIG_FORMAT_CSV, nullptr) == CORESIG_OK);

    coresig_analysis_options opts;
    coresig_analysis_options_default(&opts);
    CHECK(opts.k_min == 2);
    CHECK(opts.k_max == 7);
    opts.k_min = opts.k_max = 3;
    AnalyzerHandle an(&opts);
    CHECK(coresig_analyzer_ingest_csv_file(an.p, (dir / "missing.csv").c_str(), 0) == CORESIG_E_IO);
    REQUIRE(coresig_analyzer_ingest_csv_file(an.p, (dir / "t.csv").c_str(), 0) == CORESIG_OK);
    coresig_counters c{};
    coresig_analyzer_counters(an.p, &c);
    CHECK(c.ingested > 0);
    CHECK(c.core_packets == c.ingested);
    CHECK(c.filtered_out == 0);

    REQUIRE(coresig_analyzer_write_report(an.p, (dir / "out").c_str()) == CORESIG_OK);
    std::size_t label_csvs = 0;
    for (const auto& e : fs::directory_iterator(dir / "out/clusters")) label_csvs += e.path().extension() == ".csv";
    CHECK(label_csvs == 1);
    CHECK(fs::exists(dir / "out/clusters/k3.csv"));
    fs::remove_all(dir);
}

TEST_CASE("analyzer rejects bad options and counts malformed JSON") {
    coresig_analysis_options opts;
    coresig_analysis_options_default(&opts);
    opts.k_min = 1;
    coresig_analyzer* an = nullptr;
    CHECK(coresig_analyzer_create(&opts, &an) == CORESIG_E_CONFIG);
    CHECK(an == nullptr);

    AnalyzerHandle ok;
    CHECK(coresig_analyzer_feed_json_line(
              ok.p, R"({"timestamp_us":1,"src":"AMF","dst":"NRF","proto":"TCP","length_bytes":300})") == CORESIG_OK);
    CHECK(coresig_analyzer_feed_json_line(ok.p, "garbage") == CORESIG_E_DATA);
    coresig_counters c{};
    coresig_analyzer_counters(ok.p, &c);
    CHECK(c.ingested == 1);
    CHECK(c.malformed == 1);
}

TEST_CASE("CSV rows beyond the bad-row budget fail the ingest") {
    const auto dir = scratch("bad");
    std::ofstream(dir / "t.csv") << "timestamp_us,src,dst,proto,length_bytes,kind\n0,AMF,NRF,TCP,5,Other\nx,y\n";
    AnalyzerHandle an;
    CHECK(coresig_analyzer_ingest_csv_file(an.p, (dir / "t.csv").c_str(), 0) == CORESIG_E_DATA);
    CHECK(coresig_analyzer_ingest_csv_file(an.p, (dir / "t.csv").c_str(), 1) == CORESIG_OK);
    coresig_counters c{};
    coresig_analyzer_counters(an.p, &c);
    CHECK(c.ingested == 1);
    CHECK(c.malformed == 1);
    fs::remove_all(dir);
}

TEST_CASE("pipeline over a file descriptor matches the analyzer") {
    const auto dir = scratch("pipe");
    SimHandle cfg;
    coresig_sim_config_set_duration(cfg.p, "5m");
    REQUIRE(coresig_simulate_to_file(cfg.p, (dir / "t.jsonl").c_str(), CORESIG_FORMAT_JSONL, nullptr) == CORESIG_OK);

    coresig_pipeline_options po{};
    coresig_analysis_options_default(&po.analysis);
    const auto out = (dir / "stream").string();
    po.out_dir = out.c_str();
    const int fd = ::open((dir / "t.jsonl").c_str(), O_RDONLY);
    REQUIRE(fd >= 0);
    coresig_pipeline_stats stats{};
    REQUIRE(coresig_pipeline_run_fd(&po, fd, &stats) == CORESIG_OK);
    ::close(fd);
    CHECK(stats.snapshots == 1);

    AnalyzerHandle an;
    std::ifstream in(dir / "t.jsonl");
    std::string line;
    while (std::getline(in, line)) REQUIRE(coresig_analyzer_feed_json_line(an.p, line.c_str()) == CORESIG_OK);
    REQUIRE(coresig_analyzer_write_report(an.p, (dir / "batch").c_str()) == CORESIG_OK);
    CHECK(slurp(dir / "stream/report.json") == slurp(dir / "batch/report.json"));
    CHECK(slurp(dir / "stream/manifest.json") == slurp(dir / "batch/manifest.json"));

    po.out_dir = nullptr;
    CHECK(coresig_pipeline_run_fd(&po, 0, &stats) == CORESIG_E_CONFIG);
    fs::remove_all(dir);
}

TEST_CASE("render from CSV") {
    const auto dir = scratch("render");
    std::string grid = "src,NRF,AMF,SMF,AUSF,UDM,UDR,PCF,NSSF,BSF,UPF\n";
    for (const char* nf : {"NRF", "AMF", "SMF", "AUSF", "UDM", "UDR", "PCF", "NSSF", "BSF", "UPF"}) {
        grid += std::string(nf) + ",0,1,2,3,4,5,6,7,8,9\n";
    }
    std::ofstream(dir / "g.csv") << grid;
    REQUIRE(coresig_render_matrix_csv((dir / "g.csv").c_str(), (dir / "g.svg").c_str(), "t", 1, nullptr) ==
            CORESIG_OK);
    CHECK(slurp(dir / "g.svg").find("<svg") != std::string::npos);
    CHECK(coresig_render_matrix_csv((dir / "g.csv").c_str(), (dir / "g.svg").c_str(), "t", 0, "rainbow") ==
          CORESIG_E_DATA);

    std::ofstream(dir / "short.csv") << "src,NRF\nNRF,1\n";
    CHECK(coresig_render_matrix_csv((dir / "short.csv").c_str(), (dir / "s.svg").c_str(), "t", 0, nullptr) ==
          CORESIG_E_DATA);

    std::ofstream(dir / "h.csv") << "bin_start,count\n64,10\n144,3\n";
    CHECK(coresig_render_histogram_csv((dir / "h.csv").c_str(), (dir / "h.svg").c_str(), "h", 16) == CORESIG_OK);
    CHECK(coresig_render_histogram_csv((dir / "nope.csv").c_str(), (dir / "h.svg").c_str(), "h", 16) ==
          CORESIG_E_IO);
    fs::remove_all(dir);
}
