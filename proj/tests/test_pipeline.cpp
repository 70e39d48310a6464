#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "pipeline.hpp"
#include "report.hpp"
#include "sim.hpp"

using namespace coresig;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("coresig_pipe_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

struct Trace {
    PacketList records;
    std::string jsonl;
};

const Trace& trace() {
    static const Trace t = [] {
        SimConfig c;
        c.duration_us = 30 * 60 * 1'000'000LL;
        Trace out;
        out.records = simulate(c);
        for (const auto& r : out.records) out.jsonl += format_json_line(r) + "\n";
        return out;
    }();
    return t;
}

std::string batch_report_json(const AnalysisOptions& opts) {
    return report_json(analyze_snapshot(snapshot_from_records(trace().records, opts.bin_width), opts), opts);
}

void write_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const auto n = ::write(fd, data.data() + off, data.size() - off);
        REQUIRE(n > 0);
        off += static_cast<std::size_t>(n);
    }
}

}  // namespace

TEST_CASE("bounded channel is FIFO and applies backpressure") {
    BoundedChannel<int> ch(2);
    std::atomic<int> pushed{0};
    std::thread producer([&] {
        for (int i = 0; i < 100; ++i) {
            ch.push(i);
            ++pushed;
        }
        ch.close();
    });
    std::this_thread::sleep_for(20ms);
    CHECK(pushed.load() <= 3);  // capacity 2, plus one blocked in push
    int v = -1;
    for (int i = 0; i < 100; ++i) {
        REQUIRE(ch.pop(v) == BoundedChannel<int>::PopStatus::Item);
        REQUIRE(v == i);
    }
    CHECK(ch.pop(v) == BoundedChannel<int>::PopStatus::Closed);
    producer.join();
    CHECK_FALSE(ch.push(1));
}

TEST_CASE("bounded channel pop times out") {
    BoundedChannel<int> ch(1);
    int v = 0;
    const auto status = ch.pop(v, std::chrono::steady_clock::now() + 10ms);
    CHECK(status == BoundedChannel<int>::PopStatus::Timeout);
}

TEST_CASE("final snapshot equals batch analysis") {
    const auto dir = scratch("batch");
    std::istringstream in(trace().jsonl);
    PipelineOptions opts;
    opts.out_dir = dir;
    const auto stats = run_pipeline(istream_lines(in), {}, opts);
    CHECK(stats.applied == trace().records.size());
    CHECK(stats.skipped == 0);
    CHECK(stats.snapshots == 1);  // period 0: only at the end
    CHECK(slurp(dir / "report.json") == batch_report_json(opts.analysis));
    fs::remove_all(dir);
}

TEST_CASE("malformed lines are skipped and counted") {
    const auto dir = scratch("bad");
    std::istringstream in("not json\n" + trace().jsonl + "{\"timestamp_us\": 1}\n\n");
    PipelineOptions opts;
    opts.out_dir = dir;
    const auto stats = run_pipeline(istream_lines(in), {}, opts);
    CHECK(stats.skipped == 2);
    CHECK(stats.applied == trace().records.size());
    fs::remove_all(dir);
}

TEST_CASE("periodic snapshots of an idle stream are empty reports") {
    const auto dir = scratch("idle");
    PipelineOptions opts;
    opts.out_dir = dir;
    opts.snapshot_period = 30ms;
    int calls = 0;
    LineSource idle = [&]() -> std::optional<std::string> {
        if (calls++ == 0) std::this_thread::sleep_for(150ms);
        return std::nullopt;
    };
    const auto stats = run_pipeline(idle, {}, opts);
    CHECK(stats.snapshots >= 2);
    CHECK(stats.applied == 0);
    const auto counts = parse_grid_csv(slurp(dir / "stats/count.csv"));
    CHECK(counts == ValueGrid(10, std::vector<double>(10, 0.0)));
    CHECK(fs::exists(dir / "manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("pipe file descriptor source") {
    const auto dir = scratch("fd");
    int fds[2];
    REQUIRE(::pipe(fds) == 0);
    std::thread writer([&] {
        write_all(fds[1], trace().jsonl);
        ::close(fds[1]);
    });
    PipelineOptions opts;
    opts.out_dir = dir;
    const auto stats = run_pipeline(fd_lines(fds[0]), {}, opts);
    writer.join();
    ::close(fds[0]);
    CHECK(stats.applied == trace().records.size());
    CHECK(slurp(dir / "report.json") == batch_report_json(opts.analysis));
    fs::remove_all(dir);
}

TEST_CASE("TCP source") {
    const auto dir = scratch("tcp");
    PipelineOptions opts;
    opts.out_dir = dir;
    std::promise<std::uint16_t> port_promise;
    auto port_future = port_promise.get_future();
    auto server = std::async(std::launch::async, [&] {
        return run_pipeline_tcp("127.0.0.1", 0, {}, opts, [&](std::uint16_t p) { port_promise.set_value(p); });
    });
    const auto port = port_future.get();
    const int sock = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::connect(sock, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    write_all(sock, trace().jsonl);
    ::close(sock);
    const auto stats = server.get();
    CHECK(stats.applied == trace().records.size());
    CHECK(slurp(dir / "report.json") == batch_report_json(opts.analysis));
    fs::remove_all(dir);
}

TEST_CASE("listen errors") {
    PipelineOptions opts;
    opts.out_dir = scratch("never");
    CHECK_THROWS_AS(run_pipeline_tcp("localhost", 0, {}, opts), ConfigError);

    // Occupy a port, then try to bind it again.
    const int holder = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::bind(holder, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    REQUIRE(::listen(holder, 1) == 0);
    socklen_t len = sizeof addr;
    ::getsockname(holder, reinterpret_cast<sockaddr*>(&addr), &len);
    CHECK_THROWS_AS(run_pipeline_tcp("127.0.0.1", ntohs(addr.sin_port), {}, opts), IoError);
    ::close(holder);
}

TEST_CASE("reader errors surface after the stream stops") {
    PipelineOptions opts;
    opts.out_dir = scratch("err");
    LineSource broken = []() -> std::optional<std::string> { throw IoError("link down"); };
    CHECK_THROWS_AS(run_pipeline(broken, {}, opts), IoError);
    fs::remove_all(opts.out_dir);
}
