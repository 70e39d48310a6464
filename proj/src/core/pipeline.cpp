/*
 * Copyright (c) 2026 The coresig Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pipeline.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <exception>
#include <memory>
#include <thread>
#include <variant>

#include "report.hpp"

namespace coresig {

namespace {

struct Malformed {};
using Item = std::variant<PacketRecord, Malformed>;

class Fd {
public:
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() {
        if (fd_ >= 0) ::close(fd_);
    }
    int get() const { return fd_; }

private:
    int fd_;
};

std::string errno_text() { return std::strerror(errno); }

}  // namespace

LineSource istream_lines(std::istream& in) {
    return [&in]() -> std::optional<std::string> {
        std::string line;
        if (!std::getline(in, line)) {
            if (in.bad()) throw IoError("read failed on input stream");
            return std::nullopt;
        }
        return line;
    };
}

LineSource fd_lines(int fd) {
    struct State {
        std::string buffer;
        bool eof = false;
    };
    auto state = std::make_shared<State>();
    return [fd, state]() -> std::optional<std::string> {
        while (true) {
            auto nl = state->buffer.find('\n');
            if (nl != std::string::npos) {
                std::string line = state->buffer.substr(0, nl);
                state->buffer.erase(0, nl + 1);
                return line;
            }
            if (state->eof) {
                if (state->buffer.empty()) return std::nullopt;
                return std::exchange(state->buffer, {});
            }
            char chunk[65536];
            const ssize_t n = ::read(fd, chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw IoError("read failed: " + errno_text());
            }
            if (n == 0) {
                state->eof = true;
            } else {
                state->buffer.append(chunk, static_cast<std::size_t>(n));
            }
        }
    };
}

PipelineStats run_pipeline(LineSource source, const NfAddressMap& map, const PipelineOptions& options) {
    options.analysis.validate();
    if (options.snapshot_period.count() < 0) throw ConfigError("snapshot period must be >= 0");

    BoundedChannel<Item> channel(options.channel_capacity);
    std::exception_ptr reader_error;
    std::thread reader([&] {
        try {
            std::size_t line_no = 0;
            while (auto line = source()) {
                ++line_no;
                if (!line->empty() && line->back() == '\r') line->pop_back();
                if (line->find_first_not_of(" \t") == std::string::npos) continue;
                Item item;
                try {
                    item = parse_json_record(*line, map, line_no);
                } catch (const DataError&) {
                    item = Malformed{};
                }
                if (!channel.push(std::move(item))) break;
            }
        } catch (...) {
            reader_error = std::current_exception();
        }
        channel.close();
    });

    Accumulator acc(options.analysis.bin_width);
    PipelineStats stats;
    const auto write_snapshot = [&] {
        write_report(analyze_snapshot(acc.snapshot(), options.analysis), options.analysis, options.out_dir);
        ++stats.snapshots;
    };

    try {
        const bool periodic = options.snapshot_period.count() > 0;
        auto next = std::chrono::steady_clock::now() + options.snapshot_period;
        Item item;
        while (true) {
            const auto status = channel.pop(item, periodic ? std::optional(next) : std::nullopt);
            if (status == BoundedChannel<Item>::PopStatus::Closed) break;
            if (status == BoundedChannel<Item>::PopStatus::Item) {
                if (auto* rec = std::get_if<PacketRecord>(&item)) {
                    acc.apply(*rec);
                } else {
                    acc.note_malformed();
                }
            }
            if (periodic && std::chrono::steady_clock::now() >= next) {
                write_snapshot();
                next = std::chrono::steady_clock::now() + options.snapshot_period;
            }
        }
    } catch (...) {
        channel.close();
        reader.join();
        throw;
    }
    reader.join();
    if (reader_error) std::rethrow_exception(reader_error);

    write_snapshot();
    stats.applied = acc.applied();
    stats.skipped = acc.malformed();
    return stats;
}

PipelineStats run_pipeline_tcp(const std::string& host, std::uint16_t port, const NfAddressMap& map,
                               const PipelineOptions& options,
                               const std::function<void(std::uint16_t)>& on_listening) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw ConfigError("listen address must be IPv4: '" + host + "'");
    }
    Fd listener(::socket(AF_INET, SOCK_STREAM, 0));
    if (listener.get() < 0) throw IoError("socket: " + errno_text());
    const int one = 1;
    ::setsockopt(listener.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(listener.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        throw IoError("bind " + host + ":" + std::to_string(port) + ": " + errno_text());
    }
    if (::listen(listener.get(), 1) != 0) throw IoError("listen: " + errno_text());
    socklen_t len = sizeof addr;
    ::getsockname(listener.get(), reinterpret_cast<sockaddr*>(&addr), &len);
    if (on_listening) on_listening(ntohs(addr.sin_port));

    int conn_fd = -1;
    do {
        conn_fd = ::accept(listener.get(), nullptr, nullptr);
    } while (conn_fd < 0 && errno == EINTR);
    if (conn_fd < 0) throw IoError("accept: " + errno_text());
    Fd conn(conn_fd);
    return run_pipeline(fd_lines(conn.get()), map, options);
}

}  // namespace coresig
