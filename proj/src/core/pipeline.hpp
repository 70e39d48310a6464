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

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <istream>
#include <mutex>
#include <optional>
#include <string>

#include "analysis.hpp"
#include "ingest.hpp"

namespace coresig {

// Multi-producer, multi-consumer FIFO with a fixed capacity. push() blocks
// while full; pop() blocks until an item arrives, the channel is closed and
// drained, or the deadline passes.
template <typename T>
class BoundedChannel {
public:
    enum class PopStatus { Item, Closed, Timeout };

    explicit BoundedChannel(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

    // Returns false if the channel was closed.
    bool push(T item) {
        std::unique_lock lock(mu_);
        not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
        if (closed_) return false;
        items_.push_back(std::move(item));
        not_empty_.notify_one();
        return true;
    }

    PopStatus pop(T& out, std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt) {
        std::unique_lock lock(mu_);
        const auto ready = [&] { return closed_ || !items_.empty(); };
        if (deadline) {
            if (!not_empty_.wait_until(lock, *deadline, ready)) return PopStatus::Timeout;
        } else {
            not_empty_.wait(lock, ready);
        }
        if (items_.empty()) return PopStatus::Closed;
        out = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return PopStatus::Item;
    }

    void close() {
        std::lock_guard lock(mu_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::size_t capacity_;
    std::mutex mu_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<T> items_;
    bool closed_ = false;
};

struct PipelineOptions {
    AnalysisOptions analysis;
    std::filesystem::path out_dir;
    // 0 = write a single snapshot once the stream ends.
    std::chrono::milliseconds snapshot_period{0};
    std::size_t channel_capacity = 4096;
};

struct PipelineStats {
    std::uint64_t applied = 0;
    std::uint64_t skipped = 0;
    std::uint64_t snapshots = 0;
};

// Yields one line per call (without the newline); nullopt at end of input.
using LineSource = std::function<std::optional<std::string>()>;

LineSource istream_lines(std::istream& in);
// Reads from a file descriptor without taking ownership.
LineSource fd_lines(int fd);

// Parses JSON lines on a reader thread and aggregates them on the calling
// thread. Each snapshot rewrites the report in out_dir; the last one is
// written after end of input.
PipelineStats run_pipeline(LineSource source, const NfAddressMap& map, const PipelineOptions& options);

// Listens on host:port, accepts one connection and streams it through
// run_pipeline. `on_listening` receives the bound port (useful with port 0).
PipelineStats run_pipeline_tcp(const std::string& host, std::uint16_t port, const NfAddressMap& map,
                               const PipelineOptions& options,
                               const std::function<void(std::uint16_t)>& on_listening = {});

}  // namespace coresig
