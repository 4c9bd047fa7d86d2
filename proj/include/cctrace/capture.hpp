#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "cctrace/config.hpp"
#include "cctrace/errors.hpp"
#include "cctrace/glob.hpp"

// In-memory pipe/stream registry and capture engine. Pipes are bounded FIFO
// buffers owned by a reverse-DNS component; log streams feed events into
// their pipe subject to level/flag filters, data streams contribute one
// snapshot per dump. A dump drains the matched buffers into a bundle.

namespace cctrace {

enum class StreamKind { log_stream, data_stream };

struct PipeDescriptor {
  std::string owner;
  std::string name;
  std::uint64_t log_policy = 0;  // 0 = off, 1 = continuous
  std::size_t capacity = 4096;   // max buffered events

  bool operator==(const PipeDescriptor&) const = default;
};

struct StreamDescriptor {
  std::string owner;  // filled from the pipe on registration
  std::string pipe;
  std::string name;
  StreamKind kind = StreamKind::log_stream;
  std::uint64_t log_level = 0;
  std::uint64_t log_flags = 0;
  std::uint64_t console_level = 0;
  std::uint64_t console_flags = 0;

  bool operator==(const StreamDescriptor&) const = default;
};

struct LogEvent {
  std::uint64_t timestamp_ns = 0;  // 0 = stamp with the registry clock
  std::uint64_t level = 0;
  std::uint64_t flags = 0;
  std::vector<std::uint8_t> payload;
  std::uint64_t sequence = 0;  // assigned on acceptance, per pipe

  bool operator==(const LogEvent&) const = default;
};

struct StreamKey {
  std::string owner;
  std::string pipe;
  std::string stream;

  auto operator<=>(const StreamKey&) const = default;
};

enum class DumpReason { manual, error };

inline const char* dump_reason_name(DumpReason r) {
  return r == DumpReason::manual ? "manual" : "error";
}

struct EventGroup {
  StreamKey key;
  std::vector<LogEvent> events;  // strictly increasing sequence

  bool operator==(const EventGroup&) const = default;
};

struct Snapshot {
  StreamKey key;
  std::vector<std::uint8_t> payload;
  bool provided = false;

  bool operator==(const Snapshot&) const = default;
};

struct DumpBundle {
  DumpReason reason = DumpReason::manual;
  std::uint64_t trigger_time_ns = 0;
  std::vector<EventGroup> event_groups;  // sorted by key
  std::vector<Snapshot> snapshots;       // sorted by key

  bool empty() const { return event_groups.empty() && snapshots.empty(); }
};

struct ChangeReport {
  std::vector<std::string> applied;    // "owner/pipe" or "owner/pipe/stream"
  std::vector<std::string> unmatched;

  bool operator==(const ChangeReport&) const = default;
};

class CaptureRegistry {
 public:
  using Clock = std::function<std::uint64_t()>;
  using SnapshotProvider = std::function<std::vector<std::uint8_t>()>;

  explicit CaptureRegistry(Clock clock = {}) : clock_(std::move(clock)) {
    if (!clock_)
      clock_ = [] {
        return static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
      };
  }

  std::size_t register_pipe(const PipeDescriptor& descriptor) {
    if (descriptor.log_policy > 1)
      throw Error(Errc::invalid_argument, "log_policy must be 0 or 1");
    if (descriptor.capacity < 1)
      throw Error(Errc::invalid_argument, "pipe capacity must be at least 1");
    std::lock_guard lock(mutex_);
    PipeKey key{descriptor.owner, descriptor.name};
    if (pipes_.count(key))
      throw Error(Errc::duplicate_pipe,
                  "pipe already registered: " + descriptor.owner + "/" + descriptor.name);
    pipes_[key].desc = descriptor;
    pipe_ids_.push_back(key);
    return pipe_ids_.size() - 1;
  }

  std::size_t register_stream(std::size_t pipe_id, StreamDescriptor descriptor) {
    std::lock_guard lock(mutex_);
    if (pipe_id >= pipe_ids_.size())
      throw Error(Errc::unknown_pipe, "no pipe with id " + std::to_string(pipe_id));
    const PipeKey& key = pipe_ids_[pipe_id];
    PipeState& pipe = pipes_.at(key);
    if (pipe.streams.count(descriptor.name))
      throw Error(Errc::duplicate_stream, "stream already registered: " + key.first + "/" +
                                              key.second + "/" + descriptor.name);
    descriptor.owner = key.first;
    descriptor.pipe = key.second;
    std::string name = descriptor.name;
    pipe.streams[name].desc = std::move(descriptor);
    stream_ids_.emplace_back(pipe_id, std::move(name));
    return stream_ids_.size() - 1;
  }

  /// Applies settings to matching pipes/streams. Owner, pipe, and stream
  /// names in the config are glob patterns; a pattern matching nothing
  /// becomes an unmatched entry and changes nothing.
  ChangeReport apply_config(const CaptureConfig& config) {
    std::lock_guard lock(mutex_);
    ChangeReport report;
    for (const auto& [owner_pat, pipes] : config.pipe_settings) {
      for (const auto& [pipe_pat, setting] : pipes) {
        bool any = false;
        for (auto& [key, pipe] : pipes_) {
          if (!glob_match(owner_pat, key.first) || !glob_match(pipe_pat, key.second)) continue;
          pipe.desc.log_policy = setting.policy ? 1 : 0;
          report.applied.push_back(key.first + "/" + key.second);
          any = true;
        }
        if (!any) report.unmatched.push_back(owner_pat + "/" + pipe_pat);
      }
    }
    for (const auto& [owner_pat, pipes] : config.stream_settings) {
      for (const auto& [pipe_pat, streams] : pipes) {
        for (const auto& [stream_pat, setting] : streams) {
          bool any = false;
          for (auto& [key, pipe] : pipes_) {
            if (!glob_match(owner_pat, key.first) || !glob_match(pipe_pat, key.second)) continue;
            for (auto& [name, stream] : pipe.streams) {
              if (!glob_match(stream_pat, name)) continue;
              if (setting.log_level) stream.desc.log_level = *setting.log_level;
              if (setting.log_flags) stream.desc.log_flags = *setting.log_flags;
              if (setting.console_level) stream.desc.console_level = *setting.console_level;
              if (setting.console_flags) stream.desc.console_flags = *setting.console_flags;
              report.applied.push_back(key.first + "/" + key.second + "/" + name);
              any = true;
            }
          }
          if (!any) report.unmatched.push_back(owner_pat + "/" + pipe_pat + "/" + stream_pat);
        }
      }
    }
    return report;
  }

  /// Offers an event to a log stream. Accepted iff the pipe policy is
  /// continuous, event.level <= stream.log_level, and the flag masks
  /// intersect (events with flags == 0 bypass the mask). Acceptance assigns
  /// the pipe's next sequence number and may evict the oldest buffered event.
  bool emit_event(const std::string& owner, const std::string& pipe_name,
                  const std::string& stream_name, LogEvent event) {
    std::lock_guard lock(mutex_);
    PipeState& pipe = find_pipe_for_stream(owner, pipe_name, stream_name);
    const StreamState& stream = pipe.streams.at(stream_name);
    if (stream.desc.kind != StreamKind::log_stream)
      throw Error(Errc::not_a_log_stream,
                  owner + "/" + pipe_name + "/" + stream_name + " is a data stream");
    if (pipe.desc.log_policy != 1) return false;
    if (event.level > stream.desc.log_level) return false;
    if (event.flags != 0 && (event.flags & stream.desc.log_flags) == 0) return false;
    if (event.timestamp_ns == 0) event.timestamp_ns = clock_();
    event.sequence = pipe.next_sequence++;
    pipe.buffer.emplace_back(stream_name, std::move(event));
    while (pipe.buffer.size() > pipe.desc.capacity) pipe.buffer.pop_front();
    return true;
  }

  void set_data_snapshot(const std::string& owner, const std::string& pipe_name,
                         const std::string& stream_name, SnapshotProvider provider) {
    std::lock_guard lock(mutex_);
    PipeState& pipe = find_pipe_for_stream(owner, pipe_name, stream_name);
    StreamState& stream = pipe.streams.at(stream_name);
    if (stream.desc.kind != StreamKind::data_stream)
      throw Error(Errc::not_a_data_stream,
                  owner + "/" + pipe_name + "/" + stream_name + " is a log stream");
    stream.provider = std::move(provider);
  }

  /// Drains the buffers of every pipe matching the patterns into a bundle
  /// and invokes matched data-stream providers once each. Providers must not
  /// call back into the registry. No matches yields an empty bundle.
  DumpBundle trigger_dump(const std::string& owner_pattern, const std::string& pipe_pattern,
                          DumpReason reason) {
    std::lock_guard lock(mutex_);
    DumpBundle bundle;
    bundle.reason = reason;
    bundle.trigger_time_ns = clock_();
    std::map<StreamKey, std::vector<LogEvent>> groups;
    std::map<StreamKey, Snapshot> snapshots;
    for (auto& [key, pipe] : pipes_) {
      if (!glob_match(owner_pattern, key.first) || !glob_match(pipe_pattern, key.second)) continue;
      for (auto& [stream_name, event] : pipe.buffer)
        groups[StreamKey{key.first, key.second, stream_name}].push_back(std::move(event));
      pipe.buffer.clear();
      for (auto& [stream_name, stream] : pipe.streams) {
        if (stream.desc.kind != StreamKind::data_stream) continue;
        StreamKey sk{key.first, key.second, stream_name};
        Snapshot snap;
        snap.key = sk;
        if (stream.provider) {
          snap.payload = stream.provider();
          snap.provided = true;
        }
        snapshots.emplace(std::move(sk), std::move(snap));
      }
    }
    for (auto& [key, events] : groups)
      bundle.event_groups.push_back(EventGroup{key, std::move(events)});
    for (auto& [key, snap] : snapshots) bundle.snapshots.push_back(std::move(snap));
    return bundle;
  }

  /// Matching pipes with their streams, ordered by owner, pipe name, then
  /// stream name.
  std::vector<std::pair<PipeDescriptor, std::vector<StreamDescriptor>>> query(
      const std::string& owner_pattern, const std::string& pipe_pattern) const {
    std::lock_guard lock(mutex_);
    std::vector<std::pair<PipeDescriptor, std::vector<StreamDescriptor>>> out;
    for (const auto& [key, pipe] : pipes_) {
      if (!glob_match(owner_pattern, key.first) || !glob_match(pipe_pattern, key.second)) continue;
      std::vector<StreamDescriptor> streams;
      for (const auto& [name, stream] : pipe.streams) streams.push_back(stream.desc);
      out.emplace_back(pipe.desc, std::move(streams));
    }
    return out;
  }

  std::size_t buffered_count(const std::string& owner, const std::string& pipe_name) const {
    std::lock_guard lock(mutex_);
    auto it = pipes_.find(PipeKey{owner, pipe_name});
    if (it == pipes_.end())
      throw Error(Errc::unknown_pipe, "no such pipe: " + owner + "/" + pipe_name);
    return it->second.buffer.size();
  }

 private:
  using PipeKey = std::pair<std::string, std::string>;  // (owner, name)

  struct StreamState {
    StreamDescriptor desc;
    SnapshotProvider provider;
  };
  struct PipeState {
    PipeDescriptor desc;
    std::map<std::string, StreamState> streams;
    std::deque<std::pair<std::string, LogEvent>> buffer;  // acceptance order
    std::uint64_t next_sequence = 1;
  };

  PipeState& find_pipe_for_stream(const std::string& owner, const std::string& pipe_name,
                                  const std::string& stream_name) {
    auto it = pipes_.find(PipeKey{owner, pipe_name});
    if (it == pipes_.end() || !it->second.streams.count(stream_name))
      throw Error(Errc::unknown_stream,
                  "no such stream: " + owner + "/" + pipe_name + "/" + stream_name);
    return it->second;
  }

  mutable std::mutex mutex_;
  Clock clock_;
  std::map<PipeKey, PipeState> pipes_;
  std::vector<PipeKey> pipe_ids_;
  std::vector<std::pair<std::size_t, std::string>> stream_ids_;
};

/// Effective settings of every registered pipe and stream as a config.
/// Applying the snapshot back to an equally-shaped registry is a no-op.
inline CaptureConfig snapshot_config(const CaptureRegistry& registry) {
  CaptureConfig config;
  for (const auto& [pipe, streams] : registry.query("*", "*")) {
    config.pipe_settings[pipe.owner][pipe.name] = PipeSetting{pipe.log_policy};
    for (const StreamDescriptor& s : streams) {
      StreamSetting setting;
      setting.log_level = s.log_level;
      setting.log_flags = s.log_flags;
      setting.console_level = s.console_level;
      setting.console_flags = s.console_flags;
      config.stream_settings[s.owner][s.pipe][s.name] = setting;
    }
  }
  return config;
}

}  // namespace cctrace
