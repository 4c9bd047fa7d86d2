#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cctrace {

// Where a CaptureConfig came from; merged configs carry several bits.
enum Provenance : std::uint8_t {
  kProvenanceNone = 0,
  kProvenanceSignedProfile = 1,
  kProvenanceUnsignedProfile = 2,
  kProvenanceCommandLine = 4,
};

inline std::vector<std::string> provenance_names(std::uint8_t mask) {
  std::vector<std::string> out;
  if (mask & kProvenanceSignedProfile) out.push_back("signed_profile");
  if (mask & kProvenanceUnsignedProfile) out.push_back("unsigned_profile");
  if (mask & kProvenanceCommandLine) out.push_back("command_line");
  return out;
}

struct PipeSetting {
  std::uint64_t policy = 0;

  friend bool operator==(const PipeSetting&, const PipeSetting&) = default;
};

struct StreamSetting {
  std::optional<std::uint64_t> log_level;
  std::optional<std::uint64_t> log_flags;
  std::optional<std::uint64_t> console_level;
  std::optional<std::uint64_t> console_flags;

  bool empty() const { return !log_level && !log_flags && !console_level && !console_flags; }

  friend bool operator==(const StreamSetting&, const StreamSetting&) = default;
};

/// Pipe and stream settings addressed by owner (reverse-DNS) and name.
/// The same model backs profile payloads and cctool-style command lines.
struct CaptureConfig {
  using PipeMap = std::map<std::string, std::map<std::string, PipeSetting>>;
  using StreamMap =
      std::map<std::string, std::map<std::string, std::map<std::string, StreamSetting>>>;

  PipeMap pipe_settings;      // owner -> pipe -> setting
  StreamMap stream_settings;  // owner -> pipe -> stream -> setting
  std::uint8_t provenance = kProvenanceNone;

  bool empty() const { return pipe_settings.empty() && stream_settings.empty(); }

  /// Drops empty inner maps and settings with no fields set.
  void normalize() {
    for (auto it = pipe_settings.begin(); it != pipe_settings.end();)
      it = it->second.empty() ? pipe_settings.erase(it) : std::next(it);
    for (auto oit = stream_settings.begin(); oit != stream_settings.end();) {
      for (auto pit = oit->second.begin(); pit != oit->second.end();) {
        for (auto sit = pit->second.begin(); sit != pit->second.end();)
          sit = sit->second.empty() ? pit->second.erase(sit) : std::next(sit);
        pit = pit->second.empty() ? oit->second.erase(pit) : std::next(pit);
      }
      oit = oit->second.empty() ? stream_settings.erase(oit) : std::next(oit);
    }
  }

  friend bool operator==(const CaptureConfig&, const CaptureConfig&) = default;
};

/// Setting equality regardless of how the configs were obtained.
inline bool equivalent(const CaptureConfig& a, const CaptureConfig& b) {
  return a.pipe_settings == b.pipe_settings && a.stream_settings == b.stream_settings;
}

}  // namespace cctrace
