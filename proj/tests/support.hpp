#pragma once

// Shared fixtures and randomized generators for the test suite. Every
// generator takes an explicit engine so a test's data is reproducible
// from its seed.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cctrace/cctrace.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

inline std::uint64_t rand_below(Rng& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

inline std::string rand_name(Rng& rng, std::size_t min_len = 3, std::size_t max_len = 10) {
  static const char alphabet[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::size_t len = min_len + rand_below(rng, max_len - min_len + 1);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) out += alphabet[rand_below(rng, sizeof(alphabet) - 1)];
  return out;
}

inline std::vector<std::uint8_t> rand_bytes(Rng& rng, std::size_t max_len) {
  std::vector<std::uint8_t> out(rand_below(rng, max_len + 1));
  for (auto& b : out) b = static_cast<std::uint8_t>(rand_below(rng, 256));
  return out;
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cctrace-test-" + std::to_string(counter.fetch_add(1)) + "-" +
             std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline void write_file(const std::filesystem::path& p, const std::vector<std::uint8_t>& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(content.data()),
            static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// ---- pcap ----

// A random but well-formed capture file. The byte order / timestamp unit
// combination is taken from `combo` (0..3) so callers can sweep all four
// container magics deterministically.
inline cctrace::pcap::FileContent random_pcap(Rng& rng, int combo) {
  using namespace cctrace::pcap;
  FileContent fc;
  fc.header.byte_order = (combo & 1) ? ByteOrder::big : ByteOrder::little;
  fc.header.timestamp_unit = (combo & 2) ? TimestampUnit::nanosecond : TimestampUnit::microsecond;
  fc.header.version_major = 2;
  fc.header.version_minor = 4;
  fc.header.reserved1 = static_cast<std::int32_t>(rand_below(rng, 1u << 16)) - (1 << 15);
  fc.header.reserved2 = static_cast<std::uint32_t>(rand_below(rng, 1ull << 32));
  fc.header.snaplen = 64 + static_cast<std::uint32_t>(rand_below(rng, 65536 - 64));
  fc.header.link_type = LinkType{static_cast<std::uint32_t>(rand_below(rng, 200))};
  const std::uint64_t tick_bound =
      fc.header.timestamp_unit == TimestampUnit::nanosecond ? 1'000'000'000ull : 1'000'000ull;
  std::size_t records = rand_below(rng, 9);
  for (std::size_t i = 0; i < records; ++i) {
    Record r;
    r.ts_sec = static_cast<std::uint32_t>(rand_below(rng, 1ull << 32));
    r.ts_frac = static_cast<std::uint32_t>(rand_below(rng, tick_bound));
    r.payload = rand_bytes(rng, 64);
    r.original_length = static_cast<std::uint32_t>(r.payload.size() + rand_below(rng, 128));
    fc.records.push_back(std::move(r));
  }
  return fc;
}

inline bool pcap_equal(const cctrace::pcap::FileContent& a, const cctrace::pcap::FileContent& b) {
  if (a.header.byte_order != b.header.byte_order) return false;
  if (a.header.timestamp_unit != b.header.timestamp_unit) return false;
  if (a.header.version_major != b.header.version_major) return false;
  if (a.header.version_minor != b.header.version_minor) return false;
  if (a.header.reserved1 != b.header.reserved1) return false;
  if (a.header.reserved2 != b.header.reserved2) return false;
  if (a.header.snaplen != b.header.snaplen) return false;
  if (a.header.link_type.code != b.header.link_type.code) return false;
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& ra = a.records[i];
    const auto& rb = b.records[i];
    if (ra.ts_sec != rb.ts_sec || ra.ts_frac != rb.ts_frac) return false;
    if (ra.original_length != rb.original_length) return false;
    if (ra.payload != rb.payload) return false;
  }
  return true;
}

// ---- configuration ----

// Random capture configuration with glob-safe, whitespace-free names so
// it can survive a command-line round trip unchanged.
inline cctrace::CaptureConfig random_config(Rng& rng) {
  cctrace::CaptureConfig config;
  std::size_t owners = 1 + rand_below(rng, 3);
  for (std::size_t o = 0; o < owners; ++o) {
    std::string owner = "com." + rand_name(rng) + "." + rand_name(rng);
    std::size_t pipes = 1 + rand_below(rng, 3);
    for (std::size_t p = 0; p < pipes; ++p) {
      std::string pipe = rand_name(rng);
      if (rand_below(rng, 2)) {
        config.pipe_settings[owner][pipe].policy = static_cast<unsigned>(rand_below(rng, 2));
      }
      std::size_t streams = rand_below(rng, 3);
      for (std::size_t s = 0; s < streams; ++s) {
        cctrace::StreamSetting setting;
        bool any = false;
        if (rand_below(rng, 2)) { setting.log_level = rand_below(rng, 16); any = true; }
        if (rand_below(rng, 2)) { setting.log_flags = rng(); any = true; }
        if (rand_below(rng, 2)) { setting.console_level = rand_below(rng, 16); any = true; }
        if (rand_below(rng, 2)) { setting.console_flags = rng(); any = true; }
        if (!any) setting.log_level = rand_below(rng, 16);
        config.stream_settings[owner][pipe][rand_name(rng)] = setting;
      }
    }
  }
  config.normalize();
  return config;
}

// Registers every pipe and stream a config names, so applying the config
// leaves nothing unmatched.
inline void register_config_targets(cctrace::CaptureRegistry& registry,
                                    const cctrace::CaptureConfig& config) {
  std::map<std::pair<std::string, std::string>, std::size_t> pipe_ids;
  auto ensure_pipe = [&](const std::string& owner, const std::string& pipe) {
    auto key = std::make_pair(owner, pipe);
    auto it = pipe_ids.find(key);
    if (it != pipe_ids.end()) return it->second;
    cctrace::PipeDescriptor desc;
    desc.owner = owner;
    desc.name = pipe;
    std::size_t id = registry.register_pipe(desc);
    pipe_ids.emplace(key, id);
    return id;
  };
  for (const auto& [owner, pipes] : config.pipe_settings)
    for (const auto& [pipe, setting] : pipes) ensure_pipe(owner, pipe);
  for (const auto& [owner, pipes] : config.stream_settings)
    for (const auto& [pipe, streams] : pipes) {
      std::size_t id = ensure_pipe(owner, pipe);
      for (const auto& [stream, setting] : streams) {
        cctrace::StreamDescriptor desc;
        desc.name = stream;
        desc.kind = cctrace::StreamKind::log_stream;
        registry.register_stream(id, desc);
      }
    }
}

// Feeds each command line through the command-line parser and applies the
// resulting single-target config.
inline void apply_command_lines(cctrace::CaptureRegistry& registry,
                                const std::vector<std::string>& lines) {
  for (const auto& line : lines) {
    auto args = cctrace::detail::split_ws(line);
    auto invocation = cctrace::profile::parse_cctool_args(args);
    registry.apply_config(cctrace::profile::invocation_to_config(invocation));
  }
}

// ---- profile fixtures ----

// Wi-Fi diagnostic profile: one capture-configuration payload plus two
// unrelated payloads that should be inventoried but not interpreted.
inline std::string wifi_profile_xml() {
  return R"(<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE plist PUBLIC "-//Apple//DTD PLIST 1.0//EN" "http://www.apple.com/DTDs/PropertyList-1.0.dtd">
<plist version="1.0">
<dict>
	<key>PayloadContent</key>
	<array>
		<dict>
			<key>CCConfigurePipe</key>
			<dict>
				<key>com.apple.driver.AppleBCMWLANCoreV3.0</key>
				<dict>
					<key>FirmwareLogs</key>
					<dict>
						<key>Policy</key>
						<integer>1</integer>
					</dict>
				</dict>
			</dict>
			<key>CCConfigureStream</key>
			<dict>
				<key>com.apple.driver.AppleBCMWLANCoreV3.0</key>
				<dict>
					<key>FirmwareLogs</key>
					<dict>
						<key>Chip_UART</key>
						<dict>
							<key>Console</key>
							<dict>
								<key>LogFlags</key>
								<integer>0</integer>
								<key>LogLevel</key>
								<integer>0</integer>
							</dict>
							<key>CoreCapture</key>
							<dict>
								<key>LogFlags</key>
								<integer>1</integer>
								<key>LogLevel</key>
								<integer>5</integer>
							</dict>
						</dict>
					</dict>
				</dict>
			</dict>
			<key>PayloadType</key>
			<string>com.apple.corecapture.configure</string>
			<key>PayloadVersion</key>
			<integer>1</integer>
		</dict>
		<dict>
			<key>PayloadType</key>
			<string>com.apple.system.logging</string>
			<key>PayloadVersion</key>
			<integer>1</integer>
		</dict>
		<dict>
			<key>PayloadType</key>
			<string>com.apple.defaults.managed</string>
			<key>PayloadVersion</key>
			<integer>1</integer>
		</dict>
	</array>
	<key>PayloadType</key>
	<string>Configuration</string>
	<key>PayloadVersion</key>
	<integer>1</integer>
</dict>
</plist>
)";
}

// Driver-vintage command-line session: enable two pipes, tune one stream
// on each, using the historical flag values.
inline cctrace::CaptureConfig cctool_session_config() {
  cctrace::CaptureConfig config;
  config.pipe_settings["com.apple.driver.AirPort.Brcm4360.0"]["DriverLogs"].policy = 1;
  cctrace::StreamSetting driver;
  driver.log_level = 5;
  driver.log_flags = 8388608;
  config.stream_settings["com.apple.driver.AirPort.Brcm4360.0"]["DriverLogs"]["DriverLogs"] = driver;
  config.pipe_settings["com.apple.iokit.IO80211Family"]["IO80211AWDLPeerManager"].policy = 1;
  cctrace::StreamSetting awdl;
  awdl.log_level = 5;
  awdl.log_flags = 27358198660246032ull;
  awdl.console_level = 1;
  awdl.console_flags = 0;
  config.stream_settings["com.apple.iokit.IO80211Family"]["IO80211AWDLPeerManager"]["bpfIO80211Awdl"] = awdl;
  config.normalize();
  return config;
}

inline std::vector<std::string> cctool_session_lines() {
  return {
      "-o com.apple.driver.AirPort.Brcm4360.0 -p DriverLogs -x 1",
      "-o com.apple.driver.AirPort.Brcm4360.0 -p DriverLogs -s DriverLogs -l 5 -f 8388608",
      "-o com.apple.iokit.IO80211Family -p IO80211AWDLPeerManager -x 1",
      "-o com.apple.iokit.IO80211Family -p IO80211AWDLPeerManager -s bpfIO80211Awdl"
      " -l 5 -f 27358198660246032 -g 1 -m 0",
  };
}

// ---- TLV ----

inline std::vector<cctrace::dissect::TlvRecord> random_tlv_records(
    Rng& rng, const cctrace::dissect::TlvConfig& config) {
  std::uint64_t type_bound = cctrace::dissect::tlv_width_limit(config.type_width);
  std::uint64_t length_bound = cctrace::dissect::tlv_width_limit(config.length_width);
  std::vector<cctrace::dissect::TlvRecord> records(rand_below(rng, 7));
  for (auto& rec : records) {
    rec.type = type_bound == ~0ull ? rng() : rand_below(rng, type_bound + 1);
    std::size_t max_len = static_cast<std::size_t>(std::min<std::uint64_t>(32, length_bound));
    rec.value = rand_bytes(rng, max_len);
  }
  return records;
}

}  // namespace testsupport
