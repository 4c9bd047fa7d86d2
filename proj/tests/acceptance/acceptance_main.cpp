// Acceptance gate. Each criterion prints exactly one PASS/FAIL line and the
// process exits 0 only if every criterion passes. Checks are written against
// independent reference implementations where the library result could
// otherwise be compared to itself.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cctrace/cctrace.hpp"
#include "support.hpp"

using namespace cctrace;
using testsupport::Rng;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << s << "s";
  return os.str();
}

// ---- criterion 1: container round trip ----------------------------------

std::string check_container_round_trip() {
  auto start = std::chrono::steady_clock::now();
  Rng rng(0x0001);
  for (int i = 0; i < 1000; ++i) {
    pcap::FileContent original = testsupport::random_pcap(rng, i % 4);
    std::vector<std::uint8_t> bytes = pcap::write(original.header, original.records);
    pcap::FileContent back = pcap::read_all(std::span<const std::uint8_t>(bytes));
    if (!testsupport::pcap_equal(original, back))
      return "round trip mismatch at iteration " + std::to_string(i);
  }
  double elapsed = seconds_since(start);
  if (elapsed >= 10.0) return "took " + fmt_seconds(elapsed) + ", budget is 10s";
  return "";
}

// ---- criterion 2: profile and command-line fidelity ----------------------

std::string check_profile_fidelity() {
  std::string xml = testsupport::wifi_profile_xml();
  std::vector<std::uint8_t> bytes(xml.begin(), xml.end());
  profile::ParsedProfile parsed = profile::parse_profile(std::span<const std::uint8_t>(bytes));

  const char* owner = "com.apple.driver.AppleBCMWLANCoreV3.0";
  auto pipe_it = parsed.config.pipe_settings.find(owner);
  if (pipe_it == parsed.config.pipe_settings.end() || !pipe_it->second.count("FirmwareLogs"))
    return "profile did not configure the firmware log pipe";
  if (pipe_it->second.at("FirmwareLogs").policy != 1) return "pipe policy is not 1";
  const StreamSetting& uart = parsed.config.stream_settings.at(owner)
                                  .at("FirmwareLogs")
                                  .at("Chip_UART");
  if (uart.log_level != 5) return "stream log level is not 5";
  if (uart.log_flags != 1) return "stream log flags are not 1";

  std::vector<std::string> lines = profile::emit_cctool_commands(testsupport::cctool_session_config());
  std::vector<std::string> expected = testsupport::cctool_session_lines();
  if (lines != expected) {
    std::string got;
    for (const auto& l : lines) got += l + "; ";
    return "emitted command lines differ: " + got;
  }
  return "";
}

// ---- criterion 3: buffer and dump model ----------------------------------

// Minimal reference: a bounded vector of sequence numbers. Emit appends the
// next number and drops the oldest beyond the capacity; dump drains.
struct ReferenceBuffer {
  std::vector<std::uint64_t> buffer;
  std::uint64_t next = 1;

  void emit() {
    buffer.push_back(next++);
    if (buffer.size() > 3) buffer.erase(buffer.begin());
  }
  std::vector<std::uint64_t> dump() {
    std::vector<std::uint64_t> out = std::move(buffer);
    buffer.clear();
    return out;
  }
};

std::vector<std::uint64_t> dumped_sequences(const DumpBundle& bundle, std::string& error) {
  std::vector<std::uint64_t> out;
  if (bundle.event_groups.size() > 1) {
    error = "dump produced more than one group for a single stream";
    return out;
  }
  for (const EventGroup& g : bundle.event_groups)
    for (const LogEvent& e : g.events) out.push_back(e.sequence);
  return out;
}

std::string check_dump_model() {
  auto start = std::chrono::steady_clock::now();
  std::size_t sequences = 0;
  for (int length = 0; length <= 8; ++length) {
    for (std::uint32_t mask = 0; mask < (1u << length); ++mask) {
      ++sequences;
      CaptureRegistry registry([] { return std::uint64_t{1}; });
      PipeDescriptor pipe;
      pipe.owner = "com.example.device";
      pipe.name = "Events";
      pipe.log_policy = 1;
      pipe.capacity = 3;
      std::size_t id = registry.register_pipe(pipe);
      StreamDescriptor stream;
      stream.name = "main";
      stream.kind = StreamKind::log_stream;
      stream.log_level = ~std::uint64_t{0};
      stream.log_flags = ~std::uint64_t{0};
      registry.register_stream(id, stream);

      ReferenceBuffer reference;
      std::string label = "length " + std::to_string(length) + " mask " + std::to_string(mask);
      for (int step = 0; step < length; ++step) {
        bool is_dump = (mask >> step) & 1;
        if (is_dump) {
          std::vector<std::uint64_t> expected = reference.dump();
          std::string error;
          std::vector<std::uint64_t> got =
              dumped_sequences(registry.trigger_dump("*", "*", DumpReason::manual), error);
          if (!error.empty()) return error + " (" + label + ")";
          if (got != expected) return "dump sequence mismatch (" + label + ")";
        } else {
          LogEvent event;
          event.timestamp_ns = 1;
          event.level = 0;
          event.flags = 0;
          if (!registry.emit_event("com.example.device", "Events", "main", std::move(event)))
            return "event unexpectedly rejected (" + label + ")";
          reference.emit();
        }
      }
      if (registry.buffered_count("com.example.device", "Events") != reference.buffer.size())
        return "buffered count mismatch (" + label + ")";
      std::vector<std::uint64_t> expected = reference.dump();
      std::string error;
      std::vector<std::uint64_t> got =
          dumped_sequences(registry.trigger_dump("*", "*", DumpReason::manual), error);
      if (!error.empty()) return error + " (final, " + label + ")";
      if (got != expected) return "final dump mismatch (" + label + ")";
    }
  }
  if (sequences != 511) return "expected 511 operation sequences, ran " + std::to_string(sequences);
  double elapsed = seconds_since(start);
  if (elapsed >= 5.0) return "took " + fmt_seconds(elapsed) + ", budget is 5s";
  return "";
}

// ---- criterion 4: configuration round trip -------------------------------

std::string check_config_round_trip() {
  Rng rng(0x0004);
  for (int i = 0; i < 200; ++i) {
    CaptureConfig config = testsupport::random_config(rng);
    CaptureRegistry direct;
    CaptureRegistry via_lines;
    testsupport::register_config_targets(direct, config);
    testsupport::register_config_targets(via_lines, config);

    ChangeReport report = direct.apply_config(config);
    if (!report.unmatched.empty())
      return "direct apply left unmatched settings at iteration " + std::to_string(i);
    testsupport::apply_command_lines(via_lines, profile::emit_cctool_commands(config));

    if (direct.query("*", "*") != via_lines.query("*", "*"))
      return "registry state differs at iteration " + std::to_string(i);
  }
  return "";
}

// ---- criterion 5: folder materialization ---------------------------------

std::string check_folder_materialization() {
  CaptureRegistry registry([] {
    static std::uint64_t ticks = 0;
    return 1'000'000'000ULL + 500'000'000ULL * ticks++;
  });
  PipeDescriptor pipe;
  pipe.owner = "com.apple.iokit.IO80211Family";
  pipe.name = "IO80211AWDLPeerManager";
  pipe.log_policy = 1;
  pipe.capacity = 16;
  std::size_t id = registry.register_pipe(pipe);
  StreamDescriptor log;
  log.name = "bpfIO80211Awdl";
  log.kind = StreamKind::log_stream;
  log.log_level = 7;
  log.log_flags = ~std::uint64_t{0};
  registry.register_stream(id, log);
  StreamDescriptor data;
  data.name = "OneStats";
  data.kind = StreamKind::data_stream;
  registry.register_stream(id, data);
  registry.set_data_snapshot("com.apple.iokit.IO80211Family", "IO80211AWDLPeerManager", "OneStats",
                             [] {
                               std::string xml = "<?xml version=\"1.0\"?><stats/>";
                               return std::vector<std::uint8_t>(xml.begin(), xml.end());
                             });

  std::vector<std::vector<std::uint8_t>> payloads = {{0x01}, {0x02, 0x03}, {0x04, 0x05, 0x06}};
  for (const auto& p : payloads) {
    LogEvent event;
    event.level = 1;
    event.flags = 1;
    event.payload = p;
    if (!registry.emit_event("com.apple.iokit.IO80211Family", "IO80211AWDLPeerManager",
                             "bpfIO80211Awdl", std::move(event)))
      return "setup event rejected";
  }

  DumpBundle bundle = registry.trigger_dump("*", "*", DumpReason::manual);
  testsupport::TempDir dir;
  std::string dest = (dir / "trace").string();
  folder::materialize_folder(bundle, snapshot_config(registry), dest);

  folder::FolderIndex index = folder::scan_folder(dest);
  auto base_findings = folder::validate_index(index);
  index.findings.insert(index.findings.end(), base_findings.begin(), base_findings.end());
  if (index.finding_count(folder::Severity::error) != 0) {
    for (const auto& f : index.findings)
      if (f.severity == folder::Severity::error) return "error finding: " + f.message;
  }
  if (index.metadata.count("CaptureReason") == 0 || index.metadata.at("CaptureReason") != "manual")
    return "metadata lost the dump reason";

  // Format checks: the event group landed as a well-formed private-use
  // capture, the snapshot kept its XML identity.
  bool saw_capture = false;
  bool saw_snapshot = false;
  for (const folder::FileEntry& e : index.entries) {
    if (e.relative_path == "com.apple.iokit.IO80211Family/IO80211AWDLPeerManager.pcap") {
      saw_capture = true;
      if (e.verdict != "PCAP") return "capture verdict is " + e.verdict;
      if (!e.pcap || e.pcap->record_count != payloads.size()) return "capture lost records";
      if (e.pcap->link_type != 150) return "capture link type is not 150";
      if (e.kind.format != folder::FileFormat::pcap) return "capture format not sniffed as PCAP";
    }
    if (e.relative_path == "com.apple.iokit.IO80211Family/OneStats.xml") {
      saw_snapshot = true;
      if (e.kind.format != folder::FileFormat::xml) return "snapshot format not sniffed as XML";
    }
  }
  if (!saw_capture) return "materialized capture file missing";
  if (!saw_snapshot) return "materialized snapshot file missing";

  // Byte-level read-back of the capture: same payloads, nanosecond times.
  std::ifstream capture(dest + "/com.apple.iokit.IO80211Family/IO80211AWDLPeerManager.pcap",
                        std::ios::binary);
  pcap::FileContent content = pcap::read_all(capture);
  if (content.header.timestamp_unit != pcap::TimestampUnit::nanosecond)
    return "materialized capture is not nanosecond-precise";
  if (content.records.size() != payloads.size()) return "read-back record count differs";
  for (std::size_t i = 0; i < payloads.size(); ++i)
    if (content.records[i].payload != payloads[i]) return "read-back payload differs";

  // Platform expectations: under an iOS hint, kinds captured only there are
  // demanded; this folder has none of them.
  auto ios_findings = folder::validate_index(index, folder::Platform::ios);
  bool demands_datapath = false;
  for (const folder::Finding& f : ios_findings)
    if (f.severity == folder::Severity::warning &&
        f.message.find("DatapathEvents") != std::string::npos)
      demands_datapath = true;
  if (!demands_datapath) return "iOS validation did not demand the datapath capture";
  return "";
}

// ---- criterion 6: dissection totality ------------------------------------

// Coverage-count partition check, independent of the library's validator:
// every payload byte must be claimed exactly once at the top level, and
// children must stay inside their parent without overlapping each other.
bool children_within(const dissect::FieldNode& node) {
  std::vector<int> cover(node.range.length, 0);
  for (const dissect::FieldNode& c : node.children) {
    if (c.range.offset < node.range.offset) return false;
    if (c.range.offset + c.range.length > node.range.offset + node.range.length) return false;
    for (std::size_t i = 0; i < c.range.length; ++i)
      if (++cover[c.range.offset - node.range.offset + i] > 1) return false;
    if (!children_within(c)) return false;
  }
  return true;
}

bool partition_ok(const dissect::DissectedFrame& frame) {
  std::vector<int> cover(frame.payload.size(), 0);
  auto claim = [&](const dissect::ByteRange& r) {
    if (r.offset > frame.payload.size() || r.length > frame.payload.size() - r.offset)
      return false;
    for (std::size_t i = 0; i < r.length; ++i)
      if (++cover[r.offset + i] > 1) return false;
    return true;
  };
  for (const dissect::FieldNode& f : frame.fields)
    if (!claim(f.range)) return false;
  if (frame.residue.length > 0 && !claim(frame.residue)) return false;
  for (int c : cover)
    if (c != 1) return false;
  for (const dissect::FieldNode& f : frame.fields)
    if (!children_within(f)) return false;
  return true;
}

double printable_fraction(const std::vector<std::uint8_t>& payload) {
  if (payload.empty()) return 0.0;
  std::size_t printable = 0;
  for (std::uint8_t b : payload)
    if ((b >= 0x20 && b <= 0x7e) || b == '\t' || b == '\n' || b == '\r') ++printable;
  return static_cast<double>(printable) / static_cast<double>(payload.size());
}

std::string check_dissection_totality() {
  dissect::DissectorRegistry plain;
  dissect::DissectorRegistry faulty;
  faulty.register_dissector(
      dissect::DissectorSelector{pcap::LinkType{150}, std::nullopt, 5},
      [](std::span<const std::uint8_t>, const std::optional<std::string>&)
          -> std::optional<dissect::DissectedFrame> { return std::nullopt; });
  faulty.register_dissector(
      dissect::DissectorSelector{pcap::LinkType{150}, std::nullopt, 4},
      [](std::span<const std::uint8_t>, const std::optional<std::string>&)
          -> std::optional<dissect::DissectedFrame> { throw std::runtime_error("plugin fault"); });
  faulty.register_dissector(
      dissect::DissectorSelector{pcap::LinkType{150}, std::nullopt, 3},
      [](std::span<const std::uint8_t> payload, const std::optional<std::string>&)
          -> std::optional<dissect::DissectedFrame> {
        dissect::DissectedFrame frame;
        frame.protocol = "broken";
        frame.payload.assign(payload.begin(), payload.end());
        frame.residue = dissect::ByteRange{0, payload.size() + 1};
        return frame;
      });

  Rng rng(0x0006);
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::uint8_t> payload;
    switch (i % 5) {
      case 0: {  // text-leaning
        std::string line = "wl" + std::to_string(i) + ": " + testsupport::rand_name(rng, 0, 40);
        payload.assign(line.begin(), line.end());
        break;
      }
      case 1: {  // well-formed TLV bytes
        dissect::TlvConfig config{1, 1, dissect::Endianness::big};
        auto records = testsupport::random_tlv_records(rng, config);
        payload = dissect::serialize_tlv(records, config);
        break;
      }
      default:
        payload = testsupport::rand_bytes(rng, 128);
    }

    const dissect::DissectorRegistry& registry = (i % 2) ? faulty : plain;
    dissect::DissectedFrame frame =
        registry.dissect(pcap::LinkType{150}, std::span<const std::uint8_t>(payload),
                         i % 3 ? std::optional<std::string>("fuzz") : std::nullopt);

    if (!partition_ok(frame)) return "invalid partition at iteration " + std::to_string(i);
    if (frame.payload != payload) return "payload not preserved at iteration " + std::to_string(i);
    if (frame.protocol != "cc-logtext" && frame.protocol != "cc-tlv" && frame.protocol != "raw")
      return "unexpected protocol '" + frame.protocol + "' at iteration " + std::to_string(i);
    if (!payload.empty() && printable_fraction(payload) >= 0.95 && frame.protocol != "cc-logtext")
      return "printable payload not classified as text at iteration " + std::to_string(i);

    dissect::DissectedFrame again =
        registry.dissect(pcap::LinkType{150}, std::span<const std::uint8_t>(payload),
                         i % 3 ? std::optional<std::string>("fuzz") : std::nullopt);
    if (dissect::frame_to_json(frame) != dissect::frame_to_json(again))
      return "dissection not deterministic at iteration " + std::to_string(i);
  }
  return "";
}

// ---- criterion 7: capture-viewer mapping row ------------------------------

std::string check_viewer_mapping() {
  if (dissect::emit_wireshark_user_dlt(150, "corecapture") !=
      "\"User 3 (DLT=150)\",\"corecapture\",\"0\",\"\",\"0\",\"\"")
    return "row for DLT 150 differs";
  if (dissect::emit_wireshark_user_dlt(147, "proto") != "\"User 0 (DLT=147)\",\"proto\",\"0\",\"\",\"0\",\"\"")
    return "row for DLT 147 differs";
  if (dissect::emit_wireshark_user_dlt(162, "proto") != "\"User 15 (DLT=162)\",\"proto\",\"0\",\"\",\"0\",\"\"")
    return "row for DLT 162 differs";
  return "";
}

// ---- criterion 8: TLV round trip ------------------------------------------

std::string check_tlv_round_trip() {
  Rng rng(0x0008);
  const std::vector<dissect::TlvConfig>& probes = dissect::default_tlv_probe_set();
  if (probes.size() != 18)
    return "probe set has " + std::to_string(probes.size()) + " configs, expected 18";
  for (const dissect::TlvConfig& config : probes) {
    for (int i = 0; i < 500; ++i) {
      std::vector<dissect::TlvRecord> records = testsupport::random_tlv_records(rng, config);
      std::vector<std::uint8_t> bytes = dissect::serialize_tlv(records, config);
      dissect::TlvParseResult parsed =
          dissect::parse_tlv(std::span<const std::uint8_t>(bytes), config);
      if (parsed.residue != 0) return "round trip left residue";
      if (parsed.records != records) return "round trip changed the records";
      std::vector<std::uint8_t> again = dissect::serialize_tlv(parsed.records, config);
      if (again != bytes) return "re-serialization changed the bytes";
    }
  }
  return "";
}

// ---- driver ---------------------------------------------------------------

struct Criterion {
  const char* name;
  std::function<std::string()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"PCAP write/read identity across all four container magics", check_container_round_trip},
      {"profile parsing and command-line emission fidelity", check_profile_fidelity},
      {"buffered capture matches the reference model on every operation order",
       check_dump_model},
      {"configuration survives emit/parse/apply round trips", check_config_round_trip},
      {"materialized dump folders re-scan cleanly with expected formats",
       check_folder_materialization},
      {"dissection is total, valid, and deterministic under faulty plugins",
       check_dissection_totality},
      {"capture-viewer mapping row is byte-exact", check_viewer_mapping},
      {"TLV serialization round-trips under every probe configuration", check_tlv_round_trip},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    try {
      detail = criteria[i].check();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      std::cout << "PASS: [" << (i + 1) << "] " << criteria[i].name << "\n";
    } else {
      std::cout << "FAIL: [" << (i + 1) << "] " << criteria[i].name << " (" << detail << ")\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
