#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cctrace/capture.hpp"
#include "cctrace/config.hpp"
#include "cctrace/detail/bytes.hpp"
#include "cctrace/errors.hpp"
#include "cctrace/pcap.hpp"
#include "cctrace/plist.hpp"
#include "cctrace/profile.hpp"
#include "cctrace/version.hpp"

// Trace-folder handling: scan/classify/validate/summarize an on-disk capture
// folder (Metadata/ plus one directory per owning component), and write a
// DumpBundle out in the same shape. Scanning is total: malformed member
// files become findings, never failures.

namespace cctrace::folder {

enum class FileFormat { pcap, txt, xml, bin };

inline const char* format_name(FileFormat f) {
  switch (f) {
    case FileFormat::pcap: return "PCAP";
    case FileFormat::txt: return "TXT";
    case FileFormat::xml: return "XML";
    default: return "BIN";
  }
}

enum class KindName {
  datapath_events,
  driver_logs,
  firmware_bus_logs,
  firmware_logs,
  state_snapshots,
  association_event_history,
  control_path,
  io80211_awdl_peer_manager,
  one_stats,
  io_reporters,
  metadata,
  unknown,
};

struct FileKind {
  KindName name = KindName::unknown;
  FileFormat format = FileFormat::bin;  // sniffed from content

  bool operator==(const FileKind&) const = default;
};

enum class Platform { unknown, ios, macos };

inline const char* platform_name(Platform p) {
  switch (p) {
    case Platform::ios: return "ios";
    case Platform::macos: return "macos";
    default: return "unknown";
  }
}

namespace detail_folder {

struct KindInfo {
  KindName kind;
  const char* display;          // canonical filename stem
  unsigned expected;            // bitmask of FileFormat values
  bool on_ios;
  bool on_macos;
};

inline constexpr unsigned format_bit(FileFormat f) { return 1u << static_cast<unsigned>(f); }

// Known capture-folder file kinds: expected formats and platform presence.
// StateSnapshots legitimately appears as either text or raw memory dumps.
inline const std::vector<KindInfo>& kind_table() {
  static const std::vector<KindInfo> table = {
      {KindName::datapath_events, "DatapathEvents", format_bit(FileFormat::pcap), true, false},
      {KindName::driver_logs, "DriverLogs", format_bit(FileFormat::txt), true, true},
      {KindName::firmware_bus_logs, "FirmwareBusLogs", format_bit(FileFormat::pcap), true, false},
      {KindName::firmware_logs, "FirmwareLogs", format_bit(FileFormat::txt), true, false},
      {KindName::state_snapshots, "StateSnapshots",
       format_bit(FileFormat::txt) | format_bit(FileFormat::bin), true, true},
      {KindName::association_event_history, "AssociationEventHistory",
       format_bit(FileFormat::xml), true, true},
      {KindName::control_path, "ControlPath", format_bit(FileFormat::pcap), true, true},
      {KindName::io80211_awdl_peer_manager, "IO80211AWDLPeerManager",
       format_bit(FileFormat::pcap), true, true},
      {KindName::one_stats, "OneStats", format_bit(FileFormat::xml), true, true},
      {KindName::io_reporters, "IOReporters", format_bit(FileFormat::xml), true, true},
  };
  return table;
}

inline const KindInfo* kind_info(KindName name) {
  for (const KindInfo& k : kind_table())
    if (k.kind == name) return &k;
  return nullptr;
}

inline std::string normalize_stem(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '_' || c == '-') continue;
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  return out;
}

}  // namespace detail_folder

inline const char* kind_name(KindName k) {
  if (k == KindName::metadata) return "Metadata";
  if (k == KindName::unknown) return "Unknown";
  return detail_folder::kind_info(k)->display;
}

struct PcapStats {
  std::uint64_t record_count = 0;
  std::uint32_t link_type = 0;
  std::optional<std::uint64_t> first_timestamp_ns;
  std::optional<std::uint64_t> last_timestamp_ns;

  bool operator==(const PcapStats&) const = default;
};

enum class Severity { info, warning, error };

inline const char* severity_name(Severity s) {
  switch (s) {
    case Severity::error: return "error";
    case Severity::warning: return "warning";
    default: return "info";
  }
}

struct Finding {
  Severity severity = Severity::info;
  std::string path;  // relative to the folder root, empty for folder-level
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct FileEntry {
  std::string relative_path;
  FileKind kind;
  std::uint64_t size = 0;
  std::string verdict;  // sniffed format, annotated, e.g. "PCAP(truncated)"
  std::optional<PcapStats> pcap;  // present iff verdict is exactly "PCAP"
};

struct FolderIndex {
  std::string root;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> owners;
  std::vector<FileEntry> entries;  // sorted by relative path
  std::vector<Finding> findings;

  std::size_t finding_count(Severity s) const {
    std::size_t n = 0;
    for (const Finding& f : findings)
      if (f.severity == s) ++n;
    return n;
  }
};

/// Pure classification from the relative path and the first bytes of the
/// file. The kind is matched on the filename stem (case-insensitive, spaces
/// and separators ignored, extra suffixes tolerated); the format is sniffed
/// from content, empty files sniffing as BIN.
inline FileKind classify_file(const std::string& relative_path,
                              std::span<const std::uint8_t> head) {
  FileKind kind;

  std::filesystem::path p(relative_path);
  for (const auto& part : p)
    if (detail_folder::normalize_stem(part.string()) == "metadata") kind.name = KindName::metadata;
  if (kind.name != KindName::metadata) {
    std::string stem = detail_folder::normalize_stem(p.stem().string());
    std::size_t best = 0;
    for (const auto& info : detail_folder::kind_table()) {
      std::string want = detail_folder::normalize_stem(info.display);
      if (stem.size() >= want.size() && stem.compare(0, want.size(), want) == 0 &&
          want.size() > best) {
        kind.name = info.kind;
        best = want.size();
      }
    }
  }

  if (head.size() >= 4) {
    std::uint32_t le = detail::load32(head.data(), true);
    std::uint32_t be = detail::load32(head.data(), false);
    for (std::uint32_t magic : {pcap::kMagicMicrosecond, pcap::kMagicNanosecond})
      if (le == magic || be == magic) {
        kind.format = FileFormat::pcap;
        return kind;
      }
  }
  std::string_view text(reinterpret_cast<const char*>(head.data()), head.size());
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text.substr(first).starts_with("<?xml")) {
    kind.format = FileFormat::xml;
  } else if (!head.empty() && detail::printable_ratio(head) >= 0.95) {
    kind.format = FileFormat::txt;
  } else {
    kind.format = FileFormat::bin;
  }
  return kind;
}

namespace detail_folder {

inline std::optional<std::vector<std::uint8_t>> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) return std::nullopt;
  return bytes;
}

inline std::string stringify_plist_scalar(const plist::Value& v) {
  switch (v.kind()) {
    case plist::Value::Kind::boolean: return v.as_bool() ? "true" : "false";
    case plist::Value::Kind::integer: return std::to_string(v.as_integer());
    case plist::Value::Kind::real: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%g", v.as_real());
      return buf;
    }
    case plist::Value::Kind::string: return v.as_string();
    case plist::Value::Kind::data: return "<" + std::to_string(v.as_data().size()) + " bytes>";
    case plist::Value::Kind::array: return "<array:" + std::to_string(v.as_array().size()) + ">";
    default: return "<dict:" + std::to_string(v.as_dict().size()) + ">";
  }
}

inline void absorb_metadata_file(const std::filesystem::path& path, const std::string& rel,
                                 const std::vector<std::uint8_t>& bytes, FileFormat format,
                                 FolderIndex& index) {
  std::string filename = path.filename().string();
  if (format == FileFormat::xml) {
    try {
      plist::Value root =
          plist::parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
      if (root.is_dict()) {
        for (const auto& [k, v] : root.as_dict()) index.metadata[k] = stringify_plist_scalar(v);
        return;
      }
    } catch (const Error&) {
      index.findings.push_back(
          Finding{Severity::info, rel, "metadata file is not a parseable property list"});
    }
  } else if (format == FileFormat::txt) {
    std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    bool any = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
      pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
      std::size_t sep = line.find_first_of(":=");
      if (sep == std::string_view::npos) continue;
      std::string key(line.substr(0, sep));
      std::string value(line.substr(sep + 1));
      while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
      std::size_t vstart = value.find_first_not_of(" \t");
      value = vstart == std::string::npos ? "" : value.substr(vstart);
      while (!value.empty() && (value.back() == '\r' || value.back() == ' ')) value.pop_back();
      if (key.empty()) continue;
      index.metadata[key] = value;
      any = true;
    }
    if (any) return;
  }
  index.metadata[filename] = "<" + std::to_string(bytes.size()) + " bytes>";
}

}  // namespace detail_folder

/// Recursive deterministic inventory of a trace folder. Member files are
/// classified and, for containers, opened for stats; anything malformed or
/// unreadable becomes a finding on that entry and the scan continues.
inline FolderIndex scan_folder(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw Error(Errc::root_not_found, "not a readable folder: " + root.string());

  FolderIndex index;
  index.root = root.string();

  std::vector<std::string> files;
  std::set<std::string> owners;
  for (fs::recursive_directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
    if (ec) break;
    fs::path rel = fs::relative(it->path(), root, ec);
    if (it->is_directory()) {
      if (rel.has_parent_path()) continue;
      std::string top = rel.string();
      if (detail_folder::normalize_stem(top) != "metadata") owners.insert(top);
    } else if (it->is_regular_file()) {
      files.push_back(rel.generic_string());
    }
  }
  std::sort(files.begin(), files.end());
  index.owners.assign(owners.begin(), owners.end());
  if (files.empty() && index.owners.empty())
    index.findings.push_back(Finding{Severity::info, "", "no owner folders"});

  for (const std::string& rel : files) {
    fs::path full = root / fs::path(rel);
    FileEntry entry;
    entry.relative_path = rel;

    auto bytes = detail_folder::read_file(full);
    if (!bytes) {
      entry.verdict = "UNREADABLE";
      index.findings.push_back(Finding{Severity::error, rel, "file could not be read"});
      index.entries.push_back(std::move(entry));
      continue;
    }
    entry.size = bytes->size();
    std::span<const std::uint8_t> head(bytes->data(), std::min<std::size_t>(64, bytes->size()));
    entry.kind = classify_file(rel, head);
    entry.verdict = format_name(entry.kind.format);

    if (entry.kind.format == FileFormat::pcap) {
      try {
        pcap::FileContent content = pcap::read_all(std::span<const std::uint8_t>(*bytes));
        PcapStats stats;
        stats.link_type = content.header.link_type.code;
        stats.record_count = content.records.size();
        std::uint64_t mod = pcap::unit_modulus(content.header.timestamp_unit);
        std::uint64_t scale = 1000000000ULL / mod;
        for (const pcap::Record& r : content.records) {
          std::uint64_t ts = static_cast<std::uint64_t>(r.ts_sec) * 1000000000ULL +
                             static_cast<std::uint64_t>(r.ts_frac) * scale;
          if (!stats.first_timestamp_ns || ts < *stats.first_timestamp_ns)
            stats.first_timestamp_ns = ts;
          if (!stats.last_timestamp_ns || ts > *stats.last_timestamp_ns)
            stats.last_timestamp_ns = ts;
        }
        entry.pcap = std::move(stats);
      } catch (const Error& e) {
        entry.verdict = "PCAP(truncated)";
        index.findings.push_back(Finding{Severity::error, rel, e.what()});
      }
    }

    bool in_metadata = entry.kind.name == KindName::metadata;
    if (in_metadata)
      detail_folder::absorb_metadata_file(full, rel, *bytes, entry.kind.format, index);
    if (!in_metadata && rel.find('/') == std::string::npos)
      index.findings.push_back(Finding{Severity::info, rel, "file outside owner folders"});

    index.entries.push_back(std::move(entry));
  }
  return index;
}

/// Owner-name heuristic per the folder taxonomy: the iOS adapter driver is
/// AppleBCMWLANCore*, the macOS one Brcm4360/AirPort.Brcm*.
inline Platform infer_platform(const FolderIndex& index) {
  for (const std::string& o : index.owners)
    if (o.find("AppleBCMWLANCore") != std::string::npos) return Platform::ios;
  for (const std::string& o : index.owners)
    if (o.find("Brcm4360") != std::string::npos || o.find("AirPort.Brcm") != std::string::npos)
      return Platform::macos;
  return Platform::unknown;
}

inline std::string expected_formats(KindName kind) {
  const auto* info = detail_folder::kind_info(kind);
  std::string out;
  for (FileFormat f : {FileFormat::pcap, FileFormat::txt, FileFormat::xml, FileFormat::bin}) {
    if ((info->expected & detail_folder::format_bit(f)) == 0) continue;
    if (!out.empty()) out += " or ";
    out += format_name(f);
  }
  return out;
}

/// Expectation checks on a scanned index: per-platform missing kinds,
/// expected/sniffed format mismatches, plus informational notes for empty
/// and unclassified files. Platform defaults to infer_platform(index).
inline std::vector<Finding> validate_index(const FolderIndex& index,
                                           std::optional<Platform> platform_hint = std::nullopt) {
  std::vector<Finding> findings;
  Platform platform = platform_hint.value_or(infer_platform(index));

  std::set<KindName> present;
  for (const FileEntry& e : index.entries) {
    if (e.kind.name != KindName::unknown && e.kind.name != KindName::metadata)
      present.insert(e.kind.name);

    if (e.size == 0) {
      // Documented to happen in real captures; never worse than a note.
      findings.push_back(Finding{Severity::info, e.relative_path, "empty file"});
      continue;
    }
    if (e.kind.name == KindName::unknown) {
      findings.push_back(Finding{Severity::info, e.relative_path, "unclassified file"});
      continue;
    }
    if (e.kind.name == KindName::metadata) continue;
    const auto* info = detail_folder::kind_info(e.kind.name);
    if ((info->expected & detail_folder::format_bit(e.kind.format)) == 0)
      findings.push_back(
          Finding{Severity::warning, e.relative_path,
                  std::string("format mismatch: expected ") + expected_formats(e.kind.name) +
                      ", found " + format_name(e.kind.format)});
  }

  if (platform != Platform::unknown) {
    for (const auto& info : detail_folder::kind_table()) {
      bool expected = platform == Platform::ios ? info.on_ios : info.on_macos;
      if (expected && !present.count(info.kind))
        findings.push_back(Finding{Severity::warning, "",
                                   std::string("missing expected file: ") + info.display + " (" +
                                       platform_name(platform) + ")"});
    }
  }
  return findings;
}

inline std::string iso8601_utc(std::uint64_t ns) {
  std::time_t secs = static_cast<std::time_t>(ns / 1000000000ULL);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char date[32];
  std::strftime(date, sizeof date, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%09lluZ", date,
                static_cast<unsigned long long>(ns % 1000000000ULL));
  return out;
}

enum class ReportFormat { text, json };

/// Deterministic report over an index; equal indexes render byte-equal.
inline std::string summarize(const FolderIndex& index, ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::ordered_json j;
    j["schema"] = "cctrace-report/1";
    j["root"] = index.root;
    j["platform"] = platform_name(infer_platform(index));
    j["metadata"] = index.metadata;
    j["owners"] = index.owners;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const FileEntry& e : index.entries) {
      nlohmann::ordered_json je;
      je["path"] = e.relative_path;
      je["kind"] = kind_name(e.kind.name);
      je["verdict"] = e.verdict;
      je["size"] = e.size;
      if (e.pcap) {
        nlohmann::ordered_json jp;
        jp["records"] = e.pcap->record_count;
        jp["link_type"] = e.pcap->link_type;
        jp["link_type_name"] = pcap::link_type_name(e.pcap->link_type);
        if (e.pcap->first_timestamp_ns) jp["first_time"] = iso8601_utc(*e.pcap->first_timestamp_ns);
        if (e.pcap->last_timestamp_ns) jp["last_time"] = iso8601_utc(*e.pcap->last_timestamp_ns);
        je["pcap"] = std::move(jp);
      }
      entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    nlohmann::ordered_json findings = nlohmann::ordered_json::array();
    for (const Finding& f : index.findings)
      findings.push_back({{"severity", severity_name(f.severity)},
                          {"path", f.path},
                          {"message", f.message}});
    j["findings"] = std::move(findings);
    j["finding_counts"] = {{"error", index.finding_count(Severity::error)},
                           {"warning", index.finding_count(Severity::warning)},
                           {"info", index.finding_count(Severity::info)}};
    return j.dump(2) + "\n";
  }

  std::string out = "trace folder: " + index.root + "\n";
  out += "platform: " + std::string(platform_name(infer_platform(index))) + "\n";
  if (!index.metadata.empty()) {
    out += "metadata:\n";
    for (const auto& [k, v] : index.metadata) out += "  " + k + ": " + v + "\n";
  }
  out += "owners (" + std::to_string(index.owners.size()) + "):\n";
  for (const std::string& o : index.owners) out += "  " + o + "\n";
  out += "files (" + std::to_string(index.entries.size()) + "):\n";
  for (const FileEntry& e : index.entries) {
    out += "  " + e.relative_path + "  [" + kind_name(e.kind.name) + ", " + e.verdict + ", " +
           std::to_string(e.size) + " bytes";
    if (e.pcap) {
      out += ", " + std::to_string(e.pcap->record_count) + " records, " +
             pcap::link_type_name(e.pcap->link_type);
      if (e.pcap->first_timestamp_ns)
        out += ", " + iso8601_utc(*e.pcap->first_timestamp_ns) + " .. " +
               iso8601_utc(*e.pcap->last_timestamp_ns);
    }
    out += "]\n";
  }
  out += "findings: " + std::to_string(index.finding_count(Severity::error)) + " error, " +
         std::to_string(index.finding_count(Severity::warning)) + " warning, " +
         std::to_string(index.finding_count(Severity::info)) + " info\n";
  for (const Finding& f : index.findings) {
    out += "  [" + std::string(severity_name(f.severity)) + "] ";
    if (!f.path.empty()) out += f.path + ": ";
    out += f.message + "\n";
  }
  return out;
}

namespace detail_folder {

inline std::string snapshot_extension(std::span<const std::uint8_t> payload) {
  std::string_view text(reinterpret_cast<const char*>(payload.data()), payload.size());
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text.substr(first).starts_with("<?xml")) return ".xml";
  if (payload.empty() || detail::printable_ratio(payload) >= 0.95) return ".txt";
  return ".bin";
}

inline void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::write_failure, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(Errc::write_failure, "write failed: " + path.string());
}

}  // namespace detail_folder

/// Writes a bundle as a trace folder: Metadata/CaptureInfo.plist carrying
/// the trigger details and the configuration snapshot, one owner directory
/// per contributing component, one nanosecond PCAP (USER3) per log-stream
/// group, and one TXT/XML/BIN file per data snapshot. Returns the re-scan
/// of the written folder.
inline FolderIndex materialize_folder(const DumpBundle& bundle, const CaptureConfig& config,
                                      const std::filesystem::path& dest) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(dest, ec)) {
    if (!fs::is_directory(dest, ec) || !fs::is_empty(dest, ec))
      throw Error(Errc::destination_not_empty, "destination exists and is not an empty folder: " +
                                                   dest.string());
  }
  fs::create_directories(dest, ec);
  if (ec) throw Error(Errc::write_failure, "cannot create destination: " + dest.string());

  fs::create_directories(dest / "Metadata", ec);
  if (ec) throw Error(Errc::write_failure, "cannot create Metadata folder");
  {
    plist::Dict info;
    info.emplace("CaptureReason", plist::Value(dump_reason_name(bundle.reason)));
    info.emplace("CaptureTime", plist::Value(iso8601_utc(bundle.trigger_time_ns)));
    info.emplace("CaptureTimeNanoseconds",
                 plist::Value(static_cast<std::int64_t>(bundle.trigger_time_ns)));
    info.emplace("Configuration", plist::Value(profile::config_payload_dicts(config)));
    info.emplace("ToolVersion", plist::Value(kVersion));
    std::string doc = plist::write_document(plist::Value(std::move(info)));
    detail_folder::write_bytes(dest / "Metadata" / "CaptureInfo.plist",
                               std::span<const std::uint8_t>(
                                   reinterpret_cast<const std::uint8_t*>(doc.data()), doc.size()));
  }

  // A pipe contributing a single stream keeps its own name; with several
  // streams each group gets a pipe-stream file.
  std::map<std::pair<std::string, std::string>, std::size_t> groups_per_pipe;
  for (const EventGroup& g : bundle.event_groups)
    ++groups_per_pipe[{g.key.owner, g.key.pipe}];

  std::set<std::string> used;  // owner-relative paths already claimed
  for (const EventGroup& g : bundle.event_groups) {
    fs::path owner_dir = dest / g.key.owner;
    fs::create_directories(owner_dir, ec);
    if (ec) throw Error(Errc::write_failure, "cannot create owner folder: " + g.key.owner);

    std::string base = groups_per_pipe[{g.key.owner, g.key.pipe}] == 1
                           ? g.key.pipe
                           : g.key.pipe + "-" + g.key.stream;
    std::string filename = base + ".pcap";
    if (!used.insert(g.key.owner + "/" + filename).second) {
      filename = g.key.pipe + "-" + g.key.stream + ".pcap";
      used.insert(g.key.owner + "/" + filename);
    }

    pcap::GlobalHeader header;
    header.byte_order = pcap::ByteOrder::little;
    header.timestamp_unit = pcap::TimestampUnit::nanosecond;
    header.link_type = pcap::LinkType{pcap::LinkType::kCoreCapture};
    std::vector<pcap::Record> records;
    for (const LogEvent& e : g.events) {
      pcap::Record r;
      r.ts_sec = static_cast<std::uint32_t>(e.timestamp_ns / 1000000000ULL);
      r.ts_frac = static_cast<std::uint32_t>(e.timestamp_ns % 1000000000ULL);
      r.payload = e.payload;
      r.original_length = static_cast<std::uint32_t>(e.payload.size());
      if (r.original_length > header.snaplen) header.snaplen = r.original_length;
      records.push_back(std::move(r));
    }
    detail_folder::write_bytes(owner_dir / filename, pcap::write(header, records));
  }

  for (const Snapshot& s : bundle.snapshots) {
    fs::path owner_dir = dest / s.key.owner;
    fs::create_directories(owner_dir, ec);
    if (ec) throw Error(Errc::write_failure, "cannot create owner folder: " + s.key.owner);
    std::string ext = detail_folder::snapshot_extension(s.payload);
    std::string filename = s.key.stream + ext;
    if (!used.insert(s.key.owner + "/" + filename).second) {
      filename = s.key.pipe + "-" + s.key.stream + ext;
      used.insert(s.key.owner + "/" + filename);
    }
    detail_folder::write_bytes(owner_dir / filename, s.payload);
  }

  return scan_folder(dest);
}

}  // namespace cctrace::folder
