#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cctrace/capture.hpp"
#include "cctrace/config.hpp"
#include "cctrace/detail/bytes.hpp"
#include "cctrace/dissect.hpp"
#include "cctrace/errors.hpp"
#include "cctrace/folder.hpp"
#include "cctrace/pcap.hpp"
#include "cctrace/profile.hpp"
#include "cctrace/version.hpp"

// Command-line front-end. Exit codes: 0 success, 1 error-severity findings
// in a scanned folder, 2 usage error, 3 I/O or input-parse failure.

namespace cctrace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

namespace detail_cli {

// Argv problems, as opposed to failures while doing the work.
struct UsageError {
  std::string message;
};

inline const char* kUsage = R"(cctrace - CoreCapture trace tooling

usage: cctrace <verb> [options]

verbs:
  configure      parse a profile or cctool-style flags into a normalized config
                   --profile FILE | --cctool <flags...>   [--json]
  emit-profile   write a configuration profile (.mobileconfig)
                   [--profile FILE | --cctool <flags...>] [--output FILE]
  emit-cctool    print cctool-style command lines for a profile
                   --profile FILE
  simulate       run a capture script into an in-memory registry
                   --script FILE (- for stdin)            [--json]
  dump           run a script, trigger a dump, write a trace folder
                   --script FILE --dest DIR [--owner GLOB] [--pipe GLOB]
                   [--reason manual|error]                [--json]
  scan           inventory and validate a trace folder
                   ROOT [--platform ios|macos]            [--json]
  extract        dissect the records of a PCAP file
                   FILE [--context NAME]                  [--json]
  wireshark-map  print a Wireshark user_dlts table line
                   [--dlt N] [--protocol NAME]
  nvram-help     print macOS NVRAM debug commands (reference only)
  help           show this text
  --version      print the tool version

cctool-style flags (after --cctool):
  -o owner -p pipe [-s stream] with -x policy, -l level, -f flags,
  -g console level, -m console flags, or -c <capture command>.
  A value of -1 means the all-ones 64-bit mask.

script format (one directive per line, # for comments):
  PIPE <owner> <pipe> <policy> [capacity]
  STREAM <owner> <pipe> <stream> log <level> <flags> [<console-level> <console-flags>]
  STREAM <owner> <pipe> <stream> data
  SNAPSHOT <owner> <pipe> <stream> <base64|->
  EVENT <owner> <pipe> <stream> <level> <flags> <base64-payload|->
  Numbers are decimal or 0x-hex; - stands for an empty payload.

exit codes: 0 success, 1 error findings, 2 usage error, 3 I/O or parse failure
)";

inline std::vector<std::uint8_t> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("read failed: " + path);
  return bytes;
}

struct Options {
  std::map<std::string, std::string> values;
  std::vector<std::string> positional;
  bool json = false;
  std::vector<std::string> cctool;  // everything after --cctool
};

/// Long flags with a value, --json, positional arguments, and a trailing
/// --cctool pass-through section.
inline Options parse_options(const std::vector<std::string>& args, std::size_t start,
                             const std::vector<std::string>& value_flags, bool allow_cctool,
                             std::size_t max_positional) {
  Options opt;
  for (std::size_t i = start; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--json") {
      opt.json = true;
    } else if (allow_cctool && a == "--cctool") {
      opt.cctool.assign(args.begin() + static_cast<std::ptrdiff_t>(i + 1), args.end());
      if (opt.cctool.empty()) throw UsageError{"--cctool needs flags after it"};
      return opt;
    } else if (a.rfind("--", 0) == 0) {
      bool known = false;
      for (const std::string& f : value_flags)
        if (a == f) {
          if (i + 1 >= args.size()) throw UsageError{a + " needs a value"};
          opt.values[a] = args[++i];
          known = true;
          break;
        }
      if (!known) throw UsageError{"unknown option: " + a};
    } else {
      if (opt.positional.size() >= max_positional) throw UsageError{"unexpected argument: " + a};
      opt.positional.push_back(a);
    }
  }
  return opt;
}

inline CaptureConfig config_from_source(const Options& opt, bool required) {
  bool has_profile = opt.values.count("--profile") != 0;
  bool has_cctool = !opt.cctool.empty();
  if (has_profile && has_cctool)
    throw UsageError{"--profile and --cctool cannot be combined"};
  if (has_profile) {
    auto bytes = slurp(opt.values.at("--profile"));
    return profile::parse_profile(std::span<const std::uint8_t>(bytes)).config;
  }
  if (has_cctool) {
    try {
      return profile::invocation_to_config(profile::parse_cctool_args(opt.cctool));
    } catch (const Error& e) {
      throw UsageError{e.what()};
    }
  }
  if (required) throw UsageError{"need a config source: --profile FILE or --cctool <flags...>"};
  return CaptureConfig{};
}

inline std::optional<std::string> cctool_capture_command(const Options& opt) {
  if (opt.cctool.empty()) return std::nullopt;
  try {
    return profile::parse_cctool_args(opt.cctool).capture_command;
  } catch (const Error& e) {
    throw UsageError{e.what()};
  }
}

inline nlohmann::ordered_json config_to_json(const CaptureConfig& config) {
  nlohmann::ordered_json j;
  j["schema"] = "cctrace-config/1";
  j["provenance"] = provenance_names(config.provenance);
  nlohmann::ordered_json pipes = nlohmann::ordered_json::object();
  for (const auto& [owner, inner] : config.pipe_settings) {
    nlohmann::ordered_json per_owner = nlohmann::ordered_json::object();
    for (const auto& [pipe, setting] : inner) per_owner[pipe] = {{"policy", setting.policy}};
    pipes[owner] = std::move(per_owner);
  }
  j["pipes"] = std::move(pipes);
  nlohmann::ordered_json streams = nlohmann::ordered_json::object();
  for (const auto& [owner, inner] : config.stream_settings) {
    nlohmann::ordered_json per_owner = nlohmann::ordered_json::object();
    for (const auto& [pipe, per_pipe_map] : inner) {
      nlohmann::ordered_json per_pipe = nlohmann::ordered_json::object();
      for (const auto& [stream, s] : per_pipe_map) {
        nlohmann::ordered_json js = nlohmann::ordered_json::object();
        if (s.log_level) js["log_level"] = *s.log_level;
        if (s.log_flags) js["log_flags"] = *s.log_flags;
        if (s.console_level) js["console_level"] = *s.console_level;
        if (s.console_flags) js["console_flags"] = *s.console_flags;
        per_pipe[stream] = std::move(js);
      }
      per_owner[pipe] = std::move(per_pipe);
    }
    streams[owner] = std::move(per_owner);
  }
  j["streams"] = std::move(streams);
  return j;
}

inline std::string config_to_text(const CaptureConfig& config) {
  std::string out = "provenance:";
  auto names = provenance_names(config.provenance);
  if (names.empty()) out += " none";
  for (const std::string& n : names) out += " " + n;
  out += "\n";
  std::size_t pipe_count = 0;
  for (const auto& [owner, inner] : config.pipe_settings) pipe_count += inner.size();
  out += "pipes (" + std::to_string(pipe_count) + "):\n";
  for (const auto& [owner, inner] : config.pipe_settings)
    for (const auto& [pipe, setting] : inner)
      out += "  " + owner + "/" + pipe + " policy=" + std::to_string(setting.policy) + "\n";
  std::size_t stream_count = 0;
  for (const auto& [owner, inner] : config.stream_settings)
    for (const auto& [pipe, per_pipe] : inner) stream_count += per_pipe.size();
  out += "streams (" + std::to_string(stream_count) + "):\n";
  for (const auto& [owner, inner] : config.stream_settings)
    for (const auto& [pipe, per_pipe] : inner)
      for (const auto& [stream, s] : per_pipe) {
        out += "  " + owner + "/" + pipe + "/" + stream;
        if (s.log_level) out += " log_level=" + std::to_string(*s.log_level);
        if (s.log_flags) out += " log_flags=" + std::to_string(*s.log_flags);
        if (s.console_level) out += " console_level=" + std::to_string(*s.console_level);
        if (s.console_flags) out += " console_flags=" + std::to_string(*s.console_flags);
        out += "\n";
      }
  return out;
}

// Deterministic script time base: 2020-01-01T00:00:00Z, 1 ms per tick.
inline constexpr std::uint64_t kScriptEpochNs = 1577836800ULL * 1000000000ULL;

struct ScriptStats {
  std::size_t directives = 0;
  std::size_t pipes = 0;
  std::size_t streams = 0;
  std::size_t offered = 0;
  std::size_t accepted = 0;
};

/// Rebuilds a registry from a capture script. The registry clock ticks one
/// millisecond per use from a fixed epoch, so equal scripts produce equal
/// folders.
class ScriptSession {
 public:
  ScriptSession()
      : ticks_(std::make_shared<std::uint64_t>(0)),
        registry_([t = ticks_] { return kScriptEpochNs + 1000000ULL * (*t)++; }) {}

  CaptureRegistry& registry() { return registry_; }

  ScriptStats run(std::istream& script) {
    ScriptStats stats;
    std::string line;
    std::size_t line_no = 0;
    std::map<std::pair<std::string, std::string>, std::size_t> pipe_ids;
    while (std::getline(script, line)) {
      ++line_no;
      auto fail = [&](const std::string& what) -> Error {
        return Error(Errc::invalid_argument, "script line " + std::to_string(line_no) + ": " + what);
      };
      std::vector<std::string> tok;
      {
        std::istringstream split(line);
        std::string t;
        while (split >> t) tok.push_back(t);
      }
      if (tok.empty() || tok[0][0] == '#') continue;
      ++stats.directives;
      auto num = [&](const std::string& s) {
        auto v = detail::parse_u64(s);
        if (!v) throw fail("bad number '" + s + "'");
        return *v;
      };
      auto bytes = [&](const std::string& s) {
        if (s == "-") return std::vector<std::uint8_t>{};
        auto decoded = detail::base64_decode(s);
        if (!decoded) throw fail("bad base64 '" + s + "'");
        return *decoded;
      };

      if (tok[0] == "PIPE") {
        if (tok.size() < 4 || tok.size() > 5) throw fail("PIPE <owner> <pipe> <policy> [capacity]");
        PipeDescriptor pd{tok[1], tok[2], num(tok[3]),
                          tok.size() == 5 ? static_cast<std::size_t>(num(tok[4])) : 4096};
        pipe_ids[{tok[1], tok[2]}] = registry_.register_pipe(pd);
        ++stats.pipes;
      } else if (tok[0] == "STREAM") {
        if (tok.size() < 5) throw fail("STREAM <owner> <pipe> <stream> log|data ...");
        auto it = pipe_ids.find({tok[1], tok[2]});
        if (it == pipe_ids.end()) throw fail("unknown pipe " + tok[1] + "/" + tok[2]);
        StreamDescriptor sd;
        sd.name = tok[3];
        if (tok[4] == "log") {
          if (tok.size() != 7 && tok.size() != 9)
            throw fail("STREAM ... log <level> <flags> [<console-level> <console-flags>]");
          sd.kind = StreamKind::log_stream;
          sd.log_level = num(tok[5]);
          sd.log_flags = num(tok[6]);
          if (tok.size() == 9) {
            sd.console_level = num(tok[7]);
            sd.console_flags = num(tok[8]);
          }
        } else if (tok[4] == "data") {
          if (tok.size() != 5) throw fail("STREAM ... data takes no further arguments");
          sd.kind = StreamKind::data_stream;
        } else {
          throw fail("stream kind must be log or data");
        }
        registry_.register_stream(it->second, sd);
        ++stats.streams;
      } else if (tok[0] == "SNAPSHOT") {
        if (tok.size() != 5) throw fail("SNAPSHOT <owner> <pipe> <stream> <base64|->");
        registry_.set_data_snapshot(tok[1], tok[2], tok[3],
                                    [payload = bytes(tok[4])] { return payload; });
      } else if (tok[0] == "EVENT") {
        if (tok.size() != 7)
          throw fail("EVENT <owner> <pipe> <stream> <level> <flags> <base64|->");
        LogEvent event;
        event.level = num(tok[4]);
        event.flags = num(tok[5]);
        event.payload = bytes(tok[6]);
        ++stats.offered;
        if (registry_.emit_event(tok[1], tok[2], tok[3], std::move(event))) ++stats.accepted;
      } else {
        throw fail("unknown directive '" + tok[0] + "'");
      }
    }
    return stats;
  }

 private:
  std::shared_ptr<std::uint64_t> ticks_;
  CaptureRegistry registry_;
};

inline ScriptStats run_script_source(ScriptSession& session, const std::string& spec,
                                     std::istream& in) {
  if (spec == "-") return session.run(in);
  std::ifstream file(spec);
  if (!file) throw std::runtime_error("cannot open: " + spec);
  return session.run(file);
}

inline int finish_scan(folder::FolderIndex index, std::optional<folder::Platform> hint, bool json,
                       std::ostream& out) {
  auto extra = folder::validate_index(index, hint);
  index.findings.insert(index.findings.end(), extra.begin(), extra.end());
  out << folder::summarize(index, json ? folder::ReportFormat::json : folder::ReportFormat::text);
  return index.finding_count(folder::Severity::error) > 0 ? kExitFindings : kExitOk;
}

inline std::optional<folder::Platform> platform_from_options(const Options& opt) {
  auto it = opt.values.find("--platform");
  if (it == opt.values.end()) return std::nullopt;
  if (it->second == "ios") return folder::Platform::ios;
  if (it->second == "macos") return folder::Platform::macos;
  throw UsageError{"--platform must be ios or macos"};
}

inline int cmd_configure(const std::vector<std::string>& args, std::ostream& out) {
  Options opt = parse_options(args, 1, {"--profile"}, true, 0);
  CaptureConfig config = config_from_source(opt, true);
  auto capture_command = cctool_capture_command(opt);
  if (opt.json) {
    nlohmann::ordered_json j = config_to_json(config);
    if (capture_command) j["capture_command"] = *capture_command;
    out << j.dump(2) << "\n";
  } else {
    out << config_to_text(config);
    if (capture_command) out << "capture command: " << *capture_command << "\n";
  }
  return kExitOk;
}

inline int cmd_emit_profile(const std::vector<std::string>& args, std::ostream& out) {
  Options opt = parse_options(args, 1, {"--profile", "--output"}, true, 0);
  CaptureConfig config = config_from_source(opt, false);
  std::string doc = profile::generate_profile(config);
  auto dest = opt.values.find("--output");
  if (dest == opt.values.end()) {
    out << doc;
    return kExitOk;
  }
  std::ofstream file(dest->second, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(Errc::write_failure, "cannot open for writing: " + dest->second);
  file << doc;
  file.flush();
  if (!file) throw Error(Errc::write_failure, "write failed: " + dest->second);
  return kExitOk;
}

inline int cmd_emit_cctool(const std::vector<std::string>& args, std::ostream& out) {
  Options opt = parse_options(args, 1, {"--profile"}, false, 0);
  if (!opt.values.count("--profile")) throw UsageError{"emit-cctool needs --profile FILE"};
  CaptureConfig config = config_from_source(opt, true);
  for (const std::string& line : profile::emit_cctool_commands(config)) out << line << "\n";
  return kExitOk;
}

inline int cmd_simulate(const std::vector<std::string>& args, std::istream& in,
                        std::ostream& out) {
  Options opt = parse_options(args, 1, {"--script"}, false, 0);
  if (!opt.values.count("--script")) throw UsageError{"simulate needs --script FILE"};
  ScriptSession session;
  ScriptStats stats = run_script_source(session, opt.values.at("--script"), in);
  std::map<std::string, std::size_t> buffered;
  for (const auto& [pipe, streams] : session.registry().query("*", "*"))
    buffered[pipe.owner + "/" + pipe.name] = session.registry().buffered_count(pipe.owner, pipe.name);
  if (opt.json) {
    nlohmann::ordered_json j;
    j["schema"] = "cctrace-simulate/1";
    j["directives"] = stats.directives;
    j["pipes"] = stats.pipes;
    j["streams"] = stats.streams;
    j["events"] = {{"offered", stats.offered},
                   {"accepted", stats.accepted},
                   {"rejected", stats.offered - stats.accepted}};
    j["buffered"] = buffered;
    out << j.dump(2) << "\n";
  } else {
    out << "directives: " << stats.directives << " (" << stats.pipes << " pipes, "
        << stats.streams << " streams)\n";
    out << "events: " << stats.offered << " offered, " << stats.accepted << " accepted, "
        << (stats.offered - stats.accepted) << " rejected\n";
    out << "buffered:\n";
    for (const auto& [name, count] : buffered)
      out << "  " << name << ": " << count << "\n";
  }
  return kExitOk;
}

inline int cmd_dump(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                    std::ostream& err) {
  Options opt = parse_options(
      args, 1, {"--script", "--dest", "--owner", "--pipe", "--reason", "--platform"}, false, 0);
  if (!opt.values.count("--script")) throw UsageError{"dump needs --script FILE"};
  if (!opt.values.count("--dest")) throw UsageError{"dump needs --dest DIR"};
  std::string owner = opt.values.count("--owner") ? opt.values.at("--owner") : "*";
  std::string pipe = opt.values.count("--pipe") ? opt.values.at("--pipe") : "*";
  DumpReason reason = DumpReason::manual;
  if (auto it = opt.values.find("--reason"); it != opt.values.end()) {
    if (it->second == "error")
      reason = DumpReason::error;
    else if (it->second != "manual")
      throw UsageError{"--reason must be manual or error"};
  }

  ScriptSession session;
  run_script_source(session, opt.values.at("--script"), in);
  DumpBundle bundle = session.registry().trigger_dump(owner, pipe, reason);
  std::size_t events = 0;
  for (const EventGroup& g : bundle.event_groups) events += g.events.size();
  folder::FolderIndex index = folder::materialize_folder(
      bundle, snapshot_config(session.registry()), opt.values.at("--dest"));
  err << "dumped " << events << " events in " << bundle.event_groups.size() << " groups, "
      << bundle.snapshots.size() << " snapshots -> " << opt.values.at("--dest") << "\n";
  return finish_scan(std::move(index), platform_from_options(opt), opt.json, out);
}

inline int cmd_scan(const std::vector<std::string>& args, std::ostream& out) {
  Options opt = parse_options(args, 1, {"--platform"}, false, 1);
  if (opt.positional.empty()) throw UsageError{"scan needs a folder path"};
  folder::FolderIndex index = folder::scan_folder(opt.positional[0]);
  return finish_scan(std::move(index), platform_from_options(opt), opt.json, out);
}

inline int cmd_extract(const std::vector<std::string>& args, std::ostream& out) {
  Options opt = parse_options(args, 1, {"--context"}, false, 1);
  if (opt.positional.empty()) throw UsageError{"extract needs a PCAP file path"};
  const std::string& path = opt.positional[0];
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open: " + path);

  std::optional<std::string> context;
  if (auto it = opt.values.find("--context"); it != opt.values.end())
    context = it->second;
  else
    context = std::filesystem::path(path).stem().string();

  dissect::DissectorRegistry registry;
  pcap::Reader reader(file);
  const pcap::GlobalHeader& header = reader.header();
  std::uint64_t scale = 1000000000ULL / pcap::unit_modulus(header.timestamp_unit);

  if (opt.json) {
    nlohmann::ordered_json j;
    j["schema"] = "cctrace-extract/1";
    j["file"] = path;
    j["link_type"] = header.link_type.code;
    j["link_type_name"] = pcap::link_type_name(header.link_type.code);
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    while (auto record = reader.next()) {
      nlohmann::ordered_json jr;
      jr["index"] = records.size();
      jr["time"] = folder::iso8601_utc(static_cast<std::uint64_t>(record->ts_sec) * 1000000000ULL +
                                       static_cast<std::uint64_t>(record->ts_frac) * scale);
      jr["captured_length"] = record->captured_length();
      jr["original_length"] = record->original_length;
      jr["frame"] = dissect::frame_to_json(
          registry.dissect(header.link_type, std::span<const std::uint8_t>(record->payload), context));
      records.push_back(std::move(jr));
    }
    j["records"] = std::move(records);
    out << j.dump(2) << "\n";
    return kExitOk;
  }

  out << path << ": " << pcap::link_type_name(header.link_type.code) << " (DLT="
      << header.link_type.code << "), "
      << (header.timestamp_unit == pcap::TimestampUnit::nanosecond ? "nanosecond" : "microsecond")
      << " timestamps\n";
  std::size_t i = 0;
  while (auto record = reader.next()) {
    out << "record " << i++ << "  "
        << folder::iso8601_utc(static_cast<std::uint64_t>(record->ts_sec) * 1000000000ULL +
                               static_cast<std::uint64_t>(record->ts_frac) * scale)
        << "  " << record->captured_length() << " bytes\n";
    std::istringstream lines(dissect::render(
        registry.dissect(header.link_type, std::span<const std::uint8_t>(record->payload), context),
        dissect::RenderFormat::text));
    std::string line;
    while (std::getline(lines, line)) out << "  " << line << "\n";
  }
  return kExitOk;
}

inline int cmd_wireshark_map(const std::vector<std::string>& args, std::ostream& out) {
  Options opt = parse_options(args, 1, {"--dlt", "--protocol"}, false, 0);
  std::uint64_t dlt = pcap::LinkType::kCoreCapture;
  if (auto it = opt.values.find("--dlt"); it != opt.values.end()) {
    auto v = detail::parse_u64(it->second);
    if (!v) throw UsageError{"--dlt needs a number"};
    dlt = *v;
  }
  if (dlt < pcap::LinkType::kUserFirst || dlt > pcap::LinkType::kUserLast)
    throw UsageError{"--dlt must be in the private-use range 147..162"};
  std::string protocol =
      opt.values.count("--protocol") ? opt.values.at("--protocol") : "corecapture";
  out << dissect::emit_wireshark_user_dlt(static_cast<std::uint32_t>(dlt), protocol) << "\n";
  return kExitOk;
}

inline int cmd_nvram_help(std::ostream& out) {
  out << "Reference only: cctrace never runs these commands or touches NVRAM.\n"
         "\n"
         "More Wi-Fi driver debug output on macOS requires boot arguments in\n"
         "NVRAM, which System Integrity Protection blocks. From the recovery\n"
         "terminal (cmd+R during reboot):\n"
         "\n"
         "  csrutil enable --without nvram\n"
         "  nvram boot-args=debug=0x10000 awdl_log_flags=0xffffffffffffffff "
         "awdl_log_flags_verbose=0xffffffffffffffff awdl_log_flags_config=1 "
         "wlan.debug.enable=0xff\n"
         "\n"
         "WARNING: this disables part of System Integrity Protection and leaves\n"
         "the system vulnerable. Only do this on a dedicated, non-production\n"
         "machine.\n";
  return kExitOk;
}

}  // namespace detail_cli

/// Entry point behind main(). args excludes the program name.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
               std::ostream& err) {
  using namespace detail_cli;
  if (args.empty()) {
    err << kUsage;
    return kExitUsage;
  }
  const std::string& verb = args[0];
  try {
    if (verb == "help" || verb == "--help" || verb == "-h") {
      out << kUsage;
      return kExitOk;
    }
    if (verb == "--version" || verb == "version") {
      out << "cctrace " << kVersion << "\n";
      return kExitOk;
    }
    if (verb == "configure") return cmd_configure(args, out);
    if (verb == "emit-profile") return cmd_emit_profile(args, out);
    if (verb == "emit-cctool") return cmd_emit_cctool(args, out);
    if (verb == "simulate") return cmd_simulate(args, in, out);
    if (verb == "dump") return cmd_dump(args, in, out, err);
    if (verb == "scan") return cmd_scan(args, out);
    if (verb == "extract") return cmd_extract(args, out);
    if (verb == "wireshark-map") return cmd_wireshark_map(args, out);
    if (verb == "nvram-help") return cmd_nvram_help(out);
    throw UsageError{"unknown verb: " + verb};
  } catch (const UsageError& u) {
    err << "error: " << u.message << "\n";
    err << "run 'cctrace help' for usage\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace cctrace::cli
