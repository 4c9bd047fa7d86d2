#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cctrace/config.hpp"
#include "cctrace/detail/bytes.hpp"
#include "cctrace/errors.hpp"
#include "cctrace/plist.hpp"

// Configuration-profile and cctool views of a CaptureConfig.
//
// Profile schema (one payload of type com.apple.corecapture.configure):
//   CCConfigurePipe:   owner -> pipe -> { Policy: <integer> }
//   CCConfigureStream: owner -> pipe -> stream -> { CoreCapture: { LogLevel,
//                      LogFlags }, Console: { LogLevel, LogFlags } }
//
// cctool flags: -o owner -p pipe [-s stream] with -x policy, -l level,
// -f flags, -g console level, -m console flags, or -c <capture command>.
// A value of -1 means the all-ones 64-bit mask.

namespace cctrace::profile {

inline constexpr const char* kCoreCapturePayloadType = "com.apple.corecapture.configure";

struct ParsedProfile {
  CaptureConfig config;
  /// PayloadType values present in the profile but not interpreted.
  std::vector<std::string> other_payload_types;
  bool signature_wrapped = false;
  /// Opaque signature bytes surrounding the embedded plist, when wrapped.
  std::vector<std::uint8_t> wrapper_prefix;
  std::vector<std::uint8_t> wrapper_suffix;
};

struct CctoolInvocation {
  std::string owner;
  std::string pipe;
  std::optional<std::string> stream;
  std::optional<std::uint64_t> policy;
  std::optional<std::uint64_t> log_level;
  std::optional<std::uint64_t> log_flags;
  std::optional<std::uint64_t> console_level;
  std::optional<std::uint64_t> console_flags;
  std::optional<std::string> capture_command;

  bool has_config_options() const {
    return policy || log_level || log_flags || console_level || console_flags;
  }
};

namespace detail_profile {

inline std::uint64_t integer_as_u64(const plist::Value& v, const std::string& what) {
  if (!v.is_integer())
    throw Error(Errc::malformed_plist, what + " must be an <integer>");
  // Negative plist integers are the two's-complement spelling of large
  // masks (-1 == all-ones), mirroring cctool's -1 shorthand.
  return static_cast<std::uint64_t>(v.as_integer());
}

inline void extract_pipe_dict(const plist::Value& cc_pipe, CaptureConfig& cfg) {
  for (const auto& [owner, pipes] : cc_pipe.as_dict()) {
    if (!pipes.is_dict())
      throw Error(Errc::malformed_plist, "CCConfigurePipe entry for " + owner + " must be a dict");
    for (const auto& [pipe, settings] : pipes.as_dict()) {
      if (!settings.is_dict())
        throw Error(Errc::malformed_plist, "pipe settings for " + pipe + " must be a dict");
      PipeSetting ps;
      if (const auto* policy = settings.find("Policy"))
        ps.policy = integer_as_u64(*policy, "Policy");
      cfg.pipe_settings[owner][pipe] = ps;
    }
  }
}

inline void read_level_flags(const plist::Value& dict, std::optional<std::uint64_t>& level,
                             std::optional<std::uint64_t>& flags) {
  if (const auto* v = dict.find("LogLevel")) level = integer_as_u64(*v, "LogLevel");
  if (const auto* v = dict.find("LogFlags")) flags = integer_as_u64(*v, "LogFlags");
}

inline void extract_stream_dict(const plist::Value& cc_stream, CaptureConfig& cfg) {
  for (const auto& [owner, pipes] : cc_stream.as_dict()) {
    if (!pipes.is_dict())
      throw Error(Errc::malformed_plist, "CCConfigureStream entry for " + owner + " must be a dict");
    for (const auto& [pipe, streams] : pipes.as_dict()) {
      if (!streams.is_dict())
        throw Error(Errc::malformed_plist, "stream table for " + pipe + " must be a dict");
      for (const auto& [stream, settings] : streams.as_dict()) {
        if (!settings.is_dict())
          throw Error(Errc::malformed_plist, "stream settings for " + stream + " must be a dict");
        StreamSetting ss;
        if (const auto* cc = settings.find("CoreCapture"))
          read_level_flags(*cc, ss.log_level, ss.log_flags);
        if (const auto* console = settings.find("Console"))
          read_level_flags(*console, ss.console_level, ss.console_flags);
        cfg.stream_settings[owner][pipe][stream] = ss;
      }
    }
  }
}

inline void extract_payload(const plist::Value& payload, ParsedProfile& out, bool& found) {
  const auto* type = payload.find("PayloadType");
  std::string type_name = type && type->is_string() ? type->as_string() : "(untyped)";
  if (type_name != kCoreCapturePayloadType) {
    out.other_payload_types.push_back(type_name);
    return;
  }
  found = true;
  if (const auto* pipes = payload.find("CCConfigurePipe")) extract_pipe_dict(*pipes, out.config);
  if (const auto* streams = payload.find("CCConfigureStream"))
    extract_stream_dict(*streams, out.config);
}

// UUID-shaped string derived from the config content, so equal configs
// generate byte-identical profiles.
inline std::string content_uuid(const std::string& seed) {
  std::uint64_t a = cctrace::detail::fnv1a64(seed);
  std::uint64_t b = cctrace::detail::fnv1a64(seed + "#2");
  char buf[37];
  std::snprintf(buf, sizeof buf, "%08X-%04X-%04X-%04X-%04X%08X",
                static_cast<unsigned>(a >> 32), static_cast<unsigned>((a >> 16) & 0xFFFF),
                static_cast<unsigned>(a & 0xFFFF), static_cast<unsigned>(b >> 48),
                static_cast<unsigned>((b >> 32) & 0xFFFF), static_cast<unsigned>(b & 0xFFFFFFFF));
  return buf;
}

}  // namespace detail_profile

/// CCConfigurePipe / CCConfigureStream dictionaries for a config, shared by
/// the profile generator and the trace-folder metadata writer.
inline plist::Dict config_payload_dicts(const CaptureConfig& config) {
  plist::Dict pipe_dict;
  for (const auto& [owner, pipes] : config.pipe_settings) {
    plist::Dict per_owner;
    for (const auto& [pipe, setting] : pipes) {
      plist::Dict s;
      s.emplace("Policy", plist::Value(static_cast<std::int64_t>(setting.policy)));
      per_owner.emplace(pipe, plist::Value(std::move(s)));
    }
    pipe_dict.emplace(owner, plist::Value(std::move(per_owner)));
  }
  plist::Dict stream_dict;
  for (const auto& [owner, pipes] : config.stream_settings) {
    plist::Dict per_owner;
    for (const auto& [pipe, streams] : pipes) {
      plist::Dict per_pipe;
      for (const auto& [stream, setting] : streams) {
        plist::Dict s;
        auto level_flags = [](const std::optional<std::uint64_t>& level,
                              const std::optional<std::uint64_t>& flags) {
          plist::Dict d;
          if (flags) d.emplace("LogFlags", plist::Value(static_cast<std::int64_t>(*flags)));
          if (level) d.emplace("LogLevel", plist::Value(static_cast<std::int64_t>(*level)));
          return d;
        };
        if (setting.log_level || setting.log_flags)
          s.emplace("CoreCapture", plist::Value(level_flags(setting.log_level, setting.log_flags)));
        if (setting.console_level || setting.console_flags)
          s.emplace("Console", plist::Value(level_flags(setting.console_level, setting.console_flags)));
        per_pipe.emplace(stream, plist::Value(std::move(s)));
      }
      per_owner.emplace(pipe, plist::Value(std::move(per_pipe)));
    }
    stream_dict.emplace(owner, plist::Value(std::move(per_owner)));
  }
  plist::Dict out;
  out.emplace("CCConfigurePipe", plist::Value(std::move(pipe_dict)));
  out.emplace("CCConfigureStream", plist::Value(std::move(stream_dict)));
  return out;
}

/// Reads a configuration profile. A CMS signature wrapper is detected and
/// skipped; its bytes are preserved opaquely in the result. Payloads other
/// than the CoreCapture one are inventoried by type, not interpreted, and a
/// profile with no CoreCapture payload yields an empty config.
inline ParsedProfile parse_profile(std::span<const std::uint8_t> bytes) {
  std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  ParsedProfile out;

  std::size_t start = text.find_first_not_of(" \t\r\n");
  std::string_view doc;
  if (start != std::string_view::npos && text[start] == '<') {
    doc = text;
  } else {
    // Signature-wrapped: locate the embedded XML document.
    std::size_t xml = text.find("<?xml");
    if (xml == std::string_view::npos) xml = text.find("<plist");
    std::size_t end = text.rfind("</plist>");
    if (xml == std::string_view::npos || end == std::string_view::npos || end < xml)
      throw Error(Errc::malformed_plist, "no plist document found in input");
    end += std::string_view("</plist>").size();
    out.signature_wrapped = true;
    out.wrapper_prefix.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(xml));
    out.wrapper_suffix.assign(bytes.begin() + static_cast<std::ptrdiff_t>(end), bytes.end());
    doc = text.substr(xml, end - xml);
  }

  plist::Value root = plist::parse(doc);
  if (!root.is_dict()) throw Error(Errc::malformed_plist, "profile root must be a dict");

  bool found = false;
  if (const auto* content = root.find("PayloadContent")) {
    if (!content->is_array())
      throw Error(Errc::malformed_plist, "PayloadContent must be an array");
    for (const auto& payload : content->as_array()) {
      if (!payload.is_dict())
        throw Error(Errc::malformed_plist, "payload entries must be dicts");
      detail_profile::extract_payload(payload, out, found);
    }
  } else if (root.find("CCConfigurePipe") || root.find("CCConfigureStream")) {
    // Bare payload without the profile envelope.
    found = true;
    if (const auto* pipes = root.find("CCConfigurePipe"))
      detail_profile::extract_pipe_dict(*pipes, out.config);
    if (const auto* streams = root.find("CCConfigureStream"))
      detail_profile::extract_stream_dict(*streams, out.config);
  }

  out.config.normalize();
  out.config.provenance =
      out.signature_wrapped ? kProvenanceSignedProfile : kProvenanceUnsignedProfile;
  (void)found;  // soft: absence of the payload is not an error
  return out;
}

inline ParsedProfile parse_profile(std::string_view text) {
  return parse_profile(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

/// Emits an unsigned .mobileconfig profile with one CoreCapture payload.
/// Output is deterministic: equal configs produce byte-identical profiles.
inline std::string generate_profile(const CaptureConfig& config) {
  plist::Dict payload = config_payload_dicts(config);
  std::string seed = plist::write_document(plist::Value(payload));
  std::string payload_uuid = detail_profile::content_uuid(seed);
  std::string profile_uuid = detail_profile::content_uuid(seed + "#profile");

  payload.emplace("PayloadDescription", plist::Value("Configures CoreCapture pipes and streams"));
  payload.emplace("PayloadDisplayName", plist::Value("CoreCapture Configuration"));
  payload.emplace("PayloadIdentifier",
                  plist::Value("org.cctrace.profile.corecapture." + payload_uuid));
  payload.emplace("PayloadType", plist::Value(kCoreCapturePayloadType));
  payload.emplace("PayloadUUID", plist::Value(payload_uuid));
  payload.emplace("PayloadVersion", plist::Value(std::int64_t{1}));

  plist::Dict root;
  root.emplace("PayloadContent", plist::Value(plist::Array{plist::Value(std::move(payload))}));
  root.emplace("PayloadDescription", plist::Value("Wi-Fi diagnostic logging configuration"));
  root.emplace("PayloadDisplayName", plist::Value("CoreCapture Logging"));
  root.emplace("PayloadIdentifier", plist::Value("org.cctrace.profile." + profile_uuid));
  root.emplace("PayloadType", plist::Value("Configuration"));
  root.emplace("PayloadUUID", plist::Value(profile_uuid));
  root.emplace("PayloadVersion", plist::Value(std::int64_t{1}));
  return plist::write_document(plist::Value(std::move(root)));
}

/// Union of two configs; on conflicting fields the signed value wins.
inline CaptureConfig merge_configs(const CaptureConfig& signed_cfg,
                                   const CaptureConfig& unsigned_cfg) {
  CaptureConfig out = unsigned_cfg;
  for (const auto& [owner, pipes] : signed_cfg.pipe_settings)
    for (const auto& [pipe, setting] : pipes) out.pipe_settings[owner][pipe] = setting;
  for (const auto& [owner, pipes] : signed_cfg.stream_settings)
    for (const auto& [pipe, streams] : pipes)
      for (const auto& [stream, setting] : streams) {
        StreamSetting& dst = out.stream_settings[owner][pipe][stream];
        if (setting.log_level) dst.log_level = setting.log_level;
        if (setting.log_flags) dst.log_flags = setting.log_flags;
        if (setting.console_level) dst.console_level = setting.console_level;
        if (setting.console_flags) dst.console_flags = setting.console_flags;
      }
  out.provenance = static_cast<std::uint8_t>(signed_cfg.provenance | unsigned_cfg.provenance);
  out.normalize();
  return out;
}

/// One cctool-style command line per pipe and per stream setting, in
/// (owner, pipe, stream) order.
inline std::vector<std::string> emit_cctool_commands(const CaptureConfig& config) {
  std::vector<std::string> lines;
  std::map<std::string, std::vector<std::string>> pipes_by_owner;
  for (const auto& [owner, pipes] : config.pipe_settings)
    for (const auto& [pipe, setting] : pipes) (void)setting, pipes_by_owner[owner].push_back(pipe);
  for (const auto& [owner, pipes] : config.stream_settings)
    for (const auto& [pipe, streams] : pipes) (void)streams, pipes_by_owner[owner].push_back(pipe);

  for (auto& [owner, pipe_names] : pipes_by_owner) {
    std::sort(pipe_names.begin(), pipe_names.end());
    pipe_names.erase(std::unique(pipe_names.begin(), pipe_names.end()), pipe_names.end());
    for (const auto& pipe : pipe_names) {
      if (auto oit = config.pipe_settings.find(owner); oit != config.pipe_settings.end()) {
        if (auto pit = oit->second.find(pipe); pit != oit->second.end())
          lines.push_back("-o " + owner + " -p " + pipe + " -x " +
                          std::to_string(pit->second.policy));
      }
      if (auto oit = config.stream_settings.find(owner); oit != config.stream_settings.end()) {
        if (auto pit = oit->second.find(pipe); pit != oit->second.end()) {
          for (const auto& [stream, setting] : pit->second) {
            std::string line = "-o " + owner + " -p " + pipe + " -s " + stream;
            if (setting.log_level) line += " -l " + std::to_string(*setting.log_level);
            if (setting.log_flags) line += " -f " + std::to_string(*setting.log_flags);
            if (setting.console_level) line += " -g " + std::to_string(*setting.console_level);
            if (setting.console_flags) line += " -m " + std::to_string(*setting.console_flags);
            lines.push_back(std::move(line));
          }
        }
      }
    }
  }
  return lines;
}

namespace detail_profile {

inline std::uint64_t parse_cctool_value(const std::string& flag, const std::string& value) {
  if (value == "-1") return ~std::uint64_t{0};  // maximum value shorthand
  auto v = cctrace::detail::parse_u64(value);
  if (!v) throw Error(Errc::missing_value, "flag " + flag + " needs a numeric value, got '" + value + "'");
  return *v;
}

}  // namespace detail_profile

/// Parses one cctool-style argument list (flag/value alternation).
inline CctoolInvocation parse_cctool_args(const std::vector<std::string>& args) {
  CctoolInvocation inv;
  bool saw_owner = false, saw_pipe = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& flag = args[i];
    if (flag.size() != 2 || flag[0] != '-')
      throw Error(Errc::unknown_flag, "expected a cctool flag, got '" + flag + "'");
    if (i + 1 >= args.size())
      throw Error(Errc::missing_value, "flag " + flag + " is missing its value");
    const std::string& value = args[++i];
    switch (flag[1]) {
      case 'o': inv.owner = value; saw_owner = true; break;
      case 'p': inv.pipe = value; saw_pipe = true; break;
      case 's': inv.stream = value; break;
      case 'x': inv.policy = detail_profile::parse_cctool_value(flag, value); break;
      case 'l': inv.log_level = detail_profile::parse_cctool_value(flag, value); break;
      case 'f': inv.log_flags = detail_profile::parse_cctool_value(flag, value); break;
      case 'g': inv.console_level = detail_profile::parse_cctool_value(flag, value); break;
      case 'm': inv.console_flags = detail_profile::parse_cctool_value(flag, value); break;
      case 'c': inv.capture_command = value; break;
      default:
        throw Error(Errc::unknown_flag, "unknown cctool flag '" + flag + "'");
    }
  }
  if (!saw_owner) throw Error(Errc::missing_value, "-o <owner> is required");
  if (!saw_pipe) throw Error(Errc::missing_value, "-p <pipe> is required");
  bool config = inv.has_config_options();
  bool capture = inv.capture_command.has_value();
  if (config == capture)
    throw Error(Errc::mixed_capture_and_config,
                config ? "configuration options and a capture command cannot be combined"
                       : "invocation needs configuration options or a capture command");
  return inv;
}

/// Config equivalent of one configuration invocation. Stream-level options
/// require -s; capture commands produce no settings.
inline CaptureConfig invocation_to_config(const CctoolInvocation& inv) {
  CaptureConfig cfg;
  cfg.provenance = kProvenanceCommandLine;
  if (inv.capture_command) return cfg;
  if (inv.policy) cfg.pipe_settings[inv.owner][inv.pipe] = PipeSetting{*inv.policy};
  if (inv.log_level || inv.log_flags || inv.console_level || inv.console_flags) {
    if (!inv.stream)
      throw Error(Errc::missing_value, "stream options require -s <stream>");
    StreamSetting ss;
    ss.log_level = inv.log_level;
    ss.log_flags = inv.log_flags;
    ss.console_level = inv.console_level;
    ss.console_flags = inv.console_flags;
    cfg.stream_settings[inv.owner][inv.pipe][*inv.stream] = ss;
  }
  cfg.normalize();
  return cfg;
}

}  // namespace cctrace::profile
