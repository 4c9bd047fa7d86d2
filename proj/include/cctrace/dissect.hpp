#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cctrace/detail/bytes.hpp"
#include "cctrace/errors.hpp"
#include "cctrace/glob.hpp"
#include "cctrace/pcap.hpp"

// Payload dissection for private-use link types. Plugins register against a
// link type (optionally narrowed by stream-name glob); without a plugin, or
// when every plugin declines, a heuristic pass classifies the payload as log
// text, TLV records, or opaque bytes. Dissection is total: every input
// yields a frame whose field ranges plus residue tile the payload exactly.

namespace cctrace::dissect {

enum class Confidence { exact, heuristic, opaque };

inline const char* confidence_name(Confidence c) {
  switch (c) {
    case Confidence::exact: return "exact";
    case Confidence::heuristic: return "heuristic";
    default: return "opaque";
  }
}

enum class Endianness { big, little };

struct TlvConfig {
  unsigned type_width = 1;    // bytes, in {1,2,4}
  unsigned length_width = 1;  // bytes, in {1,2,4}
  Endianness endianness = Endianness::big;

  bool operator==(const TlvConfig&) const = default;
};

struct TlvRecord {
  std::uint64_t type = 0;
  std::vector<std::uint8_t> value;

  bool operator==(const TlvRecord&) const = default;
};

struct TlvParseResult {
  std::vector<TlvRecord> records;
  /// Unconsumed byte count, measured from the start of the first record
  /// that does not fit; 0 means the records tile the input exactly.
  std::size_t residue = 0;
};

struct ByteRange {
  std::size_t offset = 0;
  std::size_t length = 0;

  bool operator==(const ByteRange&) const = default;
};

struct FieldNode {
  std::string name;
  ByteRange range;
  std::string value;
  std::vector<FieldNode> children;
};

struct DissectedFrame {
  std::string protocol;
  Confidence confidence = Confidence::opaque;
  std::vector<FieldNode> fields;  // top-level ranges tile [0, residue.offset)
  ByteRange residue;
  std::vector<std::uint8_t> payload;
};

struct DissectorSelector {
  pcap::LinkType link_type;
  std::optional<std::string> stream_name_glob;
  int priority = 0;
};

/// Returns std::nullopt to decline the payload.
using Dissector = std::function<std::optional<DissectedFrame>(
    std::span<const std::uint8_t>, const std::optional<std::string>&)>;

inline std::uint64_t tlv_width_limit(unsigned width) {
  return width >= 8 ? ~std::uint64_t{0} : (std::uint64_t{1} << (8 * width)) - 1;
}

/// Sequential TLV parse. Incomplete trailing records are not consumed; the
/// parsed prefix is returned together with the residue length.
inline TlvParseResult parse_tlv(std::span<const std::uint8_t> payload, const TlvConfig& config) {
  TlvParseResult result;
  const bool little = config.endianness == Endianness::little;
  const std::size_t header = config.type_width + config.length_width;
  std::size_t offset = 0;
  while (offset < payload.size()) {
    if (payload.size() - offset < header) break;
    std::uint64_t type =
        detail::load_uint(payload.data() + offset, static_cast<int>(config.type_width), little);
    std::uint64_t length = detail::load_uint(payload.data() + offset + config.type_width,
                                             static_cast<int>(config.length_width), little);
    if (payload.size() - offset - header < length) break;
    TlvRecord rec;
    rec.type = type;
    rec.value.assign(payload.begin() + static_cast<std::ptrdiff_t>(offset + header),
                     payload.begin() + static_cast<std::ptrdiff_t>(offset + header + length));
    result.records.push_back(std::move(rec));
    offset += header + static_cast<std::size_t>(length);
  }
  result.residue = payload.size() - offset;
  return result;
}

inline std::vector<std::uint8_t> serialize_tlv(std::span<const TlvRecord> records,
                                               const TlvConfig& config) {
  const bool little = config.endianness == Endianness::little;
  std::vector<std::uint8_t> out;
  for (const TlvRecord& rec : records) {
    if (rec.type > tlv_width_limit(config.type_width))
      throw Error(Errc::invalid_argument, "TLV type does not fit the configured width");
    if (rec.value.size() > tlv_width_limit(config.length_width))
      throw Error(Errc::invalid_argument, "TLV value does not fit the configured length width");
    detail::store_uint(out, rec.type, static_cast<int>(config.type_width), little);
    detail::store_uint(out, rec.value.size(), static_cast<int>(config.length_width), little);
    out.insert(out.end(), rec.value.begin(), rec.value.end());
  }
  return out;
}

/// Probe order: type width 1,2,4, then length width 1,2,4, big before
/// little. The first config that tiles a payload exactly wins.
inline const std::vector<TlvConfig>& default_tlv_probe_set() {
  static const std::vector<TlvConfig> set = [] {
    std::vector<TlvConfig> v;
    for (unsigned tw : {1u, 2u, 4u})
      for (unsigned lw : {1u, 2u, 4u})
        for (Endianness e : {Endianness::big, Endianness::little})
          v.push_back(TlvConfig{tw, lw, e});
    return v;
  }();
  return set;
}

enum class HeuristicClass { text_log, tlv_like, binary };

inline const char* heuristic_class_name(HeuristicClass c) {
  switch (c) {
    case HeuristicClass::text_log: return "text_log";
    case HeuristicClass::tlv_like: return "tlv_like";
    default: return "binary";
  }
}

/// Deterministic classification: non-empty payloads that are at least 95%
/// printable-or-whitespace are log text; otherwise a payload tiled exactly
/// by some probe config (with at least one record) is TLV-like.
inline HeuristicClass heuristic_classify(std::span<const std::uint8_t> payload) {
  if (payload.empty()) return HeuristicClass::binary;
  if (detail::printable_ratio(payload) >= 0.95) return HeuristicClass::text_log;
  for (const TlvConfig& config : default_tlv_probe_set()) {
    TlvParseResult r = parse_tlv(payload, config);
    if (r.residue == 0 && !r.records.empty()) return HeuristicClass::tlv_like;
  }
  return HeuristicClass::binary;
}

namespace detail_dissect {

inline bool ranges_partition(const DissectedFrame& frame) {
  std::vector<ByteRange> ranges;
  for (const FieldNode& f : frame.fields) ranges.push_back(f.range);
  if (frame.residue.length > 0) ranges.push_back(frame.residue);
  std::sort(ranges.begin(), ranges.end(),
            [](const ByteRange& a, const ByteRange& b) { return a.offset < b.offset; });
  std::size_t cursor = 0;
  for (const ByteRange& r : ranges) {
    if (r.offset != cursor) return false;
    if (r.length > frame.payload.size() - r.offset) return false;
    cursor = r.offset + r.length;
  }
  return cursor == frame.payload.size();
}

inline bool children_valid(const FieldNode& node, std::size_t payload_size) {
  std::vector<ByteRange> ranges;
  for (const FieldNode& c : node.children) {
    if (c.range.offset < node.range.offset ||
        c.range.offset + c.range.length > node.range.offset + node.range.length)
      return false;
    if (c.range.offset + c.range.length > payload_size) return false;
    ranges.push_back(c.range);
    if (!children_valid(c, payload_size)) return false;
  }
  std::sort(ranges.begin(), ranges.end(),
            [](const ByteRange& a, const ByteRange& b) { return a.offset < b.offset; });
  for (std::size_t i = 1; i < ranges.size(); ++i)
    if (ranges[i].offset < ranges[i - 1].offset + ranges[i - 1].length) return false;
  return true;
}

}  // namespace detail_dissect

/// Structural validity: sibling ranges never overlap, children stay inside
/// their parent, and top-level ranges plus residue partition the payload.
inline bool frame_is_valid(const DissectedFrame& frame) {
  if (!detail_dissect::ranges_partition(frame)) return false;
  for (const FieldNode& f : frame.fields)
    if (!detail_dissect::children_valid(f, frame.payload.size())) return false;
  return true;
}

namespace detail_dissect {

inline DissectedFrame raw_frame(std::span<const std::uint8_t> payload) {
  DissectedFrame frame;
  frame.protocol = "raw";
  frame.confidence = Confidence::opaque;
  frame.residue = ByteRange{0, payload.size()};
  frame.payload.assign(payload.begin(), payload.end());
  return frame;
}

inline DissectedFrame text_frame(std::span<const std::uint8_t> payload) {
  DissectedFrame frame;
  frame.protocol = "cc-logtext";
  frame.confidence = Confidence::heuristic;
  FieldNode text;
  text.name = "text";
  text.range = ByteRange{0, payload.size()};
  text.value.assign(payload.begin(), payload.end());
  frame.fields.push_back(std::move(text));
  frame.residue = ByteRange{payload.size(), 0};
  frame.payload.assign(payload.begin(), payload.end());
  return frame;
}

inline DissectedFrame tlv_frame(std::span<const std::uint8_t> payload, const TlvConfig& config,
                                const TlvParseResult& parsed) {
  DissectedFrame frame;
  frame.protocol = "cc-tlv";
  frame.confidence = Confidence::heuristic;
  const std::size_t header = config.type_width + config.length_width;
  std::size_t offset = 0;
  for (const TlvRecord& rec : parsed.records) {
    FieldNode node;
    node.name = "tlv";
    node.range = ByteRange{offset, header + rec.value.size()};
    node.value = "type=" + std::to_string(rec.type) + " length=" + std::to_string(rec.value.size()) +
                 " value=" + detail::to_hex(rec.value);
    FieldNode type_field{"type", ByteRange{offset, config.type_width},
                         std::to_string(rec.type), {}};
    FieldNode length_field{"length", ByteRange{offset + config.type_width, config.length_width},
                           std::to_string(rec.value.size()), {}};
    node.children.push_back(std::move(type_field));
    node.children.push_back(std::move(length_field));
    if (!rec.value.empty())
      node.children.push_back(FieldNode{
          "value", ByteRange{offset + header, rec.value.size()}, detail::to_hex(rec.value), {}});
    offset += header + rec.value.size();
    frame.fields.push_back(std::move(node));
  }
  frame.residue = ByteRange{offset, payload.size() - offset};
  frame.payload.assign(payload.begin(), payload.end());
  return frame;
}

}  // namespace detail_dissect

/// Heuristic fallback shared by dissect and usable directly.
inline DissectedFrame dissect_heuristic(std::span<const std::uint8_t> payload) {
  switch (heuristic_classify(payload)) {
    case HeuristicClass::text_log:
      return detail_dissect::text_frame(payload);
    case HeuristicClass::tlv_like:
      for (const TlvConfig& config : default_tlv_probe_set()) {
        TlvParseResult parsed = parse_tlv(payload, config);
        if (parsed.residue == 0 && !parsed.records.empty())
          return detail_dissect::tlv_frame(payload, config, parsed);
      }
      [[fallthrough]];
    default:
      return detail_dissect::raw_frame(payload);
  }
}

class DissectorRegistry {
 public:
  void register_dissector(DissectorSelector selector, Dissector dissector) {
    entries_.push_back(Entry{std::move(selector), std::move(dissector), entries_.size()});
  }

  /// Total dissection. Matching plugins are tried from highest priority
  /// (registration order breaks ties); one that declines, throws, or returns
  /// a structurally invalid frame passes the payload on. With no plugin
  /// left, the heuristic fallback decides, bottoming out at protocol "raw".
  DissectedFrame dissect(pcap::LinkType link_type, std::span<const std::uint8_t> payload,
                         const std::optional<std::string>& context = std::nullopt) const {
    std::vector<const Entry*> candidates;
    for (const Entry& e : entries_) {
      if (e.selector.link_type.code != link_type.code) continue;
      if (e.selector.stream_name_glob &&
          !(context && glob_match(*e.selector.stream_name_glob, *context)))
        continue;
      candidates.push_back(&e);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Entry* a, const Entry* b) {
      if (a->selector.priority != b->selector.priority)
        return a->selector.priority > b->selector.priority;
      return a->order < b->order;
    });
    for (const Entry* e : candidates) {
      try {
        std::optional<DissectedFrame> frame = e->dissector(payload, context);
        if (frame && frame_is_valid(*frame)) return std::move(*frame);
      } catch (...) {
        // a faulty plugin must not break totality
      }
    }
    return dissect_heuristic(payload);
  }

 private:
  struct Entry {
    DissectorSelector selector;
    Dissector dissector;
    std::size_t order;
  };
  std::vector<Entry> entries_;
};

/// One row of Wireshark's user_dlts table, mapping a private-use DLT to a
/// payload protocol: "User N (DLT=d)","proto","0","","0","" with N = d-147.
inline std::string emit_wireshark_user_dlt(std::uint32_t dlt, const std::string& protocol) {
  if (dlt < pcap::LinkType::kUserFirst || dlt > pcap::LinkType::kUserLast)
    throw Error(Errc::dlt_out_of_private_range,
                "DLT " + std::to_string(dlt) + " is outside 147..162");
  return "\"User " + std::to_string(dlt - pcap::LinkType::kUserFirst) + " (DLT=" +
         std::to_string(dlt) + ")\",\"" + protocol + "\",\"0\",\"\",\"0\",\"\"";
}

enum class RenderFormat { text, json };

namespace detail_dissect {

inline void hexdump(const std::uint8_t* data, std::size_t size, std::size_t base_offset,
                    std::string& out, const std::string& indent) {
  for (std::size_t row = 0; row < size; row += 16) {
    char off[16];
    std::snprintf(off, sizeof off, "0x%04zx", base_offset + row);
    out += indent;
    out += off;
    out += "  ";
    std::size_t n = std::min<std::size_t>(16, size - row);
    for (std::size_t i = 0; i < 16; ++i) {
      if (i < n) {
        char b[4];
        std::snprintf(b, sizeof b, "%02x ", data[row + i]);
        out += b;
      } else {
        out += "   ";
      }
    }
    out += " |";
    for (std::size_t i = 0; i < n; ++i) {
      char c = static_cast<char>(data[row + i]);
      out += (c >= 0x20 && c < 0x7F) ? c : '.';
    }
    out += "|\n";
  }
}

inline void render_field_text(const FieldNode& node, int depth, std::string& out) {
  char head[32];
  std::snprintf(head, sizeof head, "[0x%04zx +%zu] ", node.range.offset, node.range.length);
  out += std::string(static_cast<std::size_t>(depth) * 2, ' ');
  out += head;
  out += node.name;
  if (!node.value.empty()) {
    out += ": ";
    for (char c : node.value)
      out += (static_cast<unsigned char>(c) >= 0x20 && static_cast<unsigned char>(c) < 0x7F) ? c
                                                                                             : '.';
  }
  out += '\n';
  for (const FieldNode& c : node.children) render_field_text(c, depth + 1, out);
}

inline nlohmann::ordered_json field_to_json(const FieldNode& node) {
  nlohmann::ordered_json j;
  j["name"] = node.name;
  j["offset"] = node.range.offset;
  j["length"] = node.range.length;
  j["value"] = node.value;
  if (!node.children.empty()) {
    nlohmann::ordered_json kids = nlohmann::ordered_json::array();
    for (const FieldNode& c : node.children) kids.push_back(field_to_json(c));
    j["children"] = std::move(kids);
  }
  return j;
}

}  // namespace detail_dissect

/// JSON form of a frame, schema "cctrace-frame/1".
inline nlohmann::ordered_json frame_to_json(const DissectedFrame& frame) {
  nlohmann::ordered_json j;
  j["schema"] = "cctrace-frame/1";
  j["protocol"] = frame.protocol;
  j["confidence"] = confidence_name(frame.confidence);
  j["payload_length"] = frame.payload.size();
  nlohmann::ordered_json fields = nlohmann::ordered_json::array();
  for (const FieldNode& f : frame.fields) fields.push_back(detail_dissect::field_to_json(f));
  j["fields"] = std::move(fields);
  j["residue"] = {{"offset", frame.residue.offset}, {"length", frame.residue.length}};
  return j;
}

inline std::string render(const DissectedFrame& frame, RenderFormat format) {
  if (format == RenderFormat::json) return frame_to_json(frame).dump(2) + "\n";
  std::string out = frame.protocol;
  out += " (";
  out += confidence_name(frame.confidence);
  out += ", ";
  out += std::to_string(frame.payload.size());
  out += " bytes)\n";
  for (const FieldNode& f : frame.fields) detail_dissect::render_field_text(f, 1, out);
  if (frame.residue.length > 0) {
    out += "  residue (" + std::to_string(frame.residue.length) + " bytes)\n";
    detail_dissect::hexdump(frame.payload.data() + frame.residue.offset, frame.residue.length,
                            frame.residue.offset, out, "    ");
  }
  return out;
}

}  // namespace cctrace::dissect
