#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cctrace/detail/bytes.hpp"
#include "cctrace/errors.hpp"

// Classic PCAP container: 24-byte global header, 16-byte per-record header.
// Both microsecond (0xA1B2C3D4) and nanosecond (0xA1B23C4D) magics are
// accepted in either byte order; writes default to little-endian microsecond.

namespace cctrace::pcap {

inline constexpr std::uint32_t kMagicMicrosecond = 0xA1B2C3D4u;
inline constexpr std::uint32_t kMagicNanosecond = 0xA1B23C4Du;
inline constexpr std::size_t kGlobalHeaderSize = 24;
inline constexpr std::size_t kRecordHeaderSize = 16;

// Guard against absurd declared lengths in corrupt files.
inline constexpr std::uint32_t kMaxCapturedLength = 1u << 30;

enum class ByteOrder { little, big };
enum class TimestampUnit { microsecond, nanosecond };

inline std::uint64_t unit_modulus(TimestampUnit u) {
  return u == TimestampUnit::microsecond ? 1'000'000ull : 1'000'000'000ull;
}

struct LinkType {
  std::uint32_t code = 0;

  static constexpr std::uint32_t kUserFirst = 147;  // USER0
  static constexpr std::uint32_t kUserLast = 162;   // USER15
  static constexpr std::uint32_t kCoreCapture = 150;  // USER3

  bool is_private_use() const { return code >= kUserFirst && code <= kUserLast; }

  friend bool operator==(const LinkType&, const LinkType&) = default;
};

/// Canonical name for a link-layer type code; USER0..USER15 for the
/// private-use range 147..162, "UNKNOWN(<code>)" for anything unlisted.
inline std::string link_type_name(std::uint32_t code) {
  switch (code) {
    case 0: return "NULL";
    case 1: return "ETHERNET";
    case 6: return "IEEE802_5";
    case 8: return "SLIP";
    case 9: return "PPP";
    case 10: return "FDDI";
    case 101: return "RAW";
    case 105: return "IEEE802_11";
    case 113: return "LINUX_SLL";
    case 127: return "IEEE802_11_RADIOTAP";
    case 163: return "IEEE802_11_AVS";
    case 187: return "BLUETOOTH_HCI_H4";
    case 192: return "PPI";
    default: break;
  }
  if (code >= LinkType::kUserFirst && code <= LinkType::kUserLast)
    return "USER" + std::to_string(code - LinkType::kUserFirst);
  return "UNKNOWN(" + std::to_string(code) + ")";
}

struct GlobalHeader {
  ByteOrder byte_order = ByteOrder::little;
  TimestampUnit timestamp_unit = TimestampUnit::microsecond;
  std::uint16_t version_major = 2;
  std::uint16_t version_minor = 4;
  std::int32_t reserved1 = 0;  // historical thiszone
  std::uint32_t reserved2 = 0; // historical sigfigs
  std::uint32_t snaplen = 65535;
  LinkType link_type{LinkType::kCoreCapture};

  friend bool operator==(const GlobalHeader&, const GlobalHeader&) = default;
};

struct Record {
  std::uint32_t ts_sec = 0;
  std::uint32_t ts_frac = 0;  // microseconds or nanoseconds per header
  std::uint32_t original_length = 0;
  std::vector<std::uint8_t> payload;

  std::uint32_t captured_length() const { return static_cast<std::uint32_t>(payload.size()); }

  friend bool operator==(const Record&, const Record&) = default;
};

inline GlobalHeader decode_global_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kGlobalHeaderSize)
    throw Error(Errc::truncated, "global header needs 24 bytes, got " + std::to_string(bytes.size()));
  GlobalHeader h;
  std::uint32_t le = detail::load32(bytes.data(), true);
  std::uint32_t be = detail::load32(bytes.data(), false);
  if (le == kMagicMicrosecond || le == kMagicNanosecond) {
    h.byte_order = ByteOrder::little;
    h.timestamp_unit = le == kMagicMicrosecond ? TimestampUnit::microsecond : TimestampUnit::nanosecond;
  } else if (be == kMagicMicrosecond || be == kMagicNanosecond) {
    h.byte_order = ByteOrder::big;
    h.timestamp_unit = be == kMagicMicrosecond ? TimestampUnit::microsecond : TimestampUnit::nanosecond;
  } else {
    throw Error(Errc::unknown_magic, "first bytes " + detail::to_hex(bytes.subspan(0, 4)) +
                                         " match no pcap magic");
  }
  bool little = h.byte_order == ByteOrder::little;
  h.version_major = detail::load16(bytes.data() + 4, little);
  h.version_minor = detail::load16(bytes.data() + 6, little);
  h.reserved1 = static_cast<std::int32_t>(detail::load32(bytes.data() + 8, little));
  h.reserved2 = detail::load32(bytes.data() + 12, little);
  h.snaplen = detail::load32(bytes.data() + 16, little);
  h.link_type.code = detail::load32(bytes.data() + 20, little);
  return h;
}

inline void encode_global_header(std::vector<std::uint8_t>& out, const GlobalHeader& h) {
  bool little = h.byte_order == ByteOrder::little;
  std::uint32_t magic =
      h.timestamp_unit == TimestampUnit::microsecond ? kMagicMicrosecond : kMagicNanosecond;
  detail::store32(out, magic, little);
  detail::store16(out, h.version_major, little);
  detail::store16(out, h.version_minor, little);
  detail::store32(out, static_cast<std::uint32_t>(h.reserved1), little);
  detail::store32(out, h.reserved2, little);
  detail::store32(out, h.snaplen, little);
  detail::store32(out, h.link_type.code, little);
}

/// Serializes a file. Every record must fit the snaplen and satisfy
/// captured_length <= original_length.
inline std::vector<std::uint8_t> write(const GlobalHeader& header, std::span<const Record> records) {
  if (header.snaplen == 0) throw Error(Errc::invalid_argument, "snaplen must be > 0");
  std::vector<std::uint8_t> out;
  out.reserve(kGlobalHeaderSize + records.size() * kRecordHeaderSize);
  encode_global_header(out, header);
  bool little = header.byte_order == ByteOrder::little;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Record& r = records[i];
    if (r.captured_length() > header.snaplen)
      throw Error(Errc::record_exceeds_snaplen,
                  "record " + std::to_string(i) + " captures " + std::to_string(r.captured_length()) +
                      " bytes, snaplen is " + std::to_string(header.snaplen));
    if (r.captured_length() > r.original_length)
      throw Error(Errc::invalid_argument,
                  "record " + std::to_string(i) + " captured_length exceeds original_length");
    detail::store32(out, r.ts_sec, little);
    detail::store32(out, r.ts_frac, little);
    detail::store32(out, r.captured_length(), little);
    detail::store32(out, r.original_length, little);
    out.insert(out.end(), r.payload.begin(), r.payload.end());
  }
  return out;
}

inline void write_to(std::ostream& os, const GlobalHeader& header, std::span<const Record> records) {
  auto bytes = write(header, records);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

/// Streaming reader. Single-consumer; a truncated record throws once (with
/// the record's byte offset) and the reader then reports end-of-file, so
/// records returned before the fault stay usable.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {
    std::uint8_t buf[kGlobalHeaderSize];
    std::size_t got = read_bytes(buf, kGlobalHeaderSize);
    if (got < kGlobalHeaderSize)
      throw Error(Errc::truncated, "input ends inside the global header", 0);
    header_ = decode_global_header(std::span<const std::uint8_t>(buf, kGlobalHeaderSize));
  }

  const GlobalHeader& header() const { return header_; }

  /// Byte offset of the next unread record header.
  std::uint64_t offset() const { return offset_; }

  std::optional<Record> next() {
    if (done_) return std::nullopt;
    std::uint64_t record_start = offset_;
    std::uint8_t hdr[kRecordHeaderSize];
    std::size_t got = read_bytes(hdr, kRecordHeaderSize);
    if (got == 0) {
      done_ = true;
      return std::nullopt;
    }
    if (got < kRecordHeaderSize) {
      done_ = true;
      throw Error(Errc::truncated_record, "record header cut short", record_start);
    }
    bool little = header_.byte_order == ByteOrder::little;
    Record r;
    r.ts_sec = detail::load32(hdr, little);
    r.ts_frac = detail::load32(hdr + 4, little);
    std::uint32_t incl_len = detail::load32(hdr + 8, little);
    r.original_length = detail::load32(hdr + 12, little);
    if (incl_len > kMaxCapturedLength) {
      done_ = true;
      throw Error(Errc::truncated_record,
                  "declared capture length " + std::to_string(incl_len) + " is implausible",
                  record_start);
    }
    r.payload.resize(incl_len);
    got = read_bytes(r.payload.data(), incl_len);
    if (got < incl_len) {
      done_ = true;
      throw Error(Errc::truncated_record,
                  "record declares " + std::to_string(incl_len) + " bytes, " + std::to_string(got) +
                      " remain",
                  record_start);
    }
    return r;
  }

 private:
  std::size_t read_bytes(std::uint8_t* dst, std::size_t n) {
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    std::size_t got = static_cast<std::size_t>(in_.gcount());
    offset_ += got;
    return got;
  }

  std::istream& in_;
  GlobalHeader header_;
  std::uint64_t offset_ = 0;
  bool done_ = false;
};

struct FileContent {
  GlobalHeader header;
  std::vector<Record> records;

  friend bool operator==(const FileContent&, const FileContent&) = default;
};

inline FileContent read_all(std::istream& in) {
  Reader reader(in);
  FileContent fc;
  fc.header = reader.header();
  while (auto r = reader.next()) fc.records.push_back(std::move(*r));
  return fc;
}

inline FileContent read_all(std::span<const std::uint8_t> bytes) {
  std::string s(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  std::istringstream in(s, std::ios::binary);
  return read_all(in);
}

}  // namespace cctrace::pcap
