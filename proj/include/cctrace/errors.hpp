#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cctrace {

enum class Errc {
  // pcap container
  unknown_magic,
  truncated,
  truncated_record,
  record_exceeds_snaplen,
  // capture registry
  duplicate_pipe,
  unknown_pipe,
  duplicate_stream,
  unknown_stream,
  not_a_log_stream,
  not_a_data_stream,
  // profiles / cctool arguments
  malformed_plist,
  unknown_flag,
  missing_value,
  mixed_capture_and_config,
  // trace folders
  root_not_found,
  destination_not_empty,
  write_failure,
  // dissector
  dlt_out_of_private_range,
  // contract violations that have no more specific code
  invalid_argument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::unknown_magic: return "UnknownMagic";
    case Errc::truncated: return "Truncated";
    case Errc::truncated_record: return "TruncatedRecord";
    case Errc::record_exceeds_snaplen: return "RecordExceedsSnaplen";
    case Errc::duplicate_pipe: return "DuplicatePipe";
    case Errc::unknown_pipe: return "UnknownPipe";
    case Errc::duplicate_stream: return "DuplicateStream";
    case Errc::unknown_stream: return "UnknownStream";
    case Errc::not_a_log_stream: return "NotALogStream";
    case Errc::not_a_data_stream: return "NotADataStream";
    case Errc::malformed_plist: return "MalformedPlist";
    case Errc::unknown_flag: return "UnknownFlag";
    case Errc::missing_value: return "MissingValue";
    case Errc::mixed_capture_and_config: return "MixedCaptureAndConfig";
    case Errc::root_not_found: return "RootNotFound";
    case Errc::destination_not_empty: return "DestinationNotEmpty";
    case Errc::write_failure: return "WriteFailure";
    case Errc::dlt_out_of_private_range: return "DltOutOfPrivateRange";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

/// Exception carrying a stable error code; `offset()` is meaningful for the
/// byte-oriented parse errors (npos otherwise).
class Error : public std::runtime_error {
 public:
  static constexpr std::uint64_t npos = ~std::uint64_t{0};

  Error(Errc code, std::string message, std::uint64_t offset = npos)
      : std::runtime_error(std::string(errc_name(code)) + ": " + std::move(message)),
        code_(code),
        offset_(offset) {}

  Errc code() const noexcept { return code_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  Errc code_;
  std::uint64_t offset_;
};

}  // namespace cctrace
