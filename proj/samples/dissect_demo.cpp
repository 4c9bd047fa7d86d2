// Round-trips a private-DLT capture through the container layer and shows
// the heuristic dissector plus the Wireshark user_dlts mapping line.

#include <iostream>
#include <sstream>

#include "cctrace/cctrace.hpp"

using namespace cctrace;

int main() {
  pcap::GlobalHeader header;
  header.timestamp_unit = pcap::TimestampUnit::nanosecond;
  header.link_type = pcap::LinkType{pcap::LinkType::kCoreCapture};

  std::vector<pcap::Record> records;
  {
    pcap::Record r;
    r.ts_sec = 1577836800;
    r.ts_frac = 0;
    std::string text = "wl: join BSSID aa:bb:cc:dd:ee:ff\n";
    r.payload.assign(text.begin(), text.end());
    r.original_length = static_cast<std::uint32_t>(r.payload.size());
    records.push_back(std::move(r));
  }
  {
    pcap::Record r;
    r.ts_sec = 1577836801;
    r.ts_frac = 500;
    r.payload = {0x01, 0x03, 0xAA, 0xBB, 0xCC, 0x02, 0x01, 0xFF};
    r.original_length = static_cast<std::uint32_t>(r.payload.size());
    records.push_back(std::move(r));
  }

  std::vector<std::uint8_t> bytes = pcap::write(header, records);
  pcap::FileContent content = pcap::read_all(std::span<const std::uint8_t>(bytes));
  std::cout << "container: " << content.records.size() << " records, "
            << pcap::link_type_name(content.header.link_type.code) << "\n\n";

  dissect::DissectorRegistry registry;
  for (const pcap::Record& r : content.records) {
    auto frame = registry.dissect(content.header.link_type,
                                  std::span<const std::uint8_t>(r.payload), "demo");
    std::cout << dissect::render(frame, dissect::RenderFormat::text) << "\n";
  }

  std::cout << dissect::emit_wireshark_user_dlt(pcap::LinkType::kCoreCapture, "corecapture")
            << "\n";
  return 0;
}
