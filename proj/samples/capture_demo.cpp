// End-to-end demo: configure a registry the way the Wi-Fi profile does,
// buffer a few events, trigger a manual dump, and write the trace folder.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "cctrace/cctrace.hpp"

using namespace cctrace;

int main() {
  CaptureRegistry registry([t = std::uint64_t{0}]() mutable {
    return 1577836800ULL * 1000000000ULL + 1000000ULL * t++;
  });

  auto family = registry.register_pipe(
      PipeDescriptor{"com.apple.iokit.IO80211Family", "IO80211AWDLPeerManager", 0, 128});
  StreamDescriptor awdl;
  awdl.name = "bpfIO80211Awdl";
  awdl.kind = StreamKind::log_stream;
  registry.register_stream(family, awdl);

  auto driver = registry.register_pipe(
      PipeDescriptor{"com.apple.driver.AirPort.Brcm4360.0", "DriverLogs", 0, 128});
  StreamDescriptor logs;
  logs.name = "DriverLogs";
  logs.kind = StreamKind::log_stream;
  registry.register_stream(driver, logs);
  StreamDescriptor snapshots;
  snapshots.name = "StateSnapshots";
  snapshots.kind = StreamKind::data_stream;
  registry.register_stream(driver, snapshots);
  registry.set_data_snapshot("com.apple.driver.AirPort.Brcm4360.0", "DriverLogs",
                             "StateSnapshots", [] {
                               std::string text = "adapter state: associated\n";
                               return std::vector<std::uint8_t>(text.begin(), text.end());
                             });

  // Continuous policy plus the per-stream filters, as one config.
  CaptureConfig config;
  config.pipe_settings["com.apple.iokit.IO80211Family"]["IO80211AWDLPeerManager"] =
      PipeSetting{1};
  config.pipe_settings["com.apple.driver.AirPort.Brcm4360.0"]["DriverLogs"] = PipeSetting{1};
  StreamSetting verbose;
  verbose.log_level = 5;
  verbose.log_flags = 27358198660246032ULL;
  config.stream_settings["com.apple.iokit.IO80211Family"]["IO80211AWDLPeerManager"]
                        ["bpfIO80211Awdl"] = verbose;
  StreamSetting driver_setting;
  driver_setting.log_level = 5;
  driver_setting.log_flags = 8388608;
  config.stream_settings["com.apple.driver.AirPort.Brcm4360.0"]["DriverLogs"]["DriverLogs"] =
      driver_setting;
  ChangeReport report = registry.apply_config(config);
  std::cout << "applied " << report.applied.size() << " settings\n";

  auto text_event = [](const char* text, std::uint64_t flags) {
    LogEvent e;
    e.level = 3;
    e.flags = flags;
    e.payload.assign(text, text + std::string(text).size());
    return e;
  };
  registry.emit_event("com.apple.iokit.IO80211Family", "IO80211AWDLPeerManager",
                      "bpfIO80211Awdl", text_event("awdl: peer discovered\n", 16));
  registry.emit_event("com.apple.iokit.IO80211Family", "IO80211AWDLPeerManager",
                      "bpfIO80211Awdl", text_event("awdl: election round\n", 16));
  registry.emit_event("com.apple.driver.AirPort.Brcm4360.0", "DriverLogs", "DriverLogs",
                      text_event("wl: scan started\n", 8388608));

  DumpBundle bundle = registry.trigger_dump("*", "*", DumpReason::manual);
  std::filesystem::path dest = std::filesystem::temp_directory_path() / "cctrace-demo-folder";
  std::filesystem::remove_all(dest);
  folder::FolderIndex index = folder::materialize_folder(bundle, snapshot_config(registry), dest);
  std::cout << folder::summarize(index, folder::ReportFormat::text);
  std::cout << "folder written to " << dest << "\n";
  return 0;
}
