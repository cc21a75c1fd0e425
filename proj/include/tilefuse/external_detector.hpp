#pragma once

#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <sys/types.h>

#include "tilefuse/detector.hpp"

namespace tilefuse {

// Parses `BOX <x1> <y1> <x2> <y2> <category_id> <confidence>`. Returns
// nullopt for anything else, including trailing garbage.
std::optional<Region> parse_box_line(std::string_view line);

// `DETECT <image_id> <row> <col> <width> <height> <path>`
std::string format_detect_request(std::string_view image_id,
                                  const TileSpec& tile,
                                  const std::filesystem::path& tile_png);

// Detector running as a child process that speaks the line protocol on its
// stdin/stdout. Each request writes the tile to a temporary 8-bit RGB PNG.
// A crash, timeout or malformed reply fails that tile and the process is
// restarted on the next request.
class ExternalProcessDetector : public DetectorBackend {
 public:
  ExternalProcessDetector(DetectorContract contract, std::string command,
                          std::chrono::milliseconds timeout,
                          std::filesystem::path scratch_dir = {});
  ~ExternalProcessDetector() override;

  ExternalProcessDetector(const ExternalProcessDetector&) = delete;
  ExternalProcessDetector& operator=(const ExternalProcessDetector&) = delete;

  const DetectorContract& contract() const override { return contract_; }
  std::vector<Region> detect(const TileRequest& request) override;

  // Number of times the child process has been (re)started.
  int launches() const { return launches_; }

 private:
  void start();
  void stop();
  bool read_line(std::string& line,
                 std::chrono::steady_clock::time_point deadline);

  DetectorContract contract_;
  std::string command_;
  std::chrono::milliseconds timeout_;
  std::filesystem::path scratch_dir_;
  std::mutex mutex_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  int launches_ = 0;
  std::uint64_t request_counter_ = 0;
};

}  // namespace tilefuse
