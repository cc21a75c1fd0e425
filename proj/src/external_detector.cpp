#include "tilefuse/external_detector.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace tilefuse {
namespace {

bool parse_double(std::string_view token, double& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_int(std::string_view token, int& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

std::optional<Region> parse_box_line(std::string_view line) {
  auto t = split_ws(line);
  if (t.size() != 7 || t[0] != "BOX") return std::nullopt;
  Region r;
  if (!parse_double(t[1], r.box.x1) || !parse_double(t[2], r.box.y1) ||
      !parse_double(t[3], r.box.x2) || !parse_double(t[4], r.box.y2) ||
      !parse_int(t[5], r.category) || !parse_double(t[6], r.confidence)) {
    return std::nullopt;
  }
  return r;
}

std::string format_detect_request(std::string_view image_id,
                                  const TileSpec& tile,
                                  const std::filesystem::path& tile_png) {
  std::ostringstream os;
  os << "DETECT " << image_id << ' ' << tile.row << ' ' << tile.col << ' '
     << tile.width << ' ' << tile.height << ' ' << tile_png.string();
  return os.str();
}

ExternalProcessDetector::ExternalProcessDetector(
    DetectorContract contract, std::string command,
    std::chrono::milliseconds timeout, std::filesystem::path scratch_dir)
    : contract_(std::move(contract)),
      command_(std::move(command)),
      timeout_(timeout),
      scratch_dir_(scratch_dir.empty() ? std::filesystem::temp_directory_path()
                                       : std::move(scratch_dir)) {
  contract_.needs_pixels = true;
  if (contract_.capacity == 0) contract_.capacity = 1;
  ignore_sigpipe();
}

ExternalProcessDetector::~ExternalProcessDetector() { stop(); }

void ExternalProcessDetector::start() {
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw std::runtime_error("pipe failed");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw std::runtime_error("pipe failed");
  }
  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw std::runtime_error("fork failed");
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
  ++launches_;
}

void ExternalProcessDetector::stop() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
  buffer_.clear();
}

bool ExternalProcessDetector::read_line(
    std::string& line, std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      buffer_.erase(0, nl + 1);
      return true;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw std::runtime_error("detector timed out");
    pollfd pfd{from_child_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("poll failed");
    }
    if (rc == 0) throw std::runtime_error("detector timed out");
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("read from detector failed");
    }
    if (n == 0) return false;  // child closed stdout
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<Region> ExternalProcessDetector::detect(const TileRequest& request) {
  if (!request.pixels) throw std::runtime_error("tile pixels were not rendered");
  std::lock_guard lock(mutex_);

  auto png = scratch_dir_ / ("tilefuse-" + std::to_string(::getpid()) + "-" +
                             std::to_string(request_counter_++) + ".png");
  struct Remove {
    std::filesystem::path p;
    ~Remove() {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  } cleanup{png};
  write_png(png, *request.pixels);

  try {
    if (pid_ < 0) start();
    std::string msg = format_detect_request(request.image_id, request.tile, png) + "\n";
    std::size_t sent = 0;
    while (sent < msg.size()) {
      ssize_t n = ::write(to_child_, msg.data() + sent, msg.size() - sent);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error("detector process is not accepting requests");
      }
      sent += static_cast<std::size_t>(n);
    }

    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::vector<Region> regions;
    std::string line;
    for (;;) {
      if (!read_line(line, deadline)) {
        throw std::runtime_error("detector process exited mid-reply");
      }
      if (line == "END") break;
      auto box = parse_box_line(line);
      if (!box) throw std::runtime_error("malformed detector reply: '" + line + "'");
      regions.push_back(*box);
    }
    return regions;
  } catch (...) {
    // The stream position is unknown after any failure; start over.
    stop();
    throw;
  }
}

}  // namespace tilefuse
