#include "cipher/label_journal.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <json.hpp>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <thread>

namespace cipher {

using nlohmann::json;

std::string to_json_line(const LabelRecord& r) {
  const json j{{"schema_version", kLabelSchemaVersion},
               {"cluster", r.cluster},
               {"label", r.label},
               {"annotator", r.annotator},
               {"reviewed", r.reviewed},
               {"timestamp", r.timestamp},
               {"note", r.note}};
  return j.dump();
}

LabelRecord parse_json_line(const std::string& line, std::size_t line_no) {
  try {
    const auto j = json::parse(line);
    if (j.at("schema_version").get<int>() != kLabelSchemaVersion) {
      throw ParseError(line_no, "unsupported label schema_version");
    }
    LabelRecord r;
    r.cluster = j.at("cluster").get<int>();
    r.label = j.at("label").get<std::string>();
    r.annotator = j.at("annotator").get<std::string>();
    r.reviewed = j.at("reviewed").get<std::vector<WindowId>>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.note = j.value("note", std::string{});
    return r;
  } catch (const json::exception& e) {
    throw ParseError(line_no, std::string("bad label record: ") + e.what());
  }
}

LabelJournal::LabelJournal(std::filesystem::path path, std::chrono::milliseconds lock_timeout)
    : path_(std::move(path)), lock_timeout_(lock_timeout) {}

std::vector<LabelRecord> LabelJournal::records() const {
  std::vector<LabelRecord> out;
  std::ifstream in(path_);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    out.push_back(parse_json_line(line, line_no));
  }
  return out;
}

namespace {

class FileLock {
 public:
  FileLock(const std::filesystem::path& path, std::chrono::steady_clock::time_point deadline) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw Error("cannot open label journal " + path.string() + ": " + std::strerror(errno));
    }
    while (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      if (errno != EWOULDBLOCK || std::chrono::steady_clock::now() >= deadline) {
        ::close(fd_);
        throw JournalConflict("label journal is locked by another writer; retry");
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

  int fd() const noexcept { return fd_; }

 private:
  int fd_ = -1;
};

}  // namespace

void LabelJournal::append(const LabelRecord& record) {
  const auto deadline = std::chrono::steady_clock::now() + lock_timeout_;
  std::unique_lock lock(mutex_, std::defer_lock);
  if (!lock.try_lock_until(deadline)) {
    throw JournalConflict("label journal busy; retry");
  }
  FileLock file(path_, deadline);
  const std::string line = to_json_line(record) + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const auto n = ::write(file.fd(), line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("write to label journal failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(file.fd());
}

}  // namespace cipher
