#pragma once

#include <chrono>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "cipher/annotate.hpp"
#include "cipher/error.hpp"

namespace cipher {

/// The journal could not be locked in time (another writer holds it).
/// Retrying later is safe.
class JournalConflict : public Error {
 public:
  using Error::Error;
};

inline constexpr int kLabelSchemaVersion = 1;

std::string to_json_line(const LabelRecord& record);
/// Throws ParseError on malformed JSON or a missing field.
LabelRecord parse_json_line(const std::string& line, std::size_t line_no = 0);

/// Append-only newline-delimited JSON log of label submissions.
///
/// Writers are serialized in-process by a mutex and across processes by an
/// advisory file lock; each record is written with a single append and
/// flushed to disk before append() returns.
class LabelJournal {
 public:
  explicit LabelJournal(std::filesystem::path path,
                        std::chrono::milliseconds lock_timeout = std::chrono::seconds(2));

  const std::filesystem::path& path() const noexcept { return path_; }

  /// Replays the file. A missing file is an empty journal.
  std::vector<LabelRecord> records() const;

  /// Throws JournalConflict when the lock is not acquired within the timeout.
  void append(const LabelRecord& record);

 private:
  std::filesystem::path path_;
  std::chrono::milliseconds lock_timeout_;
  mutable std::timed_mutex mutex_;
};

}  // namespace cipher
