#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "cipher/config.hpp"

namespace cipher::testing {

// Scratch project directory removed on destruction.
class TempProject {
 public:
  TempProject() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cipher_unit_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempProject() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempProject(const TempProject&) = delete;
  TempProject& operator=(const TempProject&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path source_dir() { return CIPHER_SOURCE_DIR; }

inline PipelineConfig synthetic_config() {
  return load_config(source_dir() / "config" / "synthetic.yaml");
}

}  // namespace cipher::testing
