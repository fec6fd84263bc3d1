#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cipher/config.hpp"
#include "cipher/label_journal.hpp"

namespace cipher {

inline constexpr int kApiSchemaVersion = 1;

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

/// Transport-independent labeling API over a project directory. Every
/// payload is a JSON object carrying "schema_version". Errors are
/// {"schema_version", "error": {"code", "message"}}.
///
/// Stores are read per request, so stages re-run underneath a live server
/// are picked up, and labels from other processes are visible immediately.
class LabelingApi {
 public:
  using Clock = std::function<std::string()>;  // ISO-8601 UTC "now"

  explicit LabelingApi(std::filesystem::path project, Clock clock = {});

  /// GET /api/clusters
  ApiResponse clusters() const;
  /// GET /api/clusters/{id}/summary; id is a cluster number or "noise".
  ApiResponse summary(std::string_view id) const;
  /// GET /api/clusters/{id}/representatives?n=&seed=
  ApiResponse representatives(std::string_view id, std::optional<std::string_view> n,
                              std::optional<std::string_view> seed) const;
  /// POST /api/clusters/{id}/label
  ApiResponse post_label(std::string_view id, std::string_view body);
  /// GET /api/progress
  ApiResponse progress() const;

  const std::filesystem::path& project() const noexcept { return project_; }

 private:
  std::filesystem::path project_;
  Clock clock_;
  LabelJournal journal_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  /// Served at "/" when set (the browser UI).
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP front end for LabelingApi with permissive CORS headers.
class Server {
 public:
  Server(std::filesystem::path project, ServeOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and returns the bound port. Throws Error when binding fails.
  int bind();
  /// Blocks until stop(). Call bind() first.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cipher
