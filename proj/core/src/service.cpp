#include "cipher/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "cipher/annotate.hpp"
#include "cipher/error.hpp"
#include "cipher/preprocess.hpp"
#include "cipher/stores.hpp"
#include "cipher/timeutil.hpp"

namespace cipher {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::size_t kMaxRepresentatives = 1000;

ApiResponse ok(json body) {
  body["schema_version"] = kApiSchemaVersion;
  return {200, body.dump()};
}

ApiResponse fail(int status, std::string_view code, const std::string& message) {
  const json body{{"schema_version", kApiSchemaVersion},
                  {"error", {{"code", code}, {"message", message}}}};
  return {status, body.dump()};
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  return format_iso8601(
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

/// Cluster number, kNoise for "noise", nullopt for anything else.
std::optional<int> parse_cluster_id(std::string_view id) {
  if (id == "noise") return kNoise;
  const auto v = parse_number<int>(id);
  if (!v || *v < 0) return std::nullopt;
  return v;
}

std::vector<ClusterAssignment> load_assignments(const fs::path& project) {
  std::ifstream in(require_artifact(project, store::kAssignments, "cluster"));
  return read_assignments(in);
}

std::map<WindowId, IsaxWord> load_words(const fs::path& project) {
  std::ifstream in(require_artifact(project, store::kWords, "cluster"));
  std::map<WindowId, IsaxWord> out;
  for (auto& [id, w] : read_words(in)) out.emplace(id, std::move(w));
  return out;
}

std::map<WindowId, PreprocessedRecord> load_preprocessed(const fs::path& project) {
  std::map<WindowId, PreprocessedRecord> out;
  for (auto& r : decode_preprocessed(
           read_file(require_artifact(project, store::kPreprocessed, "preprocess")))) {
    out.emplace(r.id, std::move(r));
  }
  return out;
}

PipelineConfig load_snapshot(const fs::path& project) {
  return load_config(require_artifact(project, store::kConfig, "ingest"));
}

std::vector<WindowId> members_of(std::span<const ClusterAssignment> rows, int cluster) {
  std::vector<WindowId> out;
  for (const auto& a : rows) {
    if (a.cluster == cluster) out.push_back(a.window);
  }
  return out;
}

json vector_or_null(const std::vector<double>& values, const std::vector<std::uint8_t>& missing,
                    std::size_t from, std::size_t len) {
  json arr = json::array();
  for (std::size_t i = from; i < from + len; ++i) {
    if (missing[i]) {
      arr.push_back(nullptr);
    } else {
      arr.push_back(values[i]);
    }
  }
  return arr;
}

/// Raw and preprocessed values of one channel over a window's time range.
/// Preprocessed is null when the channel has no valid sample there.
json channel_view(const TimeSeries& s, const Window& w, const PreprocessConfig& pp) {
  json out{{"name", s.channel.name}, {"unit", s.channel.unit}};
  const auto from = static_cast<std::int64_t>((w.start - s.start) / s.cadence);
  if (from < 0 || static_cast<std::size_t>(from) + w.length > s.size()) {
    out["raw"] = json(std::vector<std::nullptr_t>(w.length, nullptr));
    out["preprocessed"] = nullptr;
    return out;
  }
  const auto f = static_cast<std::size_t>(from);
  out["raw"] = vector_or_null(s.values, s.missing, f, w.length);
  const std::span<const std::uint8_t> mask(s.missing.data() + f, w.length);
  if (std::all_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
    out["preprocessed"] = nullptr;
    return out;
  }
  const auto filled = fill_gaps(std::span<const double>(s.values.data() + f, w.length), mask);
  out["preprocessed"] = preprocess(filled, pp).values;
  return out;
}

}  // namespace

LabelingApi::LabelingApi(fs::path project, Clock clock)
    : project_(std::move(project)),
      clock_(clock ? std::move(clock) : Clock(now_iso8601)),
      journal_(project_ / store::kLabels) {}

ApiResponse LabelingApi::clusters() const {
  try {
    const auto rows = load_assignments(project_);
    const auto labels = effective_labels(journal_.records());
    std::map<int, std::pair<std::size_t, Pass>> stats;
    std::size_t noise = 0;
    for (const auto& a : rows) {
      if (a.cluster == kNoise) {
        ++noise;
        continue;
      }
      auto& st = stats.try_emplace(a.cluster, 0, a.pass).first->second;
      ++st.first;
    }
    json list = json::array();
    for (const auto& [id, st] : stats) {
      const auto l = labels.find(id);
      list.push_back({{"id", id},
                      {"size", st.first},
                      {"pass", to_string(st.second)},
                      {"label", l == labels.end() ? json(nullptr) : json(l->second)}});
    }
    if (!rows.empty()) {
      list.push_back({{"id", "noise"}, {"size", noise}, {"pass", nullptr}, {"label", nullptr}});
    }
    return ok({{"clusters", std::move(list)}});
  } catch (const MissingArtifactError& e) {
    return fail(503, "missing_store", e.what());
  } catch (const Error& e) {
    return fail(500, "store_error", e.what());
  }
}

ApiResponse LabelingApi::summary(std::string_view id) const {
  const auto cluster = parse_cluster_id(id);
  if (!cluster) return fail(404, "unknown_cluster", "no cluster '" + std::string(id) + "'");
  try {
    std::optional<ClusterSummary> found;
    if (*cluster == kNoise) {
      const auto rows = load_assignments(project_);
      const auto members = members_of(rows, kNoise);
      if (!members.empty()) {
        const auto records = load_preprocessed(project_);
        const auto words = load_words(project_);
        std::vector<std::vector<double>> curves;
        std::vector<IsaxWord> member_words;
        for (auto m : members) {
          curves.push_back(records.at(m).values);
          member_words.push_back(words.at(m));
        }
        found = summarize(curves, member_words);
        found->cluster = kNoise;
      }
    } else {
      const auto text =
          read_file(require_artifact(project_, store::kSummaries, "summarize"));
      for (auto& s : summaries_from_json(text)) {
        if (s.cluster == *cluster) found = std::move(s);
      }
    }
    if (!found) return fail(404, "unknown_cluster", "no cluster '" + std::string(id) + "'");
    auto body = json::parse(summary_to_json(*found));
    if (*cluster == kNoise) body["cluster"] = "noise";
    return ok(std::move(body));
  } catch (const MissingArtifactError& e) {
    return fail(503, "missing_store", e.what());
  } catch (const std::out_of_range&) {
    return fail(500, "store_error", "stores disagree on the window set; re-run the pipeline");
  } catch (const Error& e) {
    return fail(500, "store_error", e.what());
  }
}

ApiResponse LabelingApi::representatives(std::string_view id,
                                         std::optional<std::string_view> n_text,
                                         std::optional<std::string_view> seed_text) const {
  const auto cluster = parse_cluster_id(id);
  if (!cluster) return fail(404, "unknown_cluster", "no cluster '" + std::string(id) + "'");
  try {
    const auto config = load_snapshot(project_);
    std::size_t n = config.annotate.representatives;
    std::uint64_t seed = config.annotate.seed;
    if (n_text) {
      const auto v = parse_number<std::size_t>(*n_text);
      if (!v || *v == 0 || *v > kMaxRepresentatives) {
        return fail(400, "invalid_argument",
                    "n must be an integer in [1, " + std::to_string(kMaxRepresentatives) + "]");
      }
      n = *v;
    }
    if (seed_text) {
      const auto v = parse_number<std::uint64_t>(*seed_text);
      if (!v) return fail(400, "invalid_argument", "seed must be an unsigned integer");
      seed = *v;
    }

    const auto rows = load_assignments(project_);
    std::vector<MemberRef> members;
    const auto records = load_preprocessed(project_);
    for (const auto& a : rows) {
      if (a.cluster != *cluster) continue;
      members.push_back(MemberRef{a.window, &records.at(a.window).values,
                                  a.membership_strength});
    }
    if (members.empty()) {
      return fail(404, "unknown_cluster", "no cluster '" + std::string(id) + "'");
    }
    const auto chosen = cipher::representatives(members, n, seed);

    const auto words = load_words(project_);
    const auto series =
        decode_series(read_file(require_artifact(project_, store::kSeries, "ingest")));
    std::ifstream win(require_artifact(project_, store::kWindows, "window"));
    std::map<WindowId, Window> windows;
    for (auto& w : read_windows(win)) windows.emplace(w.id, std::move(w));

    json views = json::array();
    for (auto wid : chosen) {
      const auto& w = windows.at(wid);
      json channels = json::array();
      for (const auto& spec : config.dataset.channels) {
        const auto it = std::find_if(series.begin(), series.end(), [&](const TimeSeries& s) {
          return s.channel.name == spec.name;
        });
        if (it == series.end()) {
          throw StructuralError("channel '" + spec.name + "' missing from the series store");
        }
        channels.push_back(channel_view(*it, w, config.preprocess));
      }
      views.push_back({{"window_id", wid},
                       {"start_utc", format_iso8601(w.start)},
                       {"end_utc", format_iso8601(w.end())},
                       {"cluster", *cluster == kNoise ? json("noise") : json(*cluster)},
                       {"word", to_string(words.at(wid))},
                       {"channels", std::move(channels)}});
    }
    return ok({{"cluster", *cluster == kNoise ? json("noise") : json(*cluster)},
               {"n", n},
               {"seed", seed},
               {"representatives", std::move(views)}});
  } catch (const MissingArtifactError& e) {
    return fail(503, "missing_store", e.what());
  } catch (const std::out_of_range&) {
    return fail(500, "store_error", "stores disagree on the window set; re-run the pipeline");
  } catch (const Error& e) {
    return fail(500, "store_error", e.what());
  }
}

ApiResponse LabelingApi::post_label(std::string_view id, std::string_view body) {
  if (id == "noise") return fail(400, "invalid_argument", "noise cannot be labeled");
  const auto cluster = parse_cluster_id(id);
  if (!cluster) return fail(404, "unknown_cluster", "no cluster '" + std::string(id) + "'");
  try {
    const auto config = load_snapshot(project_);
    const auto members = members_of(load_assignments(project_), *cluster);
    if (members.empty()) {
      return fail(404, "unknown_cluster", "no cluster '" + std::string(id) + "'");
    }
    LabelRecord record;
    record.cluster = *cluster;
    try {
      const auto j = json::parse(body);
      if (!j.is_object()) throw InvalidArgument("body must be a JSON object");
      for (const auto& [key, value] : j.items()) {
        if (key != "label" && key != "annotator" && key != "reviewed" && key != "note") {
          throw InvalidArgument("unknown field '" + key + "'");
        }
      }
      record.label = j.at("label").get<std::string>();
      record.annotator = j.at("annotator").get<std::string>();
      record.reviewed = j.at("reviewed").get<std::vector<WindowId>>();
      record.note = j.value("note", std::string{});
    } catch (const json::exception& e) {
      return fail(400, "invalid_argument", std::string("malformed body: ") + e.what());
    }
    validate_label_record(record, members, config.annotate.taxonomy);
    record.timestamp = clock_();
    journal_.append(record);
    return ok(json::parse(to_json_line(record)));
  } catch (const InvalidArgument& e) {
    return fail(400, "invalid_argument", e.what());
  } catch (const JournalConflict& e) {
    return fail(409, "conflict", e.what());
  } catch (const MissingArtifactError& e) {
    return fail(503, "missing_store", e.what());
  } catch (const Error& e) {
    return fail(500, "store_error", e.what());
  }
}

ApiResponse LabelingApi::progress() const {
  try {
    const auto rows = load_assignments(project_);
    const auto labels = effective_labels(journal_.records());
    std::set<int> clusters;
    for (const auto& a : rows) {
      if (a.cluster != kNoise) clusters.insert(a.cluster);
    }
    std::size_t labeled = 0;
    for (int c : clusters) labeled += labels.count(c);
    const auto propagated = propagate(rows, labels);
    return ok({{"clusters_total", clusters.size()},
               {"clusters_labeled", labeled},
               {"windows_total", rows.size()},
               {"windows_labeled", propagated.size()}});
  } catch (const MissingArtifactError& e) {
    return fail(503, "missing_store", e.what());
  } catch (const Error& e) {
    return fail(500, "store_error", e.what());
  }
}

struct Server::Impl {
  LabelingApi api;
  ServeOptions options;
  httplib::Server http;
  int port = -1;

  Impl(fs::path project, ServeOptions opts) : api(std::move(project)), options(std::move(opts)) {}
};

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

std::optional<std::string_view> view(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return std::string_view(*s);
}

}  // namespace

Server::Server(fs::path project, ServeOptions options)
    : impl_(std::make_unique<Impl>(std::move(project), std::move(options))) {
  auto& http = impl_->http;
  auto& api = impl_->api;
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                            {"Access-Control-Allow-Headers", "Content-Type"}});
  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  http.Get("/api/clusters", [&api](const httplib::Request&, httplib::Response& res) {
    reply(res, api.clusters());
  });
  http.Get(R"(/api/clusters/([^/]+)/summary)",
           [&api](const httplib::Request& req, httplib::Response& res) {
             reply(res, api.summary(req.matches[1].str()));
           });
  http.Get(R"(/api/clusters/([^/]+)/representatives)",
           [&api](const httplib::Request& req, httplib::Response& res) {
             const std::string id = req.matches[1].str();
             const auto n = param(req, "n");
             const auto seed = param(req, "seed");
             reply(res, api.representatives(id, view(n), view(seed)));
           });
  http.Post(R"(/api/clusters/([^/]+)/label)",
            [&api](const httplib::Request& req, httplib::Response& res) {
              reply(res, api.post_label(req.matches[1].str(), req.body));
            });
  http.Get("/api/progress", [&api](const httplib::Request&, httplib::Response& res) {
    reply(res, api.progress());
  });
  if (impl_->options.static_dir) {
    if (!http.set_mount_point("/", impl_->options.static_dir->string())) {
      throw ConfigError("static directory " + impl_->options.static_dir->string() +
                        " does not exist");
    }
  }
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& i = *impl_;
  if (i.options.port == 0) {
    i.port = i.http.bind_to_any_port(i.options.host);
  } else {
    i.port = i.http.bind_to_port(i.options.host, i.options.port) ? i.options.port : -1;
  }
  if (i.port < 0) {
    throw Error("cannot bind " + i.options.host + ":" + std::to_string(i.options.port));
  }
  return i.port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_) impl_->http.stop();
}

}  // namespace cipher
