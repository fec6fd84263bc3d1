#include "cipher/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "cipher/annotate.hpp"
#include "cipher/cluster.hpp"
#include "cipher/error.hpp"
#include "cipher/isax_index.hpp"
#include "cipher/label_journal.hpp"
#include "cipher/preprocess.hpp"
#include "cipher/stores.hpp"
#include "cipher/symbolic.hpp"
#include "cipher/timeutil.hpp"

namespace cipher {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 7> kStageNames{{
    {Stage::kIngest, "ingest"},
    {Stage::kWindow, "window"},
    {Stage::kPreprocess, "preprocess"},
    {Stage::kIndex, "index"},
    {Stage::kCluster, "cluster"},
    {Stage::kSummarize, "summarize"},
    {Stage::kExport, "export"},
}};

void log(const StageOptions& o, const std::string& msg) {
  if (o.log) *o.log << msg << '\n';
}

std::string to_text(auto&& writer) {
  std::ostringstream ss;
  writer(ss);
  return ss.str();
}

std::vector<TimeSeries> load_series(const fs::path& project) {
  return decode_series(read_file(require_artifact(project, store::kSeries, "ingest")));
}

std::vector<Window> load_windows(const fs::path& project) {
  std::ifstream in(require_artifact(project, store::kWindows, "window"));
  return read_windows(in);
}

std::vector<PreprocessedRecord> load_preprocessed(const fs::path& project) {
  return decode_preprocessed(
      read_file(require_artifact(project, store::kPreprocessed, "preprocess")));
}

std::vector<ClusterAssignment> load_assignments(const fs::path& project) {
  std::ifstream in(require_artifact(project, store::kAssignments, "cluster"));
  return read_assignments(in);
}

const TimeSeries& find_channel(const std::vector<TimeSeries>& series, const std::string& name) {
  for (const auto& s : series) {
    if (s.channel.name == name) return s;
  }
  throw ConfigError("channel '" + name + "' not present in the series store; re-run ingest");
}

void ingest(const PipelineConfig& cfg, const fs::path& project, const StageOptions& o) {
  const auto series = load_dataset(cfg.dataset);
  write_file_atomic(project / store::kSeries, encode_series(series));
  log(o, "ingest: " + std::to_string(series.size()) + " channels, " +
             std::to_string(series.empty() ? 0 : series.front().size()) + " samples");
}

void window(const PipelineConfig& cfg, const fs::path& project, const StageOptions& o) {
  const auto series = load_series(project);
  const auto& primary = find_channel(series, cfg.window.channel);
  const auto windows = segment(primary, cfg.window.chunk_seconds, cfg.window.stride_seconds,
                               cfg.window.max_missing);
  write_file_atomic(project / store::kWindows,
                    to_text([&](std::ostream& out) { write_windows(out, windows); }));
  log(o, "window: " + std::to_string(windows.size()) + " windows of " +
             std::to_string(cfg.chunk_samples()) + " samples");
}

void preprocess_stage(const PipelineConfig& cfg, const fs::path& project,
                      const StageOptions& o) {
  const auto series = load_series(project);
  const auto windows = load_windows(project);
  const auto& primary = find_channel(series, cfg.window.channel);
  std::vector<PreprocessedRecord> records;
  records.reserve(windows.size());
  std::size_t flat = 0;
  for (const auto& w : windows) {
    auto result = preprocess(fill_gaps(primary, w), cfg.preprocess);
    flat += result.steps.flat ? 1 : 0;
    records.push_back(PreprocessedRecord{w.id, result.steps, std::move(result.values)});
  }
  write_file_atomic(project / store::kPreprocessed, encode_preprocessed(records));
  log(o, "preprocess: " + std::to_string(records.size()) + " windows (" +
             std::to_string(flat) + " flat)");
}

void index_stage(const PipelineConfig& cfg, const fs::path& project, const StageOptions& o) {
  const auto records = load_preprocessed(project);
  IsaxIndex index(cfg.symbolic.index);
  for (const auto& r : records) index.insert(r.id, paa(r.values, cfg.symbolic.index.word_size));
  write_file_atomic(project / store::kIndex,
                    to_text([&](std::ostream& out) { index.save(out); }));
  log(o, "index: " + std::to_string(index.size()) + " entries, deepest level " +
             std::to_string(index.max_level()));
}

void cluster_stage(const PipelineConfig& cfg, const fs::path& project, const StageOptions& o) {
  std::ifstream in(require_artifact(project, store::kIndex, "index"));
  const auto index = IsaxIndex::load(in);
  const auto words = index.level_words(cfg.cluster.level);

  std::vector<WindowId> ids;
  ids.reserve(words.size());
  for (const auto& [id, word] : words) ids.push_back(id);

  DistanceMatrix distances;
  if (cfg.cluster.params.metric == Metric::kEuclidean) {
    std::vector<std::vector<double>> points;
    points.reserve(words.size());
    for (const auto& [id, word] : words) {
      points.push_back(word_midpoints(word, cfg.symbolic.edge_margin));
    }
    distances = DistanceMatrix::euclidean(std::move(points));
  } else {
    std::vector<IsaxWord> plain;
    plain.reserve(words.size());
    for (const auto& [id, word] : words) plain.push_back(word);
    distances = DistanceMatrix::mindist(std::move(plain), cfg.chunk_samples());
  }
  CondensedTree tree;
  const auto assignments = cluster_windows(ids, distances, cfg.cluster.params, &tree);

  write_file_atomic(project / store::kWords,
                    to_text([&](std::ostream& out) { write_words(out, words); }));
  write_file_atomic(project / store::kAssignments,
                    to_text([&](std::ostream& out) { write_assignments(out, assignments); }));
  write_file_atomic(project / store::kCondensedTree, tree.to_json() + "\n");

  int clusters = 0;
  std::size_t noise = 0;
  for (const auto& a : assignments) {
    clusters = std::max(clusters, a.cluster + 1);
    noise += a.cluster == kNoise ? 1 : 0;
  }
  log(o, "cluster: " + std::to_string(clusters) + " clusters, " + std::to_string(noise) +
             " noise windows (level " + std::to_string(cfg.cluster.level) + ")");
}

void summarize_stage(const PipelineConfig&, const fs::path& project, const StageOptions& o) {
  const auto records = load_preprocessed(project);
  const auto assignments = load_assignments(project);
  std::ifstream win(require_artifact(project, store::kWords, "cluster"));
  const auto words = read_words(win);

  std::map<WindowId, const PreprocessedRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::map<WindowId, const IsaxWord*> word_of;
  for (const auto& [id, w] : words) word_of[id] = &w;

  std::map<int, std::pair<std::vector<std::vector<double>>, std::vector<IsaxWord>>> members;
  for (const auto& a : assignments) {
    if (a.cluster == kNoise) continue;
    const auto rec = by_id.find(a.window);
    const auto wd = word_of.find(a.window);
    if (rec == by_id.end() || wd == word_of.end()) {
      throw StructuralError("window " + std::to_string(a.window) +
                            " assigned but absent from the preprocessed or word store");
    }
    members[a.cluster].first.push_back(rec->second->values);
    members[a.cluster].second.push_back(*wd->second);
  }
  std::vector<ClusterSummary> summaries;
  for (auto& [cluster, m] : members) {
    auto s = summarize(m.first, m.second);
    s.cluster = cluster;
    summaries.push_back(std::move(s));
  }
  write_file_atomic(project / store::kSummaries, summaries_to_json(summaries));
  log(o, "summarize: " + std::to_string(summaries.size()) + " cluster summaries");
}

void export_stage(const PipelineConfig&, const fs::path& project, const StageOptions& o) {
  const auto windows = load_windows(project);
  const auto assignments = load_assignments(project);
  const LabelJournal journal(project / store::kLabels);
  const auto records = journal.records();
  const auto propagated = propagate(assignments, effective_labels(records));

  std::map<WindowId, Window> by_id;
  for (const auto& w : windows) by_id.emplace(w.id, w);
  const auto rows = build_catalog(propagated, by_id);
  write_file_atomic(project / store::kCatalog,
                    to_text([&](std::ostream& out) { write_catalog(out, rows); }));
  log(o, "export: " + std::to_string(rows.size()) + " catalog rows");
}

}  // namespace

std::string_view to_string(Stage s) {
  for (const auto& [stage, name] : kStageNames) {
    if (stage == s) return name;
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  for (const auto& [stage, n] : kStageNames) {
    if (n == name) return stage;
  }
  throw ConfigError("unknown stage '" + std::string(name) + "'");
}

void run_stage(Stage stage, const PipelineConfig& config, const fs::path& project,
               const StageOptions& options) {
  config.validate();
  fs::create_directories(project);
  write_file_atomic(project / store::kConfig, to_yaml(config));
  switch (stage) {
    case Stage::kIngest: return ingest(config, project, options);
    case Stage::kWindow: return window(config, project, options);
    case Stage::kPreprocess: return preprocess_stage(config, project, options);
    case Stage::kIndex: return index_stage(config, project, options);
    case Stage::kCluster: return cluster_stage(config, project, options);
    case Stage::kSummarize: return summarize_stage(config, project, options);
    case Stage::kExport: return export_stage(config, project, options);
  }
}

void run_pipeline(const PipelineConfig& config, const fs::path& project,
                  const StageOptions& options) {
  for (Stage s : {Stage::kIngest, Stage::kWindow, Stage::kPreprocess, Stage::kIndex,
                  Stage::kCluster, Stage::kSummarize}) {
    run_stage(s, config, project, options);
  }
}

PipelineConfig resolve_config(const std::optional<fs::path>& config_path,
                              const fs::path& project) {
  if (config_path) return load_config(*config_path);
  const auto snapshot = project / store::kConfig;
  if (!fs::exists(snapshot)) {
    throw ConfigError("no --config given and no " + snapshot.string() + " snapshot");
  }
  return load_config(snapshot);
}

std::vector<TimeSeries> merge_series(const std::vector<std::vector<TimeSeries>>& parts) {
  std::vector<const std::vector<TimeSeries>*> nonempty;
  for (const auto& p : parts) {
    if (!p.empty() && !p.front().values.empty()) nonempty.push_back(&p);
  }
  if (nonempty.empty()) return parts.empty() ? std::vector<TimeSeries>{} : parts.front();
  if (nonempty.size() == 1) return *nonempty.front();

  const auto& first = *nonempty.front();
  const std::int64_t cadence = first.front().cadence;
  UtcSeconds start = first.front().start;
  UtcSeconds end = start;
  for (const auto* p : nonempty) {
    const auto& s = p->front();
    if (s.cadence != cadence || p->size() != first.size()) {
      throw StructuralError("dataset files disagree on cadence or channels");
    }
    if ((s.start - start) % cadence != 0) {
      throw StructuralError("dataset files are not on a common time grid");
    }
    start = std::min(start, s.start);
    end = std::max(end, s.time_at(s.size() - 1));
  }
  const auto length = static_cast<std::size_t>((end - start) / cadence) + 1;

  std::vector<TimeSeries> out(first.size());
  std::vector<std::uint8_t> covered(length, 0);
  for (std::size_t c = 0; c < first.size(); ++c) {
    out[c].channel = first[c].channel;
    out[c].start = start;
    out[c].cadence = cadence;
    out[c].values.assign(length, std::nan(""));
    out[c].missing.assign(length, 1);
  }
  for (const auto* p : nonempty) {
    const auto base = static_cast<std::size_t>(((*p)[0].start - start) / cadence);
    for (std::size_t i = 0; i < (*p)[0].size(); ++i) {
      if (covered[base + i]) {
        throw StructuralError("dataset files overlap at " +
                              format_iso8601((*p)[0].time_at(i)));
      }
      covered[base + i] = 1;
    }
    for (std::size_t c = 0; c < p->size(); ++c) {
      const auto& s = (*p)[c];
      std::copy(s.values.begin(), s.values.end(), out[c].values.begin() + base);
      std::copy(s.missing.begin(), s.missing.end(), out[c].missing.begin() + base);
    }
  }
  return out;
}

std::vector<TimeSeries> load_dataset(const DatasetConfig& dataset) {
  if (dataset.paths.empty()) throw ConfigError("dataset.paths: no input files configured");
  std::vector<std::vector<TimeSeries>> parts;
  for (const auto& path : dataset.paths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("dataset.paths: cannot open " + path.string());
    try {
      parts.push_back(parse_table(in, dataset.channels, dataset.cadence_seconds));
    } catch (const ParseError& e) {
      std::string msg = e.what();
      const auto prefix = "line " + std::to_string(e.line()) + ": ";
      if (msg.starts_with(prefix)) msg.erase(0, prefix.size());
      throw ParseError(e.line(), path.filename().string() + ": " + msg);
    }
  }
  return merge_series(parts);
}

}  // namespace cipher
