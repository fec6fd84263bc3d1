#include "cipher/stores.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cipher {

using nlohmann::json;

std::filesystem::path require_artifact(const std::filesystem::path& project,
                                       const char* name, const char* stage) {
  auto path = project / name;
  if (!std::filesystem::exists(path)) throw MissingArtifactError(name, stage);
  return path;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

// Little-endian fixed-width fields (the host order on every supported target).
class ByteWriter {
 public:
  template <class T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void put_raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::string& bytes) : bytes_(bytes) {}
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void get_raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw StructuralError("truncated binary store");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

constexpr char kSeriesMagic[8] = {'C', 'I', 'P', 'H', 'S', 'E', 'R', '1'};
constexpr char kPreMagic[8] = {'C', 'I', 'P', 'H', 'P', 'R', 'E', '1'};

void check_magic(ByteReader& r, const char (&magic)[8], const char* what) {
  char buf[8];
  r.get_raw(buf, 8);
  if (std::memcmp(buf, magic, 8) != 0) {
    throw StructuralError(std::string("not a ") + what + " store (bad magic)");
  }
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_simple(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

template <class Fn>
void for_each_row(std::istream& in, const char* header, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != header) throw ParseError(1, std::string("expected header '") + header + "'");
      continue;
    }
    if (line.empty()) continue;
    try {
      fn(split_simple(line));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
}

}  // namespace

std::string encode_series(const std::vector<TimeSeries>& series) {
  ByteWriter w;
  w.put_raw(kSeriesMagic, 8);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(series.size()));
  for (const auto& s : series) {
    w.put_string(s.channel.name);
    w.put_string(s.channel.unit);
    w.put<std::uint64_t>(s.channel.column);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.channel.fill_values.size()));
    for (double f : s.channel.fill_values) w.put<double>(f);
    w.put<std::int64_t>(s.start);
    w.put<std::int64_t>(s.cadence);
    w.put<std::uint64_t>(s.values.size());
    w.put_raw(s.values.data(), s.values.size() * sizeof(double));
    w.put_raw(s.missing.data(), s.missing.size());
  }
  return w.take();
}

std::vector<TimeSeries> decode_series(const std::string& bytes) {
  ByteReader r(bytes);
  check_magic(r, kSeriesMagic, "series");
  const auto count = r.get<std::uint32_t>();
  std::vector<TimeSeries> out(count);
  for (auto& s : out) {
    s.channel.name = r.get_string();
    s.channel.unit = r.get_string();
    s.channel.column = r.get<std::uint64_t>();
    s.channel.fill_values.resize(r.get<std::uint32_t>());
    for (auto& f : s.channel.fill_values) f = r.get<double>();
    s.start = r.get<std::int64_t>();
    s.cadence = r.get<std::int64_t>();
    const auto n = r.get<std::uint64_t>();
    s.values.resize(n);
    s.missing.resize(n);
    r.get_raw(s.values.data(), n * sizeof(double));
    r.get_raw(s.missing.data(), n);
  }
  if (!r.done()) throw StructuralError("trailing bytes in series store");
  return out;
}

namespace {
constexpr const char* kWindowsHeader =
    "window_id,channel,start_utc,cadence,offset,length,missing_fraction";
constexpr const char* kWordsHeader = "window_id,word";
constexpr const char* kAssignmentsHeader = "window_id,cluster,pass,membership_strength";
}  // namespace

void write_windows(std::ostream& out, const std::vector<Window>& windows) {
  out << kWindowsHeader << '\n';
  for (const auto& w : windows) {
    out << w.id << ',' << w.channel << ',' << format_iso8601(w.start) << ',' << w.cadence
        << ',' << w.offset << ',' << w.length << ',' << fmt_double(w.missing_fraction) << '\n';
  }
}

std::vector<Window> read_windows(std::istream& in) {
  std::vector<Window> out;
  for_each_row(in, kWindowsHeader, [&](const std::vector<std::string>& f) {
    if (f.size() != 7) throw std::runtime_error("expected 7 fields");
    Window w;
    w.id = std::stoull(f[0]);
    w.channel = f[1];
    w.start = parse_iso8601(f[2]);
    w.cadence = std::stoll(f[3]);
    w.offset = std::stoull(f[4]);
    w.length = std::stoull(f[5]);
    w.missing_fraction = std::stod(f[6]);
    out.push_back(std::move(w));
  });
  return out;
}

std::string encode_preprocessed(const std::vector<PreprocessedRecord>& records) {
  ByteWriter w;
  w.put_raw(kPreMagic, 8);
  w.put<std::uint64_t>(records.size());
  for (const auto& r : records) {
    w.put<std::uint64_t>(r.id);
    const std::uint8_t flags = (r.steps.detrended ? 1 : 0) | (r.steps.smoothed ? 2 : 0) |
                               (r.steps.normalized ? 4 : 0) | (r.steps.flat ? 8 : 0);
    w.put<std::uint8_t>(flags);
    w.put<std::uint64_t>(r.values.size());
    w.put_raw(r.values.data(), r.values.size() * sizeof(double));
  }
  return w.take();
}

std::vector<PreprocessedRecord> decode_preprocessed(const std::string& bytes) {
  ByteReader r(bytes);
  check_magic(r, kPreMagic, "preprocessed");
  std::vector<PreprocessedRecord> out(r.get<std::uint64_t>());
  for (auto& rec : out) {
    rec.id = r.get<std::uint64_t>();
    const auto flags = r.get<std::uint8_t>();
    rec.steps = PreprocessSteps{(flags & 1) != 0, (flags & 2) != 0, (flags & 4) != 0,
                                (flags & 8) != 0};
    rec.values.resize(r.get<std::uint64_t>());
    r.get_raw(rec.values.data(), rec.values.size() * sizeof(double));
  }
  if (!r.done()) throw StructuralError("trailing bytes in preprocessed store");
  return out;
}

void write_words(std::ostream& out, const std::vector<std::pair<WindowId, IsaxWord>>& words) {
  out << kWordsHeader << '\n';
  // Symbols are comma separated inside the word, so the word is quoted.
  for (const auto& [id, word] : words) out << id << ",\"" << to_string(word) << "\"\n";
}

std::vector<std::pair<WindowId, IsaxWord>> read_words(std::istream& in) {
  std::vector<std::pair<WindowId, IsaxWord>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kWordsHeader) throw ParseError(1, "unexpected words header");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.size() < comma + 3 || line[comma + 1] != '"' ||
        line.back() != '"') {
      throw ParseError(line_no, "malformed word row");
    }
    try {
      out.emplace_back(std::stoull(line.substr(0, comma)),
                       parse_word(line.substr(comma + 2, line.size() - comma - 3)));
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

void write_assignments(std::ostream& out, const std::vector<ClusterAssignment>& rows) {
  out << kAssignmentsHeader << '\n';
  for (const auto& a : rows) {
    out << a.window << ',';
    if (a.cluster == kNoise) {
      out << "noise";
    } else {
      out << a.cluster;
    }
    out << ',' << to_string(a.pass) << ',' << fmt_double(a.membership_strength) << '\n';
  }
}

std::vector<ClusterAssignment> read_assignments(std::istream& in) {
  std::vector<ClusterAssignment> out;
  for_each_row(in, kAssignmentsHeader, [&](const std::vector<std::string>& f) {
    if (f.size() != 4) throw std::runtime_error("expected 4 fields");
    ClusterAssignment a;
    a.window = std::stoull(f[0]);
    a.cluster = f[1] == "noise" ? kNoise : std::stoi(f[1]);
    a.pass = parse_pass(f[2]);
    a.membership_strength = std::stod(f[3]);
    out.push_back(a);
  });
  return out;
}

namespace {

json summary_json(const ClusterSummary& s) {
  json hist = json::object();
  for (const auto& [word, count] : s.word_histogram) hist[word] = count;
  return json{{"cluster", s.cluster},       {"member_count", s.member_count},
              {"mean_curve", s.mean_curve}, {"lo_curve", s.lo_curve},
              {"hi_curve", s.hi_curve},     {"word_histogram", hist}};
}

}  // namespace

std::string summary_to_json(const ClusterSummary& summary) {
  return summary_json(summary).dump();
}

std::string summaries_to_json(const std::vector<ClusterSummary>& summaries) {
  json arr = json::array();
  for (const auto& s : summaries) arr.push_back(summary_json(s));
  return json{{"schema_version", 1}, {"clusters", arr}}.dump() + "\n";
}

std::vector<ClusterSummary> summaries_from_json(const std::string& text) {
  std::vector<ClusterSummary> out;
  try {
    const auto doc = json::parse(text);
    if (doc.at("schema_version").get<int>() != 1) {
      throw StructuralError("unsupported summaries schema_version");
    }
    for (const auto& j : doc.at("clusters")) {
      ClusterSummary s;
      s.cluster = j.at("cluster").get<int>();
      s.member_count = j.at("member_count").get<std::size_t>();
      s.mean_curve = j.at("mean_curve").get<std::vector<double>>();
      s.lo_curve = j.at("lo_curve").get<std::vector<double>>();
      s.hi_curve = j.at("hi_curve").get<std::vector<double>>();
      for (const auto& [word, count] : j.at("word_histogram").items()) {
        s.word_histogram[word] = count.get<std::size_t>();
      }
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed summaries store: ") + e.what());
  }
  return out;
}

}  // namespace cipher
