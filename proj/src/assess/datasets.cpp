#include "surrogate/assess/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace surrogate {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s.empty() ? "none" : s;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

template <typename T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, bool>) return *v ? "1" : "0";
  else if constexpr (std::is_same_v<T, double>) return num(*v);
  else return std::to_string(*v);
}

std::string quote(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string q = "\"";
  for (char c : f) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string_view to_string(Dataset d) {
  switch (d) {
    case Dataset::s1: return "S1";
    case Dataset::s2: return "S2";
    case Dataset::s3: return "S3";
  }
  return "S1";
}

const std::vector<std::string>& columns(Dataset d) {
  static const std::vector<std::string> s1 = {"participant",       "arat_without",     "arat_with",
                                              "arat_improvement",  "selfcare_success", "selfcare_time_s",
                                              "fitts_throughput_bps"};
  static const std::vector<std::string> s2 = {"participant", "side",      "item",      "subscale", "feasible",
                                              "completed",   "partial",   "elapsed_s", "score"};
  static const std::vector<std::string> s3 = {"session", "level",      "task",     "parent",
                                              "start_s", "end_s",      "duration_s", "commands"};
  switch (d) {
    case Dataset::s1: return s1;
    case Dataset::s2: return s2;
    case Dataset::s3: return s3;
  }
  return s1;
}

SchemaMismatch::SchemaMismatch(std::vector<std::string> missing, std::vector<std::string> unexpected)
    : std::runtime_error("column mismatch: missing [" + join(missing) + "], unexpected [" + join(unexpected) + "]"),
      missing_(std::move(missing)),
      unexpected_(std::move(unexpected)) {}

void check_columns(Dataset d, const std::vector<std::string>& header) {
  const auto& want = columns(d);
  if (header == want) return;
  std::vector<std::string> missing, unexpected;
  for (const auto& c : want)
    if (std::find(header.begin(), header.end(), c) == header.end()) missing.push_back(c);
  for (const auto& c : header)
    if (std::find(want.begin(), want.end(), c) == want.end()) unexpected.push_back(c);
  if (missing.empty() && unexpected.empty()) unexpected.push_back("(same columns, different order)");
  throw SchemaMismatch(std::move(missing), std::move(unexpected));
}

std::vector<CsvRow> s1_rows(const std::vector<ParticipantRow>& ps) {
  std::vector<CsvRow> rows;
  for (const auto& p : ps) {
    std::optional<int> improvement;
    if (p.arat_with && p.arat_without) improvement = *p.arat_with - *p.arat_without;
    rows.push_back({p.participant, opt(p.arat_without), opt(p.arat_with), opt(improvement), opt(p.selfcare_success),
                    opt(p.selfcare_seconds), opt(p.fitts_throughput)});
  }
  return rows;
}

std::vector<CsvRow> s2_rows(const std::string& participant, const AratScoreSheet& sheet) {
  std::vector<CsvRow> rows;
  for (const auto& r : sheet.rows)
    rows.push_back({participant, std::string(to_string(sheet.side)), r.item.id, std::string(to_string(r.item.subscale)),
                    r.item.feasible ? "1" : "0", r.outcome.completed ? "1" : "0", r.outcome.partial ? "1" : "0",
                    num(r.outcome.elapsed), std::to_string(r.score)});
  return rows;
}

std::vector<CsvRow> s3_rows(const std::string& session, const Rollup& rollup) {
  std::vector<CsvRow> rows;
  for (const auto& t : rollup.tasks)
    rows.push_back({session, std::to_string(t.level), t.name, t.parent, num(t.start), num(t.end), num(t.duration),
                    std::to_string(t.stats.commands)});
  return rows;
}

void write_csv(std::ostream& out, Dataset d, const std::vector<CsvRow>& rows) {
  const auto& cols = columns(d);
  const auto line = [&](const CsvRow& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << quote(r[i]);
    out << "\n";
  };
  line(cols);
  for (const auto& r : rows) {
    if (r.size() != cols.size())
      throw std::invalid_argument(std::string(to_string(d)) + " row has " + std::to_string(r.size()) + " fields, expected " +
                                  std::to_string(cols.size()));
    line(r);
  }
}

void write_csv(const std::filesystem::path& path, Dataset d, const std::vector<CsvRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, d, rows);
}

std::vector<CsvRow> read_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CsvRow> read_dataset(const std::filesystem::path& path, Dataset d) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  auto rows = read_csv(in);
  if (rows.empty()) throw SchemaMismatch(columns(d), {});
  check_columns(d, rows.front());
  rows.erase(rows.begin());
  return rows;
}

}  // namespace surrogate
