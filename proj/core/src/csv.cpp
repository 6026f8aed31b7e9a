// CSV ingestion for zero-shot datasets: features.csv (instance_id, x...),
// side.csv (target_id, s...), targets.csv (instance_id, target_id, value).
// UTF-8, comma separated, '.' decimal point, header row first.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/os.h>

#include "zsreg/dataset.hpp"
#include "zsreg/error.hpp"

namespace zsreg {

namespace {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Returns the header (line 1) and the non-empty data rows.
std::pair<CsvRow, std::vector<CsvRow>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  const std::string name = path.string();
  if (!in) throw LoadError(name, 0, "cannot open file");
  std::string line;
  std::size_t line_no = 0;
  CsvRow header;
  std::vector<CsvRow> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    CsvRow row{line_no, {}};
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      const std::string_view field =
          trim(view.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      row.fields.emplace_back(field);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!have_header) {
      header = std::move(row);
      have_header = true;
    } else {
      rows.push_back(std::move(row));
    }
  }
  if (!have_header) throw LoadError(name, 0, "missing header row");
  return {std::move(header), std::move(rows)};
}

double parse_number(const std::string& text, const std::string& file, std::size_t line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last)
    throw LoadError(file, line, "non-numeric cell '" + text + "'");
  if (!std::isfinite(value)) throw LoadError(file, line, "non-finite cell '" + text + "'");
  return value;
}

struct Table {
  Matrix values;
  std::vector<std::string> ids;
  std::vector<std::size_t> lines;
};

Table read_matrix(const std::filesystem::path& path, const char* id_kind) {
  const std::string name = path.string();
  auto [header, rows] = read_csv(path);
  if (header.fields.empty() || header.fields.front().empty())
    throw LoadError(name, header.line, std::string("header must start with ") + id_kind);
  const std::size_t width = header.fields.size();
  Table t;
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  std::set<std::string> seen;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.fields.size() != width)
      throw LoadError(name, row.line,
                      fmt::format("ragged row: expected {} fields, found {}", width, row.fields.size()));
    const std::string& id = row.fields.front();
    if (id.empty()) throw LoadError(name, row.line, std::string("empty ") + id_kind);
    if (!seen.insert(id).second) throw LoadError(name, row.line, std::string("duplicate ") + id_kind + " '" + id + "'");
    for (std::size_t j = 1; j < width; ++j)
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j - 1)) =
          parse_number(row.fields[j], name, row.line);
    t.ids.push_back(id);
    t.lines.push_back(row.line);
  }
  return t;
}

}  // namespace

CsvPaths CsvPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "features.csv", dir / "side.csv", dir / "targets.csv"};
}

ZeroShotDataset load_csv(const CsvPaths& paths, DatasetOptions options) {
  Table features = read_matrix(paths.features, "instance_id");
  Table side = read_matrix(paths.side, "target_id");

  std::unordered_map<std::string, std::size_t> instance_of;
  for (std::size_t i = 0; i < features.ids.size(); ++i) instance_of.emplace(features.ids[i], i);
  std::unordered_map<std::string, std::size_t> target_of;
  for (std::size_t t = 0; t < side.ids.size(); ++t) target_of.emplace(side.ids[t], t);

  const std::string yname = paths.targets.string();
  auto [header, rows] = read_csv(paths.targets);
  if (header.fields.size() != 3)
    throw LoadError(yname, header.line, "expected header instance_id,target_id,value");

  std::vector<Cell> cells;
  cells.reserve(rows.size());
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::size_t> counts(side.ids.size(), 0);
  for (const CsvRow& row : rows) {
    if (row.fields.size() != 3)
      throw LoadError(yname, row.line, fmt::format("ragged row: expected 3 fields, found {}", row.fields.size()));
    const auto inst = instance_of.find(row.fields[0]);
    if (inst == instance_of.end()) throw LoadError(yname, row.line, "unknown instance '" + row.fields[0] + "'");
    const auto tgt = target_of.find(row.fields[1]);
    if (tgt == target_of.end()) throw LoadError(yname, row.line, "unknown target '" + row.fields[1] + "'");
    if (!seen.emplace(inst->second, tgt->second).second)
      throw LoadError(yname, row.line, "duplicate (instance, target) pair");
    cells.push_back({inst->second, tgt->second, parse_number(row.fields[2], yname, row.line)});
    ++counts[tgt->second];
  }
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t] == 0)
      throw LoadError(paths.side.string(), side.lines[t], "target '" + side.ids[t] + "' has no instances");
  }
  if (!options.allow_duplicate_side) {
    std::map<std::vector<double>, std::size_t> rows_seen;
    for (Eigen::Index t = 0; t < side.values.rows(); ++t) {
      std::vector<double> key(static_cast<std::size_t>(side.values.cols()));
      for (Eigen::Index j = 0; j < side.values.cols(); ++j) key[static_cast<std::size_t>(j)] = side.values(t, j);
      const auto [it, inserted] = rows_seen.emplace(std::move(key), static_cast<std::size_t>(t));
      if (!inserted)
        throw LoadError(paths.side.string(), side.lines[static_cast<std::size_t>(t)],
                        "side information identical to target '" + side.ids[it->second] + "'");
    }
  }

  return ZeroShotDataset(std::move(features.values), std::move(side.values), std::move(cells),
                         std::move(features.ids), std::move(side.ids), options);
}

void save_csv(const ZeroShotDataset& dataset, const CsvPaths& paths) {
  auto write_matrix = [](const std::filesystem::path& path, const char* id_col, char prefix,
                         const Matrix& m, const std::vector<std::string>& ids) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto out = fmt::output_file(path.string());
    out.print("{}", id_col);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.print(",{}{}", prefix, j + 1);
    out.print("\n");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out.print("{}", ids[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < m.cols(); ++j) out.print(",{}", m(i, j));
      out.print("\n");
    }
  };
  write_matrix(paths.features, "instance_id", 'x', dataset.features(), dataset.instance_ids());
  write_matrix(paths.side, "target_id", 's', dataset.side(), dataset.target_ids());

  if (paths.targets.has_parent_path()) std::filesystem::create_directories(paths.targets.parent_path());
  auto out = fmt::output_file(paths.targets.string());
  out.print("instance_id,target_id,value\n");
  for (const Cell& c : dataset.cells())
    out.print("{},{},{}\n", dataset.instance_ids()[c.instance], dataset.target_ids()[c.target], c.value);
}

}  // namespace zsreg
