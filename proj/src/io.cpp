#include "pcbayes/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace pcbayes::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

struct RawTable {
  std::vector<std::string> column_labels;
  std::vector<std::string> row_labels;
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> line_numbers;
};

RawTable parse_raw(const std::string& text, const std::string& source) {
  RawTable raw;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    auto cells = split_csv_line(line);
    if (header) {
      if (cells.size() < 2) parse_error(source, line_no, "header needs at least one column label");
      raw.column_labels.assign(cells.begin() + 1, cells.end());
      header = false;
      continue;
    }
    if (cells.size() != raw.column_labels.size() + 1) {
      parse_error(source, line_no, "expected " + std::to_string(raw.column_labels.size() + 1) +
                                       " cells, found " + std::to_string(cells.size()));
    }
    raw.row_labels.push_back(cells.front());
    raw.cells.emplace_back(cells.begin() + 1, cells.end());
    raw.line_numbers.push_back(line_no);
  }
  if (header) parse_error(source, line_no, "empty table");
  return raw;
}

}  // namespace

CountTable parse_count_table(const std::string& text, const std::string& source) {
  RawTable raw = parse_raw(text, source);
  CountTable table;
  table.column_labels = std::move(raw.column_labels);
  table.row_labels = std::move(raw.row_labels);
  for (std::size_t r = 0; r < raw.cells.size(); ++r) {
    CountVector row;
    for (const auto& cell : raw.cells[r]) {
      Count value = 0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        parse_error(source, raw.line_numbers[r], "'" + cell + "' is not an integer count");
      }
      if (value < 0) parse_error(source, raw.line_numbers[r], "negative count " + cell);
      row.push_back(value);
    }
    table.counts.push_back(std::move(row));
  }
  table.validate();
  return table;
}

CountTable read_count_table(const std::filesystem::path& path) {
  return parse_count_table(read_text(path), path.string());
}

void write_count_table(std::ostream& out, const CountTable& table) {
  out << "cause";
  for (const auto& label : table.column_labels) out << ',' << label;
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out << table.row_labels[r];
    for (Count c : table.counts[r]) out << ',' << c;
    out << '\n';
  }
}

void write_count_table(const std::filesystem::path& path, const CountTable& table) {
  std::ostringstream out;
  write_count_table(out, table);
  write_text(path, out.str());
}

RealTable parse_real_table(const std::string& text, const std::string& source) {
  RawTable raw = parse_raw(text, source);
  RealTable table;
  table.column_labels = std::move(raw.column_labels);
  table.row_labels = std::move(raw.row_labels);
  for (std::size_t r = 0; r < raw.cells.size(); ++r) {
    std::vector<double> row;
    for (const auto& cell : raw.cells[r]) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size()) {
        parse_error(source, raw.line_numbers[r], "'" + cell + "' is not a number");
      }
      row.push_back(value);
    }
    table.values.push_back(std::move(row));
  }
  return table;
}

RealTable read_real_table(const std::filesystem::path& path) {
  return parse_real_table(read_text(path), path.string());
}

void write_real_table(std::ostream& out, const RealTable& table) {
  out << "cause";
  for (const auto& label : table.column_labels) out << ',' << label;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t r = 0; r < table.values.size(); ++r) {
    out << table.row_labels[r];
    for (double v : table.values[r]) out << ',' << v;
    out << '\n';
  }
}

void write_real_table(const std::filesystem::path& path, const RealTable& table) {
  std::ostringstream out;
  write_real_table(out, table);
  write_text(path, out.str());
}

// ---------------------------------------------------------------------------

AggregationScheme SchemeFile::scheme(SchemeOptions options) const {
  return AggregationScheme::validate(groups, k, options);
}

std::vector<std::string> SchemeFile::category_labels() const {
  if (!labels.empty()) return labels;
  return CategoryScheme::numbered(k).labels();
}

std::optional<ReportingMap> SchemeFile::reporting_map(const AggregationScheme& scheme) const {
  if (!reporting) return std::nullopt;
  return ReportingMap::from_groups(scheme, *reporting);
}

SchemeFile parse_scheme_json(const std::string& text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, source + ": " + e.what());
  }
  SchemeFile file;
  try {
    const auto k = doc.at("k").get<long long>();
    if (k < 2) throw Error(ErrorCode::InvalidArgument, source + ": k must be >= 2");
    file.k = static_cast<std::size_t>(k);
    for (const auto& group : doc.at("groups")) {
      Group g;
      for (const auto& index : group) {
        const auto i = index.get<long long>();
        if (i < 1 || static_cast<std::size_t>(i) > file.k) {
          throw Error(ErrorCode::IndexOutOfRange, source + ": category index " +
                                                      std::to_string(i) + " outside 1.." +
                                                      std::to_string(file.k));
        }
        g.push_back(static_cast<Index>(i - 1));
      }
      file.groups.push_back(std::move(g));
    }
    if (doc.contains("labels")) {
      file.labels = doc.at("labels").get<std::vector<std::string>>();
      CategoryScheme check(file.labels);
      if (check.k() != file.k) {
        throw Error(ErrorCode::DimensionMismatch, source + ": labels must have k entries");
      }
    }
    if (doc.contains("reporting")) {
      std::vector<std::size_t> reporting;
      for (const auto& g : doc.at("reporting")) {
        const auto j = g.get<long long>();
        if (j < 1) throw Error(ErrorCode::IndexOutOfRange, source + ": reporting groups are 1-based");
        reporting.push_back(static_cast<std::size_t>(j - 1));
      }
      file.reporting = std::move(reporting);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, source + ": " + e.what());
  }
  return file;
}

SchemeFile read_scheme_json(const std::filesystem::path& path) {
  return parse_scheme_json(read_text(path), path.string());
}

std::string scheme_to_json(const SchemeFile& file) {
  nlohmann::json doc;
  doc["k"] = file.k;
  doc["groups"] = nlohmann::json::array();
  for (const auto& g : file.groups) {
    nlohmann::json group = nlohmann::json::array();
    for (Index i : g) group.push_back(i + 1);
    doc["groups"].push_back(std::move(group));
  }
  if (!file.labels.empty()) doc["labels"] = file.labels;
  if (file.reporting) {
    nlohmann::json reporting = nlohmann::json::array();
    for (std::size_t j : *file.reporting) reporting.push_back(j + 1);
    doc["reporting"] = std::move(reporting);
  }
  return doc.dump(2) + "\n";
}

void write_scheme_json(const std::filesystem::path& path, const SchemeFile& file) {
  write_text(path, scheme_to_json(file));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
}

}  // namespace pcbayes::io
