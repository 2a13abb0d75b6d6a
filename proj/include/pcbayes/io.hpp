#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pcbayes/core.hpp"
#include "pcbayes/reconcile.hpp"

namespace pcbayes::io {

// Tables are CSV: the header holds a corner cell ("cause") and the column
// labels, and every later line is a row label followed by integer cells.

CountTable parse_count_table(const std::string& text, const std::string& source = "<string>");
CountTable read_count_table(const std::filesystem::path& path);
void write_count_table(std::ostream& out, const CountTable& table);
void write_count_table(const std::filesystem::path& path, const CountTable& table);

/// Same layout with real-valued cells, printed with 17 significant digits so
/// that reading back is lossless.
struct RealTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<std::vector<double>> values;
};

RealTable parse_real_table(const std::string& text, const std::string& source = "<string>");
RealTable read_real_table(const std::filesystem::path& path);
void write_real_table(std::ostream& out, const RealTable& table);
void write_real_table(const std::filesystem::path& path, const RealTable& table);

/// Scheme file: {"k": 6, "groups": [[1,2],[3,4],[5,6]], "labels": [...],
/// "reporting": [...]}. Indices are 1-based on disk and 0-based in memory;
/// "labels" and "reporting" (one 1-based group per category) are optional.
struct SchemeFile {
  std::size_t k = 0;
  std::vector<Group> groups;  // as declared, 0-based
  std::vector<std::string> labels;
  std::optional<std::vector<std::size_t>> reporting;  // 0-based group per category

  AggregationScheme scheme(SchemeOptions options = {}) const;
  /// Labels if given, otherwise "1".."k".
  std::vector<std::string> category_labels() const;
  std::optional<ReportingMap> reporting_map(const AggregationScheme& scheme) const;
};

SchemeFile parse_scheme_json(const std::string& text, const std::string& source = "<string>");
SchemeFile read_scheme_json(const std::filesystem::path& path);
std::string scheme_to_json(const SchemeFile& file);
void write_scheme_json(const std::filesystem::path& path, const SchemeFile& file);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace pcbayes::io
