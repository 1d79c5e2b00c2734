#include "grf/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "grf/error.hpp"
#include "grf/model_io.hpp"

namespace grf {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delimiter) {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "?";
}

std::string location(const std::string& source, std::size_t line, std::size_t column) {
  return source + ": row " + std::to_string(line) + ", column " + std::to_string(column + 1);
}

}  // namespace

Dataset parse_csv(const std::string& text, const CsvSchema& schema, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::size_t width = 0;

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line, schema.delimiter);
    for (auto& c : cells) c = trim(c);
    if (schema.header && header.empty() && width == 0) {
      header = std::move(cells);
      width = header.size();
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw Error(ErrorCode::kParseError, source + ": row " + std::to_string(line_no) + " has " +
                                              std::to_string(cells.size()) + " cells, expected " +
                                              std::to_string(width));
    }
    rows.push_back(std::move(cells));
    row_lines.push_back(line_no);
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, source + ": no data rows");
  if (width < (schema.has_label ? 2u : 1u)) {
    throw Error(ErrorCode::kParseError, source + ": need at least one feature and a label column");
  }

  std::size_t label_col = schema.has_label ? width - 1 : width;
  if (schema.has_label && schema.label_column) {
    if (const auto* idx = std::get_if<std::size_t>(&*schema.label_column)) {
      label_col = *idx;
    } else {
      const auto& name = std::get<std::string>(*schema.label_column);
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) {
        throw Error(ErrorCode::kInvalidArgument, source + ": no column named '" + name + "'");
      }
      label_col = static_cast<std::size_t>(it - header.begin());
    }
    if (label_col >= width) {
      throw Error(ErrorCode::kInvalidArgument, source + ": label column " + std::to_string(label_col) +
                                                   " out of range (" + std::to_string(width) + " columns)");
    }
  }

  Dataset data;
  data.n_rows = rows.size();
  data.n_features = schema.has_label ? width - 1 : width;
  data.values.reserve(data.n_rows * data.n_features);
  for (std::size_t c = 0; c < width; ++c) {
    if (c == label_col) continue;
    data.feature_names.push_back(header.empty() ? "f" + std::to_string(data.feature_names.size()) : header[c]);
  }

  std::unordered_map<std::string, int> class_ids;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& cell = cells[c];
      if (c == label_col) {
        if (is_missing(cell)) {
          throw Error(ErrorCode::kMissingValue, location(source, row_lines[r], c) + ": missing label");
        }
        auto [it, inserted] = class_ids.try_emplace(cell, static_cast<int>(data.class_names.size()));
        if (inserted) data.class_names.push_back(cell);
        data.labels.push_back(it->second);
        continue;
      }
      if (is_missing(cell)) {
        throw Error(ErrorCode::kMissingValue, location(source, row_lines[r], c) + ": missing value");
      }
      double v = 0.0;
      try {
        v = parse_double(cell[0] == '+' ? std::string_view(cell).substr(1) : std::string_view(cell));
      } catch (const Error&) {
        throw Error(ErrorCode::kParseError,
                    location(source, row_lines[r], c) + ": '" + cell + "' is not a number");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kParseError, location(source, row_lines[r], c) + ": non-finite value");
      }
      data.values.push_back(v);
    }
  }
  data.n_classes = static_cast<int>(data.class_names.size());
  if (schema.has_label && data.n_classes < 2) {
    throw Error(ErrorCode::kSingleClass, source + ": every row has label '" + data.class_names.front() + "'");
  }
  return data;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), schema, path);
}

std::string to_csv(const Dataset& data, char delimiter) {
  std::ostringstream os;
  for (std::size_t f = 0; f < data.n_features; ++f) {
    os << (f < data.feature_names.size() ? data.feature_names[f] : "f" + std::to_string(f)) << delimiter;
  }
  os << "class\n";
  for (std::size_t r = 0; r < data.n_rows; ++r) {
    for (std::size_t f = 0; f < data.n_features; ++f) os << format_double(data.at(r, f)) << delimiter;
    const auto y = static_cast<std::size_t>(data.labels[r]);
    os << (y < data.class_names.size() ? data.class_names[y] : std::to_string(y)) << '\n';
  }
  return os.str();
}

void write_csv(const Dataset& data, const std::string& path, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out << to_csv(data, delimiter);
  if (!out) throw Error(ErrorCode::kIoError, "failed writing '" + path + "'");
}

}  // namespace grf
