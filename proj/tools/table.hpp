#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include "json.hpp"

namespace asep::cli {

// One output cell. Doubles are always written with 17 significant digits.
using Cell = std::variant<std::string, long, double, bool>;

enum class Format { csv, jsonl };

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string num17(double v) { return fmt::format("{:.17g}", v); }

class Table {
 public:
  Table(std::vector<std::string> columns, Format fmt, std::FILE* out) : cols_(std::move(columns)), fmt_(fmt), out_(out) {}

  // key=value pairs written before the rows: a '#' comment line in CSV, a
  // {"header": {...}} object in JSON lines.
  void header(const std::vector<std::pair<std::string, Cell>>& kv) {
    if (fmt_ == Format::csv) {
      std::string line = "#";
      for (const auto& [k, v] : kv) line += " " + k + "=" + text(v);
      std::fprintf(out_, "%s\n", line.c_str());
      std::string names;
      for (std::size_t i = 0; i < cols_.size(); ++i) names += (i ? "," : "") + csv_field(cols_[i]);
      std::fprintf(out_, "%s\n", names.c_str());
    } else {
      std::string obj = "{";
      for (std::size_t i = 0; i < kv.size(); ++i) obj += (i ? "," : "") + json_str(kv[i].first) + ":" + json(kv[i].second);
      std::fprintf(out_, "{\"header\":%s}}\n", obj.c_str());
    }
  }

  void row(const std::vector<Cell>& cells) {
    std::string line;
    if (fmt_ == Format::csv) {
      for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + csv_field(text(cells[i]));
    } else {
      line = "{";
      for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + json_str(cols_[i]) + ":" + json(cells[i]);
      line += "}";
    }
    std::fprintf(out_, "%s\n", line.c_str());
    std::fflush(out_);
  }

 private:
  static std::string json_str(const std::string& s) { return nlohmann::json(s).dump(); }

  static std::string text(const Cell& c) {
    if (auto s = std::get_if<std::string>(&c)) return *s;
    if (auto l = std::get_if<long>(&c)) return std::to_string(*l);
    if (auto b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    return num17(std::get<double>(c));
  }

  static std::string json(const Cell& c) {
    if (auto s = std::get_if<std::string>(&c)) return json_str(*s);
    if (auto d = std::get_if<double>(&c)) {
      // JSON has no inf/nan literals.
      if (*d != *d || *d - *d != 0.0) return "null";
      return num17(*d);
    }
    return text(c);
  }

  std::vector<std::string> cols_;
  Format fmt_;
  std::FILE* out_;
};

}  // namespace asep::cli
