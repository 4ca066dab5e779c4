#include <charconv>
#include <cmath>
#include <ostream>

#include "gms/experiment.hpp"

namespace gms {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

struct CsvCell {
  std::string operator()(double x) const { return format_number(x); }
  std::string operator()(long long x) const { return std::to_string(x); }
  std::string operator()(bool x) const { return x ? "true" : "false"; }
  std::string operator()(const std::string& s) const { return csv_field(s); }
};

struct JsonCell {
  Json operator()(double x) const { return std::isfinite(x) ? Json(x) : Json(nullptr); }
  Json operator()(long long x) const { return Json(x); }
  Json operator()(bool x) const { return Json(x); }
  Json operator()(const std::string& s) const { return Json(s); }
};

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << csv_field(table.columns[i]);
  out << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << std::visit(CsvCell{}, row[i]);
    out << "\r\n";
  }
}

void write_json(const RunRecord& record, std::ostream& out, bool with_timing) {
  Json j;
  j["version"] = record.version;
  j["command"] = record.command;
  j["config"] = record.config;
  j["columns"] = record.payload.columns;
  Json rows = Json::array();
  for (const auto& row : record.payload.rows) {
    Json r = Json::array();
    for (const auto& cell : row) r.push_back(std::visit(JsonCell{}, cell));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  if (with_timing) j["wallSeconds"] = record.wallSeconds;
  out << j.dump(2) << "\n";
}

}  // namespace gms
