#include "philab/csv.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

#include "philab/errors.hpp"

namespace philab {

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += quote(fields[i]);
  }
  out += '\n';
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // fmt is locale independent, so the decimal point is always '.'.
  return fmt::format("{:.17g}", v);
}

CsvTable::CsvTable(std::string file_name, std::vector<std::string> header)
    : file_name_(std::move(file_name)), header_(std::move(header)) {}

CsvTable::Row& CsvTable::Row::add(double v) {
  fields_.push_back(format_real(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::add(long v) {
  fields_.push_back(std::to_string(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::add(bool v) {
  fields_.push_back(v ? "true" : "false");
  return *this;
}

CsvTable::Row& CsvTable::Row::add(const std::string& v) {
  fields_.push_back(v);
  return *this;
}

void CsvTable::Row::done() {
  if (fields_.size() != table_.header_.size()) {
    throw DomainError(fmt::format("{}: row has {} fields, header has {}", table_.file_name_,
                                  fields_.size(), table_.header_.size()));
  }
  table_.rows_.push_back(std::move(fields_));
  fields_.clear();
}

std::string CsvTable::render() const {
  std::string out;
  append_line(out, header_);
  for (const auto& r : rows_) append_line(out, r);
  return out;
}

void CsvTable::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  const auto path = dir / file_name_;
  // Binary mode keeps LF line endings on every platform.
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  const std::string text = render();
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error("failed writing " + path.string());
}

}  // namespace philab
