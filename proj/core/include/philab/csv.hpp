#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace philab {

// Shortest-roundtrip-safe rendering: 17 significant digits, '.' decimal point.
std::string format_real(double v);

// In-memory CSV with a fixed header. Fields containing a comma, quote or
// newline are quoted; rows end in LF.
class CsvTable {
 public:
  CsvTable(std::string file_name, std::vector<std::string> header);

  class Row {
   public:
    Row& add(double v);
    Row& add(long v);
    Row& add(int v) { return add(static_cast<long>(v)); }
    Row& add(bool v);
    Row& add(const std::string& v);
    Row& add(const char* v) { return add(std::string(v)); }
    // Appends the row; throws DomainError when the width differs from the header.
    void done();

   private:
    friend class CsvTable;
    explicit Row(CsvTable& table) : table_(table) {}
    CsvTable& table_;
    std::vector<std::string> fields_;
  };

  Row row() { return Row(*this); }

  const std::string& file_name() const { return file_name_; }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::string render() const;
  void write(const std::filesystem::path& dir) const;

 private:
  std::string file_name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace philab
