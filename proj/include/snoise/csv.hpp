#pragma once

#include <cstddef>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace snoise {

// Row-oriented CSV builder. Doubles are written with 17 significant digits so
// they round-trip exactly; text fields are quoted only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);

  CsvWriter& field(double v);
  CsvWriter& field(std::size_t v);
  CsvWriter& field(std::string_view s);
  void end_row();

  std::size_t rows() const noexcept { return rows_; }
  std::string str() const { return out_.str(); }

 private:
  void separator();

  std::ostringstream out_;
  bool row_open_ = false;
  std::size_t rows_ = 0;
};

std::string format_double(double v);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never see a partial file. Creates parent directories. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace snoise
