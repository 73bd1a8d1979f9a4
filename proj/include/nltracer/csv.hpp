#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nltracer {

/// Shortest round-trip decimal form.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws ParseError when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

/// Numeric CSV with a header row. Blank lines are skipped; throws IoError
/// when the file cannot be read and ParseError (with line number) on bad cells.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& origin = "<inline>");

/// Writes text atomically enough for our purposes: to `path`, creating parents.
void write_text(const std::filesystem::path& path, const std::string& text);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  /// Mixed row; cells are written verbatim, quoted when they contain a comma or quote.
  void row_cells(const std::vector<std::string>& cells);
  const std::string& str() const noexcept { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

}  // namespace nltracer
