#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace kinv::csv {

/// Locale-independent decimal with 17 significant digits ("nan"/"inf" for
/// non-finite values).
std::string format_double(double v);

class Cell {
 public:
  Cell(double v) : text_(format_double(v)) {}
  Cell(std::uint64_t v) : text_(std::to_string(v)) {}
  Cell(unsigned long long v) : text_(std::to_string(v)) {}
  Cell(std::string_view s) : text_(s) {}
  Cell(const std::string& s) : text_(s) {}
  Cell(const char* s) : text_(s) {}

  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

/// Comma-separated file with a header row. Throws FormatError if the file
/// cannot be opened or a row has the wrong number of cells.
class Writer {
 public:
  Writer(const std::filesystem::path& path, std::vector<std::string> header);

  void row(std::initializer_list<Cell> cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::filesystem::path path_;
};

}  // namespace kinv::csv
