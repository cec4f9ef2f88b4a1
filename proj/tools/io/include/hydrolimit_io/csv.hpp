#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace hydrolimit::io {

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header,
            const std::vector<std::string>& comments = {});

  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(std::string_view s);
  void end_row();
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  bool first_ = true;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hydrolimit::io
