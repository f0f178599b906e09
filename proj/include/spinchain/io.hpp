#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace spinchain::io {

/// Shortest decimal form that round-trips the double (17 significant digits).
std::string format_value(double x);

/// Buffered CSV output: comma separator, '.' decimal point, LF line endings,
/// '#'-prefixed comment lines. Path "-" targets stdout. Nothing is written
/// until close() runs, so a failed computation leaves no partial file.
class CsvWriter {
 public:
  explicit CsvWriter(std::string path);
  void comment(const std::string& text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);
  void close();

 private:
  std::string path_;
  std::string buffer_;
  bool closed_ = false;
};

void write_text_file(const std::string& path, const std::string& content);

/// Sidecar path for a CSV target: "out.csv" -> "out.meta.json". Empty for
/// stdout targets.
std::string sidecar_path(const std::string& csv_path);

void write_json_sidecar(const std::string& csv_path, const nlohmann::json& meta);

}  // namespace spinchain::io
