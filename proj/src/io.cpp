#include "spinchain/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace spinchain::io {

std::string format_value(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {}

void CsvWriter::comment(const std::string& text) {
  buffer_ += "# ";
  buffer_ += text;
  buffer_ += '\n';
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  raw_row(columns);
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += format_value(values[i]);
  }
  buffer_ += '\n';
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  if (path_ == "-") {
    std::cout << buffer_;
    std::cout.flush();
    return;
  }
  write_text_file(path_, buffer_);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string sidecar_path(const std::string& csv_path) {
  if (csv_path.empty() || csv_path == "-") return {};
  const auto dot = csv_path.rfind('.');
  const auto slash = csv_path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return csv_path + ".meta.json";
  return csv_path.substr(0, dot) + ".meta.json";
}

void write_json_sidecar(const std::string& csv_path, const nlohmann::json& meta) {
  const std::string path = sidecar_path(csv_path);
  if (path.empty()) return;
  write_text_file(path, meta.dump(2) + "\n");
}

}  // namespace spinchain::io
