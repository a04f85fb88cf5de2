#include "monge/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "monge/error.hpp"

namespace monge {

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::ConfigError, "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::ConfigError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::ConfigError, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) fail(ErrorCode::DomainError, "csv header and column count differ");
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + header[j];
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) fail(ErrorCode::DomainError, "csv columns differ in length");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out += ',';
      out += format_double(columns[j][i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::vector<std::string>* header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ConfigError, "empty csv");
  std::vector<std::string> names;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) names.push_back(cell);
  }
  std::vector<std::vector<double>> cols(names.size());
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::size_t j = 0, pos = 0;
    while (pos <= line.size()) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      if (j >= cols.size()) fail(ErrorCode::ConfigError, "csv row " + std::to_string(row) + " has too many cells");
      double v = 0.0;
      const auto r = std::from_chars(line.data() + pos, line.data() + end, v);
      if (r.ec != std::errc() || r.ptr != line.data() + end) {
        fail(ErrorCode::ConfigError, "csv row " + std::to_string(row) + ": bad number '" +
                                         line.substr(pos, end - pos) + "'");
      }
      cols[j++].push_back(v);
      pos = end + 1;
    }
    if (j != cols.size()) fail(ErrorCode::ConfigError, "csv row " + std::to_string(row) + " has too few cells");
  }
  if (header) *header = std::move(names);
  return cols;
}

}  // namespace monge
