#include "busim/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace busim::csv {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail(const std::string& name, size_t line, const std::string& msg) {
  std::ostringstream os;
  os << name << ":" << line << ": " << msg;
  throw ValidationError(os.str());
}

}  // namespace

int Table::column(const std::string& col) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == col) return static_cast<int>(i);
  }
  return -1;
}

int Table::require_column(const std::string& col) const {
  const int i = column(col);
  if (i < 0) fail(name, 1, "missing required column '" + col + "'");
  return i;
}

double Table::number(size_t row, int col) const {
  const std::string& s = rows[row][col];
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    fail(name, line_of_row[row],
         "column " + std::to_string(col + 1) + ": '" + s + "' is not a number");
  }
  return v;
}

long long Table::integer(size_t row, int col) const {
  const std::string& s = rows[row][col];
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    fail(name, line_of_row[row],
         "column " + std::to_string(col + 1) + ": '" + s + "' is not an integer");
  }
  return v;
}

Table read_string(const std::string& text, const std::string& name) {
  Table t;
  t.name = name;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto fields = split_line(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      fail(name, lineno,
           "expected " + std::to_string(t.header.size()) + " fields, got " +
               std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_of_row.push_back(lineno);
  }
  if (t.header.empty()) fail(name, 1, "empty file");
  return t;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_string(buf.str(), path);
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace busim::csv
