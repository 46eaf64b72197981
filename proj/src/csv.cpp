#include "drumsim/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace drumsim::csv {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end == begin || errno == ERANGE) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  if (*end != '\0') {
    throw std::invalid_argument("trailing characters in number: '" + text + "'");
  }
  return v;
}

long parse_long(const std::string& text) {
  double v = parse_double(text);
  long l = static_cast<long>(v);
  if (static_cast<double>(l) != v) {
    throw std::invalid_argument("not an integer: '" + text + "'");
  }
  return l;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed: " + tmp + " -> " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace {
std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}
} // namespace

ParsedCsv parse_csv(const std::string& content) {
  ParsedCsv out;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::size_t start = line.find_first_not_of("# ");
      out.comments.push_back(start == std::string::npos ? "" : line.substr(start));
      continue;
    }
    auto fields = split(line, ',');
    if (!have_header) {
      out.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != out.header.size()) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                               std::to_string(out.header.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    out.rows.push_back(std::move(fields));
  }
  if (!have_header) throw std::runtime_error("line 1: missing CSV header");
  return out;
}

std::string to_time_value_csv(const TimedValueSeries& series, const std::string& value_name) {
  std::string out = "time," + value_name + "\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out += format_double(series.times[i]);
    out += ',';
    out += format_double(series.values[i]);
    out += '\n';
  }
  return out;
}

TimedValueSeries from_time_value_csv(const std::string& content) {
  auto parsed = parse_csv(content);
  if (parsed.header.size() != 2 || parsed.header[0] != "time") {
    throw std::runtime_error("expected header time,<value>");
  }
  TimedValueSeries out;
  out.times.reserve(parsed.rows.size());
  out.values.reserve(parsed.rows.size());
  for (const auto& row : parsed.rows) {
    out.times.push_back(parse_double(row[0]));
    out.values.push_back(parse_double(row[1]));
  }
  return out;
}

} // namespace drumsim::csv
