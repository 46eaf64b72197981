#pragma once

#include <string>
#include <utility>
#include <vector>

namespace drumsim::csv {

// Shortest decimal form that round-trips to the exact same double
// (std::to_chars). All CSV output funnels through this so files parse back
// bit-exactly.
std::string format_double(double v);

// strtod-based; throws std::invalid_argument with the offending text.
double parse_double(const std::string& text);
long parse_long(const std::string& text);

std::vector<std::string> split(const std::string& line, char sep);

// Write-temp-then-rename so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

struct ParsedCsv {
  std::vector<std::string> comments;           // leading '#' lines, stripped of '# '
  std::vector<std::string> header;             // first non-comment row
  std::vector<std::vector<std::string>> rows;  // remaining rows
};

// Throws std::runtime_error naming the line number on malformed input
// (ragged rows, missing header).
ParsedCsv parse_csv(const std::string& content);

// Timestamped events (time,velocity): onset lists, strike lists, schedules.
struct TimedValueSeries {
  std::vector<double> times;
  std::vector<double> values;
};

std::string to_time_value_csv(const TimedValueSeries& series, const std::string& value_name);
TimedValueSeries from_time_value_csv(const std::string& content);

} // namespace drumsim::csv
