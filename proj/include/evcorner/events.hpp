#pragma once

// Event data model, sensor geometry and the whitespace-delimited text formats
// used for event, corner and label files.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evcorner {

/// Timestamps are integer microseconds.
using Timestamp = std::int64_t;

enum class Polarity : std::uint8_t { Off = 0, On = 1 };

struct Event {
  Timestamp t = 0;
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  Polarity p = Polarity::Off;

  friend bool operator==(const Event&, const Event&) = default;
};

struct SensorGeometry {
  int width = 346;
  int height = 260;

  [[nodiscard]] bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  [[nodiscard]] std::size_t pixels() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }

  friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

struct CornerEvent {
  Event event;
  double score = 0.0;
  bool is_corner = false;

  friend bool operator==(const CornerEvent&, const CornerEvent&) = default;
};

/// Raised for malformed input text; carries the 1-based line number (0 when
/// the error is not tied to a line).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == '\n')) ++i;
    std::size_t j = i;
    while (j < line.size() && !(line[j] == ' ' || line[j] == '\t' || line[j] == '\r' || line[j] == '\n')) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// Converts a non-negative decimal number of seconds ("12", "1.5", "1.5e-6")
// to integer microseconds. The conversion works on the decimal digits
// directly, so halves are detected exactly and rounded half-to-even.
inline bool seconds_to_micros(std::string_view s, Timestamp& out) {
  std::size_t i = 0;
  if (i < s.size() && s[i] == '+') ++i;
  std::string digits;
  int frac_digits = 0;
  bool seen_dot = false;
  bool any_digit = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      any_digit = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!any_digit) return false;
  long exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') return false;
    ++i;
    if (!parse_int(s.substr(i), exponent)) return false;
    if (exponent > 1000 || exponent < -1000) return false;
  }
  // value = digits * 10^(shift - 6) seconds = digits * 10^shift microseconds
  const long shift = exponent - frac_digits + 6;
  const auto first_nonzero = digits.find_first_not_of('0');
  if (first_nonzero == std::string::npos) {
    out = 0;
    return true;
  }
  digits.erase(0, first_nonzero);

  std::string int_part;
  std::string rest;
  if (shift >= 0) {
    int_part = digits + std::string(static_cast<std::size_t>(shift), '0');
  } else {
    const auto drop = static_cast<std::size_t>(-shift);
    if (drop >= digits.size()) {
      rest = std::string(drop - digits.size(), '0') + digits;
    } else {
      int_part = digits.substr(0, digits.size() - drop);
      rest = digits.substr(digits.size() - drop);
    }
  }
  if (int_part.size() > 18) return false;
  Timestamp value = 0;
  for (char c : int_part) value = value * 10 + (c - '0');
  if (!rest.empty()) {
    const char lead = rest.front();
    const bool tail_nonzero = rest.find_first_not_of('0', 1) != std::string::npos;
    const bool round_up = lead > '5' || (lead == '5' && (tail_nonzero || (value % 2 == 1)));
    if (round_up) ++value;
  }
  out = value;
  return true;
}

inline void append_seconds(std::string& buf, Timestamp t) {
  char tmp[48];
  std::snprintf(tmp, sizeof tmp, "%lld.%06lld", static_cast<long long>(t / 1000000),
                static_cast<long long>(t % 1000000));
  buf += tmp;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace detail

/// Parses one "t_seconds x y p" line. Timestamps are rounded to the nearest
/// microsecond, ties to even. `line_no` is only used for error messages.
inline Event parse_event_line(std::string_view line, std::size_t line_no = 0) {
  const auto fields = detail::split_ws(line);
  if (fields.size() != 4) {
    throw ParseError(line_no, "expected 4 fields 't x y p', got " + std::to_string(fields.size()));
  }
  Event e;
  if (!detail::seconds_to_micros(fields[0], e.t)) {
    throw ParseError(line_no, "invalid timestamp '" + std::string(fields[0]) + "'");
  }
  int x = 0;
  int y = 0;
  int p = 0;
  if (!detail::parse_int(fields[1], x) || x < 0 || x > std::numeric_limits<std::uint16_t>::max()) {
    throw ParseError(line_no, "invalid x '" + std::string(fields[1]) + "'");
  }
  if (!detail::parse_int(fields[2], y) || y < 0 || y > std::numeric_limits<std::uint16_t>::max()) {
    throw ParseError(line_no, "invalid y '" + std::string(fields[2]) + "'");
  }
  if (!detail::parse_int(fields[3], p)) {
    throw ParseError(line_no, "invalid polarity '" + std::string(fields[3]) + "'");
  }
  if (p != 0 && p != 1) throw ParseError(line_no, "polarity must be 0 or 1, got " + std::to_string(p));
  e.x = static_cast<std::uint16_t>(x);
  e.y = static_cast<std::uint16_t>(y);
  e.p = p ? Polarity::On : Polarity::Off;
  return e;
}

inline std::string format_event_line(const Event& e) {
  std::string s;
  detail::append_seconds(s, e.t);
  s += ' ' + std::to_string(e.x) + ' ' + std::to_string(e.y) + ' ' + (e.p == Polarity::On ? '1' : '0');
  return s;
}

struct LoadOptions {
  /// Skip out-of-bounds events instead of failing.
  bool drop_out_of_bounds = false;
};

struct LoadResult {
  std::vector<Event> events;
  std::size_t dropped = 0;
};

inline LoadResult read_events(std::istream& in, const SensorGeometry& geometry, LoadOptions opts = {}) {
  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  Timestamp last_t = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    const Event e = parse_event_line(line, line_no);
    if (!geometry.contains(e.x, e.y)) {
      if (opts.drop_out_of_bounds) {
        ++result.dropped;
        continue;
      }
      throw ParseError(line_no, "event (" + std::to_string(e.x) + "," + std::to_string(e.y) + ") outside " +
                                    std::to_string(geometry.width) + "x" + std::to_string(geometry.height) +
                                    " sensor");
    }
    if (!result.events.empty() && e.t < last_t) {
      throw ParseError(line_no, "timestamp goes backwards");
    }
    last_t = e.t;
    result.events.push_back(e);
  }
  return result;
}

/// Loads an event file in file order.
inline LoadResult load_events(const std::string& path, const SensorGeometry& geometry, LoadOptions opts = {}) {
  auto in = detail::open_input(path);
  try {
    return read_events(in, geometry, opts);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + std::string(e.what()));
  }
}

inline void write_events(const std::string& path, const std::vector<Event>& events) {
  auto out = detail::open_output(path);
  std::string buf;
  for (const auto& e : events) {
    buf = format_event_line(e);
    buf += '\n';
    out << buf;
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

/// "t_seconds x y p score is_corner". The score is printed with 17
/// significant digits so a double survives the round trip.
inline std::string format_corner_line(const CornerEvent& c) {
  std::string s = format_event_line(c.event);
  char tmp[64];
  std::snprintf(tmp, sizeof tmp, " %.17g %d", c.score, c.is_corner ? 1 : 0);
  s += tmp;
  return s;
}

inline CornerEvent parse_corner_line(std::string_view line, std::size_t line_no = 0) {
  const auto fields = detail::split_ws(line);
  if (fields.size() != 6) {
    throw ParseError(line_no, "expected 6 fields 't x y p score is_corner', got " + std::to_string(fields.size()));
  }
  CornerEvent c;
  const std::string head = std::string(fields[0]) + ' ' + std::string(fields[1]) + ' ' + std::string(fields[2]) +
                           ' ' + std::string(fields[3]);
  c.event = parse_event_line(head, line_no);
  const std::string score(fields[4]);
  char* end = nullptr;
  c.score = std::strtod(score.c_str(), &end);
  if (end != score.c_str() + score.size()) throw ParseError(line_no, "invalid score '" + score + "'");
  if (fields[5] == "1") {
    c.is_corner = true;
  } else if (fields[5] != "0") {
    throw ParseError(line_no, "is_corner must be 0 or 1");
  }
  return c;
}

inline void write_corners(const std::string& path, const std::vector<CornerEvent>& results) {
  auto out = detail::open_output(path);
  std::string buf;
  for (const auto& c : results) {
    buf = format_corner_line(c);
    buf += '\n';
    out << buf;
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::vector<CornerEvent> load_corners(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<CornerEvent> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    out.push_back(parse_corner_line(line, line_no));
  }
  return out;
}

}  // namespace evcorner
