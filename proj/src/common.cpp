#include "phase/common.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace phase {

std::string format_double(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

std::vector<std::string_view> split_view(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Howard Hinnant's public-domain civil calendar algorithms.
CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

std::int64_t days_from_civil(const CivilDate& cd) {
  std::int64_t y = cd.year;
  const unsigned m = cd.month;
  const unsigned d = cd.day;
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::string format_date(const CivilDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", d.year, d.month, d.day);
  return buf;
}

CivilDate parse_date(std::string_view s) {
  CivilDate d;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
      std::sscanf(std::string(s).c_str(), "%d-%u-%u", &d.year, &d.month, &d.day) != 3 ||
      d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) {
    fail_data("invalid date: '" + std::string(s) + "' (expected YYYY-MM-DD)");
  }
  return d;
}

std::int64_t parse_utc_offset(std::string_view tz) {
  std::string_view s = trim_view(tz);
  if (s.empty() || s == "UTC" || s == "utc" || s == "Z") return 0;
  if (s.substr(0, 3) == "UTC" || s.substr(0, 3) == "utc") s.remove_prefix(3);
  if (s.empty()) return 0;
  int sign = 1;
  if (s.front() == '+') {
    s.remove_prefix(1);
  } else if (s.front() == '-') {
    sign = -1;
    s.remove_prefix(1);
  } else {
    fail_usage("unsupported timezone '" + std::string(tz) +
               "' (use UTC or a fixed offset like UTC-05:00)");
  }
  unsigned h = 0, m = 0;
  std::string body(s);
  if (std::sscanf(body.c_str(), "%2u:%2u", &h, &m) == 2 ||
      std::sscanf(body.c_str(), "%2u%2u", &h, &m) == 2) {
    // ok
  } else if (std::sscanf(body.c_str(), "%2u", &h) == 1 && body.size() <= 2) {
    m = 0;
  } else {
    fail_usage("unsupported timezone offset '" + std::string(tz) + "'");
  }
  if (h > 14 || m > 59) fail_usage("timezone offset out of range: '" + std::string(tz) + "'");
  return sign * (static_cast<std::int64_t>(h) * 3600 + m * 60);
}

}  // namespace phase
