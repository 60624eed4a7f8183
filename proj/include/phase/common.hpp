#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phase {

// Error categories, aligned with the CLI exit codes.
enum class Status : int {
  Ok = 0,
  Usage = 1,    // bad configuration, missing inputs, invalid arguments
  Data = 2,     // malformed or inconsistent input data
  Numeric = 3,  // non-finite values, failed numeric invariants
};

class PhaseError : public std::runtime_error {
public:
  PhaseError(Status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  Status status() const { return status_; }

private:
  Status status_;
};

[[noreturn]] inline void fail_usage(const std::string& msg) {
  throw PhaseError(Status::Usage, msg);
}
[[noreturn]] inline void fail_data(const std::string& msg) {
  throw PhaseError(Status::Data, msg);
}
[[noreturn]] inline void fail_numeric(const std::string& msg) {
  throw PhaseError(Status::Numeric, msg);
}

// Zeek bool columns are ternary: T, F, or unset.
enum class Ternary : std::uint8_t { True, False, Unset };

inline std::string_view ternary_token(Ternary t) {
  switch (t) {
    case Ternary::True: return "T";
    case Ternary::False: return "F";
    default: return "-";
  }
}

std::vector<std::string_view> split_view(std::string_view s, char sep);
std::string_view trim_view(std::string_view s);

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

// Proleptic Gregorian calendar <-> days since 1970-01-01 (Unix epoch).
struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;
};

CivilDate civil_from_days(std::int64_t days_since_epoch);
std::int64_t days_from_civil(const CivilDate& d);
std::string format_date(const CivilDate& d);   // YYYY-MM-DD
CivilDate parse_date(std::string_view s);

// "UTC", "UTC+05:30", "-05:00", "+0200" -> offset in seconds east of UTC.
std::int64_t parse_utc_offset(std::string_view tz);

}  // namespace phase
