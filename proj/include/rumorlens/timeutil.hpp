#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rumorlens {

/// Seconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t seconds = 0;
  auto operator<=>(const Timestamp&) const = default;
};

/// Calendar day as days since 1970-01-01 (UTC).
struct Day {
  std::int64_t index = 0;
  auto operator<=>(const Day&) const = default;
};

class TimeParseError : public std::exception {
 public:
  explicit TimeParseError(std::string msg) : msg_(std::move(msg)) {}
  const char* what() const noexcept override { return msg_.c_str(); }

 private:
  std::string msg_;
};

// Accepts "YYYY-MM-DDThh:mm:ssZ" and "YYYY-MM-DDThh:mm:ss+hh:mm" (offset
// normalized to UTC). Throws TimeParseError.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

Day day_of(Timestamp t);
Day parse_day(std::string_view text);
std::string format_day(Day d);
Timestamp start_of(Day d);

}  // namespace rumorlens
