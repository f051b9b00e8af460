#include "rumorlens/timeutil.hpp"

#include <chrono>
#include <cstdio>

namespace rumorlens {

namespace {

using namespace std::chrono;

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
  if (pos + count > text.size()) throw TimeParseError("timestamp too short: " + std::string(text));
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') throw TimeParseError("expected digit in timestamp: " + std::string(text));
    value = value * 10 + (c - '0');
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c)
    throw TimeParseError(std::string("expected '") + c + "' in timestamp: " + std::string(text));
}

sys_days checked_date(std::string_view text, int y, int m, int d) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw TimeParseError("invalid calendar date: " + std::string(text));
  return sys_days{ymd};
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  const int y = parse_digits(text, 0, 4);
  expect(text, 4, '-');
  const int mo = parse_digits(text, 5, 2);
  expect(text, 7, '-');
  const int d = parse_digits(text, 8, 2);
  expect(text, 10, 'T');
  const int h = parse_digits(text, 11, 2);
  expect(text, 13, ':');
  const int mi = parse_digits(text, 14, 2);
  expect(text, 16, ':');
  const int s = parse_digits(text, 17, 2);
  if (h > 23 || mi > 59 || s > 59) throw TimeParseError("invalid time of day: " + std::string(text));

  std::int64_t offset = 0;
  if (text.size() == 20 && text[19] == 'Z') {
    offset = 0;
  } else if (text.size() == 25 && (text[19] == '+' || text[19] == '-')) {
    const int oh = parse_digits(text, 20, 2);
    expect(text, 22, ':');
    const int om = parse_digits(text, 23, 2);
    if (oh > 23 || om > 59) throw TimeParseError("invalid UTC offset: " + std::string(text));
    offset = (oh * 3600 + om * 60) * (text[19] == '+' ? 1 : -1);
  } else {
    throw TimeParseError("expected 'Z' or UTC offset: " + std::string(text));
  }

  const auto days = checked_date(text, y, mo, d).time_since_epoch().count();
  return Timestamp{static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + s - offset};
}

std::string format_timestamp(Timestamp t) {
  const Day d = day_of(t);
  const std::int64_t rem = t.seconds - d.index * 86400;
  const year_month_day ymd{sys_days{days{d.index}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
  return buf;
}

Day day_of(Timestamp t) {
  // floor division so pre-epoch times land on the right day
  std::int64_t q = t.seconds / 86400;
  if (t.seconds % 86400 < 0) --q;
  return Day{q};
}

Day parse_day(std::string_view text) {
  if (text.size() != 10) throw TimeParseError("expected YYYY-MM-DD: " + std::string(text));
  const int y = parse_digits(text, 0, 4);
  expect(text, 4, '-');
  const int mo = parse_digits(text, 5, 2);
  expect(text, 7, '-');
  const int d = parse_digits(text, 8, 2);
  return Day{checked_date(text, y, mo, d).time_since_epoch().count()};
}

std::string format_day(Day d) {
  const year_month_day ymd{sys_days{days{d.index}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

Timestamp start_of(Day d) { return Timestamp{d.index * 86400}; }

}  // namespace rumorlens
