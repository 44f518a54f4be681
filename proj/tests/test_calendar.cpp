#include "doctest.h"

#include "codev/calendar.hpp"
#include "codev/rng.hpp"

using namespace codev;

TEST_CASE("epoch and known dates") {
  CHECK(day_from_ymd(1970, 1, 1) == 0);
  CHECK(day_from_ymd(1970, 1, 2) == 1);
  CHECK(day_from_ymd(2016, 1, 1) == 16801);
  CHECK(day_from_ymd(2000, 3, 1) == 11017);  // leap-century boundary
  CHECK(day_from_ymd(1969, 12, 31) == -1);
}

TEST_CASE("ymd round trip over a wide range") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    Day d = static_cast<Day>(rng.below(200000)) - 50000;  // ~1833..2517
    int y, m, dd;
    ymd_from_day(d, y, m, dd);
    CHECK(day_from_ymd(y, m, dd) == d);
    CHECK(m >= 1);
    CHECK(m <= 12);
    CHECK(dd >= 1);
    CHECK(dd <= 31);
  }
}

TEST_CASE("date strings") {
  CHECK(parse_date("2016-01-01") == Day{16801});
  CHECK(format_date(16801) == "2016-01-01");
  CHECK(!parse_date("2016-1-1"));
  CHECK(!parse_date("2016-13-01"));
  CHECK(!parse_date("not-a-date"));
  CHECK(!parse_date("2016-02-30"));
}

TEST_CASE("rfc3339 parsing") {
  CHECK(parse_rfc3339("1970-01-01T00:00:00Z") == Instant{0});
  CHECK(parse_rfc3339("2016-01-01T00:00:00Z") == Instant{16801} * 86400);
  CHECK(parse_rfc3339("2016-01-01T12:34:56Z") ==
        Instant{16801} * 86400 + 12 * 3600 + 34 * 60 + 56);
  SUBCASE("fractional seconds are truncated") {
    CHECK(parse_rfc3339("2016-01-01T00:00:00.999Z") == Instant{16801} * 86400);
  }
  SUBCASE("numeric offsets") {
    CHECK(parse_rfc3339("2016-01-01T02:00:00+02:00") ==
          parse_rfc3339("2016-01-01T00:00:00Z"));
    CHECK(parse_rfc3339("2015-12-31T22:00:00-02:00") ==
          parse_rfc3339("2016-01-01T00:00:00Z"));
  }
  SUBCASE("rejects junk") {
    CHECK(!parse_rfc3339("2016-01-01"));
    CHECK(!parse_rfc3339("2016-01-01T25:00:00Z"));
    CHECK(!parse_rfc3339(""));
  }
  SUBCASE("format round trip") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
      auto t = static_cast<Instant>(rng.below(4102444800ULL));  // < 2100
      CHECK(parse_rfc3339(format_rfc3339(t)) == t);
    }
  }
}

TEST_CASE("day_of_instant floors toward negative infinity") {
  CHECK(day_of_instant(0) == 0);
  CHECK(day_of_instant(86399) == 0);
  CHECK(day_of_instant(86400) == 1);
  CHECK(day_of_instant(-1) == -1);
  CHECK(day_of_instant(-86400) == -1);
  CHECK(day_of_instant(-86401) == -2);
}
