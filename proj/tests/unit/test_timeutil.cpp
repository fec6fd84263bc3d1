#include <gtest/gtest.h>

#include "cipher/error.hpp"
#include "cipher/timeutil.hpp"

namespace cipher {
namespace {

TEST(TimeUtil, CivilAndDayOfYearAgree) {
  EXPECT_EQ(utc_from_doy(2021, 70, 0, 0), utc_from_civil(2021, 3, 11));
  EXPECT_EQ(utc_from_doy(2020, 366, 23, 59), utc_from_civil(2020, 12, 31, 23, 59));
  EXPECT_EQ(utc_from_civil(1970, 1, 1), 0);
}

TEST(TimeUtil, IsoRoundTrip) {
  const auto t = utc_from_civil(2021, 3, 11);
  EXPECT_EQ(format_iso8601(t), "2021-03-11T00:00:00Z");
  EXPECT_EQ(parse_iso8601("2021-03-11T00:00:00Z"), t);
  EXPECT_EQ(parse_iso8601("2021-03-11 00:00"), t);
  EXPECT_THROW(parse_iso8601("2021-13-11T00:00:00Z"), InvalidArgument);
}

TEST(TimeUtil, ThirtyFiveHourWindowEnd) {
  EXPECT_EQ(format_iso8601(parse_iso8601("2021-03-11T00:00Z") + 35 * 3600),
            "2021-03-12T11:00:00Z");
}

TEST(TimeUtil, Durations) {
  EXPECT_EQ(parse_duration_seconds("35h"), 126000);
  EXPECT_EQ(parse_duration_seconds("128m"), 7680);
  EXPECT_EQ(parse_duration_seconds("1d"), 86400);
  EXPECT_EQ(parse_duration_seconds("90"), 90);
  EXPECT_THROW(parse_duration_seconds("h"), ConfigError);
}

}  // namespace
}  // namespace cipher
