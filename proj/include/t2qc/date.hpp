#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <string>

#include "t2qc/errors.hpp"

namespace t2qc {

/// Calendar date stored as a day count since 1970-01-01 (proleptic Gregorian).
class Date {
  public:
    Date() = default;

    static Date from_ymd(int year, int month, int day) {
        namespace ch = std::chrono;
        ch::year_month_day ymd{ch::year{year}, ch::month{unsigned(month)},
                               ch::day{unsigned(day)}};
        if (!ymd.ok())
            throw ParseError("invalid calendar date: " + pad(year, 4) + "-" +
                             pad(month, 2) + "-" + pad(day, 2));
        return Date(ch::sys_days(ymd).time_since_epoch().count());
    }

    /// Parse strict ISO-8601 `YYYY-MM-DD`.
    static Date parse(const std::string& s) {
        int y = 0, m = 0, d = 0;
        char tail = 0;
        if (s.size() != 10 ||
            std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3 ||
            s[4] != '-' || s[7] != '-')
            throw ParseError("invalid date (expected YYYY-MM-DD): '" + s + "'");
        return from_ymd(y, m, d);
    }

    std::string to_string() const {
        namespace ch = std::chrono;
        ch::year_month_day ymd{ch::sys_days{ch::days{serial_}}};
        return pad(int(ymd.year()), 4) + "-" + pad(unsigned(ymd.month()), 2) +
               "-" + pad(unsigned(ymd.day()), 2);
    }

    /// Monday=1 .. Sunday=7.
    int iso_weekday() const {
        namespace ch = std::chrono;
        ch::weekday wd{ch::sys_days{ch::days{serial_}}};
        return int(wd.iso_encoding());
    }

    int serial() const { return serial_; }

    Date operator+(int days) const { return Date(serial_ + days); }
    int operator-(const Date& other) const { return serial_ - other.serial_; }
    auto operator<=>(const Date&) const = default;

  private:
    explicit Date(int serial) : serial_(serial) {}

    static std::string pad(long v, int width) {
        std::string s = std::to_string(v);
        while (int(s.size()) < width) s.insert(s.begin(), '0');
        return s;
    }

    int serial_ = 0;
};

}  // namespace t2qc
