#ifndef MRPLAN_MONEY_HPP
#define MRPLAN_MONEY_HPP

#include <cmath>
#include <cstdint>
#include <compare>
#include <string>

namespace mrplan {

// Fixed-point money, 4 fractional digits. Hourly prices and costs only;
// no currency conversion.
class Money {
 public:
  static constexpr std::int64_t kScale = 10000;

  constexpr Money() = default;

  static constexpr Money from_raw(std::int64_t raw) {
    Money m;
    m.raw_ = raw;
    return m;
  }

  static Money from_double(double v) {
    return from_raw(static_cast<std::int64_t>(std::llround(v * kScale)));
  }

  constexpr std::int64_t raw() const { return raw_; }
  constexpr double to_double() const {
    return static_cast<double>(raw_) / kScale;
  }

  friend constexpr Money operator+(Money a, Money b) {
    return from_raw(a.raw_ + b.raw_);
  }
  friend constexpr Money operator*(Money a, std::int64_t n) {
    return from_raw(a.raw_ * n);
  }
  friend constexpr Money operator*(std::int64_t n, Money a) { return a * n; }
  Money& operator+=(Money b) {
    raw_ += b.raw_;
    return *this;
  }
  friend constexpr auto operator<=>(Money, Money) = default;

  // Locale-independent, dot decimal separator, no trailing zero padding
  // beyond what the value needs.
  std::string str() const;

 private:
  std::int64_t raw_ = 0;
};

}  // namespace mrplan

#endif
