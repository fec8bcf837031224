#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gramseg {

// Exact rational arithmetic for onsets and durations (quarter-note units).
// Decimal values read from data files are snapped to the smallest-denominator
// fraction within 1e-9, so quantities like triplet onsets subtract and
// compare exactly; terminal equality over feature vectors depends on this.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(long long value) : num_(value) {}  // NOLINT: implicit by design

  Rational(long long num, long long den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    normalize();
  }

  // Smallest-denominator fraction within |x - p/q| <= 1e-9, found by walking
  // the continued-fraction convergents of x.
  static Rational from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("Rational: non-finite value");
    constexpr double kEps = 1e-9;
    constexpr long long kMaxDen = 1'000'000'000LL;
    bool neg = x < 0;
    double r = neg ? -x : x;
    long long p_prev = 1, q_prev = 0;  // h_{-1}, k_{-1}
    long long p = static_cast<long long>(std::floor(r));
    long long q = 1;
    double frac = r - std::floor(r);
    while (std::fabs(r - static_cast<double>(p) / static_cast<double>(q)) > kEps) {
      if (frac <= 0.0) break;
      double inv = 1.0 / frac;
      long long a = static_cast<long long>(std::floor(inv));
      frac = inv - std::floor(inv);
      long long p_next = a * p + p_prev;
      long long q_next = a * q + q_prev;
      if (q_next > kMaxDen || p_next < 0) break;
      p_prev = p;
      q_prev = q;
      p = p_next;
      q = q_next;
    }
    return Rational(neg ? -p : p, q);
  }

  long long num() const noexcept { return num_; }
  long long den() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }

  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(cross(a.num_, b.den_) + cross(b.num_, a.den_),
                    cross(a.den_, b.den_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(cross(a.num_, b.den_) - cross(b.num_, a.den_),
                    cross(a.den_, b.den_));
  }
  Rational operator-() const { return Rational(-num_, den_); }

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) noexcept {
    return static_cast<__int128>(a.num_) * b.den_ <
           static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) noexcept { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) noexcept { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) noexcept { return !(a < b); }
  friend bool operator!=(const Rational& a, const Rational& b) noexcept { return !(a == b); }

 private:
  static long long cross(long long a, long long b) {
    __int128 v = static_cast<__int128>(a) * b;
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Rational: overflow");
    return static_cast<long long>(v);
  }

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  long long num_ = 0;
  long long den_ = 1;
};

}  // namespace gramseg
