#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hamdec {

// Exact rational on int64 with 128-bit cross-multiplied comparisons.
// All threshold predicates in this library (nu*n counts, densities,
// eps windows) compare exactly; doubles appear only in reports.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(long long n) : num_(n), den_(1) {}  // NOLINT(implicit)
  Rational(long long num, long long den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
    normalize();
  }

  long long num() const { return num_; }
  long long den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator-() const { return make_raw(-num_, den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(checked(static_cast<__int128>(a.num_) * b.den_ +
                            static_cast<__int128>(b.num_) * a.den_),
                    checked(static_cast<__int128>(a.den_) * b.den_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    long long g1 = std::gcd(a.num_ < 0 ? -a.num_ : a.num_, b.den_);
    long long g2 = std::gcd(b.num_ < 0 ? -b.num_ : b.num_, a.den_);
    return Rational(checked(static_cast<__int128>(a.num_ / (g1 ? g1 : 1)) * (g2 ? b.num_ / g2 : b.num_)),
                    checked(static_cast<__int128>(a.den_ / (g2 ? g2 : 1)) * (g1 ? b.den_ / g1 : b.den_)));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
    return a * Rational(b.den_, b.num_);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  // Largest integer <= value.
  long long floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  long long ceil() const { return -((-*this).floor()); }

  // Parses "3/7", "-1/2", integers, and plain decimals like "0.125".
  static Rational parse(const std::string& s);

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static long long checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Rational overflow");
    return static_cast<long long>(v);
  }
  static Rational make_raw(long long n, long long d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    return r;
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

  long long num_;
  long long den_;
};

inline Rational Rational::parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    long long den = 1;
    for (size_t i = 0; i < tail.size(); ++i) {
      if (den > INT64_MAX / 10) throw std::overflow_error("Rational::parse: too many digits");
      den *= 10;
    }
    long long whole = head.empty() || head == "-" ? 0 : std::stoll(head);
    long long frac = tail.empty() ? 0 : std::stoll(tail);
    bool neg = !head.empty() && head[0] == '-';
    long long num = whole * den + (neg ? -frac : frac);
    return Rational(num, den);
  }
  return Rational(std::stoll(s));
}

}  // namespace hamdec
