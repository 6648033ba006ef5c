#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>
#include <string_view>

namespace nnormal {

/// Exact rational number. mpq_class keeps the value canonical
/// (denominator > 0, gcd 1) after every arithmetic operation.
using Rational = mpq_class;

/// Parses the text form "p/q" or "p" (sign on p only, q > 0).
Rational parse_rational(std::string_view text);

/// Text form "p/q", with "/q" omitted when q == 1.
std::string to_string(const Rational& q);

/// Gaussian rational re + im*i.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long value) : re_(value) {}  // NOLINT(google-explicit-constructor)
  Scalar(Rational re) : re_(std::move(re)) { re_.canonicalize(); }  // NOLINT(google-explicit-constructor)
  Scalar(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static Scalar parse(std::string_view re, std::string_view im);

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  Scalar operator-() const { return {-re_, -im_}; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  /// Lexicographic on (re, im); only used to key ordered containers.
  friend std::strong_ordering operator<=>(const Scalar& a, const Scalar& b);

 private:
  Rational re_{0};
  Rational im_{0};
};

/// Human-readable form used in reports: "1/2", "-3i", "1/2+1/3i".
std::string to_display(const Scalar& s);

}  // namespace nnormal
