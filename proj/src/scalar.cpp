#include "nnormal/scalar.hpp"

#include <algorithm>
#include <cctype>

#include "nnormal/errors.hpp"

namespace nnormal {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view num = text;
  std::string_view den = "1";
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  std::string_view digits = num;
  if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
  if (!all_digits(digits) || !all_digits(den)) {
    throw ParseError("malformed rational \"" + std::string(text) + "\" (expected p or p/q)");
  }
  mpz_class p(std::string(num), 10);
  mpz_class q(std::string(den), 10);
  if (q == 0) throw ParseError("zero denominator in rational \"" + std::string(text) + "\"");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Scalar Scalar::parse(std::string_view re, std::string_view im) {
  return {parse_rational(re), parse_rational(im)};
}

Scalar& Scalar::operator+=(const Scalar& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) throw std::domain_error("division by zero scalar");
  if (sgn(o.im_) == 0) {
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  Rational norm = o.re_ * o.re_ + o.im_ * o.im_;
  Rational re = (re_ * o.re_ + im_ * o.im_) / norm;
  Rational im = (im_ * o.re_ - re_ * o.im_) / norm;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

std::strong_ordering operator<=>(const Scalar& a, const Scalar& b) {
  if (int c = cmp(a.re_, b.re_); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  int c = cmp(a.im_, b.im_);
  if (c == 0) return std::strong_ordering::equal;
  return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::string to_display(const Scalar& s) {
  if (sgn(s.im()) == 0) return to_string(s.re());
  std::string im = (s.im() == 1) ? "" : (s.im() == -1) ? "-" : to_string(s.im());
  if (sgn(s.re()) == 0) return im + "i";
  if (sgn(s.im()) > 0) return to_string(s.re()) + "+" + im + "i";
  return to_string(s.re()) + im + "i";
}

}  // namespace nnormal
