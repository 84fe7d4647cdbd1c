#include "slice/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace slice {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational r;
  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view whole = body.substr(0, dot), frac = body.substr(dot + 1);
    if (!all_digits(whole) || !all_digits(frac))
      throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    mpz_class num(std::string(whole) + std::string(frac), 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    r = Rational(num, den);
  } else if (auto slash = body.find('/'); slash != std::string_view::npos) {
    std::string_view n = body.substr(0, slash), d = body.substr(slash + 1);
    if (!all_digits(n) || !all_digits(d))
      throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    mpz_class den(std::string{d}, 10);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    r = Rational(mpz_class(std::string{n}, 10), den);
  } else {
    if (!all_digits(body))
      throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    r = Rational(mpz_class(std::string{body}, 10));
  }
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

bool is_integer(const Rational& r) { return r.get_den() == 1; }

}  // namespace slice
