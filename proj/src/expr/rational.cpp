#include "liesym/rational.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace liesym {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

mpz_class pow10(long n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(n));
  return r;
}

}  // namespace

Rational rational_from_string(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("empty number");
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw std::invalid_argument("bad rational: " + std::string(text));
    mpz_class n{std::string(num)}, d{std::string(den)};
    if (d == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    result = Rational(n, d);
    result.canonicalize();
  } else {
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      auto es = s.substr(e + 1);
      bool eneg = false;
      if (!es.empty() && (es.front() == '+' || es.front() == '-')) {
        eneg = es.front() == '-';
        es.remove_prefix(1);
      }
      if (!all_digits(es)) throw std::invalid_argument("bad exponent: " + std::string(text));
      long v = 0;
      std::from_chars(es.data(), es.data() + es.size(), v);
      exp10 = eneg ? -v : v;
      s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      auto ip = s.substr(0, dot);
      auto fp = s.substr(dot + 1);
      if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty()))
        throw std::invalid_argument("bad decimal: " + std::string(text));
      digits = std::string(ip) + std::string(fp);
      exp10 -= static_cast<long>(fp.size());
    } else {
      if (!all_digits(s)) throw std::invalid_argument("bad number: " + std::string(text));
      digits = std::string(s);
    }
    mpz_class n(digits);
    if (exp10 >= 0) {
      result = Rational(n * pow10(exp10));
    } else {
      result = Rational(n, pow10(-exp10));
      result.canonicalize();
    }
  }
  if (negative) result = -result;
  return result;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite number");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return rational_from_string(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::size_t hash_value(const Rational& q) {
  std::size_t h = mpz_get_ui(q.get_num_mpz_t()) * 0x9E3779B97F4A7C15ull;
  h ^= mpz_get_ui(q.get_den_mpz_t()) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
  h ^= static_cast<std::size_t>(mpz_size(q.get_num_mpz_t())) * 31u;
  if (sgn(q) < 0) h = ~h;
  return h;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

long to_long(const Rational& q) {
  if (!is_integer(q) || !q.get_num().fits_slong_p()) throw std::overflow_error("rational does not fit a long");
  return q.get_num().get_si();
}

Rational pow_int(const Rational& base, long exponent) {
  if (exponent == 0) return Rational(1);
  if (base == 0) {
    if (exponent < 0) throw std::domain_error("division by zero");
    return Rational(0);
  }
  unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational r = exponent < 0 ? Rational(d, n) : Rational(n, d);
  r.canonicalize();
  return r;
}

std::optional<Rational> exact_root(const Rational& q, unsigned long k) {
  if (sgn(q) <= 0 || k == 0) return std::nullopt;
  mpz_class n, d;
  if (mpz_root(n.get_mpz_t(), q.get_num_mpz_t(), k) == 0) return std::nullopt;
  if (mpz_root(d.get_mpz_t(), q.get_den_mpz_t(), k) == 0) return std::nullopt;
  Rational r(n, d);
  r.canonicalize();
  return r;
}

}  // namespace liesym
