#include "liesym/parse.hpp"

#include <cctype>

namespace liesym {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("syntax error: " + msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept('*')) {
        e = e * factor();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = factor();
        if (d.is_zero()) throw ParseError("division by zero", at);
        e = e / d;
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    Expr b = base();
    if (accept('^')) {
      std::size_t at = pos_;
      Expr x = factor();
      try {
        return pow(b, x);
      } catch (const std::domain_error& err) {
        throw ParseError(err.what(), at);
      }
    }
    return b;
  }

  static bool digit(char c) { return c >= '0' && c <= '9'; }
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  Expr base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (digit(c)) return number();
    if (ident_start(c)) return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && digit(s_[pos_])) ++pos_;
    std::string num(s_.substr(start, pos_ - start));
    if (pos_ + 1 < s_.size() && s_[pos_] == '/' && digit(s_[pos_ + 1])) {
      std::size_t dstart = ++pos_;
      while (pos_ < s_.size() && digit(s_[pos_])) ++pos_;
      mpz_class d(std::string(s_.substr(dstart, pos_ - dstart)));
      if (d == 0) throw ParseError("division by zero", dstart);
      Rational q(mpz_class(num), d);
      q.canonicalize();
      return Expr(q);
    }
    return Expr(Rational(mpz_class(num)));
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    std::string name(s_.substr(start, pos_ - start));
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      Expr arg = expr();
      expect(')');
      return apply(name, arg, start);
    }
    return Expr::symbol(name);
  }

  Expr apply(const std::string& name, const Expr& arg, std::size_t at) {
    try {
      if (name == "exp") return exp(arg);
      if (name == "ln") return ln(arg);
      if (name == "sqrt") return sqrt(arg);
      if (name == "gamma") return Expr::function("gamma", {arg});
    } catch (const std::domain_error& err) {
      throw ParseError(err.what(), at);
    }
    if (name[0] == 'f' && name.find_first_not_of('p', 1) == std::string::npos)
      return Expr::function("f", {arg}, {static_cast<int>(name.size() - 1)});
    throw ParseError("unknown function '" + name + "'", at);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

}  // namespace liesym
