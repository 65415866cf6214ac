#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "liesym/expr.hpp"

namespace liesym {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Grammar:
//   expr     := term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)*
//   factor   := base ('^' exponent)?
//   exponent := factor
//   base     := number | ident | ident '(' args ')' | '(' expr ')' | '-' factor
//   number   := integer ('/' integer)?      (no blanks inside)
// Function heads: exp, ln, sqrt, gamma, and f followed by any number of 'p'
// (f, fp, fpp, ...) for the opaque volatility function and its derivatives.
Expr parse(std::string_view text);

}  // namespace liesym
