#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clin/expr.hpp"

namespace clin::detail {

enum class Tok {
  Ident,
  Number,
  Imag,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  LParen,
  RParen,
  Comma,
  Semi,
  Colon,
  Assign,
  LBrace,
  RBrace,
  End,
};

std::string_view describe(Tok t);

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
  Rational number;  // Number only
};

/// Whole-input tokenizer. Comments run from `#` or `//` to end of line.
std::vector<Token> tokenize(std::string_view text);

}  // namespace clin::detail
