#include "lexer.hpp"

#include <cctype>

#include "clin/error.hpp"

namespace clin::detail {

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Imag: return "%i";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Assign: return "'='";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::End: return "end of input";
  }
  return "?";
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

mpz_class pow10(unsigned long n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, n);
  return r;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    std::size_t start = i;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      while (j < text.size() && text[j] == '\'') ++j;
      tok.kind = Tok::Ident;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (digit(c) || (c == '.' && i + 1 < text.size() && digit(text[i + 1]))) {
      std::size_t j = i;
      std::string mantissa;
      std::size_t frac_digits = 0;
      while (j < text.size() && digit(text[j])) mantissa += text[j++];
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() && digit(text[j])) {
          mantissa += text[j++];
          ++frac_digits;
        }
      }
      long exponent = 0;
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        bool neg = false;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) neg = text[k++] == '-';
        if (k < text.size() && digit(text[k])) {
          std::string ex;
          while (k < text.size() && digit(text[k])) ex += text[k++];
          if (ex.size() > 6) throw ParseError(ErrorCode::SyntaxError, "exponent too large", line, col);
          exponent = std::stol(ex) * (neg ? -1 : 1);
          j = k;
        }
      }
      if (j < text.size() && ident_start(text[j]))
        throw ParseError(ErrorCode::SyntaxError, "malformed number", line, col + static_cast<int>(j - i),
                         {"operator"});
      tok.kind = Tok::Number;
      tok.text = std::string(text.substr(start, j - start));
      const long scale = exponent - static_cast<long>(frac_digits);
      Rational q{mpz_class(mantissa, 10)};
      if (scale >= 0)
        q *= Rational(pow10(static_cast<unsigned long>(scale)));
      else
        q /= Rational(pow10(static_cast<unsigned long>(-scale)));
      q.canonicalize();
      tok.number = q;
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (c == '%' && text.substr(i, 2) == "%i" && (i + 2 >= text.size() || !ident_char(text[i + 2]))) {
      tok.kind = Tok::Imag;
      tok.text = "%i";
      advance(2);
      out.push_back(std::move(tok));
      continue;
    }
    switch (c) {
      case '+': tok.kind = Tok::Plus; break;
      case '-': tok.kind = Tok::Minus; break;
      case '*': tok.kind = Tok::Star; break;
      case '/': tok.kind = Tok::Slash; break;
      case '^': tok.kind = Tok::Caret; break;
      case '(': tok.kind = Tok::LParen; break;
      case ')': tok.kind = Tok::RParen; break;
      case ',': tok.kind = Tok::Comma; break;
      case ';': tok.kind = Tok::Semi; break;
      case ':': tok.kind = Tok::Colon; break;
      case '=': tok.kind = Tok::Assign; break;
      case '{': tok.kind = Tok::LBrace; break;
      case '}': tok.kind = Tok::RBrace; break;
      default:
        throw ParseError(ErrorCode::SyntaxError, std::string("unexpected character '") + c + "'", line, col);
    }
    tok.text = std::string(1, c);
    advance(1);
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

}  // namespace clin::detail
