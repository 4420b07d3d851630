#include "lexer.hpp"

namespace ivl {

void Lexer::tokenize() {
  int line = 1, col = 1;
  std::size_t i = 0;
  const std::size_t n = src_.size();
  auto cur = [&]() -> SourcePos { return {line, col}; };
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (src_[i + j] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += k;
  };

  while (i < n) {
    char c = src_[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < n && src_[i + 1] == '/') {
      while (i < n && src_[i] != '\n') advance(1);
      continue;
    }
    SourcePos p = cur();
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < n && (isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
      push(Tok::Ident, p, src_.substr(i, j - i));
      advance(j - i);
      continue;
    }
    if (isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::int64_t v = 0;
      while (j < n && isdigit(static_cast<unsigned char>(src_[j]))) {
        v = v * 10 + (src_[j] - '0');
        ++j;
      }
      push(Tok::Int, p, src_.substr(i, j - i), v);
      advance(j - i);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < n && src_[i + 1] == b;
    };
    if (c == '=' && i + 2 < n && src_[i + 1] == '=' && src_[i + 2] == '>') {
      push(Tok::Arrow, p);
      advance(3);
      continue;
    }
    if (two(':', '=')) { push(Tok::Assign, p); advance(2); continue; }
    if (two('=', '=')) { push(Tok::EqEq, p); advance(2); continue; }
    if (two('!', '=')) { push(Tok::NotEq, p); advance(2); continue; }
    if (two('<', '=')) { push(Tok::Le, p); advance(2); continue; }
    if (two('>', '=')) { push(Tok::Ge, p); advance(2); continue; }
    if (two('&', '&')) { push(Tok::AndAnd, p); advance(2); continue; }
    if (two('|', '|')) { push(Tok::OrOr, p); advance(2); continue; }
    switch (c) {
      case '{': push(Tok::LBrace, p); break;
      case '}': push(Tok::RBrace, p); break;
      case '(': push(Tok::LParen, p); break;
      case ')': push(Tok::RParen, p); break;
      case ',': push(Tok::Comma, p); break;
      case ';': push(Tok::Semi, p); break;
      case ':': push(Tok::Colon, p); break;
      case '.': push(Tok::Dot, p); break;
      case '?': push(Tok::Question, p); break;
      case '<': push(Tok::Lt, p); break;
      case '>': push(Tok::Gt, p); break;
      case '+': push(Tok::Plus, p); break;
      case '-': push(Tok::Minus, p); break;
      case '*': push(Tok::Star, p); break;
      case '/': push(Tok::Slash, p); break;
      case '!': push(Tok::Bang, p); break;
      default:
        throw ParseError(p, std::string("unexpected character '") + c + "'");
    }
    advance(1);
  }
  push(Tok::End, cur());
}

}  // namespace ivl
