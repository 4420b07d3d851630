#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ivlkit/expr.hpp"

namespace ivl {

struct ParseError : std::runtime_error {
  ParseError(SourcePos pos, const std::string& msg)
      : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg),
        pos(pos) {}
  SourcePos pos;
};

enum class Tok {
  End, Ident, Int,
  LBrace, RBrace, LParen, RParen, Comma, Semi, Colon, Dot, Question,
  Assign,   // :=
  EqEq, NotEq, Lt, Le, Gt, Ge,
  Plus, Minus, Star, Slash, Bang,
  AndAnd, OrOr, Arrow,  // ==>
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  SourcePos pos;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(src) { tokenize(); }

  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + std::size_t(ahead);
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(const char* kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  bool accept_ident(const char* kw) {
    if (!at_ident(kw)) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (!at(k)) throw ParseError(peek().pos, std::string("expected ") + what);
    return next();
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Tok::Ident)
      throw ParseError(peek().pos, std::string("expected ") + what);
    return next().text;
  }
  void expect_keyword(const char* kw) {
    if (!accept_ident(kw)) throw ParseError(peek().pos, std::string("expected '") + kw + "'");
  }

  std::size_t mark() const { return pos_; }
  void rewind(std::size_t m) { pos_ = m; }

private:
  void tokenize();
  void push(Tok k, SourcePos p, std::string text = "", std::int64_t v = 0) {
    toks_.push_back({k, std::move(text), v, p});
  }

  const std::string& src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace ivl
