#include "ivlkit/parser.hpp"

#include <sstream>

#include "lexer.hpp"

namespace ivl {

namespace {

TypeKind parse_type_kind(Lexer& lx) {
  const Token& t = lx.peek();
  std::string name = lx.expect_ident("type name");
  if (name == "Int") return TypeKind::Int;
  if (name == "Bool") return TypeKind::Bool;
  if (name == "Ref") return TypeKind::Ref;
  if (name == "Perm") return TypeKind::Perm;
  throw ParseError(t.pos, "unknown type " + name);
}

bool is_stmt_keyword(const std::string& s) {
  return s == "inhale" || s == "exhale" || s == "havoc" || s == "skip" || s == "if" ||
         s == "else" || s == "var" || s == "method" || s == "while" || s == "invariant" ||
         s == "par" || s == "requires" || s == "ensures" || s == "pre" || s == "post" ||
         s == "free" || s == "alloc";
}

// Expression parsing. In assertion context the top-level '*' and '||' belong
// to the assertion grammar (multiplication there needs parentheses).
class ExprParser {
public:
  ExprParser(Lexer& lx, bool assertion_ctx) : lx_(lx), assertion_ctx_(assertion_ctx) {}

  ExprPtr parse() { return parse_or(assertion_ctx_); }

  ExprPtr parse_or(bool suppress) {
    ExprPtr l = parse_and(suppress);
    while (!suppress && lx_.at(Tok::OrOr)) {
      SourcePos p = lx_.next().pos;
      l = Expr::binary(BinOp::Or, l, parse_and(suppress), p);
    }
    return l;
  }

  ExprPtr parse_and(bool suppress) {
    ExprPtr l = parse_eq(suppress);
    while (lx_.at(Tok::AndAnd)) {
      SourcePos p = lx_.next().pos;
      l = Expr::binary(BinOp::And, l, parse_eq(suppress), p);
    }
    return l;
  }

  ExprPtr parse_eq(bool suppress) {
    ExprPtr l = parse_rel(suppress);
    while (lx_.at(Tok::EqEq) || lx_.at(Tok::NotEq)) {
      bool neq = lx_.at(Tok::NotEq);
      SourcePos p = lx_.next().pos;
      ExprPtr r = parse_rel(suppress);
      l = Expr::binary(BinOp::Eq, l, r, p);
      if (neq) l = Expr::unary(UnOp::Not, l, p);
    }
    return l;
  }

  ExprPtr parse_rel(bool suppress) {
    ExprPtr l = parse_add(suppress);
    if (lx_.at(Tok::Lt) || lx_.at(Tok::Le) || lx_.at(Tok::Gt) || lx_.at(Tok::Ge)) {
      Tok k = lx_.peek().kind;
      SourcePos p = lx_.next().pos;
      ExprPtr r = parse_add(suppress);
      switch (k) {
        case Tok::Lt: return Expr::binary(BinOp::Lt, l, r, p);
        case Tok::Gt: return Expr::binary(BinOp::Lt, r, l, p);
        case Tok::Le: return Expr::unary(UnOp::Not, Expr::binary(BinOp::Lt, r, l, p), p);
        case Tok::Ge: return Expr::unary(UnOp::Not, Expr::binary(BinOp::Lt, l, r, p), p);
        default: break;
      }
    }
    return l;
  }

  ExprPtr parse_add(bool suppress) {
    ExprPtr l = parse_mul(suppress);
    while (lx_.at(Tok::Plus) || lx_.at(Tok::Minus)) {
      bool add = lx_.at(Tok::Plus);
      SourcePos p = lx_.next().pos;
      l = Expr::binary(add ? BinOp::Add : BinOp::Sub, l, parse_mul(suppress), p);
    }
    return l;
  }

  ExprPtr parse_mul(bool suppress) {
    ExprPtr l = parse_unary(suppress);
    while ((lx_.at(Tok::Star) && !suppress) || lx_.at(Tok::Slash)) {
      bool mul = lx_.at(Tok::Star);
      SourcePos p = lx_.next().pos;
      ExprPtr r = parse_unary(suppress);
      if (!mul && l->kind == Expr::Kind::Literal && l->literal.is_int() &&
          r->kind == Expr::Kind::Literal && r->literal.is_int()) {
        // Integer literal quotient: an exact permission literal.
        if (r->literal.as_int() == 0) throw ParseError(p, "permission literal with zero denominator");
        l = Expr::lit(Value::make_perm(Rational(l->literal.as_int(), r->literal.as_int())), p);
      } else {
        l = Expr::binary(mul ? BinOp::Mul : BinOp::Div, l, r, p);
      }
    }
    return l;
  }

  ExprPtr parse_unary(bool suppress) {
    if (lx_.at(Tok::Bang)) {
      SourcePos p = lx_.next().pos;
      return Expr::unary(UnOp::Not, parse_unary(suppress), p);
    }
    if (lx_.at(Tok::Minus)) {
      SourcePos p = lx_.next().pos;
      ExprPtr e = parse_unary(suppress);
      if (e->kind == Expr::Kind::Literal && e->literal.is_int())
        return Expr::lit(Value::make_int(-e->literal.as_int()), p);
      return Expr::unary(UnOp::Neg, e, p);
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    while (lx_.at(Tok::Dot)) {
      SourcePos p = lx_.next().pos;
      std::string field = lx_.expect_ident("field name");
      e = Expr::field_read(e, field, p);
    }
    return e;
  }

  ExprPtr parse_primary() {
    const Token& t = lx_.peek();
    switch (t.kind) {
      case Tok::Int: {
        lx_.next();
        return Expr::lit(Value::make_int(t.value), t.pos);
      }
      case Tok::Ident: {
        if (t.text == "true" || t.text == "false") {
          lx_.next();
          return Expr::lit(Value::make_bool(t.text == "true"), t.pos);
        }
        if (t.text == "null") {
          lx_.next();
          return Expr::lit(Value::null_ref(), t.pos);
        }
        if (is_stmt_keyword(t.text)) throw ParseError(t.pos, "unexpected keyword " + t.text);
        lx_.next();
        return Expr::variable(t.text, t.pos);
      }
      case Tok::LParen: {
        SourcePos p = lx_.next().pos;
        // Parenthesized expressions use the full operator set.
        ExprPtr e = parse_or(false);
        if (lx_.accept(Tok::Question)) {
          ExprPtr then_e = parse_or(false);
          lx_.expect(Tok::Colon, "':'");
          ExprPtr else_e = parse_or(false);
          lx_.expect(Tok::RParen, "')'");
          return Expr::cond(e, then_e, else_e, p);
        }
        lx_.expect(Tok::RParen, "')'");
        return e;
      }
      default:
        throw ParseError(t.pos, "expected expression");
    }
  }

private:
  Lexer& lx_;
  bool assertion_ctx_;
};

class AssertionParser {
public:
  explicit AssertionParser(Lexer& lx) : lx_(lx) {}

  AssertionPtr parse() {
    AssertionPtr a = parse_disj();
    if (lx_.accept(Tok::Arrow)) {
      if (a->kind != Assertion::Kind::Pure)
        throw ParseError(lx_.peek().pos, "left of ==> must be a pure expression");
      return Assertion::implies(a->expr, parse());
    }
    return a;
  }

private:
  AssertionPtr parse_disj() {
    AssertionPtr a = parse_conj();
    while (lx_.at(Tok::OrOr)) {
      lx_.next();
      a = Assertion::disj(a, parse_conj());
    }
    return a;
  }

  AssertionPtr parse_conj() {
    AssertionPtr a = parse_atom();
    while (lx_.at(Tok::Star)) {
      lx_.next();
      a = Assertion::sep_conj(a, parse_atom());
    }
    return a;
  }

  AssertionPtr parse_atom() {
    if (lx_.at_ident("acc")) return parse_acc();
    if (lx_.at(Tok::LParen)) {
      // Conditional assertion: '(' e '?' A ':' A ')'.
      std::size_t m = lx_.mark();
      SourcePos p = lx_.next().pos;
      try {
        ExprPtr guard = ExprParser(lx_, false).parse();
        if (lx_.accept(Tok::Question)) {
          AssertionPtr t = parse();
          lx_.expect(Tok::Colon, "':'");
          AssertionPtr e = parse();
          lx_.expect(Tok::RParen, "')'");
          return Assertion::cond(guard, t, e, p);
        }
      } catch (const ParseError&) {
      }
      lx_.rewind(m);
      // Parenthesized assertion, unless it reads as a plain expression.
      std::size_t m2 = lx_.mark();
      try {
        ExprPtr e = ExprParser(lx_, true).parse();
        return Assertion::pure(e);
      } catch (const ParseError&) {
        lx_.rewind(m2);
      }
      lx_.expect(Tok::LParen, "'('");
      AssertionPtr a = parse();
      lx_.expect(Tok::RParen, "')'");
      return a;
    }
    ExprPtr e = ExprParser(lx_, true).parse();
    return Assertion::pure(e);
  }

  AssertionPtr parse_acc() {
    SourcePos p = lx_.peek().pos;
    lx_.expect_keyword("acc");
    lx_.expect(Tok::LParen, "'('");
    ExprPtr recv = ExprParser(lx_, false).parse();
    if (recv->kind != Expr::Kind::FieldRead)
      throw ParseError(p, "acc expects a field access e.f");
    ExprPtr base = recv->a;
    std::string field = recv->field;
    ExprPtr perm;
    bool wildcard = false;
    if (lx_.accept(Tok::Comma)) {
      if (lx_.accept_ident("wildcard")) {
        wildcard = true;
      } else {
        perm = ExprParser(lx_, false).parse();
        if (perm->kind == Expr::Kind::Literal && perm->literal.is_int())
          perm = Expr::lit(Value::make_perm(Rational(perm->literal.as_int(), 1)), perm->pos);
      }
    } else {
      perm = Expr::lit(Value::make_perm(Rational(1, 1)), p);
    }
    lx_.expect(Tok::RParen, "')'");
    if (wildcard) return Assertion::wildcard(base, field, p);
    return Assertion::acc(base, field, perm, p);
  }

  Lexer& lx_;
};

class StmtParser {
public:
  explicit StmtParser(Lexer& lx) : lx_(lx) {}

  StmtPtr parse_block() {
    lx_.expect(Tok::LBrace, "'{'");
    StmtPtr body = parse_stmts();
    lx_.expect(Tok::RBrace, "'}'");
    return body;
  }

  StmtPtr parse_stmts() {
    std::vector<StmtPtr> items;
    while (!lx_.at(Tok::RBrace) && !lx_.at(Tok::End)) {
      if (lx_.accept(Tok::Semi)) continue;
      items.push_back(parse_stmt());
    }
    if (items.empty()) return Stmt::skip(lx_.peek().pos);
    StmtPtr out = items.back();
    for (std::size_t i = items.size() - 1; i-- > 0;) out = Stmt::seq(items[i], out);
    return out;
  }

  StmtPtr parse_stmt() {
    const Token& t = lx_.peek();
    if (lx_.accept_ident("inhale")) return Stmt::inhale(AssertionParser(lx_).parse(), t.pos);
    if (lx_.accept_ident("exhale")) return Stmt::exhale(AssertionParser(lx_).parse(), t.pos);
    if (lx_.accept_ident("havoc")) return Stmt::havoc(lx_.expect_ident("variable"), t.pos);
    if (lx_.accept_ident("skip")) return Stmt::skip(t.pos);
    if (lx_.accept_ident("if")) {
      lx_.expect(Tok::LParen, "'('");
      ExprPtr cond = ExprParser(lx_, false).parse();
      lx_.expect(Tok::RParen, "')'");
      StmtPtr then_b = parse_block();
      StmtPtr else_b = Stmt::skip(t.pos);
      if (lx_.accept_ident("else")) else_b = parse_block();
      return Stmt::ite(cond, then_b, else_b, t.pos);
    }
    // Assignment forms: x := e and e.f := e.
    ExprPtr lhs = ExprParser(lx_, false).parse_postfix();
    lx_.expect(Tok::Assign, "':='");
    ExprPtr rhs = ExprParser(lx_, false).parse();
    if (lhs->kind == Expr::Kind::Var) return Stmt::assign(lhs->var, rhs, t.pos);
    if (lhs->kind == Expr::Kind::FieldRead)
      return Stmt::field_assign(lhs->a, lhs->field, rhs, t.pos);
    throw ParseError(t.pos, "assignment target must be a variable or field access");
  }

private:
  Lexer& lx_;
};

}  // namespace

// Entry points for the .pim parser, which shares the expression and assertion
// grammars with .ivl.
ExprPtr parse_expr_for_pim(Lexer& lx) { return ExprParser(lx, false).parse(); }
AssertionPtr parse_assertion_for_pim(Lexer& lx) { return AssertionParser(lx).parse(); }

namespace {

void parse_decls(Lexer& lx, TypeContext& ctx) {
  lx.expect(Tok::LParen, "'('");
  if (!lx.at(Tok::RParen)) {
    do {
      std::string name = lx.expect_ident("parameter name");
      lx.expect(Tok::Colon, "':'");
      ctx.declare(name, parse_type_kind(lx));
    } while (lx.accept(Tok::Comma));
  }
  lx.expect(Tok::RParen, "')'");
}

}  // namespace

Program parse_ivl(const std::string& source) {
  Lexer lx(source);
  Program prog;
  while (!lx.at(Tok::End)) {
    lx.expect_keyword("method");
    Method m;
    m.name = lx.expect_ident("method name");
    if (prog.find(m.name)) throw ParseError(lx.peek().pos, "duplicate method " + m.name);
    parse_decls(lx, m.ctx);
    lx.expect(Tok::LBrace, "'{'");
    while (lx.at_ident("var")) {
      lx.next();
      std::string name = lx.expect_ident("variable name");
      lx.expect(Tok::Colon, "':'");
      m.ctx.declare(name, parse_type_kind(lx));
      lx.accept(Tok::Semi);
    }
    m.body = StmtParser(lx).parse_stmts();
    lx.expect(Tok::RBrace, "'}'");
    prog.methods.push_back(std::move(m));
  }
  return prog;
}

namespace {

std::string indent_str(int n) { return std::string(std::size_t(n) * 2, ' '); }

void print_stmt(std::ostringstream& os, const StmtPtr& s, int ind) {
  switch (s->kind) {
    case Stmt::Kind::Seq:
      print_stmt(os, s->s1, ind);
      print_stmt(os, s->s2, ind);
      return;
    case Stmt::Kind::If:
      os << indent_str(ind) << "if (" << s->expr->str() << ") {\n";
      print_stmt(os, s->s1, ind + 1);
      os << indent_str(ind) << "} else {\n";
      print_stmt(os, s->s2, ind + 1);
      os << indent_str(ind) << "}\n";
      return;
    default:
      os << indent_str(ind) << s->str() << "\n";
      return;
  }
}

}  // namespace

std::string print_stmt_block(const StmtPtr& stmt, int indent) {
  std::ostringstream os;
  print_stmt(os, stmt, indent);
  return os.str();
}

std::string print_ivl(const Program& program) {
  std::ostringstream os;
  for (const auto& m : program.methods) {
    os << "method " << m.name << "(";
    for (std::size_t i = 0; i < m.ctx.vars().size(); ++i) {
      if (i) os << ", ";
      os << m.ctx.vars()[i] << ": " << type_kind_name(*m.ctx.kind_of(m.ctx.vars()[i]));
    }
    os << ") {\n";
    print_stmt(os, m.body, 1);
    os << "}\n\n";
  }
  return os.str();
}

}  // namespace ivl
