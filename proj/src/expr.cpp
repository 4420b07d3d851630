#include "ivlkit/expr.hpp"

#include <algorithm>

namespace ivl {

namespace {

std::shared_ptr<Expr> node(Expr::Kind k, SourcePos p) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->pos = p;
  return e;
}

const char* bin_op_str(BinOp op) {
  switch (op) {
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Eq: return "==";
    case BinOp::Lt: return "<";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
  }
  return "?";
}

}  // namespace

ExprPtr Expr::lit(Value v, SourcePos p) {
  auto e = node(Kind::Literal, p);
  e->literal = std::move(v);
  return e;
}

ExprPtr Expr::variable(std::string name, SourcePos p) {
  auto e = node(Kind::Var, p);
  e->var = std::move(name);
  return e;
}

ExprPtr Expr::field_read(ExprPtr recv, std::string field, SourcePos p) {
  auto e = node(Kind::FieldRead, p);
  e->a = std::move(recv);
  e->field = std::move(field);
  return e;
}

ExprPtr Expr::unary(UnOp op, ExprPtr sub, SourcePos p) {
  auto e = node(Kind::Unary, p);
  e->uop = op;
  e->a = std::move(sub);
  return e;
}

ExprPtr Expr::binary(BinOp op, ExprPtr l, ExprPtr r, SourcePos p) {
  auto e = node(Kind::Binary, p);
  e->bop = op;
  e->a = std::move(l);
  e->b = std::move(r);
  return e;
}

ExprPtr Expr::cond(ExprPtr c, ExprPtr t, ExprPtr f, SourcePos p) {
  auto e = node(Kind::Cond, p);
  e->a = std::move(c);
  e->b = std::move(t);
  e->c = std::move(f);
  return e;
}

std::string Expr::str() const {
  switch (kind) {
    case Kind::Literal: return literal.str();
    case Kind::Var: return var;
    case Kind::FieldRead: return a->str() + "." + field;
    case Kind::Unary: return (uop == UnOp::Not ? "!" : "-") + ("(" + a->str() + ")");
    case Kind::Binary:
      return "(" + a->str() + " " + bin_op_str(bop) + " " + b->str() + ")";
    case Kind::Cond:
      return "(" + a->str() + " ? " + b->str() + " : " + c->str() + ")";
  }
  return "?";
}

namespace {

std::shared_ptr<Assertion> anode(Assertion::Kind k, SourcePos p = {}) {
  auto a = std::make_shared<Assertion>();
  a->kind = k;
  a->pos = p;
  return a;
}

}  // namespace

AssertionPtr Assertion::pure(ExprPtr e) {
  auto a = anode(Kind::Pure, e ? e->pos : SourcePos{});
  a->expr = std::move(e);
  return a;
}

AssertionPtr Assertion::acc(ExprPtr recv, std::string field, ExprPtr perm, SourcePos p) {
  auto a = anode(Kind::Acc, p);
  a->recv = std::move(recv);
  a->field = std::move(field);
  a->perm = std::move(perm);
  return a;
}

AssertionPtr Assertion::wildcard(ExprPtr recv, std::string field, SourcePos p) {
  return acc(std::move(recv), std::move(field), nullptr, p);
}

AssertionPtr Assertion::sep_conj(AssertionPtr l, AssertionPtr r) {
  auto a = anode(Kind::SepConj, l ? l->pos : SourcePos{});
  a->a = std::move(l);
  a->b = std::move(r);
  return a;
}

AssertionPtr Assertion::implies(ExprPtr guard, AssertionPtr body) {
  auto a = anode(Kind::Implies, guard ? guard->pos : SourcePos{});
  a->expr = std::move(guard);
  a->a = std::move(body);
  return a;
}

AssertionPtr Assertion::cond(ExprPtr guard, AssertionPtr t, AssertionPtr e) {
  auto a = anode(Kind::Cond, guard ? guard->pos : SourcePos{});
  a->expr = std::move(guard);
  a->a = std::move(t);
  a->b = std::move(e);
  return a;
}

AssertionPtr Assertion::disj(AssertionPtr l, AssertionPtr r) {
  auto a = anode(Kind::Disj, l ? l->pos : SourcePos{});
  a->a = std::move(l);
  a->b = std::move(r);
  return a;
}

std::string Assertion::str() const {
  switch (kind) {
    case Kind::Pure: return expr->str();
    case Kind::Acc:
      return "acc(" + recv->str() + "." + field + ", " + (perm ? perm->str() : "wildcard") + ")";
    case Kind::SepConj: return a->str() + " * " + b->str();
    case Kind::Implies: return expr->str() + " ==> (" + a->str() + ")";
    case Kind::Cond: return "(" + expr->str() + " ? " + a->str() + " : " + b->str() + ")";
    case Kind::Disj: return "(" + a->str() + ") || (" + b->str() + ")";
  }
  return "?";
}

bool Assertion::contains_disjunction() const {
  switch (kind) {
    case Kind::Pure:
    case Kind::Acc: return false;
    case Kind::Implies: return a->contains_disjunction();
    case Kind::Disj: return true;
    case Kind::SepConj:
    case Kind::Cond: return a->contains_disjunction() || b->contains_disjunction();
  }
  return false;
}

void collect_expr_vars(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Var) out.push_back(e->var);
  collect_expr_vars(e->a, out);
  collect_expr_vars(e->b, out);
  collect_expr_vars(e->c, out);
}

void collect_expr_fields(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::FieldRead) out.push_back(e->field);
  collect_expr_fields(e->a, out);
  collect_expr_fields(e->b, out);
  collect_expr_fields(e->c, out);
}

void collect_assertion_vars(const AssertionPtr& a, std::vector<std::string>& out) {
  if (!a) return;
  collect_expr_vars(a->expr, out);
  collect_expr_vars(a->recv, out);
  collect_expr_vars(a->perm, out);
  collect_assertion_vars(a->a, out);
  collect_assertion_vars(a->b, out);
}

void collect_assertion_fields(const AssertionPtr& a, std::vector<std::string>& out) {
  if (!a) return;
  collect_expr_fields(a->expr, out);
  collect_expr_fields(a->recv, out);
  collect_expr_fields(a->perm, out);
  if (a->kind == Assertion::Kind::Acc) out.push_back(a->field);
  collect_assertion_fields(a->a, out);
  collect_assertion_fields(a->b, out);
}

}  // namespace ivl
