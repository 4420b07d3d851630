#include "ivlkit/symexpr.hpp"

#include <optional>

namespace ivl {

namespace {

std::shared_ptr<SymExpr> node(SymExpr::Kind k, TypeKind t) {
  auto e = std::make_shared<SymExpr>();
  e->kind = k;
  e->type = t;
  return e;
}

const char* op_str(SymBinOp op) {
  switch (op) {
    case SymBinOp::And: return "&&";
    case SymBinOp::Or: return "||";
    case SymBinOp::Eq: return "==";
    case SymBinOp::Lt: return "<";
    case SymBinOp::Le: return "<=";
    case SymBinOp::Add: return "+";
    case SymBinOp::Sub: return "-";
    case SymBinOp::Mul: return "*";
    case SymBinOp::Div: return "/";
  }
  return "?";
}

}  // namespace

SymExprPtr sym_var(std::uint64_t id, TypeKind type, std::string hint) {
  auto e = node(SymExpr::Kind::Var, type);
  e->var_id = id;
  e->hint = std::move(hint);
  return e;
}

SymExprPtr sym_lit(Value v) {
  auto e = node(SymExpr::Kind::Lit, v.kind());
  e->lit = std::move(v);
  return e;
}

SymExprPtr sym_bool(bool b) { return sym_lit(Value::make_bool(b)); }
SymExprPtr sym_perm(const Rational& r) { return sym_lit(Value::make_perm(r)); }
SymExprPtr sym_int(std::int64_t n) { return sym_lit(Value::make_int(n)); }

SymExprPtr sym_not(SymExprPtr sub) {
  if (sub->kind == SymExpr::Kind::Lit) return sym_bool(!sub->lit.as_bool());
  if (sub->kind == SymExpr::Kind::Unary && sub->uop == SymUnOp::Not) return sub->a;
  auto e = node(SymExpr::Kind::Unary, TypeKind::Bool);
  e->uop = SymUnOp::Not;
  e->a = std::move(sub);
  return e;
}

SymExprPtr sym_neg(SymExprPtr sub) {
  if (sub->kind == SymExpr::Kind::Lit && sub->lit.is_int())
    return sym_int(-sub->lit.as_int());
  auto e = node(SymExpr::Kind::Unary, TypeKind::Int);
  e->uop = SymUnOp::Neg;
  e->a = std::move(sub);
  return e;
}

SymExprPtr sym_bin(SymBinOp op, SymExprPtr l, SymExprPtr r) {
  TypeKind t;
  switch (op) {
    case SymBinOp::And:
    case SymBinOp::Or:
    case SymBinOp::Eq:
    case SymBinOp::Lt:
    case SymBinOp::Le:
      t = TypeKind::Bool;
      break;
    default:
      t = l->type;
      break;
  }
  // Fold the conjunction/disjunction units so pc chains stay readable.
  if (op == SymBinOp::And) {
    if (l->kind == SymExpr::Kind::Lit) return l->lit.as_bool() ? r : l;
    if (r->kind == SymExpr::Kind::Lit) return r->lit.as_bool() ? l : r;
  }
  if (op == SymBinOp::Or) {
    if (l->kind == SymExpr::Kind::Lit) return l->lit.as_bool() ? l : r;
    if (r->kind == SymExpr::Kind::Lit) return r->lit.as_bool() ? r : l;
  }
  auto e = node(SymExpr::Kind::Binary, t);
  e->bop = op;
  e->a = std::move(l);
  e->b = std::move(r);
  return e;
}

bool sym_equal(const SymExprPtr& a, const SymExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind || a->type != b->type) return false;
  switch (a->kind) {
    case SymExpr::Kind::Var: return a->var_id == b->var_id;
    case SymExpr::Kind::Lit: return a->lit == b->lit;
    case SymExpr::Kind::Unary: return a->uop == b->uop && sym_equal(a->a, b->a);
    case SymExpr::Kind::Binary:
      return a->bop == b->bop && sym_equal(a->a, b->a) && sym_equal(a->b, b->b);
  }
  return false;
}

std::optional<Value> sym_ground_value(const SymExprPtr& e) {
  switch (e->kind) {
    case SymExpr::Kind::Var: return std::nullopt;
    case SymExpr::Kind::Lit: return e->lit;
    case SymExpr::Kind::Unary: {
      auto v = sym_ground_value(e->a);
      if (!v) return std::nullopt;
      if (e->uop == SymUnOp::Not) {
        if (!v->is_bool()) return std::nullopt;
        return Value::make_bool(!v->as_bool());
      }
      if (!v->is_int()) return std::nullopt;
      return Value::make_int(-v->as_int());
    }
    case SymExpr::Kind::Binary: {
      auto l = sym_ground_value(e->a);
      auto r = sym_ground_value(e->b);
      if (!l || !r) return std::nullopt;
      switch (e->bop) {
        case SymBinOp::And: return Value::make_bool(l->as_bool() && r->as_bool());
        case SymBinOp::Or: return Value::make_bool(l->as_bool() || r->as_bool());
        case SymBinOp::Eq:
          if (l->kind() != r->kind()) return std::nullopt;
          return Value::make_bool(*l == *r);
        case SymBinOp::Lt:
        case SymBinOp::Le: {
          bool strict = e->bop == SymBinOp::Lt;
          if (l->is_int() && r->is_int())
            return Value::make_bool(strict ? l->as_int() < r->as_int()
                                           : l->as_int() <= r->as_int());
          if (l->is_perm() && r->is_perm())
            return Value::make_bool(strict ? l->as_perm() < r->as_perm()
                                           : l->as_perm() <= r->as_perm());
          return std::nullopt;
        }
        case SymBinOp::Add:
        case SymBinOp::Sub: {
          bool add = e->bop == SymBinOp::Add;
          if (l->is_int() && r->is_int())
            return Value::make_int(add ? l->as_int() + r->as_int() : l->as_int() - r->as_int());
          if (l->is_perm() && r->is_perm()) {
            Rational v = add ? l->as_perm() + r->as_perm() : l->as_perm() - r->as_perm();
            return Value::make_perm(v);
          }
          return std::nullopt;
        }
        case SymBinOp::Mul:
          if (!l->is_int() || !r->is_int()) return std::nullopt;
          return Value::make_int(l->as_int() * r->as_int());
        case SymBinOp::Div:
          if (!l->is_perm() || !r->is_perm() || r->as_perm().is_zero()) return std::nullopt;
          return Value::make_perm(l->as_perm() / r->as_perm());
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string SymExpr::str() const {
  switch (kind) {
    case Kind::Var: return hint.empty() ? "$" + std::to_string(var_id) : hint;
    case Kind::Lit: return lit.str();
    case Kind::Unary: return (uop == SymUnOp::Not ? "!" : "-") + ("(" + a->str() + ")");
    case Kind::Binary: return "(" + a->str() + " " + op_str(bop) + " " + b->str() + ")";
  }
  return "?";
}

}  // namespace ivl
