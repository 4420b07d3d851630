#include "ivlkit/stmt.hpp"

#include <stdexcept>

namespace ivl {

void TypeContext::declare(std::string var, TypeKind kind) {
  if (kinds_.count(var)) throw std::invalid_argument("duplicate declaration of " + var);
  order_.push_back(var);
  kinds_.emplace(std::move(var), kind);
}

std::optional<TypeKind> TypeContext::kind_of(const std::string& var) const {
  auto it = kinds_.find(var);
  if (it == kinds_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::shared_ptr<Stmt> node(Stmt::Kind k, SourcePos p = {}) {
  auto s = std::make_shared<Stmt>();
  s->kind = k;
  s->pos = p;
  return s;
}

}  // namespace

StmtPtr Stmt::inhale(AssertionPtr a, SourcePos p) {
  auto s = node(Kind::Inhale, p);
  s->assertion = std::move(a);
  return s;
}

StmtPtr Stmt::exhale(AssertionPtr a, SourcePos p) {
  auto s = node(Kind::Exhale, p);
  s->assertion = std::move(a);
  return s;
}

StmtPtr Stmt::havoc(std::string var, SourcePos p) {
  auto s = node(Kind::Havoc, p);
  s->var = std::move(var);
  return s;
}

StmtPtr Stmt::seq(StmtPtr a, StmtPtr b) {
  auto s = node(Kind::Seq, a ? a->pos : SourcePos{});
  s->s1 = std::move(a);
  s->s2 = std::move(b);
  return s;
}

StmtPtr Stmt::ite(ExprPtr cond, StmtPtr t, StmtPtr e, SourcePos p) {
  auto s = node(Kind::If, p);
  s->expr = std::move(cond);
  s->s1 = std::move(t);
  s->s2 = std::move(e);
  return s;
}

StmtPtr Stmt::assign(std::string var, ExprPtr e, SourcePos p) {
  auto s = node(Kind::Assign, p);
  s->var = std::move(var);
  s->expr = std::move(e);
  return s;
}

StmtPtr Stmt::skip(SourcePos p) { return node(Kind::Skip, p); }

StmtPtr Stmt::field_assign(ExprPtr recv, std::string field, ExprPtr rhs, SourcePos p) {
  auto s = node(Kind::FieldAssign, p);
  s->recv = std::move(recv);
  s->field = std::move(field);
  s->rhs = std::move(rhs);
  return s;
}

std::string Stmt::str() const {
  switch (kind) {
    case Kind::Inhale: return "inhale " + assertion->str();
    case Kind::Exhale: return "exhale " + assertion->str();
    case Kind::Havoc: return "havoc " + var;
    case Kind::Seq: return s1->str() + "; " + s2->str();
    case Kind::If: return "if (" + expr->str() + ") { " + s1->str() + " } else { " + s2->str() + " }";
    case Kind::Assign: return var + " := " + expr->str();
    case Kind::Skip: return "skip";
    case Kind::FieldAssign: return recv->str() + "." + field + " := " + rhs->str();
  }
  return "?";
}

const Method* Program::find(const std::string& name) const {
  for (const auto& m : methods)
    if (m.name == name) return &m;
  return nullptr;
}

namespace {

void err(std::vector<TypeError>* errs, SourcePos pos, std::string msg) {
  if (errs) errs->push_back({pos, std::move(msg)});
}

}  // namespace

std::optional<TypeKind> type_of_expr(const TypeContext& ctx, const ExprPtr& e,
                                     std::vector<TypeError>* errs) {
  if (!e) return std::nullopt;
  switch (e->kind) {
    case Expr::Kind::Literal:
      return e->literal.kind();
    case Expr::Kind::Var: {
      auto k = ctx.kind_of(e->var);
      if (!k) err(errs, e->pos, "undeclared variable " + e->var);
      return k;
    }
    case Expr::Kind::FieldRead: {
      auto rk = type_of_expr(ctx, e->a, errs);
      if (rk && *rk != TypeKind::Ref)
        err(errs, e->pos, "field read on non-reference expression");
      return field_type(e->field);
    }
    case Expr::Kind::Unary: {
      auto k = type_of_expr(ctx, e->a, errs);
      if (!k) return std::nullopt;
      if (e->uop == UnOp::Not) {
        if (*k != TypeKind::Bool) err(errs, e->pos, "! applied to non-boolean");
        return TypeKind::Bool;
      }
      if (*k != TypeKind::Int) err(errs, e->pos, "unary - applied to non-integer");
      return TypeKind::Int;
    }
    case Expr::Kind::Binary: {
      auto l = type_of_expr(ctx, e->a, errs);
      auto r = type_of_expr(ctx, e->b, errs);
      if (!l || !r) return std::nullopt;
      switch (e->bop) {
        case BinOp::And:
        case BinOp::Or:
          if (*l != TypeKind::Bool || *r != TypeKind::Bool)
            err(errs, e->pos, "boolean operator on non-boolean operands");
          return TypeKind::Bool;
        case BinOp::Eq:
          if (*l != *r) err(errs, e->pos, "equality between different types");
          return TypeKind::Bool;
        case BinOp::Lt:
          if (*l != *r || (*l != TypeKind::Int && *l != TypeKind::Perm))
            err(errs, e->pos, "< requires two integers or two permissions");
          return TypeKind::Bool;
        case BinOp::Add:
        case BinOp::Sub:
          if (*l != *r || (*l != TypeKind::Int && *l != TypeKind::Perm))
            err(errs, e->pos, "arithmetic on mismatched operands");
          return *l;
        case BinOp::Mul:
          if (*l != TypeKind::Int || *r != TypeKind::Int)
            err(errs, e->pos, "* requires integer operands");
          return TypeKind::Int;
        case BinOp::Div:
          // Division only exists on permission-typed operands.
          if (*l != TypeKind::Perm || *r != TypeKind::Perm)
            err(errs, e->pos, "/ requires permission-typed operands");
          return TypeKind::Perm;
      }
      return std::nullopt;
    }
    case Expr::Kind::Cond: {
      auto c = type_of_expr(ctx, e->a, errs);
      auto l = type_of_expr(ctx, e->b, errs);
      auto r = type_of_expr(ctx, e->c, errs);
      if (c && *c != TypeKind::Bool) err(errs, e->pos, "conditional guard is not boolean");
      if (l && r && *l != *r) err(errs, e->pos, "conditional branches have different types");
      return l;
    }
  }
  return std::nullopt;
}

bool check_assertion(const TypeContext& ctx, const AssertionPtr& a, std::vector<TypeError>* errs) {
  if (!a) return false;
  std::size_t before = errs ? errs->size() : 0;
  switch (a->kind) {
    case Assertion::Kind::Pure: {
      auto k = type_of_expr(ctx, a->expr, errs);
      if (k && *k != TypeKind::Bool) err(errs, a->pos, "pure assertion is not boolean");
      break;
    }
    case Assertion::Kind::Acc: {
      auto rk = type_of_expr(ctx, a->recv, errs);
      if (rk && *rk != TypeKind::Ref) err(errs, a->pos, "acc receiver is not a reference");
      if (a->perm) {
        auto pk = type_of_expr(ctx, a->perm, errs);
        if (pk && *pk != TypeKind::Perm) err(errs, a->pos, "acc permission is not permission-typed");
      }
      break;
    }
    case Assertion::Kind::SepConj:
    case Assertion::Kind::Disj:
      check_assertion(ctx, a->a, errs);
      check_assertion(ctx, a->b, errs);
      break;
    case Assertion::Kind::Implies: {
      auto k = type_of_expr(ctx, a->expr, errs);
      if (k && *k != TypeKind::Bool) err(errs, a->pos, "implication guard is not boolean");
      check_assertion(ctx, a->a, errs);
      break;
    }
    case Assertion::Kind::Cond: {
      auto k = type_of_expr(ctx, a->expr, errs);
      if (k && *k != TypeKind::Bool) err(errs, a->pos, "conditional guard is not boolean");
      check_assertion(ctx, a->a, errs);
      check_assertion(ctx, a->b, errs);
      break;
    }
  }
  return !errs || errs->size() == before;
}

namespace {

void type_check_rec(const TypeContext& ctx, const StmtPtr& s, std::vector<TypeError>& errs) {
  if (!s) return;
  switch (s->kind) {
    case Stmt::Kind::Inhale:
    case Stmt::Kind::Exhale:
      check_assertion(ctx, s->assertion, &errs);
      break;
    case Stmt::Kind::Havoc:
      if (!ctx.is_declared(s->var)) err(&errs, s->pos, "havoc of undeclared variable " + s->var);
      break;
    case Stmt::Kind::Seq:
      type_check_rec(ctx, s->s1, errs);
      type_check_rec(ctx, s->s2, errs);
      break;
    case Stmt::Kind::If: {
      auto k = type_of_expr(ctx, s->expr, &errs);
      if (k && *k != TypeKind::Bool) err(&errs, s->pos, "if condition is not boolean");
      type_check_rec(ctx, s->s1, errs);
      type_check_rec(ctx, s->s2, errs);
      break;
    }
    case Stmt::Kind::Assign: {
      auto vk = ctx.kind_of(s->var);
      if (!vk) {
        err(&errs, s->pos, "assignment to undeclared variable " + s->var);
        break;
      }
      auto ek = type_of_expr(ctx, s->expr, &errs);
      if (ek && *ek != *vk)
        err(&errs, s->pos, "assignment of " + type_kind_name(*ek) + " to " + s->var + ": " +
                               type_kind_name(*vk));
      break;
    }
    case Stmt::Kind::Skip:
      break;
    case Stmt::Kind::FieldAssign: {
      auto rk = type_of_expr(ctx, s->recv, &errs);
      if (rk && *rk != TypeKind::Ref) err(&errs, s->pos, "field assignment to non-reference");
      auto vk = type_of_expr(ctx, s->rhs, &errs);
      if (vk && *vk != field_type(s->field))
        err(&errs, s->pos, "field assignment value has wrong type");
      break;
    }
  }
}

}  // namespace

std::vector<TypeError> type_check(const TypeContext& ctx, const StmtPtr& stmt) {
  std::vector<TypeError> errs;
  type_check_rec(ctx, stmt, errs);
  return errs;
}

std::set<std::string> mod_vars(const StmtPtr& stmt) {
  std::set<std::string> out;
  if (!stmt) return out;
  switch (stmt->kind) {
    case Stmt::Kind::Havoc:
    case Stmt::Kind::Assign:
      out.insert(stmt->var);
      break;
    case Stmt::Kind::Seq:
    case Stmt::Kind::If: {
      auto l = mod_vars(stmt->s1);
      auto r = mod_vars(stmt->s2);
      out.insert(l.begin(), l.end());
      out.insert(r.begin(), r.end());
      break;
    }
    default:
      break;
  }
  return out;
}

namespace {

void free_vars_rec(const StmtPtr& s, std::set<std::string>& out) {
  if (!s) return;
  std::vector<std::string> vs;
  switch (s->kind) {
    case Stmt::Kind::Inhale:
    case Stmt::Kind::Exhale:
      collect_assertion_vars(s->assertion, vs);
      break;
    case Stmt::Kind::Havoc:
    case Stmt::Kind::Assign:
      vs.push_back(s->var);
      collect_expr_vars(s->expr, vs);
      break;
    case Stmt::Kind::Seq:
      free_vars_rec(s->s1, out);
      free_vars_rec(s->s2, out);
      break;
    case Stmt::Kind::If:
      collect_expr_vars(s->expr, vs);
      free_vars_rec(s->s1, out);
      free_vars_rec(s->s2, out);
      break;
    case Stmt::Kind::Skip:
      break;
    case Stmt::Kind::FieldAssign:
      collect_expr_vars(s->recv, vs);
      collect_expr_vars(s->rhs, vs);
      break;
  }
  out.insert(vs.begin(), vs.end());
}

}  // namespace

std::set<std::string> free_vars(const StmtPtr& stmt) {
  std::set<std::string> out;
  free_vars_rec(stmt, out);
  return out;
}

std::set<std::string> fields_of_stmt(const StmtPtr& stmt) {
  std::set<std::string> out;
  if (!stmt) return out;
  std::vector<std::string> fs;
  switch (stmt->kind) {
    case Stmt::Kind::Inhale:
    case Stmt::Kind::Exhale:
      collect_assertion_fields(stmt->assertion, fs);
      break;
    case Stmt::Kind::Assign:
      collect_expr_fields(stmt->expr, fs);
      break;
    case Stmt::Kind::If:
      collect_expr_fields(stmt->expr, fs);
      break;
    case Stmt::Kind::FieldAssign:
      collect_expr_fields(stmt->recv, fs);
      collect_expr_fields(stmt->rhs, fs);
      fs.push_back(stmt->field);
      break;
    default:
      break;
  }
  out.insert(fs.begin(), fs.end());
  for (const auto& child : {stmt->s1, stmt->s2}) {
    auto sub = fields_of_stmt(child);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

}  // namespace ivl
