#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "ivlkit/value.hpp"

namespace ivl {

struct SymExpr;
using SymExprPtr = std::shared_ptr<const SymExpr>;

enum class SymUnOp { Not, Neg };
enum class SymBinOp { And, Or, Eq, Lt, Le, Add, Sub, Mul, Div };

// Symbolic term: variable, literal, unary or binary application. Types follow
// the program's four kinds; fresh variables carry unique identifiers issued by
// a task-local FreshSupply.
struct SymExpr {
  enum class Kind { Var, Lit, Unary, Binary };

  Kind kind;
  TypeKind type;

  std::uint64_t var_id = 0;  // Var
  std::string hint;          // Var: display name
  Value lit;                 // Lit
  SymUnOp uop{};
  SymBinOp bop{};
  SymExprPtr a, b;

  std::string str() const;
};

SymExprPtr sym_var(std::uint64_t id, TypeKind type, std::string hint = "");
SymExprPtr sym_lit(Value v);
SymExprPtr sym_bool(bool b);
SymExprPtr sym_perm(const Rational& r);
SymExprPtr sym_int(std::int64_t n);
SymExprPtr sym_not(SymExprPtr e);
SymExprPtr sym_neg(SymExprPtr e);
SymExprPtr sym_bin(SymBinOp op, SymExprPtr l, SymExprPtr r);
inline SymExprPtr sym_and(SymExprPtr l, SymExprPtr r) { return sym_bin(SymBinOp::And, std::move(l), std::move(r)); }
inline SymExprPtr sym_eq(SymExprPtr l, SymExprPtr r) { return sym_bin(SymBinOp::Eq, std::move(l), std::move(r)); }

// Structural equality (variables by id, literals by value).
bool sym_equal(const SymExprPtr& a, const SymExprPtr& b);

// Ground terms fold to literals; returns nullopt for non-ground or stuck
// applications (e.g. division by a zero literal).
std::optional<Value> sym_ground_value(const SymExprPtr& e);

// Monotone counter issuing unique symbolic variables for one verification
// task; deterministic, so runs are reproducible bit for bit.
class FreshSupply {
public:
  SymExprPtr fresh(TypeKind type, const std::string& hint) {
    return sym_var(next_++, type, hint + "@" + std::to_string(next_ - 1));
  }
  std::uint64_t issued() const { return next_; }

private:
  std::uint64_t next_ = 0;
};

}  // namespace ivl
