#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ivlkit/value.hpp"

namespace ivl {

struct SourcePos {
  int line = 0;
  int col = 0;
  std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

enum class UnOp { Not, Neg };
enum class BinOp { And, Or, Eq, Lt, Add, Sub, Mul, Div };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Heap-dependent expression tree. Evaluation is partial: reading a heap
// location outside dom(heap) or an unbound variable yields "undefined".
struct Expr {
  enum class Kind { Literal, Var, FieldRead, Unary, Binary, Cond };

  Kind kind;
  SourcePos pos;

  Value literal;      // Literal
  std::string var;    // Var
  std::string field;  // FieldRead
  UnOp uop{};
  BinOp bop{};
  ExprPtr a, b, c;  // operands; Cond uses all three

  static ExprPtr lit(Value v, SourcePos p = {});
  static ExprPtr variable(std::string name, SourcePos p = {});
  static ExprPtr field_read(ExprPtr recv, std::string field, SourcePos p = {});
  static ExprPtr unary(UnOp op, ExprPtr e, SourcePos p = {});
  static ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r, SourcePos p = {});
  static ExprPtr cond(ExprPtr c, ExprPtr t, ExprPtr e, SourcePos p = {});

  std::string str() const;
};

struct Assertion;
using AssertionPtr = std::shared_ptr<const Assertion>;

// IDF assertion tree. `*` is separating conjunction; acc with a null perm
// expression denotes a wildcard.
struct Assertion {
  enum class Kind { Pure, Acc, SepConj, Implies, Cond, Disj };

  Kind kind;
  SourcePos pos;

  ExprPtr expr;        // Pure: the expression; Implies/Cond: the guard
  ExprPtr recv;        // Acc receiver
  std::string field;   // Acc field
  ExprPtr perm;        // Acc permission; nullptr = wildcard
  AssertionPtr a, b;   // children

  bool is_wildcard() const { return kind == Kind::Acc && !perm; }

  static AssertionPtr pure(ExprPtr e);
  static AssertionPtr acc(ExprPtr recv, std::string field, ExprPtr perm, SourcePos p = {});
  static AssertionPtr wildcard(ExprPtr recv, std::string field, SourcePos p = {});
  static AssertionPtr sep_conj(AssertionPtr l, AssertionPtr r);
  static AssertionPtr implies(ExprPtr guard, AssertionPtr body);
  static AssertionPtr cond(ExprPtr guard, AssertionPtr t, AssertionPtr e);
  static AssertionPtr disj(AssertionPtr l, AssertionPtr r);

  std::string str() const;

  bool contains_disjunction() const;
};

void collect_expr_vars(const ExprPtr& e, std::vector<std::string>& out);
void collect_assertion_vars(const AssertionPtr& a, std::vector<std::string>& out);
void collect_assertion_fields(const AssertionPtr& a, std::vector<std::string>& out);
void collect_expr_fields(const ExprPtr& e, std::vector<std::string>& out);

}  // namespace ivl
