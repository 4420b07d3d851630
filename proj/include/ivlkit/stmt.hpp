#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ivlkit/expr.hpp"

namespace ivl {

// Declared variables with their type shapes; the finite domains behind each
// type come from a StateSpace at check time.
class TypeContext {
public:
  void declare(std::string var, TypeKind kind);
  bool is_declared(const std::string& var) const { return kinds_.count(var) != 0; }
  std::optional<TypeKind> kind_of(const std::string& var) const;
  const std::vector<std::string>& vars() const { return order_; }
  std::size_t size() const { return order_.size(); }

private:
  std::vector<std::string> order_;
  std::map<std::string, TypeKind> kinds_;
};

// Heap values carry a fixed type per field; this toolchain types every field
// as Int (ParImp's single field v holds integers).
inline TypeKind field_type(const std::string&) { return TypeKind::Int; }

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  enum class Kind { Inhale, Exhale, Havoc, Seq, If, Assign, Skip, FieldAssign };

  Kind kind;
  SourcePos pos;

  AssertionPtr assertion;  // Inhale/Exhale
  std::string var;         // Havoc/Assign target
  ExprPtr expr;            // Assign rhs, If condition
  ExprPtr recv;            // FieldAssign receiver
  std::string field;       // FieldAssign field
  ExprPtr rhs;             // FieldAssign rhs
  StmtPtr s1, s2;          // Seq/If children

  static StmtPtr inhale(AssertionPtr a, SourcePos p = {});
  static StmtPtr exhale(AssertionPtr a, SourcePos p = {});
  static StmtPtr havoc(std::string var, SourcePos p = {});
  static StmtPtr seq(StmtPtr a, StmtPtr b);
  static StmtPtr ite(ExprPtr cond, StmtPtr t, StmtPtr e, SourcePos p = {});
  static StmtPtr assign(std::string var, ExprPtr e, SourcePos p = {});
  static StmtPtr skip(SourcePos p = {});
  static StmtPtr field_assign(ExprPtr recv, std::string field, ExprPtr rhs, SourcePos p = {});

  std::string str() const;  // single-line form for diagnostics
};

struct Method {
  std::string name;
  TypeContext ctx;
  StmtPtr body;
};

// Named methods with unique names.
struct Program {
  std::vector<Method> methods;
  const Method* find(const std::string& name) const;
};

struct TypeError {
  SourcePos pos;
  std::string message;
};

// Structural typing. Returns all diagnostics; empty means well-typed.
std::vector<TypeError> type_check(const TypeContext& ctx, const StmtPtr& stmt);
std::optional<TypeKind> type_of_expr(const TypeContext& ctx, const ExprPtr& e,
                                     std::vector<TypeError>* errs);
bool check_assertion(const TypeContext& ctx, const AssertionPtr& a, std::vector<TypeError>* errs);

inline bool well_typed(const TypeContext& ctx, const StmtPtr& stmt) {
  return type_check(ctx, stmt).empty();
}

// Targets of assign/havoc; field assignments modify no variable.
std::set<std::string> mod_vars(const StmtPtr& stmt);
// Every variable occurrence, including assignment targets.
std::set<std::string> free_vars(const StmtPtr& stmt);

std::set<std::string> fields_of_stmt(const StmtPtr& stmt);

}  // namespace ivl
