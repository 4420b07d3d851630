#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ivlkit/semantics.hpp"
#include "ivlkit/stmt.hpp"

namespace ivl {

struct PStmt;
using PStmtPtr = std::shared_ptr<const PStmt>;

// Annotated parallel-language statement. Objects have the single field "v".
struct PStmt {
  enum class Kind { Assign, Load, Store, Alloc, Free, Seq, If, Par, While, Skip };

  Kind kind;
  SourcePos pos;

  std::string var;    // Assign/Load/Alloc target, Free operand
  ExprPtr expr;       // Assign rhs, Store rhs, Alloc init, If/While condition
  std::string ref;    // Load/Store reference variable
  PStmtPtr s1, s2;    // Seq/If/Par children, While body (s1)
  AssertionPtr pre_l, post_l, pre_r, post_r;  // Par annotations
  AssertionPtr invariant;                     // While annotation

  static PStmtPtr assign(std::string var, ExprPtr e, SourcePos p = {});
  static PStmtPtr load(std::string var, std::string ref, SourcePos p = {});
  static PStmtPtr store(std::string ref, ExprPtr e, SourcePos p = {});
  static PStmtPtr alloc(std::string var, ExprPtr e, SourcePos p = {});
  static PStmtPtr free_(std::string ref, SourcePos p = {});
  static PStmtPtr seq(PStmtPtr a, PStmtPtr b);
  static PStmtPtr ite(ExprPtr cond, PStmtPtr t, PStmtPtr e, SourcePos p = {});
  static PStmtPtr par(PStmtPtr l, PStmtPtr r, AssertionPtr pre_l, AssertionPtr post_l,
                      AssertionPtr pre_r, AssertionPtr post_r, SourcePos p = {});
  static PStmtPtr while_(ExprPtr cond, AssertionPtr inv, PStmtPtr body, SourcePos p = {});
  static PStmtPtr skip(SourcePos p = {});

  std::string str() const;
};

struct PMethod {
  std::string name;
  TypeContext ctx;
  AssertionPtr requires_;  // defaults to true
  AssertionPtr ensures_;
  PStmtPtr body;
};

struct PProgram {
  std::vector<PMethod> methods;
  const PMethod* find(const std::string& name) const;
};

PProgram parse_pim(const std::string& source);

// Variable-assignment, load and alloc targets; heap writes excluded.
std::set<std::string> mod_vars_parimp(const PStmtPtr& stmt);
std::set<std::string> free_vars_parimp(const PStmtPtr& stmt);
std::set<std::string> assertion_free_vars(const AssertionPtr& a);

struct TranslationResult {
  Method main;                    // inhale P; [[C]].1; exhale Q
  std::vector<Method> auxiliaries;
};

struct TranslationError {
  SourcePos pos;
  std::string message;
  std::optional<State> witness;  // non-self-framing annotation witness
};

// The statement-by-statement encoding into the IVL; annotations are checked
// self-framing over the given bounds, and the parallel rule's variable side
// conditions are checked syntactically.
TranslationResult translate(const PMethod& m, const StateSpace& sp);

}  // namespace ivl
