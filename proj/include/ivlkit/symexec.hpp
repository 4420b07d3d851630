#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ivlkit/prover.hpp"
#include "ivlkit/stmt.hpp"

namespace ivl {

// Heap chunk: receiver, field, permission and value, all symbolic. Permission
// positivity lives in the path condition, not here.
struct Chunk {
  SymExprPtr recv;
  std::string field;
  SymExprPtr perm;
  SymExprPtr val;
};

struct SymState {
  std::map<std::string, SymExprPtr> store;
  SymExprPtr pc;              // boolean path condition
  std::vector<Chunk> heap;    // ordered chunk sequence

  SymState add_pc(const SymExprPtr& t) const {
    SymState s = *this;
    s.pc = sym_and(s.pc, t);
    return s;
  }
  SymState set_store(const std::string& var, SymExprPtr t) const {
    SymState s = *this;
    s.store[var] = std::move(t);
    return s;
  }
};

struct Diagnostic {
  enum class Kind { Entailment, MissingChunk, Type, Unsupported };
  std::string method;
  SourcePos pos;
  Kind kind;
  std::string detail;
  std::string pc;

  std::string str() const;
};

enum class Consolidation { None, Merge };

// One verification task: fresh supply, prover, options and diagnostics sink.
// Tasks are independent; nothing here is shared across threads.
struct SymExecCtx {
  SymExecCtx(const TypeContext& type_ctx, Prover& prover) : types(type_ctx), prover(prover) {}

  const TypeContext& types;
  Prover& prover;
  FreshSupply fresh;
  Consolidation consolidation = Consolidation::None;
  bool prune_branches = true;
  std::string method_name;
  SourcePos current_pos;
  std::vector<Diagnostic> diags;

  void report(Diagnostic::Kind kind, const std::string& detail, const SymExprPtr& pc);
};

using K = std::function<bool(SymState)>;
using KExpr = std::function<bool(SymState, SymExprPtr)>;
using KChunk = std::function<bool(SymState, Chunk)>;

struct PermRequirement {
  enum class Kind { Exact, Wildcard, Read } kind;
  SymExprPtr amount;  // Exact only

  static PermRequirement exact(SymExprPtr t) { return {Kind::Exact, std::move(t)}; }
  static PermRequirement wildcard() { return {Kind::Wildcard, nullptr}; }
  static PermRequirement read() { return {Kind::Read, nullptr}; }
};

bool sexec(SymExecCtx& cx, SymState sigma, const StmtPtr& stmt, const K& k);
bool sproduce(SymExecCtx& cx, SymState sigma, const AssertionPtr& a, const K& k);
bool sconsume(SymExecCtx& cx, SymState sigma, const AssertionPtr& a, const K& k);
bool sexp(SymExecCtx& cx, SymState sigma, const ExprPtr& e, const KExpr& k);

// Removes exactly the chunks whose permission is provably zero.
bool scleanup(SymExecCtx& cx, SymState sigma, const K& k);
// Prepends the chunk, then consolidates.
bool chunk_add(SymExecCtx& cx, SymState sigma, Chunk c, const K& k);
// Pluggable strategy; the successor must denote the same concrete states.
bool consolidate(SymExecCtx& cx, SymState sigma, const K& k);
// Scans the chunk list in order for the first chunk with a provably matching
// receiver and a provable permission requirement; removes it.
bool extract(SymExecCtx& cx, SymState sigma, const SymExprPtr& recv, const std::string& field,
             const PermRequirement& req, const KChunk& k);

struct VerifyOptions {
  Consolidation consolidation = Consolidation::None;
  bool prune_branches = true;
};

struct VerifyResult {
  bool ok = false;
  std::vector<Diagnostic> diagnostics;
  std::uint64_t fresh_issued = 0;
};

// Builds the initial symbolic state (fresh variable per declared variable,
// true pc, empty heap) and runs sexec with the trivial continuation.
VerifyResult verify_method(const TypeContext& ctx, const StmtPtr& body, Prover& prover,
                           const VerifyOptions& opts = {}, const std::string& method_name = "");

}  // namespace ivl
