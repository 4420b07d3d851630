#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "ivlkit/oracle.hpp"

namespace ivl {

// One axiomatic-semantics derivation node. Exactly one rule exists per
// statement form; Seq's intermediate assertion is the left child's post and
// Exhale records its angelically chosen Q (= post).
struct Derivation {
  enum class Rule { Skip, Inhale, Exhale, Havoc, Assign, If, Seq, FieldAssign };

  StmtPtr stmt;
  Rule rule{};
  Bitset pre, post;
  std::vector<std::shared_ptr<const Derivation>> kids;  // Seq/If: [left/then, right/else]
};
using DerivationPtr = std::shared_ptr<const Derivation>;

struct DerivationFailure {
  std::string node_path;  // e.g. "seq.1/if.then"
  std::string message;
};

class AxSem {
public:
  struct Options {
    // Cap on stable precondition states for the per-state exhale backtracking.
    std::size_t backtrack_states = 10;
    std::size_t backtrack_candidates = 256;
    // Enumerate all subsets of the canonical remainder set (small spaces only).
    bool small_space_search = false;
    std::size_t small_space_limit = 12;
  };

  AxSem(const StateSpace& sp, Options opts = {}) : sp_(sp), cache_(sp), opts_(opts) {}

  DenoteCache& denotations() { return cache_; }

  // Verifies every node's side conditions; nullopt means accepted.
  std::optional<DerivationFailure> check_derivation(const DerivationPtr& d);

  // Canonical-choice builder with backtracking over exhale choices.
  DerivationPtr derive(const StmtPtr& stmt, const Bitset& pre);

  // Empirical harnesses for the two semantics-equivalence theorems.
  bool check_soundness_instance(const StmtPtr& stmt, Oracle& oracle);
  bool check_completeness_instance(const DerivationPtr& d, Oracle& oracle);

  // Rule posts, exposed for reuse and for dual-route tests.
  Bitset havoc_post(const Bitset& pre, const std::string& var) const;
  Bitset havoc_post_projection(const Bitset& pre, const std::string& var) const;
  Bitset assign_post(const Bitset& pre, const std::string& var, const ExprPtr& e) const;
  Bitset field_assign_post(const Bitset& pre, const ExprPtr& recv, const std::string& field,
                           const ExprPtr& rhs) const;
  // Guard-restricted precondition { w in P | b(w) = v }; nullopt if b is
  // undefined somewhere in P.
  std::optional<Bitset> restrict_by_guard(const Bitset& pre, const ExprPtr& b, bool v) const;

  std::string format(const DerivationPtr& d) const;

private:
  using Sink = std::function<bool(DerivationPtr)>;

  bool derive_rec(const StmtPtr& stmt, const Bitset& pre, const Sink& sink);
  bool exhale_candidates(const StmtPtr& stmt, const Bitset& pre, const Sink& sink);
  Bitset stabilize_closure(const Bitset& stable_members) const;
  std::optional<Bitset> canonical_exhale_q(const Bitset& pre, const Bitset& part_set,
                                           const Bitset& full_denote) const;

  const StateSpace& sp_;
  DenoteCache cache_;
  Options opts_;
};

}  // namespace ivl
