#pragma once

#include <optional>
#include <unordered_map>

#include "ivlkit/space.hpp"

namespace ivl {

// Partial evaluation of a heap-dependent expression. Undefined (nullopt) when
// a variable is unbound or a dereferenced location has no heap value; &&, ||
// and conditionals evaluate lazily, matching the desugaring used by the
// symbolic back-end.
std::optional<Value> eval_expr(const State& st, const ExprPtr& e);

// Three-valued satisfaction: true / false / undefined (nullopt). Separating
// conjunction searches the state's decompositions within the space.
std::optional<bool> sat(const StateSpace& sp, std::size_t state_idx, const AssertionPtr& a);
std::optional<bool> sat(const StateSpace& sp, const State& st, const AssertionPtr& a);

// { c | exists p in P, q in Q with c = p + q }.
Bitset sep_conj(const StateSpace& sp, const Bitset& p, const Bitset& q);

// forall w: w in P <-> stabilize(w) in P.
bool is_self_framing(const StateSpace& sp, const Bitset& p);

// selfFraming({w} * P).
bool state_frames(const StateSpace& sp, std::size_t state_idx, const Bitset& p);

// forall stable w in B: w frames P.
bool assertion_frames(const StateSpace& sp, const Bitset& b, const Bitset& p);

// Expression defined on every state of P.
bool expr_framed_by(const StateSpace& sp, const Bitset& p, const ExprPtr& e);

// Caches per-assertion denotations for one space.
class DenoteCache {
public:
  explicit DenoteCache(const StateSpace& sp) : sp_(sp) {}

  // { w in sp | sat(w, a) = true }.
  const Bitset& denote(const AssertionPtr& a);
  const StateSpace& space() const { return sp_; }

private:
  Bitset compute(const AssertionPtr& a);

  const StateSpace& sp_;
  std::unordered_map<const Assertion*, Bitset> cache_;
};

}  // namespace ivl
