#pragma once

#include <map>
#include <optional>
#include <string>

#include "ivlkit/value.hpp"

namespace ivl {

// Concrete IDF state: a local store, a partial heap and a permission mask.
// Invariants (enforced by make/with_* factories):
//   - mask values lie in (0, 1]; zero entries are never stored
//   - mask(l) > 0 implies l is in dom(heap)
// The mask is total with default 0; only nonzero entries are materialized.
class State {
public:
  using Store = std::map<std::string, Value>;
  using Heap = std::map<HeapLoc, Value>;
  using Mask = std::map<HeapLoc, Rational>;

  State() = default;

  // Throws std::invalid_argument if the invariants are violated.
  static State make(Store store, Heap heap, Mask mask);

  const Store& store() const { return store_; }
  const Heap& heap() const { return heap_; }
  const Mask& mask() const { return mask_; }

  Rational mask_at(const HeapLoc& l) const {
    auto it = mask_.find(l);
    return it == mask_.end() ? Rational() : it->second;
  }
  std::optional<Value> heap_at(const HeapLoc& l) const {
    auto it = heap_.find(l);
    if (it == heap_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<Value> store_at(const std::string& var) const {
    auto it = store_.find(var);
    if (it == store_.end()) return std::nullopt;
    return it->second;
  }

  State with_store_var(const std::string& var, Value v) const;
  // Requires full permission at l per the field-assignment semantics; the
  // caller checks that, here we only keep the state invariants intact.
  State with_heap_value(const HeapLoc& l, Value v) const;

  bool operator==(const State& o) const {
    return store_ == o.store_ && heap_ == o.heap_ && mask_ == o.mask_;
  }
  bool operator!=(const State& o) const { return !(*this == o); }
  bool operator<(const State& o) const {
    if (store_ != o.store_) return store_ < o.store_;
    if (heap_ != o.heap_) return heap_ < o.heap_;
    return mask_ < o.mask_;
  }

  std::string str() const;

private:
  Store store_;
  Heap heap_;
  Mask mask_;
};

// The five IDF-algebra operations over concrete states.

// Defined iff the stores are identical, the heaps agree on their common
// domain, and permissions sum to at most 1 per location.
std::optional<State> combine(const State& a, const State& b);

// Same store and heap, all permissions zeroed.
State core(const State& a);

// Heap restricted to the positively-permitted locations.
State stabilize(const State& a);

// True iff dom(heap) = { l | mask(l) > 0 }.
bool is_stable(const State& a);

// True iff a = b + r for some remainder r. Decided by direct construction:
// equal stores, b's heap contained in a's, b's mask pointwise below a's.
bool greater_eq(const State& a, const State& b);

}  // namespace ivl
