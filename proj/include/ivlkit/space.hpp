#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ivlkit/bitset.hpp"
#include "ivlkit/state.hpp"
#include "ivlkit/stmt.hpp"

namespace ivl {

// Bounds describing a finite universe of well-typed states.
struct SpaceConfig {
  std::int64_t int_min = 0;
  std::int64_t int_max = 2;
  int num_refs = 2;
  std::vector<std::int64_t> perm_denoms = {1, 2};
  std::vector<std::string> fields = {"v"};
  std::size_t max_states = 4u << 20;
};

// Enumeration of every well-typed IDF state within bounds, with the algebra
// operations realized on indices. A state index factors into a store index and
// a heap/mask ("hm") index; the hm part is a mixed-radix number over
// per-location options (permission, value-or-absent), so combine and friends
// work digit-wise without materializing quadratic tables.
class StateSpace {
public:
  StateSpace(TypeContext ctx, SpaceConfig cfg);

  const TypeContext& ctx() const { return ctx_; }
  const SpaceConfig& cfg() const { return cfg_; }

  std::size_t n_states() const { return n_states_; }
  std::size_t n_stores() const { return stores_.size(); }
  std::size_t n_hms() const { return n_hms_; }
  std::size_t n_locs() const { return locs_.size(); }
  const std::vector<HeapLoc>& locs() const { return locs_; }

  std::size_t store_of(std::size_t idx) const { return idx / n_hms_; }
  std::size_t hm_of(std::size_t idx) const { return idx % n_hms_; }
  std::size_t state_index(std::size_t store, std::size_t hm) const { return store * n_hms_ + hm; }

  const State& state_at(std::size_t idx) const { return states_[idx]; }
  std::optional<std::size_t> find_index(const State& s) const;

  // Algebra on indices. Combining keeps the store fixed (agreement algebra).
  std::optional<std::size_t> combine_idx(std::size_t a, std::size_t b) const;
  std::size_t stabilize_idx(std::size_t idx) const {
    return state_index(store_of(idx), stabilize_hm_[hm_of(idx)]);
  }
  std::size_t stabilize_hm(std::size_t hm) const { return stabilize_hm_[hm]; }
  std::size_t core_idx(std::size_t idx) const {
    return state_index(store_of(idx), core_hm_[hm_of(idx)]);
  }
  bool stable_idx(std::size_t idx) const { return stable_hm_[hm_of(idx)]; }
  const Bitset& stable_states() const { return stable_states_; }

  // All (a, b) hm pairs with combine(a, b) = hm.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& hm_decomps(std::size_t hm) const {
    return hm_decomps_[hm];
  }
  std::optional<std::size_t> combine_hm(std::size_t a, std::size_t b) const;

  // Domain of each type shape within the bounds.
  const std::vector<Value>& type_values(TypeKind k) const;

  int var_slot(const std::string& name) const;  // -1 when undeclared
  std::optional<std::size_t> store_update(std::size_t state_idx, int slot, const Value& v) const;

  std::optional<std::size_t> loc_index(RefId r, const std::string& field) const;
  // Replaces the heap value at loc; the location must currently have a value.
  std::optional<std::size_t> heap_update(std::size_t state_idx, std::size_t loc,
                                         const Value& v) const;

  Bitset empty_set() const { return Bitset(n_states_); }
  Bitset full_set() const { return Bitset(n_states_, true); }

private:
  struct LocOption {
    int perm_idx;  // into perms_
    int val_idx;   // into heap_vals_, -1 = absent
  };

  std::size_t hm_digit(std::size_t hm, std::size_t loc) const;
  std::size_t hm_with_digit(std::size_t hm, std::size_t loc, std::size_t digit) const;
  void build_loc_options();
  void build_stores();
  void build_hm_tables();
  void materialize_states();

  TypeContext ctx_;
  SpaceConfig cfg_;

  std::vector<HeapLoc> locs_;
  std::vector<Rational> perms_;     // multiples of 1/lcm(denoms) in [0,1]; perms_[0] = 0
  std::vector<Value> heap_vals_;    // per-location value domain (ints)
  std::vector<Value> int_vals_, bool_vals_, ref_vals_, perm_vals_;

  std::vector<LocOption> loc_options_;
  std::vector<int> opt_combine_;                                   // dense per-option-pair, -1 undefined
  std::vector<std::vector<std::pair<int, int>>> opt_decomps_;      // per option
  std::vector<int> opt_stabilize_, opt_core_;
  std::vector<char> opt_stable_;

  std::vector<std::vector<Value>> stores_;  // store idx -> value per var slot
  std::size_t n_hms_ = 1;
  std::size_t n_states_ = 0;

  std::vector<std::size_t> stabilize_hm_, core_hm_;
  std::vector<char> stable_hm_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> hm_decomps_;
  Bitset stable_states_;

  std::vector<State> states_;
};

}  // namespace ivl
