#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ivlkit/parimp.hpp"

namespace ivl {

// Concrete ParImp state: store plus heap over (address, field) pairs.
struct ParState {
  std::map<std::string, Value> store;
  std::map<HeapLoc, Value> heap;

  bool operator==(const ParState& o) const { return store == o.store && heap == o.heap; }
  bool operator<(const ParState& o) const {
    if (store != o.store) return store < o.store;
    return heap < o.heap;
  }
  std::string str() const;
};

struct PConfig {
  PStmtPtr stmt;  // Skip = terminated
  ParState state;
};

struct StepResult {
  enum class Kind { Next, Abort, Race } kind;
  PConfig next;      // Kind::Next only
  std::string detail;
};

struct ExploreBounds {
  int max_depth = 200;
  std::size_t max_states = 100000;
  int max_addrs = 2;
};

// One small-step transition relation application: all successors under the
// demonic scheduler and demonic allocation, plus Abort/Race outcomes.
std::vector<StepResult> interp_step(const PConfig& cfg, const ExploreBounds& bounds);

struct ExploreReport {
  bool abort_reachable = false;
  bool race_reachable = false;
  bool bounded = false;  // frontier truncated: verdicts exact only within bounds
  std::size_t visited = 0;
  std::set<ParState> terminals;
  std::string first_failure;
};

// Breadth-first closure of interp_step from one initial state.
ExploreReport explore(const PStmtPtr& stmt, const ParState& initial, const ExploreBounds& bounds);

// All stores over the context's bounded domains crossed with all heaps over
// the address universe (used to enumerate precondition-satisfying initial
// states for end-to-end runs).
std::vector<ParState> enumerate_par_states(const TypeContext& ctx, const SpaceConfig& cfg,
                                           int max_addrs);

// Views a ParImp state as the stable IDF state holding full permission to
// every allocated location.
State embed_par_state(const ParState& st);

// sat() of an assertion against the embedded state, within the given space.
bool par_state_satisfies(const StateSpace& sp, const ParState& st, const AssertionPtr& a);

}  // namespace ivl
