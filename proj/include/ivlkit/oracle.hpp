#pragma once

#include <optional>
#include <vector>

#include "ivlkit/semantics.hpp"

namespace ivl {

// Executable operational semantics over a bounded space. A statement relates
// an initial state to a SET of demonic result sets; the set of achievable
// result sets materializes the angelic choices.
class Oracle {
public:
  struct Options {
    // Test hook: drop the framing premise of inhale (used by the mutation
    // smoke test to show the differential harness catches the omission).
    bool skip_inhale_framing = false;
    // Caps for the explicit multirelation materialization.
    std::size_t max_outcome_sets = 4096;
  };

  Oracle(const StateSpace& sp, Options opts = {})
      : sp_(sp), cache_(sp), opts_(opts) {}

  const StateSpace& space() const { return sp_; }
  DenoteCache& denotations() { return cache_; }

  // Angelic weakest precondition: states from which some derivable outcome
  // set is contained in `target`. Correctness (Def 2.1) is wp with the full
  // space as target; the completeness check instantiates `target` with Q.
  Bitset wp(const StmtPtr& stmt, const Bitset& target);

  bool is_correct(const StmtPtr& stmt, std::size_t state_idx);
  bool is_valid(const StmtPtr& stmt);
  // First stable state with no execution, if any.
  std::optional<std::size_t> find_invalid_initial(const StmtPtr& stmt);

  // Every state occurring in any derivable outcome set from any initial state
  // in `from`. Used to check stability preservation.
  Bitset reachable_outcomes(const StmtPtr& stmt, const Bitset& from);

  // Full multirelation { S | <stmt, state> ~> S }, deduplicated. nullopt when
  // the materialization exceeds the configured cap.
  std::optional<std::vector<Bitset>> exec_outcomes(const StmtPtr& stmt, std::size_t state_idx);

private:
  std::optional<std::vector<Bitset>> outcomes_rec(const StmtPtr& stmt, std::size_t idx);
  // One demonic result set for inhale, when the framing premise holds.
  std::optional<Bitset> inhale_result(std::size_t idx, const Bitset& denoted);

  const StateSpace& sp_;
  DenoteCache cache_;
  Options opts_;
};

}  // namespace ivl
