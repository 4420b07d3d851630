#pragma once

#include <string>
#include <vector>

#include "ivlkit/axsem.hpp"

namespace ivl {

// One exhale-havoc-inhale instance: from precondition A, run
//   exhale P; havoc x1..xn; inhale Q
// and, when the axiomatic layer accepts it, invert the derivation to recover
// the frame F and check the pattern-lemma conclusions:
//   B = Q * F,  A |= P * F,  F independent of the havocked variables.
struct PatternInstance {
  std::string name;
  AssertionPtr pre;  // A, as an assertion over the corpus context
  AssertionPtr p;
  AssertionPtr q;
  std::vector<std::string> mods;
};

struct PatternLemmaReport {
  int checked = 0;
  int vacuous = 0;  // axsem rejected the triple; the lemma holds vacuously
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
  std::string summary() const;
};

PatternLemmaReport check_pattern_lemmas(const StateSpace& sp,
                                        const std::vector<PatternInstance>& instances);

// Fixed desk-scale corpus (includes the running example's parallel segment).
TypeContext pattern_corpus_context();
SpaceConfig pattern_corpus_config();
std::vector<PatternInstance> builtin_pattern_corpus();

}  // namespace ivl
