#include "ivlkit/axsem.hpp"

#include <sstream>

namespace ivl {

namespace {

const char* rule_name(Derivation::Rule r) {
  switch (r) {
    case Derivation::Rule::Skip: return "Skip";
    case Derivation::Rule::Inhale: return "Inhale";
    case Derivation::Rule::Exhale: return "Exhale";
    case Derivation::Rule::Havoc: return "Havoc";
    case Derivation::Rule::Assign: return "Assign";
    case Derivation::Rule::If: return "If";
    case Derivation::Rule::Seq: return "Seq";
    case Derivation::Rule::FieldAssign: return "FieldAssign";
  }
  return "?";
}

Derivation::Rule rule_for(const StmtPtr& s) {
  switch (s->kind) {
    case Stmt::Kind::Skip: return Derivation::Rule::Skip;
    case Stmt::Kind::Inhale: return Derivation::Rule::Inhale;
    case Stmt::Kind::Exhale: return Derivation::Rule::Exhale;
    case Stmt::Kind::Havoc: return Derivation::Rule::Havoc;
    case Stmt::Kind::Assign: return Derivation::Rule::Assign;
    case Stmt::Kind::If: return Derivation::Rule::If;
    case Stmt::Kind::Seq: return Derivation::Rule::Seq;
    case Stmt::Kind::FieldAssign: return Derivation::Rule::FieldAssign;
  }
  return Derivation::Rule::Skip;
}

DerivationPtr make_node(const StmtPtr& s, Bitset pre, Bitset post,
                        std::vector<DerivationPtr> kids = {}) {
  auto d = std::make_shared<Derivation>();
  d->stmt = s;
  d->rule = rule_for(s);
  d->pre = std::move(pre);
  d->post = std::move(post);
  d->kids = std::move(kids);
  return d;
}

}  // namespace

Bitset AxSem::havoc_post(const Bitset& pre, const std::string& var) const {
  Bitset out(sp_.n_states());
  int slot = sp_.var_slot(var);
  const auto& dom = sp_.type_values(*sp_.ctx().kind_of(var));
  pre.for_each([&](std::size_t i) {
    for (const auto& v : dom) {
      auto j = sp_.store_update(i, slot, v);
      if (j) out.set(*j);
    }
  });
  return out;
}

Bitset AxSem::havoc_post_projection(const Bitset& pre, const std::string& var) const {
  // The existential-projection reading of "exists x in tau. P".
  Bitset out(sp_.n_states());
  int slot = sp_.var_slot(var);
  const auto& dom = sp_.type_values(*sp_.ctx().kind_of(var));
  for (std::size_t i = 0; i < sp_.n_states(); ++i) {
    for (const auto& v : dom) {
      auto j = sp_.store_update(i, slot, v);
      if (j && pre.test(*j)) {
        out.set(i);
        break;
      }
    }
  }
  return out;
}

Bitset AxSem::assign_post(const Bitset& pre, const std::string& var, const ExprPtr& e) const {
  Bitset out(sp_.n_states());
  int slot = sp_.var_slot(var);
  pre.for_each([&](std::size_t i) {
    auto v = eval_expr(sp_.state_at(i), e);
    if (!v) return;
    auto j = sp_.store_update(i, slot, *v);
    if (j) out.set(*j);
  });
  return out;
}

Bitset AxSem::field_assign_post(const Bitset& pre, const ExprPtr& recv, const std::string& field,
                                const ExprPtr& rhs) const {
  Bitset out(sp_.n_states());
  pre.for_each([&](std::size_t i) {
    const State& st = sp_.state_at(i);
    auto r = eval_expr(st, recv);
    auto v = eval_expr(st, rhs);
    if (!r || !v || !r->is_ref() || r->as_ref().is_null()) return;
    auto loc = sp_.loc_index(r->as_ref(), field);
    if (!loc) return;
    auto j = sp_.heap_update(i, *loc, *v);
    if (j) out.set(*j);
  });
  return out;
}

std::optional<Bitset> AxSem::restrict_by_guard(const Bitset& pre, const ExprPtr& b, bool v) const {
  Bitset out(sp_.n_states());
  bool defined = true;
  pre.for_each([&](std::size_t i) {
    auto g = eval_expr(sp_.state_at(i), b);
    if (!g || !g->is_bool()) {
      defined = false;
      return;
    }
    if (g->as_bool() == v) out.set(i);
  });
  if (!defined) return std::nullopt;
  return out;
}

Bitset AxSem::stabilize_closure(const Bitset& stable_members) const {
  Bitset out(sp_.n_states());
  for (std::size_t i = 0; i < sp_.n_states(); ++i)
    if (stable_members.test(sp_.stabilize_idx(i))) out.set(i);
  return out;
}

std::optional<Bitset> AxSem::canonical_exhale_q(const Bitset& pre, const Bitset& part_set,
                                                const Bitset& full_denote) const {
  // All stable remainders over all decompositions of pre states by part_set.
  Bitset remainders(sp_.n_states());
  pre.for_each([&](std::size_t i) {
    const std::size_t base = sp_.store_of(i) * sp_.n_hms();
    for (const auto& [rem, part] : sp_.hm_decomps(sp_.hm_of(i)))
      if (sp_.stable_idx(base + rem) && part_set.test(base + part)) remainders.set(base + rem);
  });
  Bitset q = stabilize_closure(remainders);
  // Rule premise: P |= Q * A (the full exhaled assertion).
  if (!pre.subset_of(sep_conj(sp_, q, full_denote))) return std::nullopt;
  return q;
}

bool AxSem::exhale_candidates(const StmtPtr& stmt, const Bitset& pre, const Sink& sink) {
  const Bitset& denoted = cache_.denote(stmt->assertion);

  auto try_q = [&](const Bitset& part_set) {
    auto q = canonical_exhale_q(pre, part_set, denoted);
    if (!q) return false;
    return sink(make_node(stmt, pre, *q));
  };

  // Canonical choice over the whole assertion.
  if (try_q(denoted)) return true;

  // Syntax-directed alternatives: resolve disjunctions uniformly per disjunct.
  std::vector<AssertionPtr> branches;
  std::function<void(const AssertionPtr&)> expand = [&](const AssertionPtr& a) {
    if (a->kind == Assertion::Kind::Disj) {
      expand(a->a);
      expand(a->b);
      return;
    }
    branches.push_back(a);
  };
  expand(stmt->assertion);
  if (branches.size() > 1) {
    for (const auto& b : branches)
      if (try_q(cache_.denote(b))) return true;
  }

  // Per-state decomposition backtracking on small preconditions.
  Bitset stable_pre = pre;
  stable_pre &= sp_.stable_states();
  std::vector<std::size_t> states;
  stable_pre.for_each([&](std::size_t i) { states.push_back(i); });
  if (states.empty() || states.size() > opts_.backtrack_states) return false;

  std::vector<std::vector<std::size_t>> options(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const std::size_t i = states[k];
    const std::size_t base = sp_.store_of(i) * sp_.n_hms();
    for (const auto& [rem, part] : sp_.hm_decomps(sp_.hm_of(i)))
      if (sp_.stable_idx(base + rem) && denoted.test(base + part))
        options[k].push_back(base + rem);
    if (options[k].empty()) return false;  // this state cannot exhale at all
    std::sort(options[k].begin(), options[k].end());
    options[k].erase(std::unique(options[k].begin(), options[k].end()), options[k].end());
  }

  std::vector<std::size_t> pick(states.size(), 0);
  std::size_t tried = 0;
  std::vector<Bitset> seen;
  while (tried++ < opts_.backtrack_candidates) {
    Bitset members(sp_.n_states());
    for (std::size_t k = 0; k < states.size(); ++k) members.set(options[k][pick[k]]);
    Bitset q = stabilize_closure(members);
    bool fresh = true;
    for (const auto& s : seen)
      if (s == q) {
        fresh = false;
        break;
      }
    if (fresh) {
      seen.push_back(q);
      if (pre.subset_of(sep_conj(sp_, q, denoted)) && sink(make_node(stmt, pre, q))) return true;
    }
    std::size_t k = 0;
    for (; k < states.size(); ++k) {
      if (++pick[k] < options[k].size()) break;
      pick[k] = 0;
    }
    if (k == states.size()) break;
  }

  // Exhaustive subset search over the canonical remainder set, behind a flag.
  if (opts_.small_space_search) {
    Bitset remainders(sp_.n_states());
    pre.for_each([&](std::size_t i) {
      const std::size_t base = sp_.store_of(i) * sp_.n_hms();
      for (const auto& [rem, part] : sp_.hm_decomps(sp_.hm_of(i)))
        if (sp_.stable_idx(base + rem) && denoted.test(base + part)) remainders.set(base + rem);
    });
    std::vector<std::size_t> rems;
    remainders.for_each([&](std::size_t i) { rems.push_back(i); });
    if (rems.size() <= opts_.small_space_limit) {
      for (std::size_t mask = 1; mask < (std::size_t(1) << rems.size()); ++mask) {
        Bitset members(sp_.n_states());
        for (std::size_t k = 0; k < rems.size(); ++k)
          if (mask & (std::size_t(1) << k)) members.set(rems[k]);
        Bitset q = stabilize_closure(members);
        if (pre.subset_of(sep_conj(sp_, q, denoted)) && sink(make_node(stmt, pre, q)))
          return true;
      }
    }
  }
  return false;
}

bool AxSem::derive_rec(const StmtPtr& stmt, const Bitset& pre, const Sink& sink) {
  switch (stmt->kind) {
    case Stmt::Kind::Skip:
      return sink(make_node(stmt, pre, pre));
    case Stmt::Kind::Inhale: {
      const Bitset& denoted = cache_.denote(stmt->assertion);
      if (!assertion_frames(sp_, pre, denoted)) return false;
      return sink(make_node(stmt, pre, sep_conj(sp_, pre, denoted)));
    }
    case Stmt::Kind::Exhale:
      return exhale_candidates(stmt, pre, sink);
    case Stmt::Kind::Havoc: {
      Bitset post = havoc_post(pre, stmt->var);
      return sink(make_node(stmt, pre, std::move(post)));
    }
    case Stmt::Kind::Assign: {
      if (!expr_framed_by(sp_, pre, stmt->expr)) return false;
      // Every produced value must inhabit the target's type.
      int slot = sp_.var_slot(stmt->var);
      bool typed = true;
      pre.for_each([&](std::size_t i) {
        auto v = eval_expr(sp_.state_at(i), stmt->expr);
        if (!v || !sp_.store_update(i, slot, *v)) typed = false;
      });
      if (!typed) return false;
      return sink(make_node(stmt, pre, assign_post(pre, stmt->var, stmt->expr)));
    }
    case Stmt::Kind::If: {
      auto pt = restrict_by_guard(pre, stmt->expr, true);
      auto pf = restrict_by_guard(pre, stmt->expr, false);
      if (!pt || !pf) return false;
      return derive_rec(stmt->s1, *pt, [&](DerivationPtr dt) {
        return derive_rec(stmt->s2, *pf, [&](DerivationPtr de) {
          Bitset post = dt->post;
          post |= de->post;
          return sink(make_node(stmt, pre, std::move(post), {dt, de}));
        });
      });
    }
    case Stmt::Kind::Seq:
      return derive_rec(stmt->s1, pre, [&](DerivationPtr d1) {
        return derive_rec(stmt->s2, d1->post, [&](DerivationPtr d2) {
          return sink(make_node(stmt, pre, d2->post, {d1, d2}));
        });
      });
    case Stmt::Kind::FieldAssign: {
      if (!expr_framed_by(sp_, pre, stmt->recv) || !expr_framed_by(sp_, pre, stmt->rhs))
        return false;
      bool ok = true;
      pre.for_each([&](std::size_t i) {
        const State& st = sp_.state_at(i);
        auto r = eval_expr(st, stmt->recv);
        auto v = eval_expr(st, stmt->rhs);
        if (!r || !v || !r->is_ref() || r->as_ref().is_null()) {
          ok = false;
          return;
        }
        auto loc = sp_.loc_index(r->as_ref(), stmt->field);
        if (!loc || st.mask_at(HeapLoc{r->as_ref(), stmt->field}) != Rational::from_int(1) ||
            !sp_.heap_update(i, *loc, *v))
          ok = false;
      });
      if (!ok) return false;
      return sink(
          make_node(stmt, pre, field_assign_post(pre, stmt->recv, stmt->field, stmt->rhs)));
    }
  }
  return false;
}

DerivationPtr AxSem::derive(const StmtPtr& stmt, const Bitset& pre) {
  if (!is_self_framing(sp_, pre)) return nullptr;
  DerivationPtr result;
  derive_rec(stmt, pre, [&](DerivationPtr d) {
    result = std::move(d);
    return true;
  });
  return result;
}

namespace {

std::optional<DerivationFailure> fail(const std::string& path, const std::string& msg) {
  return DerivationFailure{path, msg};
}

}  // namespace

std::optional<DerivationFailure> AxSem::check_derivation(const DerivationPtr& d) {
  std::function<std::optional<DerivationFailure>(const DerivationPtr&, const std::string&)> go =
      [&](const DerivationPtr& node, const std::string& path) -> std::optional<DerivationFailure> {
    if (!node || !node->stmt) return fail(path, "missing node");
    if (node->rule != rule_for(node->stmt)) return fail(path, "rule does not match statement");
    const Bitset& p = node->pre;
    const Bitset& q = node->post;
    switch (node->rule) {
      case Derivation::Rule::Skip:
        if (!is_self_framing(sp_, p)) return fail(path, "skip: precondition not self-framing");
        if (q != p) return fail(path, "skip: post differs from pre");
        return std::nullopt;
      case Derivation::Rule::Inhale: {
        if (!is_self_framing(sp_, p)) return fail(path, "inhale: precondition not self-framing");
        const Bitset& a = cache_.denote(node->stmt->assertion);
        if (!assertion_frames(sp_, p, a))
          return fail(path, "inhale: precondition does not frame the assertion");
        if (q != sep_conj(sp_, p, a)) return fail(path, "inhale: post is not P * A");
        return std::nullopt;
      }
      case Derivation::Rule::Exhale: {
        if (!is_self_framing(sp_, p)) return fail(path, "exhale: precondition not self-framing");
        if (!is_self_framing(sp_, q)) return fail(path, "exhale: chosen Q not self-framing");
        const Bitset& a = cache_.denote(node->stmt->assertion);
        if (!p.subset_of(sep_conj(sp_, q, a)))
          return fail(path, "exhale: entailment P |= Q * A fails");
        return std::nullopt;
      }
      case Derivation::Rule::Havoc: {
        if (!is_self_framing(sp_, p)) return fail(path, "havoc: precondition not self-framing");
        if (q != havoc_post_projection(p, node->stmt->var))
          return fail(path, "havoc: post is not the existential projection");
        return std::nullopt;
      }
      case Derivation::Rule::Assign: {
        if (!is_self_framing(sp_, p)) return fail(path, "assign: precondition not self-framing");
        if (!expr_framed_by(sp_, p, node->stmt->expr))
          return fail(path, "assign: expression not framed by precondition");
        if (q != assign_post(p, node->stmt->var, node->stmt->expr))
          return fail(path, "assign: post mismatch");
        return std::nullopt;
      }
      case Derivation::Rule::If: {
        if (!is_self_framing(sp_, p)) return fail(path, "if: precondition not self-framing");
        if (node->kids.size() != 2) return fail(path, "if: expected two sub-derivations");
        auto pt = restrict_by_guard(p, node->stmt->expr, true);
        auto pf = restrict_by_guard(p, node->stmt->expr, false);
        if (!pt || !pf) return fail(path, "if: guard not framed by precondition");
        if (node->kids[0]->pre != *pt) return fail(path, "if: then-branch pre mismatch");
        if (node->kids[1]->pre != *pf) return fail(path, "if: else-branch pre mismatch");
        Bitset both = node->kids[0]->post;
        both |= node->kids[1]->post;
        if (q != both) return fail(path, "if: post is not B1 or B2");
        if (auto e = go(node->kids[0], path + "/if.then")) return e;
        if (auto e = go(node->kids[1], path + "/if.else")) return e;
        return std::nullopt;
      }
      case Derivation::Rule::Seq: {
        if (node->kids.size() != 2) return fail(path, "seq: expected two sub-derivations");
        if (node->kids[0]->pre != p) return fail(path, "seq: left pre mismatch");
        if (node->kids[1]->pre != node->kids[0]->post)
          return fail(path, "seq: intermediate assertion mismatch");
        if (q != node->kids[1]->post) return fail(path, "seq: post mismatch");
        if (auto e = go(node->kids[0], path + "/seq.1")) return e;
        if (auto e = go(node->kids[1], path + "/seq.2")) return e;
        return std::nullopt;
      }
      case Derivation::Rule::FieldAssign: {
        if (!is_self_framing(sp_, p))
          return fail(path, "field-assign: precondition not self-framing");
        if (!expr_framed_by(sp_, p, node->stmt->recv) ||
            !expr_framed_by(sp_, p, node->stmt->rhs))
          return fail(path, "field-assign: expressions not framed");
        bool full = true;
        p.for_each([&](std::size_t i) {
          const State& st = sp_.state_at(i);
          auto r = eval_expr(st, node->stmt->recv);
          if (!r || !r->is_ref() || r->as_ref().is_null() ||
              st.mask_at(HeapLoc{r->as_ref(), node->stmt->field}) != Rational::from_int(1))
            full = false;
        });
        if (!full) return fail(path, "field-assign: full permission not held everywhere");
        if (q != field_assign_post(p, node->stmt->recv, node->stmt->field, node->stmt->rhs))
          return fail(path, "field-assign: post mismatch");
        return std::nullopt;
      }
    }
    return fail(path, "unknown rule");
  };
  return go(d, "root");
}

bool AxSem::check_soundness_instance(const StmtPtr& stmt, Oracle& oracle) {
  if (!oracle.is_valid(stmt)) return true;  // premise absent, nothing to show
  return derive(stmt, sp_.full_set()) != nullptr;
}

bool AxSem::check_completeness_instance(const DerivationPtr& d, Oracle& oracle) {
  if (check_derivation(d)) return false;  // not an accepted derivation
  Bitset stable_pre = d->pre;
  stable_pre &= sp_.stable_states();
  Bitset achievable = oracle.wp(d->stmt, d->post);
  return stable_pre.subset_of(achievable);
}

std::string AxSem::format(const DerivationPtr& d) const {
  std::ostringstream os;
  std::function<void(const DerivationPtr&, int)> go = [&](const DerivationPtr& n, int ind) {
    os << std::string(std::size_t(ind) * 2, ' ') << rule_name(n->rule) << " |P|=" << n->pre.count()
       << " |Q|=" << n->post.count();
    if (n->rule != Derivation::Rule::Seq && n->rule != Derivation::Rule::If)
      os << "  " << n->stmt->str();
    os << "\n";
    for (const auto& k : n->kids) go(k, ind + 1);
  };
  go(d, 0);
  return os.str();
}

}  // namespace ivl
