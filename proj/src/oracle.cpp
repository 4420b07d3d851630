#include "ivlkit/oracle.hpp"

#include <algorithm>

namespace ivl {

namespace {

// Sorted-unique insertion keyed by bitset content.
void push_unique(std::vector<Bitset>& sets, Bitset s) {
  for (const auto& b : sets)
    if (b == s) return;
  sets.push_back(std::move(s));
}

}  // namespace

std::optional<Bitset> Oracle::inhale_result(std::size_t idx, const Bitset& denoted) {
  if (!opts_.skip_inhale_framing && !state_frames(sp_, idx, denoted)) return std::nullopt;
  Bitset out(sp_.n_states());
  const std::size_t base = sp_.store_of(idx) * sp_.n_hms();
  const std::size_t hm = sp_.hm_of(idx);
  for (std::size_t h = 0; h < sp_.n_hms(); ++h) {
    if (!denoted.test(base + h)) continue;
    auto c = sp_.combine_hm(hm, h);
    if (c && sp_.stable_idx(base + *c)) out.set(base + *c);
  }
  return out;
}

Bitset Oracle::wp(const StmtPtr& stmt, const Bitset& target) {
  const std::size_t n = sp_.n_states();
  switch (stmt->kind) {
    case Stmt::Kind::Skip:
      return target;
    case Stmt::Kind::Seq:
      return wp(stmt->s1, wp(stmt->s2, target));
    case Stmt::Kind::Assign: {
      Bitset out(n);
      int slot = sp_.var_slot(stmt->var);
      for (std::size_t i = 0; i < n; ++i) {
        auto v = eval_expr(sp_.state_at(i), stmt->expr);
        if (!v) continue;
        auto j = sp_.store_update(i, slot, *v);
        if (j && target.test(*j)) out.set(i);
      }
      return out;
    }
    case Stmt::Kind::Havoc: {
      Bitset out(n);
      int slot = sp_.var_slot(stmt->var);
      const auto& dom = sp_.type_values(*sp_.ctx().kind_of(stmt->var));
      for (std::size_t i = 0; i < n; ++i) {
        bool all = true;
        for (const auto& v : dom) {
          auto j = sp_.store_update(i, slot, v);
          if (!j || !target.test(*j)) {
            all = false;
            break;
          }
        }
        if (all) out.set(i);
      }
      return out;
    }
    case Stmt::Kind::If: {
      Bitset wt = wp(stmt->s1, target);
      Bitset we = wp(stmt->s2, target);
      Bitset out(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto b = eval_expr(sp_.state_at(i), stmt->expr);
        if (!b || !b->is_bool()) continue;
        if (b->as_bool() ? wt.test(i) : we.test(i)) out.set(i);
      }
      return out;
    }
    case Stmt::Kind::Inhale: {
      const Bitset& denoted = cache_.denote(stmt->assertion);
      Bitset out(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto s = inhale_result(i, denoted);
        if (s && s->subset_of(target)) out.set(i);
      }
      return out;
    }
    case Stmt::Kind::Exhale: {
      const Bitset& denoted = cache_.denote(stmt->assertion);
      Bitset out(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t base = sp_.store_of(i) * sp_.n_hms();
        for (const auto& [rem, part] : sp_.hm_decomps(sp_.hm_of(i))) {
          if (sp_.stable_idx(base + rem) && target.test(base + rem) &&
              denoted.test(base + part)) {
            out.set(i);
            break;
          }
        }
      }
      return out;
    }
    case Stmt::Kind::FieldAssign: {
      Bitset out(n);
      for (std::size_t i = 0; i < n; ++i) {
        const State& st = sp_.state_at(i);
        auto r = eval_expr(st, stmt->recv);
        auto v = eval_expr(st, stmt->rhs);
        if (!r || !v || !r->is_ref() || r->as_ref().is_null()) continue;
        auto loc = sp_.loc_index(r->as_ref(), stmt->field);
        if (!loc) continue;
        if (st.mask_at(HeapLoc{r->as_ref(), stmt->field}) != Rational::from_int(1)) continue;
        auto j = sp_.heap_update(i, *loc, *v);
        if (j && target.test(*j)) out.set(i);
      }
      return out;
    }
  }
  return Bitset(n);
}

bool Oracle::is_correct(const StmtPtr& stmt, std::size_t state_idx) {
  return wp(stmt, sp_.full_set()).test(state_idx);
}

bool Oracle::is_valid(const StmtPtr& stmt) { return !find_invalid_initial(stmt); }

std::optional<std::size_t> Oracle::find_invalid_initial(const StmtPtr& stmt) {
  Bitset ok = wp(stmt, sp_.full_set());
  for (std::size_t i = 0; i < sp_.n_states(); ++i)
    if (sp_.stable_idx(i) && !ok.test(i)) return i;
  return std::nullopt;
}

Bitset Oracle::reachable_outcomes(const StmtPtr& stmt, const Bitset& from) {
  const std::size_t n = sp_.n_states();
  switch (stmt->kind) {
    case Stmt::Kind::Skip:
      return from;
    case Stmt::Kind::Seq:
      return reachable_outcomes(stmt->s2, reachable_outcomes(stmt->s1, from));
    case Stmt::Kind::Assign: {
      Bitset out(n);
      int slot = sp_.var_slot(stmt->var);
      from.for_each([&](std::size_t i) {
        auto v = eval_expr(sp_.state_at(i), stmt->expr);
        if (!v) return;
        auto j = sp_.store_update(i, slot, *v);
        if (j) out.set(*j);
      });
      return out;
    }
    case Stmt::Kind::Havoc: {
      Bitset out(n);
      int slot = sp_.var_slot(stmt->var);
      const auto& dom = sp_.type_values(*sp_.ctx().kind_of(stmt->var));
      from.for_each([&](std::size_t i) {
        for (const auto& v : dom) {
          auto j = sp_.store_update(i, slot, v);
          if (j) out.set(*j);
        }
      });
      return out;
    }
    case Stmt::Kind::If: {
      Bitset take_t(n), take_e(n);
      from.for_each([&](std::size_t i) {
        auto b = eval_expr(sp_.state_at(i), stmt->expr);
        if (!b || !b->is_bool()) return;
        (b->as_bool() ? take_t : take_e).set(i);
      });
      Bitset out = reachable_outcomes(stmt->s1, take_t);
      out |= reachable_outcomes(stmt->s2, take_e);
      return out;
    }
    case Stmt::Kind::Inhale: {
      const Bitset& denoted = cache_.denote(stmt->assertion);
      Bitset out(n);
      from.for_each([&](std::size_t i) {
        auto s = inhale_result(i, denoted);
        if (s) out |= *s;
      });
      return out;
    }
    case Stmt::Kind::Exhale: {
      const Bitset& denoted = cache_.denote(stmt->assertion);
      Bitset out(n);
      from.for_each([&](std::size_t i) {
        const std::size_t base = sp_.store_of(i) * sp_.n_hms();
        for (const auto& [rem, part] : sp_.hm_decomps(sp_.hm_of(i)))
          if (sp_.stable_idx(base + rem) && denoted.test(base + part)) out.set(base + rem);
      });
      return out;
    }
    case Stmt::Kind::FieldAssign: {
      Bitset out(n);
      from.for_each([&](std::size_t i) {
        const State& st = sp_.state_at(i);
        auto r = eval_expr(st, stmt->recv);
        auto v = eval_expr(st, stmt->rhs);
        if (!r || !v || !r->is_ref() || r->as_ref().is_null()) return;
        auto loc = sp_.loc_index(r->as_ref(), stmt->field);
        if (!loc) return;
        if (st.mask_at(HeapLoc{r->as_ref(), stmt->field}) != Rational::from_int(1)) return;
        auto j = sp_.heap_update(i, *loc, *v);
        if (j) out.set(*j);
      });
      return out;
    }
  }
  return Bitset(n);
}

std::optional<std::vector<Bitset>> Oracle::exec_outcomes(const StmtPtr& stmt,
                                                         std::size_t state_idx) {
  return outcomes_rec(stmt, state_idx);
}

std::optional<std::vector<Bitset>> Oracle::outcomes_rec(const StmtPtr& stmt, std::size_t idx) {
  const std::size_t n = sp_.n_states();
  std::vector<Bitset> out;
  auto singleton = [&](std::size_t j) {
    Bitset s(n);
    s.set(j);
    return s;
  };
  switch (stmt->kind) {
    case Stmt::Kind::Skip:
      out.push_back(singleton(idx));
      return out;
    case Stmt::Kind::Assign: {
      auto v = eval_expr(sp_.state_at(idx), stmt->expr);
      if (!v) return out;
      auto j = sp_.store_update(idx, sp_.var_slot(stmt->var), *v);
      if (j) out.push_back(singleton(*j));
      return out;
    }
    case Stmt::Kind::Havoc: {
      Bitset s(n);
      const auto& dom = sp_.type_values(*sp_.ctx().kind_of(stmt->var));
      for (const auto& v : dom) {
        auto j = sp_.store_update(idx, sp_.var_slot(stmt->var), v);
        if (j) s.set(*j);
      }
      out.push_back(std::move(s));
      return out;
    }
    case Stmt::Kind::If: {
      auto b = eval_expr(sp_.state_at(idx), stmt->expr);
      if (!b || !b->is_bool()) return out;
      return outcomes_rec(b->as_bool() ? stmt->s1 : stmt->s2, idx);
    }
    case Stmt::Kind::Inhale: {
      auto s = inhale_result(idx, cache_.denote(stmt->assertion));
      if (s) out.push_back(std::move(*s));
      return out;
    }
    case Stmt::Kind::Exhale: {
      const Bitset& denoted = cache_.denote(stmt->assertion);
      const std::size_t base = sp_.store_of(idx) * sp_.n_hms();
      for (const auto& [rem, part] : sp_.hm_decomps(sp_.hm_of(idx))) {
        if (sp_.stable_idx(base + rem) && denoted.test(base + part))
          push_unique(out, singleton(base + rem));
        if (out.size() > opts_.max_outcome_sets) return std::nullopt;
      }
      return out;
    }
    case Stmt::Kind::FieldAssign: {
      const State& st = sp_.state_at(idx);
      auto r = eval_expr(st, stmt->recv);
      auto v = eval_expr(st, stmt->rhs);
      if (!r || !v || !r->is_ref() || r->as_ref().is_null()) return out;
      auto loc = sp_.loc_index(r->as_ref(), stmt->field);
      if (!loc) return out;
      if (st.mask_at(HeapLoc{r->as_ref(), stmt->field}) != Rational::from_int(1)) return out;
      auto j = sp_.heap_update(idx, *loc, *v);
      if (j) out.push_back(singleton(*j));
      return out;
    }
    case Stmt::Kind::Seq: {
      auto firsts = outcomes_rec(stmt->s1, idx);
      if (!firsts) return std::nullopt;
      for (const auto& s1 : *firsts) {
        // Union over one choice of continuation per intermediate state,
        // deduplicated incrementally.
        std::vector<Bitset> unions;
        unions.emplace_back(n);
        bool dead = false;
        bool capped = false;
        s1.for_each([&](std::size_t mid) {
          if (dead || capped) return;
          auto opts = outcomes_rec(stmt->s2, mid);
          if (!opts) {
            capped = true;
            return;
          }
          if (opts->empty()) {
            dead = true;
            return;
          }
          std::vector<Bitset> next;
          for (const auto& u : unions)
            for (const auto& o : *opts) {
              Bitset merged = u;
              merged |= o;
              push_unique(next, std::move(merged));
              if (next.size() > opts_.max_outcome_sets) {
                capped = true;
                return;
              }
            }
          unions = std::move(next);
        });
        if (capped) return std::nullopt;
        if (dead) continue;
        for (auto& u : unions) {
          push_unique(out, std::move(u));
          if (out.size() > opts_.max_outcome_sets) return std::nullopt;
        }
      }
      return out;
    }
  }
  return out;
}

}  // namespace ivl
