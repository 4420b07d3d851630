#include "ivlkit/semantics.hpp"

namespace ivl {

std::optional<Value> eval_expr(const State& st, const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Literal:
      return e->literal;
    case Expr::Kind::Var:
      return st.store_at(e->var);
    case Expr::Kind::FieldRead: {
      auto r = eval_expr(st, e->a);
      if (!r || !r->is_ref() || r->as_ref().is_null()) return std::nullopt;
      return st.heap_at(HeapLoc{r->as_ref(), e->field});
    }
    case Expr::Kind::Unary: {
      auto v = eval_expr(st, e->a);
      if (!v) return std::nullopt;
      if (e->uop == UnOp::Not) {
        if (!v->is_bool()) return std::nullopt;
        return Value::make_bool(!v->as_bool());
      }
      if (!v->is_int()) return std::nullopt;
      return Value::make_int(-v->as_int());
    }
    case Expr::Kind::Binary: {
      // Lazy boolean operators: a && b = (a ? b : false), a || b = (a ? true : b).
      if (e->bop == BinOp::And || e->bop == BinOp::Or) {
        auto l = eval_expr(st, e->a);
        if (!l || !l->is_bool()) return std::nullopt;
        bool take_right = e->bop == BinOp::And ? l->as_bool() : !l->as_bool();
        if (!take_right) return Value::make_bool(e->bop == BinOp::Or);
        auto r = eval_expr(st, e->b);
        if (!r || !r->is_bool()) return std::nullopt;
        return r;
      }
      auto l = eval_expr(st, e->a);
      auto r = eval_expr(st, e->b);
      if (!l || !r) return std::nullopt;
      switch (e->bop) {
        case BinOp::Eq:
          if (l->kind() != r->kind()) return std::nullopt;
          return Value::make_bool(*l == *r);
        case BinOp::Lt:
          if (l->is_int() && r->is_int()) return Value::make_bool(l->as_int() < r->as_int());
          if (l->is_perm() && r->is_perm()) return Value::make_bool(l->as_perm() < r->as_perm());
          return std::nullopt;
        case BinOp::Add:
        case BinOp::Sub: {
          if (l->is_int() && r->is_int()) {
            auto a = l->as_int(), b = r->as_int();
            return Value::make_int(e->bop == BinOp::Add ? a + b : a - b);
          }
          if (l->is_perm() && r->is_perm()) {
            Rational v = e->bop == BinOp::Add ? l->as_perm() + r->as_perm()
                                              : l->as_perm() - r->as_perm();
            return Value::make_perm(v);
          }
          return std::nullopt;
        }
        case BinOp::Mul:
          if (!l->is_int() || !r->is_int()) return std::nullopt;
          return Value::make_int(l->as_int() * r->as_int());
        case BinOp::Div:
          if (!l->is_perm() || !r->is_perm() || r->as_perm().is_zero()) return std::nullopt;
          return Value::make_perm(l->as_perm() / r->as_perm());
        default:
          return std::nullopt;
      }
    }
    case Expr::Kind::Cond: {
      auto c = eval_expr(st, e->a);
      if (!c || !c->is_bool()) return std::nullopt;
      return eval_expr(st, c->as_bool() ? e->b : e->c);
    }
  }
  return std::nullopt;
}

namespace {

// Mask shape check for acc: exactly {loc -> p}, zero elsewhere (p = 0 means an
// all-zero mask). Heap and store are unconstrained.
std::optional<bool> sat_acc(const State& st, const ExprPtr& recv, const std::string& field,
                            const std::optional<Rational>& want) {
  auto r = eval_expr(st, recv);
  if (!r) return std::nullopt;
  if (!r->is_ref() || r->as_ref().is_null()) return false;
  HeapLoc loc{r->as_ref(), field};
  if (want) {
    if (!is_valid_perm(*want)) return false;
    if (want->is_zero()) return st.mask().empty();
    return st.mask().size() == 1 && st.mask_at(loc) == *want;
  }
  // Wildcard: some positive amount at exactly this location.
  return st.mask().size() == 1 && st.mask_at(loc).is_positive();
}

}  // namespace

std::optional<bool> sat(const StateSpace& sp, std::size_t idx, const AssertionPtr& a) {
  const State& st = sp.state_at(idx);
  switch (a->kind) {
    case Assertion::Kind::Pure: {
      auto v = eval_expr(st, a->expr);
      if (!v) return std::nullopt;
      if (!v->is_bool()) return false;
      return v->as_bool() && st.mask().empty();
    }
    case Assertion::Kind::Acc: {
      std::optional<Rational> want;
      if (a->perm) {
        auto p = eval_expr(st, a->perm);
        if (!p) return std::nullopt;
        if (!p->is_perm()) return false;
        want = p->as_perm();
      }
      return sat_acc(st, a->recv, a->field, want);
    }
    case Assertion::Kind::SepConj: {
      bool saw_undef = false;
      std::size_t store = sp.store_of(idx);
      for (const auto& [i, j] : sp.hm_decomps(sp.hm_of(idx))) {
        auto l = sat(sp, sp.state_index(store, i), a->a);
        if (!l) {
          saw_undef = true;
          continue;
        }
        if (!*l) continue;
        auto r = sat(sp, sp.state_index(store, j), a->b);
        if (!r) {
          saw_undef = true;
          continue;
        }
        if (*r) return true;
      }
      if (saw_undef) return std::nullopt;
      return false;
    }
    case Assertion::Kind::Implies: {
      auto g = eval_expr(st, a->expr);
      if (!g || !g->is_bool()) return std::nullopt;
      if (!g->as_bool()) return st.mask().empty();
      return sat(sp, idx, a->a);
    }
    case Assertion::Kind::Cond: {
      auto g = eval_expr(st, a->expr);
      if (!g || !g->is_bool()) return std::nullopt;
      return sat(sp, idx, g->as_bool() ? a->a : a->b);
    }
    case Assertion::Kind::Disj: {
      auto l = sat(sp, idx, a->a);
      if (l && *l) return true;
      auto r = sat(sp, idx, a->b);
      if (r && *r) return true;
      if (!l || !r) return std::nullopt;
      return false;
    }
  }
  return std::nullopt;
}

std::optional<bool> sat(const StateSpace& sp, const State& st, const AssertionPtr& a) {
  auto idx = sp.find_index(st);
  if (!idx) throw std::invalid_argument("state outside the bounded space");
  return sat(sp, *idx, a);
}

Bitset sep_conj(const StateSpace& sp, const Bitset& p, const Bitset& q) {
  Bitset out(sp.n_states());
  const std::size_t n_hm = sp.n_hms();
  // Stores combine only with themselves, so work per store slice.
  std::vector<std::uint32_t> p_hms, q_hms;
  for (std::size_t s = 0; s < sp.n_stores(); ++s) {
    p_hms.clear();
    q_hms.clear();
    const std::size_t base = s * n_hm;
    for (std::size_t h = 0; h < n_hm; ++h) {
      if (p.test(base + h)) p_hms.push_back(std::uint32_t(h));
      if (q.test(base + h)) q_hms.push_back(std::uint32_t(h));
    }
    for (auto i : p_hms)
      for (auto j : q_hms) {
        auto c = sp.combine_hm(i, j);
        if (c) out.set(base + *c);
      }
  }
  return out;
}

bool is_self_framing(const StateSpace& sp, const Bitset& p) {
  for (std::size_t i = 0; i < sp.n_states(); ++i)
    if (p.test(i) != p.test(sp.stabilize_idx(i))) return false;
  return true;
}

bool state_frames(const StateSpace& sp, std::size_t idx, const Bitset& p) {
  const std::size_t n_hm = sp.n_hms();
  const std::size_t base = sp.store_of(idx) * n_hm;
  const std::size_t hm = sp.hm_of(idx);
  // {w} * P lives entirely in w's store slice.
  Bitset slice(n_hm);
  for (std::size_t h = 0; h < n_hm; ++h) {
    if (!p.test(base + h)) continue;
    auto c = sp.combine_hm(hm, h);
    if (c) slice.set(*c);
  }
  for (std::size_t h = 0; h < n_hm; ++h)
    if (slice.test(h) != slice.test(sp.stabilize_hm(h))) return false;
  return true;
}

bool assertion_frames(const StateSpace& sp, const Bitset& b, const Bitset& p) {
  bool ok = true;
  b.for_each([&](std::size_t i) {
    if (ok && sp.stable_idx(i) && !state_frames(sp, i, p)) ok = false;
  });
  return ok;
}

bool expr_framed_by(const StateSpace& sp, const Bitset& p, const ExprPtr& e) {
  bool ok = true;
  p.for_each([&](std::size_t i) {
    if (ok && !eval_expr(sp.state_at(i), e)) ok = false;
  });
  return ok;
}

const Bitset& DenoteCache::denote(const AssertionPtr& a) {
  auto it = cache_.find(a.get());
  if (it != cache_.end()) return it->second;
  return cache_.emplace(a.get(), compute(a)).first->second;
}

Bitset DenoteCache::compute(const AssertionPtr& a) {
  switch (a->kind) {
    case Assertion::Kind::SepConj:
      return sep_conj(sp_, denote(a->a), denote(a->b));
    case Assertion::Kind::Disj: {
      Bitset out = denote(a->a);
      out |= denote(a->b);
      return out;
    }
    default: {
      Bitset out(sp_.n_states());
      for (std::size_t i = 0; i < sp_.n_states(); ++i) {
        auto v = sat(sp_, i, a);
        if (v && *v) out.set(i);
      }
      return out;
    }
  }
}

}  // namespace ivl
