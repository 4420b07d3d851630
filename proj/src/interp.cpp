#include "ivlkit/interp.hpp"

#include <deque>
#include <sstream>
#include <unordered_set>

namespace ivl {

std::string ParState::str() const {
  std::ostringstream os;
  os << "{";
  for (const auto& [k, v] : store) os << k << "=" << v.str() << " ";
  os << "|";
  for (const auto& [l, v] : heap) os << " " << l.str() << "=" << v.str();
  os << "}";
  return os.str();
}

namespace {

std::optional<Value> eval_par(const ParState& st, const ExprPtr& e) {
  // ParImp expressions are store-only; reuse the IDF evaluator with an empty
  // heap.
  State s = State::make(st.store, {}, {});
  return eval_expr(s, e);
}

struct Access {
  HeapLoc loc;
  bool write;
};

// Heap accesses of the immediately enabled first steps of C.
void first_accesses(const PStmtPtr& c, const ParState& st, std::vector<Access>& out) {
  switch (c->kind) {
    case PStmt::Kind::Load:
    case PStmt::Kind::Store:
    case PStmt::Kind::Free: {
      auto r = st.store.find(c->ref);
      if (r == st.store.end() || !r->second.is_ref() || r->second.as_ref().is_null()) return;
      out.push_back({HeapLoc{r->second.as_ref(), "v"}, c->kind != PStmt::Kind::Load});
      return;
    }
    case PStmt::Kind::Seq:
      if (c->s1->kind == PStmt::Kind::Skip)
        first_accesses(c->s2, st, out);
      else
        first_accesses(c->s1, st, out);
      return;
    case PStmt::Kind::Par:
      if (c->s1->kind != PStmt::Kind::Skip) first_accesses(c->s1, st, out);
      if (c->s2->kind != PStmt::Kind::Skip) first_accesses(c->s2, st, out);
      return;
    default:
      return;  // assignments, alloc, guards and skip touch no existing location
  }
}

bool conflicting(const std::vector<Access>& a, const std::vector<Access>& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (x.loc == y.loc && (x.write || y.write)) return true;
  return false;
}

StepResult abort_result(const PStmtPtr& c, const std::string& why) {
  return {StepResult::Kind::Abort, {c, {}}, why};
}

}  // namespace

std::vector<StepResult> interp_step(const PConfig& cfg, const ExploreBounds& bounds) {
  std::vector<StepResult> out;
  const PStmtPtr& c = cfg.stmt;
  const ParState& st = cfg.state;
  auto next = [&](PStmtPtr s, ParState ns) {
    out.push_back({StepResult::Kind::Next, {std::move(s), std::move(ns)}, ""});
  };

  switch (c->kind) {
    case PStmt::Kind::Skip:
      return out;  // terminal
    case PStmt::Kind::Assign: {
      auto v = eval_par(st, c->expr);
      if (!v) {
        out.push_back(abort_result(c, "expression evaluation failed"));
        return out;
      }
      ParState ns = st;
      ns.store[c->var] = *v;
      next(PStmt::skip(c->pos), std::move(ns));
      return out;
    }
    case PStmt::Kind::Load: {
      auto r = st.store.find(c->ref);
      if (r == st.store.end() || !r->second.is_ref() || r->second.as_ref().is_null()) {
        out.push_back(abort_result(c, "load through null or non-reference"));
        return out;
      }
      HeapLoc loc{r->second.as_ref(), "v"};
      auto h = st.heap.find(loc);
      if (h == st.heap.end()) {
        out.push_back(abort_result(c, "load of unallocated " + loc.str()));
        return out;
      }
      ParState ns = st;
      ns.store[c->var] = h->second;
      next(PStmt::skip(c->pos), std::move(ns));
      return out;
    }
    case PStmt::Kind::Store: {
      auto r = st.store.find(c->ref);
      if (r == st.store.end() || !r->second.is_ref() || r->second.as_ref().is_null()) {
        out.push_back(abort_result(c, "store through null or non-reference"));
        return out;
      }
      HeapLoc loc{r->second.as_ref(), "v"};
      if (!st.heap.count(loc)) {
        out.push_back(abort_result(c, "store to unallocated " + loc.str()));
        return out;
      }
      auto v = eval_par(st, c->expr);
      if (!v) {
        out.push_back(abort_result(c, "expression evaluation failed"));
        return out;
      }
      ParState ns = st;
      ns.heap[loc] = *v;
      next(PStmt::skip(c->pos), std::move(ns));
      return out;
    }
    case PStmt::Kind::Alloc: {
      auto v = eval_par(st, c->expr);
      if (!v) {
        out.push_back(abort_result(c, "expression evaluation failed"));
        return out;
      }
      // Demonic choice over every unused address.
      for (int a = 0; a < bounds.max_addrs; ++a) {
        HeapLoc loc{RefId{a}, "v"};
        if (st.heap.count(loc)) continue;
        ParState ns = st;
        ns.heap[loc] = *v;
        ns.store[c->var] = Value::make_ref(RefId{a});
        next(PStmt::skip(c->pos), std::move(ns));
      }
      return out;  // empty = address space exhausted within bounds
    }
    case PStmt::Kind::Free: {
      auto r = st.store.find(c->ref);
      if (r == st.store.end() || !r->second.is_ref() || r->second.as_ref().is_null()) {
        out.push_back(abort_result(c, "free of null or non-reference"));
        return out;
      }
      HeapLoc loc{r->second.as_ref(), "v"};
      if (!st.heap.count(loc)) {
        out.push_back(abort_result(c, "double free of " + loc.str()));
        return out;
      }
      ParState ns = st;
      ns.heap.erase(loc);
      next(PStmt::skip(c->pos), std::move(ns));
      return out;
    }
    case PStmt::Kind::Seq: {
      if (c->s1->kind == PStmt::Kind::Skip) {
        next(c->s2, st);
        return out;
      }
      for (auto& r : interp_step({c->s1, st}, bounds)) {
        if (r.kind != StepResult::Kind::Next) {
          out.push_back(std::move(r));
          continue;
        }
        next(PStmt::seq(r.next.stmt, c->s2), std::move(r.next.state));
      }
      return out;
    }
    case PStmt::Kind::If: {
      auto b = eval_par(st, c->expr);
      if (!b || !b->is_bool()) {
        out.push_back(abort_result(c, "condition evaluation failed"));
        return out;
      }
      next(b->as_bool() ? c->s1 : c->s2, st);
      return out;
    }
    case PStmt::Kind::While: {
      auto b = eval_par(st, c->expr);
      if (!b || !b->is_bool()) {
        out.push_back(abort_result(c, "loop condition evaluation failed"));
        return out;
      }
      if (b->as_bool())
        next(PStmt::seq(c->s1, c), st);
      else
        next(PStmt::skip(c->pos), st);
      return out;
    }
    case PStmt::Kind::Par: {
      bool l_done = c->s1->kind == PStmt::Kind::Skip;
      bool r_done = c->s2->kind == PStmt::Kind::Skip;
      if (l_done && r_done) {
        next(PStmt::skip(c->pos), st);
        return out;
      }
      if (!l_done && !r_done) {
        std::vector<Access> la, ra;
        first_accesses(c->s1, st, la);
        first_accesses(c->s2, st, ra);
        if (conflicting(la, ra))
          out.push_back({StepResult::Kind::Race, {c, st}, "conflicting enabled accesses"});
      }
      if (!l_done) {
        for (auto& r : interp_step({c->s1, st}, bounds)) {
          if (r.kind != StepResult::Kind::Next) {
            out.push_back(std::move(r));
            continue;
          }
          next(PStmt::par(r.next.stmt, c->s2, c->pre_l, c->post_l, c->pre_r, c->post_r, c->pos),
               std::move(r.next.state));
        }
      }
      if (!r_done) {
        for (auto& r : interp_step({c->s2, st}, bounds)) {
          if (r.kind != StepResult::Kind::Next) {
            out.push_back(std::move(r));
            continue;
          }
          next(PStmt::par(c->s1, r.next.stmt, c->pre_l, c->post_l, c->pre_r, c->post_r, c->pos),
               std::move(r.next.state));
        }
      }
      return out;
    }
  }
  return out;
}

ExploreReport explore(const PStmtPtr& stmt, const ParState& initial, const ExploreBounds& bounds) {
  ExploreReport rep;
  std::deque<std::pair<PConfig, int>> queue;
  std::unordered_set<std::string> visited;
  auto key = [](const PConfig& c) { return c.stmt->str() + "#" + c.state.str(); };

  queue.push_back({{stmt, initial}, 0});
  visited.insert(key(queue.front().first));

  while (!queue.empty()) {
    auto [cfg, depth] = queue.front();
    queue.pop_front();
    rep.visited++;

    if (cfg.stmt->kind == PStmt::Kind::Skip) {
      rep.terminals.insert(cfg.state);
      continue;
    }
    if (depth >= bounds.max_depth) {
      rep.bounded = true;
      continue;
    }
    for (auto& r : interp_step(cfg, bounds)) {
      switch (r.kind) {
        case StepResult::Kind::Abort:
          rep.abort_reachable = true;
          if (rep.first_failure.empty())
            rep.first_failure = "abort: " + r.detail + " at " + cfg.state.str();
          return rep;
        case StepResult::Kind::Race:
          rep.race_reachable = true;
          if (rep.first_failure.empty())
            rep.first_failure = "race: " + r.detail + " at " + cfg.state.str();
          return rep;
        case StepResult::Kind::Next: {
          std::string k = key(r.next);
          if (visited.count(k)) break;
          if (visited.size() >= bounds.max_states) {
            rep.bounded = true;
            break;
          }
          visited.insert(std::move(k));
          queue.push_back({std::move(r.next), depth + 1});
          break;
        }
      }
    }
  }
  return rep;
}

std::vector<ParState> enumerate_par_states(const TypeContext& ctx, const SpaceConfig& cfg,
                                           int max_addrs) {
  std::vector<std::vector<Value>> domains;
  for (const auto& v : ctx.vars()) {
    std::vector<Value> dom;
    switch (*ctx.kind_of(v)) {
      case TypeKind::Int:
        for (auto n = cfg.int_min; n <= cfg.int_max; ++n) dom.push_back(Value::make_int(n));
        break;
      case TypeKind::Bool:
        dom = {Value::make_bool(false), Value::make_bool(true)};
        break;
      case TypeKind::Ref:
        dom.push_back(Value::null_ref());
        for (int a = 0; a < max_addrs; ++a) dom.push_back(Value::make_ref(RefId{a}));
        break;
      case TypeKind::Perm:
        break;  // ParImp has no permission-typed variables
    }
    domains.push_back(std::move(dom));
  }

  // Heap options per address: absent or one of the integer values.
  std::vector<ParState> result;
  std::vector<std::size_t> sdig(domains.size(), 0);
  while (true) {
    ParState base;
    for (std::size_t i = 0; i < domains.size(); ++i)
      base.store[ctx.vars()[i]] = domains[i][sdig[i]];

    std::vector<std::size_t> hdig(std::size_t(max_addrs), 0);
    const std::size_t hopts = std::size_t(cfg.int_max - cfg.int_min + 1) + 1;
    while (true) {
      ParState st = base;
      for (int a = 0; a < max_addrs; ++a) {
        std::size_t d = hdig[std::size_t(a)];
        if (d > 0) st.heap[HeapLoc{RefId{a}, "v"}] = Value::make_int(cfg.int_min + std::int64_t(d) - 1);
      }
      result.push_back(std::move(st));
      std::size_t i = 0;
      for (; i < hdig.size(); ++i) {
        if (++hdig[i] < hopts) break;
        hdig[i] = 0;
      }
      if (i == hdig.size()) break;
    }
    std::size_t i = 0;
    for (; i < sdig.size(); ++i) {
      if (++sdig[i] < domains[i].size()) break;
      sdig[i] = 0;
    }
    if (i == sdig.size()) break;
  }
  return result;
}

State embed_par_state(const ParState& st) {
  State::Mask mask;
  for (const auto& [l, v] : st.heap) {
    (void)v;
    mask[l] = Rational::from_int(1);
  }
  return State::make(st.store, st.heap, std::move(mask));
}

bool par_state_satisfies(const StateSpace& sp, const ParState& st, const AssertionPtr& a) {
  auto idx = sp.find_index(embed_par_state(st));
  if (!idx) return false;
  auto v = sat(sp, *idx, a);
  return v && *v;
}

}  // namespace ivl
