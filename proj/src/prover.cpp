#include "ivlkit/prover.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace ivl {

Verdict Prover::entails(const SymExprPtr& pc, const SymExprPtr& goal) {
  return is_unsat(sym_and(pc, sym_not(goal)));
}

namespace {

// Literals after NNF: an atom or its negation.
struct Literal {
  SymExprPtr atom;
  bool positive;
};

// A clause is a disjunction of literals; unit clauses drive the decision
// procedure, wider ones are handled by splitting.
using Clause = std::vector<Literal>;

void nnf(const SymExprPtr& e, bool positive, std::vector<Clause>& out);

void nnf_disjunct(const SymExprPtr& e, bool positive, Clause& clause) {
  if (e->kind == SymExpr::Kind::Binary && e->bop == SymBinOp::Or && positive) {
    nnf_disjunct(e->a, true, clause);
    nnf_disjunct(e->b, true, clause);
    return;
  }
  if (e->kind == SymExpr::Kind::Binary && e->bop == SymBinOp::And && !positive) {
    nnf_disjunct(e->a, false, clause);
    nnf_disjunct(e->b, false, clause);
    return;
  }
  if (e->kind == SymExpr::Kind::Unary && e->uop == SymUnOp::Not) {
    nnf_disjunct(e->a, !positive, clause);
    return;
  }
  clause.push_back({e, positive});
}

void nnf(const SymExprPtr& e, bool positive, std::vector<Clause>& out) {
  if (e->kind == SymExpr::Kind::Unary && e->uop == SymUnOp::Not) {
    nnf(e->a, !positive, out);
    return;
  }
  if (e->kind == SymExpr::Kind::Binary &&
      ((e->bop == SymBinOp::And && positive) || (e->bop == SymBinOp::Or && !positive))) {
    nnf(e->a, positive, out);
    nnf(e->b, positive, out);
    return;
  }
  Clause c;
  nnf_disjunct(e, positive, c);
  out.push_back(std::move(c));
}

// Union-find with congruence closure over the term graph.
class Congruence {
public:
  int id_of(const SymExprPtr& e) {
    std::string key = e->str();
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    int id = int(terms_.size());
    ids_.emplace(std::move(key), id);
    terms_.push_back(e);
    parent_.push_back(id);
    if (e->kind == SymExpr::Kind::Unary || e->kind == SymExpr::Kind::Binary) {
      int a = id_of(e->a);
      int b = e->kind == SymExpr::Kind::Binary ? id_of(e->b) : -1;
      apps_.push_back({id, a, b});
    }
    return id;
  }

  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[a] = b;
  }

  // Iterate congruence propagation to a fixpoint; then report whether two
  // distinct literals share a class.
  bool propagate_and_check() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < apps_.size(); ++i)
        for (std::size_t j = i + 1; j < apps_.size(); ++j) {
          const auto& x = apps_[i];
          const auto& y = apps_[j];
          if (find(x.self) == find(y.self)) continue;
          const auto& ex = terms_[std::size_t(x.self)];
          const auto& ey = terms_[std::size_t(y.self)];
          bool same_op = ex->kind == ey->kind &&
                         (ex->kind == SymExpr::Kind::Unary ? ex->uop == ey->uop
                                                           : ex->bop == ey->bop);
          if (!same_op) continue;
          if (find(x.arg0) != find(y.arg0)) continue;
          if (x.arg1 >= 0 && find(x.arg1) != find(y.arg1)) continue;
          merge(x.self, y.self);
          changed = true;
        }
    }
    // Distinct literal values in one class are contradictory.
    std::map<int, Value> lit_of_class;
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      if (terms_[t]->kind != SymExpr::Kind::Lit) continue;
      int c = find(int(t));
      auto it = lit_of_class.find(c);
      if (it == lit_of_class.end())
        lit_of_class.emplace(c, terms_[t]->lit);
      else if (it->second != terms_[t]->lit)
        return true;
    }
    return false;
  }

  int rep(const SymExprPtr& e) { return find(id_of(e)); }
  const SymExprPtr& term(int id) const { return terms_[std::size_t(id)]; }

private:
  struct App {
    int self, arg0, arg1;
  };
  std::map<std::string, int> ids_;
  std::vector<SymExprPtr> terms_;
  std::vector<int> parent_;
  std::vector<App> apps_;
};

// Linear form over congruence-class atoms: coeffs * atom + constant.
struct LinForm {
  std::map<int, Rational> coeffs;
  Rational constant;

  void add(const LinForm& o, const Rational& scale) {
    constant = constant + o.constant * scale;
    for (const auto& [a, c] : o.coeffs) {
      Rational v = coeffs.count(a) ? coeffs[a] + c * scale : c * scale;
      if (v.is_zero())
        coeffs.erase(a);
      else
        coeffs[a] = v;
    }
  }
};

struct LinConstraint {
  LinForm lhs;  // lhs (cmp) 0
  enum class Cmp { Eq, Le, Lt } cmp;
};

// Numeric literal of either arithmetic type.
std::optional<Rational> numeric_value(const Value& v) {
  if (v.is_int()) return Rational::from_int(v.as_int());
  if (v.is_perm()) return v.as_perm();
  return std::nullopt;
}

bool is_numeric_type(TypeKind k) { return k == TypeKind::Int || k == TypeKind::Perm; }

std::optional<LinForm> linearize(const SymExprPtr& e, Congruence& cong) {
  if (e->kind == SymExpr::Kind::Lit) {
    auto v = numeric_value(e->lit);
    if (!v) return std::nullopt;
    LinForm f;
    f.constant = *v;
    return f;
  }
  if (e->kind == SymExpr::Kind::Unary && e->uop == SymUnOp::Neg) {
    auto sub = linearize(e->a, cong);
    if (!sub) return std::nullopt;
    LinForm f;
    f.add(*sub, Rational::from_int(-1));
    return f;
  }
  if (e->kind == SymExpr::Kind::Binary) {
    switch (e->bop) {
      case SymBinOp::Add:
      case SymBinOp::Sub: {
        auto l = linearize(e->a, cong);
        auto r = linearize(e->b, cong);
        if (!l || !r) return std::nullopt;
        l->add(*r, Rational::from_int(e->bop == SymBinOp::Add ? 1 : -1));
        return l;
      }
      case SymBinOp::Mul: {
        // Linear only when one side folds to a constant.
        auto lv = sym_ground_value(e->a);
        auto rv = sym_ground_value(e->b);
        if (lv && numeric_value(*lv)) {
          auto r = linearize(e->b, cong);
          if (!r) return std::nullopt;
          LinForm f;
          f.add(*r, *numeric_value(*lv));
          return f;
        }
        if (rv && numeric_value(*rv)) {
          auto l = linearize(e->a, cong);
          if (!l) return std::nullopt;
          LinForm f;
          f.add(*l, *numeric_value(*rv));
          return f;
        }
        break;
      }
      case SymBinOp::Div: {
        auto rv = sym_ground_value(e->b);
        if (rv && rv->is_perm() && !rv->as_perm().is_zero()) {
          auto l = linearize(e->a, cong);
          if (!l) return std::nullopt;
          LinForm f;
          f.add(*l, Rational::from_int(1) / rv->as_perm());
          return f;
        }
        break;
      }
      default:
        break;
    }
  }
  // Opaque atom, identified by its congruence representative.
  if (!is_numeric_type(e->type)) return std::nullopt;
  LinForm f;
  f.coeffs[cong.rep(e)] = Rational::from_int(1);
  return f;
}

// Fourier-Motzkin over the rationals; returns true when the constraint system
// is infeasible. Gives up (false) when the budget is exceeded.
bool fm_infeasible(std::vector<LinConstraint> cs, std::size_t max_constraints) {
  // Substitute equalities first.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (cs[i].cmp != LinConstraint::Cmp::Eq) continue;
      if (cs[i].lhs.coeffs.empty()) {
        if (!cs[i].lhs.constant.is_zero()) return true;
        cs.erase(cs.begin() + long(i));
        changed = true;
        break;
      }
      auto [atom, coef] = *cs[i].lhs.coeffs.begin();
      // atom = -(rest)/coef; substitute into every other constraint.
      LinForm solved = cs[i].lhs;
      solved.coeffs.erase(atom);
      Rational inv = Rational::from_int(-1) / coef;
      for (std::size_t j = 0; j < cs.size(); ++j) {
        if (j == i) continue;
        auto it = cs[j].lhs.coeffs.find(atom);
        if (it == cs[j].lhs.coeffs.end()) continue;
        Rational c = it->second;
        cs[j].lhs.coeffs.erase(it);
        LinForm scaled;
        scaled.add(solved, c * inv);
        cs[j].lhs.add(scaled, Rational::from_int(1));
      }
      cs.erase(cs.begin() + long(i));
      changed = true;
      break;
    }
  }

  // Eliminate atoms one by one.
  while (true) {
    // Check ground constraints, collect remaining atoms.
    std::map<int, int> occurrences;
    for (auto it = cs.begin(); it != cs.end();) {
      if (it->lhs.coeffs.empty()) {
        const Rational& k = it->lhs.constant;
        bool ok = it->cmp == LinConstraint::Cmp::Lt ? k.is_negative()
                                                    : !k.is_positive();
        if (!ok) return true;
        it = cs.erase(it);
        continue;
      }
      for (const auto& [a, c] : it->lhs.coeffs) {
        (void)c;
        occurrences[a]++;
      }
      ++it;
    }
    if (cs.empty() || occurrences.empty()) return false;
    int atom = occurrences.begin()->first;
    for (const auto& [a, n] : occurrences)
      if (n < occurrences[atom]) atom = a;

    std::vector<LinConstraint> uppers, lowers, rest;
    for (auto& c : cs) {
      auto it = c.lhs.coeffs.find(atom);
      if (it == c.lhs.coeffs.end()) {
        rest.push_back(std::move(c));
        continue;
      }
      if (it->second.is_positive())
        uppers.push_back(std::move(c));
      else
        lowers.push_back(std::move(c));
    }
    for (const auto& up : uppers)
      for (const auto& lo : lowers) {
        // up: a*x + f <= 0 (a > 0), lo: -b*x + g <= 0 (b > 0)
        Rational a = up.lhs.coeffs.at(atom);
        Rational b = lo.lhs.coeffs.at(atom) * Rational::from_int(-1);
        LinConstraint combined;
        combined.lhs.add(up.lhs, b);
        combined.lhs.add(lo.lhs, a);
        combined.lhs.coeffs.erase(atom);
        bool strict = up.cmp == LinConstraint::Cmp::Lt || lo.cmp == LinConstraint::Cmp::Lt;
        combined.cmp = strict ? LinConstraint::Cmp::Lt : LinConstraint::Cmp::Le;
        rest.push_back(std::move(combined));
        if (rest.size() > max_constraints) return false;  // budget exhausted
      }
    cs = std::move(rest);
  }
}

class UnsatSearch {
public:
  explicit UnsatSearch(const BuiltinProver::Options& opts) : opts_(opts) {}

  // True = definitely unsatisfiable.
  bool run(std::vector<Clause> clauses, int depth) {
    std::vector<Literal> units;
    std::vector<Clause> wide;
    for (auto& c : clauses) {
      if (c.size() == 1) {
        // Numeric disequality splits into a strict-order disjunction so the
        // linear procedure can see it.
        const auto& lit = c[0];
        if (!lit.positive && lit.atom->kind == SymExpr::Kind::Binary &&
            lit.atom->bop == SymBinOp::Eq && is_numeric_type(lit.atom->a->type) &&
            depth > 0) {
          Clause split;
          split.push_back({sym_bin(SymBinOp::Lt, lit.atom->a, lit.atom->b), true});
          split.push_back({sym_bin(SymBinOp::Lt, lit.atom->b, lit.atom->a), true});
          wide.push_back(std::move(split));
          continue;
        }
        units.push_back(c[0]);
      } else {
        wide.push_back(std::move(c));
      }
    }
    if (decide_units(units)) return true;
    if (wide.empty() || depth <= 0) return false;
    // Split on the first wide clause: unsat iff every disjunct leads to unsat.
    Clause pivot = wide.front();
    wide.erase(wide.begin());
    for (const auto& lit : pivot) {
      std::vector<Clause> sub = wide;
      for (const auto& u : units) sub.push_back({u});
      sub.push_back({lit});
      if (!run(std::move(sub), depth - 1)) return false;
    }
    return true;
  }

private:
  bool decide_units(const std::vector<Literal>& units) {
    Congruence cong;
    std::vector<std::pair<int, int>> diseqs;
    std::vector<LinConstraint> lin;
    int true_id = cong.id_of(sym_bool(true));
    int false_id = cong.id_of(sym_bool(false));

    // Pass 1: ground checks, equality merges, boolean pinning.
    for (const auto& lit : units) {
      if (auto g = sym_ground_value(lit.atom)) {
        if (g->is_bool() && g->as_bool() != lit.positive) return true;
        if (g->is_bool()) continue;
      }
      const auto& e = lit.atom;
      if (e->kind == SymExpr::Kind::Binary && e->bop == SymBinOp::Eq) {
        if (lit.positive)
          cong.merge(cong.id_of(e->a), cong.id_of(e->b));
        else
          diseqs.push_back({cong.id_of(e->a), cong.id_of(e->b)});
        continue;
      }
      if (e->type == TypeKind::Bool &&
          !(e->kind == SymExpr::Kind::Binary &&
            (e->bop == SymBinOp::Lt || e->bop == SymBinOp::Le)))
        cong.merge(cong.id_of(e), lit.positive ? true_id : false_id);
    }

    if (cong.propagate_and_check()) return true;
    if (cong.find(true_id) == cong.find(false_id)) return true;
    for (const auto& [a, b] : diseqs)
      if (cong.find(a) == cong.find(b)) return true;

    // Pass 2: linearize with settled congruence representatives.
    for (const auto& lit : units) {
      const auto& e = lit.atom;
      if (e->kind != SymExpr::Kind::Binary) continue;
      if (e->bop != SymBinOp::Eq && e->bop != SymBinOp::Lt && e->bop != SymBinOp::Le) continue;
      if (!is_numeric_type(e->a->type)) continue;
      auto l = linearize(e->a, cong);
      auto r = linearize(e->b, cong);
      if (!l || !r) continue;
      LinForm diff = *l;
      diff.add(*r, Rational::from_int(-1));
      if (e->bop == SymBinOp::Eq) {
        if (lit.positive) lin.push_back({diff, LinConstraint::Cmp::Eq});
        // Negative numeric equalities were split into strict orders upstream.
      } else if (lit.positive) {
        lin.push_back({diff, e->bop == SymBinOp::Lt ? LinConstraint::Cmp::Lt
                                                    : LinConstraint::Cmp::Le});
      } else {
        LinForm neg;
        neg.add(diff, Rational::from_int(-1));
        lin.push_back({neg, e->bop == SymBinOp::Lt ? LinConstraint::Cmp::Le
                                                   : LinConstraint::Cmp::Lt});
      }
    }

    // Permission-typed variables are confined to [0,1] by the state model.
    std::vector<LinConstraint> with_bounds = lin;
    std::map<int, bool> seen_perm;
    for (const auto& c : lin)
      for (const auto& [atom, coef] : c.lhs.coeffs) {
        (void)coef;
        if (seen_perm[atom]) continue;
        seen_perm[atom] = true;
        const auto& t = cong.term(atom);
        if (t->kind == SymExpr::Kind::Var && t->type == TypeKind::Perm) {
          LinConstraint lo, hi;  // -p <= 0 and p - 1 <= 0
          lo.lhs.coeffs[atom] = Rational::from_int(-1);
          lo.cmp = LinConstraint::Cmp::Le;
          hi.lhs.coeffs[atom] = Rational::from_int(1);
          hi.lhs.constant = Rational::from_int(-1);
          hi.cmp = LinConstraint::Cmp::Le;
          with_bounds.push_back(lo);
          with_bounds.push_back(hi);
        }
      }
    return fm_infeasible(std::move(with_bounds), opts_.max_constraints);
  }

  const BuiltinProver::Options& opts_;
};

}  // namespace

Verdict BuiltinProver::is_unsat(const SymExprPtr& pc) {
  ++queries_;
  std::vector<Clause> clauses;
  nnf(pc, true, clauses);
  UnsatSearch search(opts_);
  return search.run(std::move(clauses), opts_.split_depth) ? Verdict::Valid : Verdict::Unknown;
}

}  // namespace ivl
