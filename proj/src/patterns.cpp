#include "ivlkit/patterns.hpp"

#include <sstream>

namespace ivl {

namespace {

StmtPtr build_pattern_stmt(const PatternInstance& inst) {
  StmtPtr tail = Stmt::inhale(inst.q);
  for (auto it = inst.mods.rbegin(); it != inst.mods.rend(); ++it)
    tail = Stmt::seq(Stmt::havoc(*it), tail);
  return Stmt::seq(Stmt::exhale(inst.p), tail);
}

// Walks the right-nested seq spine: exhale, havocs..., inhale.
struct InvertedPattern {
  const Derivation* exhale = nullptr;
  const Derivation* inhale = nullptr;
};

bool invert(const Derivation* d, InvertedPattern& out) {
  if (d->rule != Derivation::Rule::Seq || d->kids.size() != 2) return false;
  if (d->kids[0]->rule != Derivation::Rule::Exhale) return false;
  out.exhale = d->kids[0].get();
  const Derivation* cur = d->kids[1].get();
  while (cur->rule == Derivation::Rule::Seq) {
    if (cur->kids.size() != 2 || cur->kids[0]->rule != Derivation::Rule::Havoc) return false;
    cur = cur->kids[1].get();
  }
  if (cur->rule != Derivation::Rule::Inhale) return false;
  out.inhale = cur;
  return true;
}

bool independent_of(const StateSpace& sp, const Bitset& f, const std::string& var) {
  int slot = sp.var_slot(var);
  const auto& dom = sp.type_values(*sp.ctx().kind_of(var));
  for (std::size_t i = 0; i < sp.n_states(); ++i) {
    for (const auto& v : dom) {
      auto j = sp.store_update(i, slot, v);
      if (j && f.test(*j) != f.test(i)) return false;
    }
  }
  return true;
}

}  // namespace

std::string PatternLemmaReport::summary() const {
  std::ostringstream os;
  os << "pattern lemmas: " << checked << " instances, " << vacuous << " vacuous, "
     << failures.size() << " failures";
  return os.str();
}

PatternLemmaReport check_pattern_lemmas(const StateSpace& sp,
                                        const std::vector<PatternInstance>& instances) {
  PatternLemmaReport rep;
  AxSem ax(sp);
  for (const auto& inst : instances) {
    rep.checked++;
    StmtPtr stmt = build_pattern_stmt(inst);
    const Bitset& a = ax.denotations().denote(inst.pre);
    DerivationPtr d = ax.derive(stmt, a);
    if (!d) {
      rep.vacuous++;
      continue;
    }
    if (auto err = ax.check_derivation(d)) {
      rep.failures.push_back(inst.name + ": derive produced a rejected derivation at " +
                             err->node_path + ": " + err->message);
      continue;
    }
    InvertedPattern inv;
    if (!invert(d.get(), inv)) {
      rep.failures.push_back(inst.name + ": derivation does not have the pattern shape");
      continue;
    }
    // F = the inhale node's precondition (post of the havoc chain).
    const Bitset& f = inv.inhale->pre;
    const Bitset& b = d->post;
    Bitset qf = sep_conj(sp, ax.denotations().denote(inst.q), f);
    if (b != qf) {
      rep.failures.push_back(inst.name + ": B differs from Q * F");
      continue;
    }
    Bitset pf = sep_conj(sp, ax.denotations().denote(inst.p), f);
    if (!a.subset_of(pf)) {
      rep.failures.push_back(inst.name + ": A does not entail P * F");
      continue;
    }
    bool indep = true;
    for (const auto& x : inst.mods)
      if (!independent_of(sp, f, x)) {
        indep = false;
        break;
      }
    if (!indep) {
      rep.failures.push_back(inst.name + ": frame depends on a havocked variable");
      continue;
    }
  }
  return rep;
}

namespace {

ExprPtr var(const std::string& n) { return Expr::variable(n); }
ExprPtr ilit(std::int64_t n) { return Expr::lit(Value::make_int(n)); }
ExprPtr plit(std::int64_t n, std::int64_t d) { return Expr::lit(Value::make_perm(Rational(n, d))); }
ExprPtr fread(const std::string& r) { return Expr::field_read(var(r), "v"); }
ExprPtr eq(ExprPtr a, ExprPtr b) { return Expr::binary(BinOp::Eq, std::move(a), std::move(b)); }
AssertionPtr pure(ExprPtr e) { return Assertion::pure(std::move(e)); }
AssertionPtr truth() { return pure(Expr::lit(Value::make_bool(true))); }
AssertionPtr acc(const std::string& r, std::int64_t n, std::int64_t d) {
  return Assertion::acc(var(r), "v", plit(n, d));
}
AssertionPtr wacc(const std::string& r) { return Assertion::wildcard(var(r), "v"); }
AssertionPtr conj(AssertionPtr a, AssertionPtr b) {
  return Assertion::sep_conj(std::move(a), std::move(b));
}

}  // namespace

TypeContext pattern_corpus_context() {
  TypeContext ctx;
  ctx.declare("p", TypeKind::Ref);
  ctx.declare("q", TypeKind::Ref);
  ctx.declare("tmp", TypeKind::Int);
  return ctx;
}

SpaceConfig pattern_corpus_config() {
  SpaceConfig cfg;
  cfg.int_min = 0;
  cfg.int_max = 2;
  cfg.num_refs = 2;
  cfg.perm_denoms = {1, 2};
  cfg.fields = {"v"};
  return cfg;
}

std::vector<PatternInstance> builtin_pattern_corpus() {
  std::vector<PatternInstance> out;
  auto add = [&](std::string name, AssertionPtr pre, AssertionPtr p, AssertionPtr q,
                 std::vector<std::string> mods) {
    out.push_back({std::move(name), std::move(pre), std::move(p), std::move(q), std::move(mods)});
  };

  // Trivial frames.
  add("true-no-havoc", truth(), truth(), truth(), {});
  add("true-havoc-tmp", truth(), truth(), truth(), {"tmp"});
  add("pure-frame", pure(eq(var("tmp"), ilit(0))), truth(), truth(), {});
  add("pure-frame-havocked", pure(eq(var("tmp"), ilit(0))), truth(), truth(), {"tmp"});

  // Permission transfer with and without residue.
  add("full-perm-roundtrip", acc("p", 1, 1), acc("p", 1, 1), acc("p", 1, 1), {});
  add("full-perm-roundtrip-havoc", acc("p", 1, 1), acc("p", 1, 1), acc("p", 1, 1), {"tmp"});
  add("half-exhale-half-frame", acc("p", 1, 1), acc("p", 1, 2), acc("p", 1, 2), {});
  add("frame-other-location", conj(acc("p", 1, 1), acc("q", 1, 1)), acc("p", 1, 1),
      acc("p", 1, 1), {});
  add("frame-other-location-value",
      conj(conj(acc("p", 1, 1), acc("q", 1, 1)), pure(eq(fread("q"), ilit(1)))), acc("p", 1, 1),
      acc("p", 1, 1), {});
  add("gain-value-knowledge", acc("p", 1, 1), acc("p", 1, 1),
      conj(acc("p", 1, 1), pure(eq(fread("p"), ilit(0)))), {"tmp"});
  add("drop-value-knowledge", conj(acc("p", 1, 1), pure(eq(fread("p"), ilit(2)))),
      acc("p", 1, 1), acc("p", 1, 1), {});

  // Wildcards.
  add("wildcard-in-out", wacc("p"), wacc("p"), wacc("p"), {});
  add("wildcard-from-half", acc("p", 1, 2), wacc("p"), wacc("p"), {"tmp"});
  add("wildcard-framed-full", conj(acc("p", 1, 2), acc("q", 1, 1)), wacc("p"), wacc("p"), {});

  // Conditional and implication shapes.
  add("implication-q", acc("p", 1, 1), acc("p", 1, 1),
      conj(acc("p", 1, 1), Assertion::implies(eq(var("tmp"), ilit(0)),
                                              pure(eq(fread("p"), ilit(0))))),
      {});
  add("cond-assertion-q", acc("p", 1, 1), acc("p", 1, 1),
      Assertion::cond(eq(var("tmp"), ilit(0)), acc("p", 1, 1), acc("p", 1, 1)), {});

  // Pure exchanges under havoc.
  add("pure-exchange", conj(acc("p", 1, 1), pure(eq(fread("p"), var("tmp")))),
      pure(Expr::lit(Value::make_bool(true))), pure(eq(ilit(0), ilit(0))), {});
  add("havoc-two", acc("p", 1, 1), acc("p", 1, 1), acc("p", 1, 1), {"tmp", "q"});

  // Vacuous cases: the triple is rejected, the lemma holds trivially.
  add("vacuous-missing-perm", truth(), acc("p", 1, 1), truth(), {});
  add("vacuous-missing-half", acc("p", 1, 2), acc("p", 1, 1), truth(), {});

  // The running example's parallel segment at reduced bounds:
  //   A = wacc(p.v) * acc(q.v) * q.v = 0
  //   exhale (wacc(p.v) * acc(q.v)) * wacc(p.v); havoc tmp;
  //   inhale (wacc(p.v) * acc(q.v) * p.v = q.v) * (wacc(p.v) * tmp = p.v)
  {
    AssertionPtr pre = conj(conj(wacc("p"), acc("q", 1, 1)), pure(eq(fread("q"), ilit(0))));
    AssertionPtr pl = conj(wacc("p"), acc("q", 1, 1));
    AssertionPtr pr = wacc("p");
    AssertionPtr ql = conj(conj(wacc("p"), acc("q", 1, 1)), pure(eq(fread("p"), fread("q"))));
    AssertionPtr qr = conj(wacc("p"), pure(eq(var("tmp"), fread("p"))));
    add("fig2-parallel-segment", pre, conj(pl, pr), conj(ql, qr), {"tmp"});
  }
  add("fig2-left-premise-shape", conj(wacc("p"), acc("q", 1, 1)), conj(wacc("p"), acc("q", 1, 1)),
      conj(conj(wacc("p"), acc("q", 1, 1)), pure(eq(fread("p"), fread("q")))), {});

  return out;
}

}  // namespace ivl
