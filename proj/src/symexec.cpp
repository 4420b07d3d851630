#include "ivlkit/symexec.hpp"

#include <sstream>

namespace ivl {

std::string Diagnostic::str() const {
  const char* k = kind == Kind::Entailment      ? "entailment"
                  : kind == Kind::MissingChunk  ? "missing-chunk"
                  : kind == Kind::Type          ? "type"
                                                : "unsupported";
  std::ostringstream os;
  os << method << ":" << pos.line << ":" << pos.col << ": [" << k << "] " << detail
     << "\n  pc: " << pc;
  return os.str();
}

void SymExecCtx::report(Diagnostic::Kind kind, const std::string& detail, const SymExprPtr& pc) {
  diags.push_back({method_name, current_pos, kind, detail, pc ? pc->str() : "true"});
}

namespace {

SymExprPtr perm_zero() { return sym_perm(Rational()); }
SymExprPtr perm_one() { return sym_perm(Rational::from_int(1)); }

bool prune(SymExecCtx& cx, const SymState& sigma) {
  return cx.prune_branches && cx.prover.is_unsat(sigma.pc) == Verdict::Valid;
}

bool merge_consolidate(SymExecCtx& cx, SymState sigma, const K& k);

}  // namespace

bool consolidate(SymExecCtx& cx, SymState sigma, const K& k) {
  switch (cx.consolidation) {
    case Consolidation::None:
      return k(std::move(sigma));  // the trivial strategy
    case Consolidation::Merge:
      return merge_consolidate(cx, std::move(sigma), k);
  }
  return false;
}

namespace {

// Merges chunk pairs for the same receiver/field when both permissions are
// provably positive: both then map onto the same concrete location with a
// value, so their values coincide and the summed permission is at most 1.
bool merge_consolidate(SymExecCtx& cx, SymState sigma, const K& k) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < sigma.heap.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < sigma.heap.size() && !changed; ++j) {
        const Chunk& a = sigma.heap[i];
        const Chunk& b = sigma.heap[j];
        if (a.field != b.field || !sym_equal(a.recv, b.recv)) continue;
        if (cx.prover.entails(sigma.pc, sym_bin(SymBinOp::Lt, perm_zero(), a.perm)) !=
            Verdict::Valid)
          continue;
        if (cx.prover.entails(sigma.pc, sym_bin(SymBinOp::Lt, perm_zero(), b.perm)) !=
            Verdict::Valid)
          continue;
        Chunk merged{a.recv, a.field, sym_bin(SymBinOp::Add, a.perm, b.perm), a.val};
        SymExprPtr facts = sym_and(
            sym_eq(a.val, b.val),
            sym_bin(SymBinOp::Le, merged.perm, perm_one()));
        sigma.heap.erase(sigma.heap.begin() + long(j));
        sigma.heap[i] = merged;
        sigma.pc = sym_and(sigma.pc, facts);
        changed = true;
      }
    }
  }
  return k(std::move(sigma));
}

}  // namespace

bool chunk_add(SymExecCtx& cx, SymState sigma, Chunk c, const K& k) {
  sigma.heap.insert(sigma.heap.begin(), std::move(c));
  return consolidate(cx, std::move(sigma), k);
}

bool scleanup(SymExecCtx& cx, SymState sigma, const K& k) {
  std::vector<Chunk> kept;
  kept.reserve(sigma.heap.size());
  for (auto& c : sigma.heap) {
    if (cx.prover.entails(sigma.pc, sym_eq(c.perm, perm_zero())) == Verdict::Valid) continue;
    kept.push_back(std::move(c));
  }
  sigma.heap = std::move(kept);
  return k(std::move(sigma));
}

bool extract(SymExecCtx& cx, SymState sigma, const SymExprPtr& recv, const std::string& field,
             const PermRequirement& req, const KChunk& k) {
  for (std::size_t i = 0; i < sigma.heap.size(); ++i) {
    const Chunk& c = sigma.heap[i];
    if (c.field != field) continue;
    if (cx.prover.entails(sigma.pc, sym_eq(c.recv, recv)) != Verdict::Valid) continue;
    SymExprPtr need;
    switch (req.kind) {
      case PermRequirement::Kind::Exact:
        need = sym_bin(SymBinOp::Le, req.amount, c.perm);
        break;
      case PermRequirement::Kind::Wildcard:
      case PermRequirement::Kind::Read:
        // Provably positive permission; the paper's literal ">= 0" reading for
        // field reads is unsound against the concrete semantics.
        need = sym_bin(SymBinOp::Lt, perm_zero(), c.perm);
        break;
    }
    if (cx.prover.entails(sigma.pc, need) != Verdict::Valid) continue;
    Chunk out = c;
    SymState next = sigma;
    next.heap.erase(next.heap.begin() + long(i));
    return k(std::move(next), std::move(out));
  }
  cx.report(Diagnostic::Kind::MissingChunk,
            "no chunk for " + recv->str() + "." + field + " with " +
                (req.kind == PermRequirement::Kind::Exact
                     ? "permission >= " + req.amount->str()
                     : "positive permission"),
            sigma.pc);
  return false;
}

bool sexp(SymExecCtx& cx, SymState sigma, const ExprPtr& e, const KExpr& k) {
  switch (e->kind) {
    case Expr::Kind::Literal:
      return k(std::move(sigma), sym_lit(e->literal));
    case Expr::Kind::Var: {
      auto it = sigma.store.find(e->var);
      if (it == sigma.store.end()) {
        cx.report(Diagnostic::Kind::Type, "unbound variable " + e->var, sigma.pc);
        return false;
      }
      return k(std::move(sigma), it->second);
    }
    case Expr::Kind::Unary:
      return sexp(cx, std::move(sigma), e->a, [&](SymState s, SymExprPtr t) {
        return k(std::move(s), e->uop == UnOp::Not ? sym_not(t) : sym_neg(t));
      });
    case Expr::Kind::Binary: {
      // Lazy operators desugar to conditionals before symbolic evaluation.
      if (e->bop == BinOp::And)
        return sexp(cx, std::move(sigma),
                    Expr::cond(e->a, e->b, Expr::lit(Value::make_bool(false)), e->pos), k);
      if (e->bop == BinOp::Or)
        return sexp(cx, std::move(sigma),
                    Expr::cond(e->a, Expr::lit(Value::make_bool(true)), e->b, e->pos), k);
      SymBinOp op;
      switch (e->bop) {
        case BinOp::Eq: op = SymBinOp::Eq; break;
        case BinOp::Lt: op = SymBinOp::Lt; break;
        case BinOp::Add: op = SymBinOp::Add; break;
        case BinOp::Sub: op = SymBinOp::Sub; break;
        case BinOp::Mul: op = SymBinOp::Mul; break;
        case BinOp::Div: op = SymBinOp::Div; break;
        default: return false;
      }
      return sexp(cx, std::move(sigma), e->a, [&](SymState s1, SymExprPtr t1) {
        return sexp(cx, std::move(s1), e->b, [&](SymState s2, SymExprPtr t2) {
          return k(std::move(s2), sym_bin(op, t1, t2));
        });
      });
    }
    case Expr::Kind::Cond:
      return sexp(cx, std::move(sigma), e->a, [&](SymState s, SymExprPtr t) {
        SymState st = s.add_pc(t);
        SymState se = s.add_pc(sym_not(t));
        bool left = prune(cx, st) || sexp(cx, st, e->b, k);
        if (!left) return false;
        return prune(cx, se) || sexp(cx, se, e->c, k);
      });
    case Expr::Kind::FieldRead:
      return sexp(cx, std::move(sigma), e->a, [&](SymState s, SymExprPtr t_r) {
        return extract(cx, std::move(s), t_r, e->field, PermRequirement::read(),
                       [&](SymState s2, Chunk c) {
                         SymExprPtr val = c.val;
                         return chunk_add(cx, std::move(s2), std::move(c),
                                          [&](SymState s3) { return k(std::move(s3), val); });
                       });
      });
  }
  return false;
}

bool sproduce(SymExecCtx& cx, SymState sigma, const AssertionPtr& a, const K& k) {
  cx.current_pos = a->pos;
  switch (a->kind) {
    case Assertion::Kind::Pure:
      return sexp(cx, std::move(sigma), a->expr,
                  [&](SymState s, SymExprPtr t) { return k(s.add_pc(t)); });
    case Assertion::Kind::Acc: {
      if (a->is_wildcard()) {
        return sexp(cx, std::move(sigma), a->recv, [&](SymState s, SymExprPtr t_r) {
          SymExprPtr t_p = cx.fresh.fresh(TypeKind::Perm, "wild");
          SymState s2 = s.add_pc(sym_bin(SymBinOp::Lt, perm_zero(), t_p));
          Chunk c{t_r, a->field, t_p, cx.fresh.fresh(field_type(a->field), a->field)};
          return chunk_add(cx, std::move(s2), std::move(c), k);
        });
      }
      return sexp(cx, std::move(sigma), a->recv, [&](SymState s, SymExprPtr t_r) {
        return sexp(cx, std::move(s), a->perm, [&](SymState s2, SymExprPtr t_p) {
          Chunk c{t_r, a->field, t_p, cx.fresh.fresh(field_type(a->field), a->field)};
          return chunk_add(cx, std::move(s2), std::move(c), k);
        });
      });
    }
    case Assertion::Kind::SepConj:
      return sproduce(cx, std::move(sigma), a->a,
                      [&](SymState s) { return sproduce(cx, std::move(s), a->b, k); });
    case Assertion::Kind::Implies:
      return sexp(cx, std::move(sigma), a->expr, [&](SymState s, SymExprPtr t) {
        SymState st = s.add_pc(t);
        SymState se = s.add_pc(sym_not(t));
        bool left = prune(cx, st) || sproduce(cx, st, a->a, k);
        if (!left) return false;
        return prune(cx, se) || k(se);
      });
    case Assertion::Kind::Cond:
      return sexp(cx, std::move(sigma), a->expr, [&](SymState s, SymExprPtr t) {
        SymState st = s.add_pc(t);
        SymState se = s.add_pc(sym_not(t));
        bool left = prune(cx, st) || sproduce(cx, st, a->a, k);
        if (!left) return false;
        return prune(cx, se) || sproduce(cx, se, a->b, k);
      });
    case Assertion::Kind::Disj:
      cx.report(Diagnostic::Kind::Unsupported,
                "disjunction is not supported by the symbolic back-end", sigma.pc);
      return false;
  }
  return false;
}

bool sconsume(SymExecCtx& cx, SymState sigma, const AssertionPtr& a, const K& k) {
  cx.current_pos = a->pos;
  switch (a->kind) {
    case Assertion::Kind::Pure:
      return sexp(cx, std::move(sigma), a->expr, [&](SymState s, SymExprPtr t) {
        if (cx.prover.entails(s.pc, t) != Verdict::Valid) {
          cx.report(Diagnostic::Kind::Entailment, "cannot prove " + t->str(), s.pc);
          return false;
        }
        return k(std::move(s));
      });
    case Assertion::Kind::Acc: {
      if (a->is_wildcard()) {
        return sexp(cx, std::move(sigma), a->recv, [&](SymState s, SymExprPtr t_r) {
          return extract(cx, std::move(s), t_r, a->field, PermRequirement::wildcard(),
                         [&](SymState s2, Chunk c) {
                           c.perm = sym_bin(SymBinOp::Div, c.perm, sym_perm(Rational(2, 1)));
                           return chunk_add(cx, std::move(s2), std::move(c), k);
                         });
        });
      }
      return sexp(cx, std::move(sigma), a->recv, [&](SymState s, SymExprPtr t_r) {
        return sexp(cx, std::move(s), a->perm, [&](SymState s2, SymExprPtr t_p) {
          return extract(cx, std::move(s2), t_r, a->field, PermRequirement::exact(t_p),
                         [&](SymState s3, Chunk c) {
                           c.perm = sym_bin(SymBinOp::Sub, c.perm, t_p);
                           return chunk_add(cx, std::move(s3), std::move(c), k);
                         });
        });
      });
    }
    case Assertion::Kind::SepConj:
      return sconsume(cx, std::move(sigma), a->a,
                      [&](SymState s) { return sconsume(cx, std::move(s), a->b, k); });
    case Assertion::Kind::Implies:
      return sexp(cx, std::move(sigma), a->expr, [&](SymState s, SymExprPtr t) {
        SymState st = s.add_pc(t);
        SymState se = s.add_pc(sym_not(t));
        bool left = prune(cx, st) || sconsume(cx, st, a->a, k);
        if (!left) return false;
        return prune(cx, se) || k(se);
      });
    case Assertion::Kind::Cond:
      return sexp(cx, std::move(sigma), a->expr, [&](SymState s, SymExprPtr t) {
        SymState st = s.add_pc(t);
        SymState se = s.add_pc(sym_not(t));
        bool left = prune(cx, st) || sconsume(cx, st, a->a, k);
        if (!left) return false;
        return prune(cx, se) || sconsume(cx, se, a->b, k);
      });
    case Assertion::Kind::Disj:
      cx.report(Diagnostic::Kind::Unsupported,
                "disjunction is not supported by the symbolic back-end", sigma.pc);
      return false;
  }
  return false;
}

bool sexec(SymExecCtx& cx, SymState sigma, const StmtPtr& stmt, const K& k) {
  cx.current_pos = stmt->pos;
  switch (stmt->kind) {
    case Stmt::Kind::Inhale:
      return sproduce(cx, std::move(sigma), stmt->assertion, k);
    case Stmt::Kind::Exhale:
      return sconsume(cx, std::move(sigma), stmt->assertion,
                      [&](SymState s) { return scleanup(cx, std::move(s), k); });
    case Stmt::Kind::If:
      return sexp(cx, std::move(sigma), stmt->expr, [&](SymState s, SymExprPtr t) {
        SymState st = s.add_pc(t);
        SymState se = s.add_pc(sym_not(t));
        bool left = prune(cx, st) || sexec(cx, st, stmt->s1, k);
        if (!left) return false;
        return prune(cx, se) || sexec(cx, se, stmt->s2, k);
      });
    case Stmt::Kind::Seq:
      return sexec(cx, std::move(sigma), stmt->s1,
                   [&](SymState s) { return sexec(cx, std::move(s), stmt->s2, k); });
    case Stmt::Kind::Assign: {
      if (!sigma.store.count(stmt->var)) {
        cx.report(Diagnostic::Kind::Type, "assignment to unbound variable " + stmt->var,
                  sigma.pc);
        return false;
      }
      return sexp(cx, std::move(sigma), stmt->expr, [&](SymState s, SymExprPtr t) {
        return k(s.set_store(stmt->var, t));
      });
    }
    case Stmt::Kind::Havoc: {
      if (!sigma.store.count(stmt->var)) {
        cx.report(Diagnostic::Kind::Type, "havoc of unbound variable " + stmt->var, sigma.pc);
        return false;
      }
      auto kind = cx.types.kind_of(stmt->var);
      return k(sigma.set_store(stmt->var, cx.fresh.fresh(*kind, stmt->var)));
    }
    case Stmt::Kind::Skip:
      return k(std::move(sigma));
    case Stmt::Kind::FieldAssign:
      return sexp(cx, std::move(sigma), stmt->recv, [&](SymState s, SymExprPtr t_r) {
        return sexp(cx, std::move(s), stmt->rhs, [&](SymState s2, SymExprPtr t_v) {
          return extract(cx, std::move(s2), t_r, stmt->field,
                         PermRequirement::exact(perm_one()), [&](SymState s3, Chunk c) {
                           return scleanup(cx, std::move(s3), [&](SymState s4) {
                             c.val = t_v;
                             return chunk_add(cx, std::move(s4), std::move(c), k);
                           });
                         });
        });
      });
  }
  return false;
}

VerifyResult verify_method(const TypeContext& ctx, const StmtPtr& body, Prover& prover,
                           const VerifyOptions& opts, const std::string& method_name) {
  SymExecCtx cx(ctx, prover);
  cx.consolidation = opts.consolidation;
  cx.prune_branches = opts.prune_branches;
  cx.method_name = method_name;

  SymState sigma;
  sigma.pc = sym_bool(true);
  for (const auto& v : ctx.vars()) sigma.store[v] = cx.fresh.fresh(*ctx.kind_of(v), v);

  VerifyResult res;
  res.ok = sexec(cx, std::move(sigma), body, [](SymState) { return true; });
  res.diagnostics = std::move(cx.diags);
  res.fresh_issued = cx.fresh.issued();
  return res;
}

}  // namespace ivl
