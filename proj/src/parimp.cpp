#include "ivlkit/parimp.hpp"

#include <stdexcept>

#include "lexer.hpp"

namespace ivl {

namespace {

std::shared_ptr<PStmt> node(PStmt::Kind k, SourcePos p = {}) {
  auto s = std::make_shared<PStmt>();
  s->kind = k;
  s->pos = p;
  return s;
}

}  // namespace

PStmtPtr PStmt::assign(std::string var, ExprPtr e, SourcePos p) {
  auto s = node(Kind::Assign, p);
  s->var = std::move(var);
  s->expr = std::move(e);
  return s;
}

PStmtPtr PStmt::load(std::string var, std::string ref, SourcePos p) {
  auto s = node(Kind::Load, p);
  s->var = std::move(var);
  s->ref = std::move(ref);
  return s;
}

PStmtPtr PStmt::store(std::string ref, ExprPtr e, SourcePos p) {
  auto s = node(Kind::Store, p);
  s->ref = std::move(ref);
  s->expr = std::move(e);
  return s;
}

PStmtPtr PStmt::alloc(std::string var, ExprPtr e, SourcePos p) {
  auto s = node(Kind::Alloc, p);
  s->var = std::move(var);
  s->expr = std::move(e);
  return s;
}

PStmtPtr PStmt::free_(std::string ref, SourcePos p) {
  auto s = node(Kind::Free, p);
  s->ref = std::move(ref);
  return s;
}

PStmtPtr PStmt::seq(PStmtPtr a, PStmtPtr b) {
  auto s = node(Kind::Seq, a ? a->pos : SourcePos{});
  s->s1 = std::move(a);
  s->s2 = std::move(b);
  return s;
}

PStmtPtr PStmt::ite(ExprPtr cond, PStmtPtr t, PStmtPtr e, SourcePos p) {
  auto s = node(Kind::If, p);
  s->expr = std::move(cond);
  s->s1 = std::move(t);
  s->s2 = std::move(e);
  return s;
}

PStmtPtr PStmt::par(PStmtPtr l, PStmtPtr r, AssertionPtr pre_l, AssertionPtr post_l,
                    AssertionPtr pre_r, AssertionPtr post_r, SourcePos p) {
  auto s = node(Kind::Par, p);
  s->s1 = std::move(l);
  s->s2 = std::move(r);
  s->pre_l = std::move(pre_l);
  s->post_l = std::move(post_l);
  s->pre_r = std::move(pre_r);
  s->post_r = std::move(post_r);
  return s;
}

PStmtPtr PStmt::while_(ExprPtr cond, AssertionPtr inv, PStmtPtr body, SourcePos p) {
  auto s = node(Kind::While, p);
  s->expr = std::move(cond);
  s->invariant = std::move(inv);
  s->s1 = std::move(body);
  return s;
}

PStmtPtr PStmt::skip(SourcePos p) { return node(Kind::Skip, p); }

std::string PStmt::str() const {
  switch (kind) {
    case Kind::Assign: return var + " := " + expr->str();
    case Kind::Load: return var + " := " + ref + ".v";
    case Kind::Store: return ref + ".v := " + expr->str();
    case Kind::Alloc: return var + " := alloc(" + expr->str() + ")";
    case Kind::Free: return "free(" + ref + ")";
    case Kind::Seq: return s1->str() + "; " + s2->str();
    case Kind::If: return "if (" + expr->str() + ") { " + s1->str() + " } else { " + s2->str() + " }";
    case Kind::Par: return "par { " + s1->str() + " } { " + s2->str() + " }";
    case Kind::While: return "while (" + expr->str() + ") { " + s1->str() + " }";
    case Kind::Skip: return "skip";
  }
  return "?";
}

const PMethod* PProgram::find(const std::string& name) const {
  for (const auto& m : methods)
    if (m.name == name) return &m;
  return nullptr;
}

namespace {

void forbid_heap_reads(const ExprPtr& e) {
  if (!e) return;
  if (e->kind == Expr::Kind::FieldRead)
    throw ParseError(e->pos, "heap reads are only allowed via x := r.v");
  forbid_heap_reads(e->a);
  forbid_heap_reads(e->b);
  forbid_heap_reads(e->c);
}

void check_field_names(const AssertionPtr& a) {
  std::vector<std::string> fields;
  collect_assertion_fields(a, fields);
  for (const auto& f : fields)
    if (f != "v") throw ParseError(a->pos, "objects have the single field v");
}

class PimParser {
public:
  explicit PimParser(Lexer& lx) : lx_(lx) {}

  PStmtPtr parse_block() {
    lx_.expect(Tok::LBrace, "'{'");
    PStmtPtr b = parse_stmts();
    lx_.expect(Tok::RBrace, "'}'");
    return b;
  }

  PStmtPtr parse_stmts() {
    std::vector<PStmtPtr> items;
    while (!lx_.at(Tok::RBrace) && !lx_.at(Tok::End)) {
      if (lx_.accept(Tok::Semi)) continue;
      items.push_back(parse_stmt());
    }
    if (items.empty()) return PStmt::skip(lx_.peek().pos);
    PStmtPtr out = items.back();
    for (std::size_t i = items.size() - 1; i-- > 0;) out = PStmt::seq(items[i], out);
    return out;
  }

  PStmtPtr parse_stmt() {
    const Token& t = lx_.peek();
    if (lx_.accept_ident("skip")) return PStmt::skip(t.pos);
    if (lx_.accept_ident("free")) {
      lx_.expect(Tok::LParen, "'('");
      std::string r = lx_.expect_ident("reference variable");
      lx_.expect(Tok::RParen, "')'");
      return PStmt::free_(r, t.pos);
    }
    if (lx_.accept_ident("if")) {
      lx_.expect(Tok::LParen, "'('");
      ExprPtr cond = ExprParserFacade::parse(lx_);
      lx_.expect(Tok::RParen, "')'");
      forbid_heap_reads(cond);
      PStmtPtr then_b = parse_block();
      PStmtPtr else_b = PStmt::skip(t.pos);
      if (lx_.accept_ident("else")) else_b = parse_block();
      return PStmt::ite(cond, then_b, else_b, t.pos);
    }
    if (lx_.accept_ident("while")) {
      lx_.expect(Tok::LParen, "'('");
      ExprPtr cond = ExprParserFacade::parse(lx_);
      lx_.expect(Tok::RParen, "')'");
      forbid_heap_reads(cond);
      lx_.expect_keyword("invariant");
      AssertionPtr inv = AssertionParserFacade::parse(lx_);
      check_field_names(inv);
      return PStmt::while_(cond, inv, parse_block(), t.pos);
    }
    if (lx_.accept_ident("par")) {
      auto [pre_l, post_l, body_l] = parse_par_branch();
      auto [pre_r, post_r, body_r] = parse_par_branch();
      return PStmt::par(body_l, body_r, pre_l, post_l, pre_r, post_r, t.pos);
    }
    // x := e | x := r.v | x := alloc(e) | r.v := e
    std::string name = lx_.expect_ident("statement");
    if (lx_.accept(Tok::Dot)) {
      std::string field = lx_.expect_ident("field");
      if (field != "v") throw ParseError(t.pos, "objects have the single field v");
      lx_.expect(Tok::Assign, "':='");
      ExprPtr rhs = ExprParserFacade::parse(lx_);
      forbid_heap_reads(rhs);
      return PStmt::store(name, rhs, t.pos);
    }
    lx_.expect(Tok::Assign, "':='");
    if (lx_.accept_ident("alloc")) {
      lx_.expect(Tok::LParen, "'('");
      ExprPtr init = ExprParserFacade::parse(lx_);
      lx_.expect(Tok::RParen, "')'");
      forbid_heap_reads(init);
      return PStmt::alloc(name, init, t.pos);
    }
    ExprPtr rhs = ExprParserFacade::parse(lx_);
    if (rhs->kind == Expr::Kind::FieldRead) {
      if (rhs->a->kind != Expr::Kind::Var)
        throw ParseError(t.pos, "loads take the form x := r.v");
      if (rhs->field != "v") throw ParseError(t.pos, "objects have the single field v");
      return PStmt::load(name, rhs->a->var, t.pos);
    }
    forbid_heap_reads(rhs);
    return PStmt::assign(name, rhs, t.pos);
  }

private:
  std::tuple<AssertionPtr, AssertionPtr, PStmtPtr> parse_par_branch() {
    lx_.expect(Tok::LBrace, "'{'");
    lx_.expect_keyword("pre");
    AssertionPtr pre = AssertionParserFacade::parse(lx_);
    check_field_names(pre);
    lx_.expect(Tok::Semi, "';'");
    lx_.expect_keyword("post");
    AssertionPtr post = AssertionParserFacade::parse(lx_);
    check_field_names(post);
    lx_.expect(Tok::Semi, "';'");
    PStmtPtr body = parse_block();
    lx_.expect(Tok::RBrace, "'}'");
    return {pre, post, body};
  }

  // The .ivl expression/assertion parsers, reused through small shims defined
  // in parser.cpp's anonymous namespace equivalents.
  struct ExprParserFacade {
    static ExprPtr parse(Lexer& lx);
  };
  struct AssertionParserFacade {
    static AssertionPtr parse(Lexer& lx);
  };

  Lexer& lx_;
};

}  // namespace

// Shims into the .ivl parser internals.
ExprPtr parse_expr_for_pim(Lexer& lx);
AssertionPtr parse_assertion_for_pim(Lexer& lx);

namespace {
ExprPtr PimParser::ExprParserFacade::parse(Lexer& lx) { return parse_expr_for_pim(lx); }
AssertionPtr PimParser::AssertionParserFacade::parse(Lexer& lx) {
  return parse_assertion_for_pim(lx);
}
}  // namespace

PProgram parse_pim(const std::string& source) {
  Lexer lx(source);
  PProgram prog;
  while (!lx.at(Tok::End)) {
    lx.expect_keyword("method");
    PMethod m;
    m.name = lx.expect_ident("method name");
    if (prog.find(m.name)) throw ParseError(lx.peek().pos, "duplicate method " + m.name);
    lx.expect(Tok::LParen, "'('");
    if (!lx.at(Tok::RParen)) {
      do {
        std::string name = lx.expect_ident("parameter name");
        lx.expect(Tok::Colon, "':'");
        std::string ty = lx.expect_ident("type");
        if (ty == "Int")
          m.ctx.declare(name, TypeKind::Int);
        else if (ty == "Ref")
          m.ctx.declare(name, TypeKind::Ref);
        else if (ty == "Bool")
          m.ctx.declare(name, TypeKind::Bool);
        else
          throw ParseError(lx.peek().pos, "ParImp variables are Int, Bool or Ref");
      } while (lx.accept(Tok::Comma));
    }
    lx.expect(Tok::RParen, "')'");
    if (lx.accept_ident("requires")) {
      m.requires_ = parse_assertion_for_pim(lx);
      check_field_names(m.requires_);
    } else {
      m.requires_ = Assertion::pure(Expr::lit(Value::make_bool(true)));
    }
    if (lx.accept_ident("ensures")) {
      m.ensures_ = parse_assertion_for_pim(lx);
      check_field_names(m.ensures_);
    } else {
      m.ensures_ = Assertion::pure(Expr::lit(Value::make_bool(true)));
    }
    lx.expect(Tok::LBrace, "'{'");
    while (lx.at_ident("var")) {
      lx.next();
      std::string name = lx.expect_ident("variable name");
      lx.expect(Tok::Colon, "':'");
      std::string ty = lx.expect_ident("type");
      if (ty == "Int")
        m.ctx.declare(name, TypeKind::Int);
      else if (ty == "Ref")
        m.ctx.declare(name, TypeKind::Ref);
      else if (ty == "Bool")
        m.ctx.declare(name, TypeKind::Bool);
      else
        throw ParseError(lx.peek().pos, "ParImp variables are Int, Bool or Ref");
      lx.accept(Tok::Semi);
    }
    PimParser pp(lx);
    m.body = pp.parse_stmts();
    lx.expect(Tok::RBrace, "'}'");
    prog.methods.push_back(std::move(m));
  }
  return prog;
}

std::set<std::string> mod_vars_parimp(const PStmtPtr& stmt) {
  std::set<std::string> out;
  if (!stmt) return out;
  switch (stmt->kind) {
    case PStmt::Kind::Assign:
    case PStmt::Kind::Load:
    case PStmt::Kind::Alloc:
      out.insert(stmt->var);
      break;
    default:
      break;
  }
  for (const auto& c : {stmt->s1, stmt->s2}) {
    auto sub = mod_vars_parimp(c);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::set<std::string> free_vars_parimp(const PStmtPtr& stmt) {
  std::set<std::string> out;
  if (!stmt) return out;
  std::vector<std::string> vs;
  switch (stmt->kind) {
    case PStmt::Kind::Assign:
    case PStmt::Kind::Alloc:
      vs.push_back(stmt->var);
      collect_expr_vars(stmt->expr, vs);
      break;
    case PStmt::Kind::Load:
      vs.push_back(stmt->var);
      vs.push_back(stmt->ref);
      break;
    case PStmt::Kind::Store:
      vs.push_back(stmt->ref);
      collect_expr_vars(stmt->expr, vs);
      break;
    case PStmt::Kind::Free:
      vs.push_back(stmt->ref);
      break;
    case PStmt::Kind::If:
    case PStmt::Kind::While:
      collect_expr_vars(stmt->expr, vs);
      break;
    default:
      break;
  }
  out.insert(vs.begin(), vs.end());
  for (const auto& c : {stmt->s1, stmt->s2}) {
    auto sub = free_vars_parimp(c);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::set<std::string> assertion_free_vars(const AssertionPtr& a) {
  std::vector<std::string> vs;
  collect_assertion_vars(a, vs);
  return {vs.begin(), vs.end()};
}

namespace {

AssertionPtr conj(AssertionPtr a, AssertionPtr b) {
  return Assertion::sep_conj(std::move(a), std::move(b));
}

AssertionPtr pure_not(const ExprPtr& e) {
  return Assertion::pure(Expr::unary(UnOp::Not, e, e->pos));
}

StmtPtr havoc_all(const std::set<std::string>& vars, StmtPtr tail) {
  // havoc of a variable set: nested single havocs, order-irrelevant.
  StmtPtr out = std::move(tail);
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    out = Stmt::seq(Stmt::havoc(*it), out);
  return out;
}

class Translator {
public:
  Translator(const PMethod& m, const StateSpace& sp) : method_(m), sp_(sp), cache_(sp) {}

  TranslationResult run() {
    TranslationResult res;
    require_self_framing(method_.requires_, "requires");
    require_self_framing(method_.ensures_, "ensures");
    StmtPtr main_body = translate_stmt(method_.body);
    // The inhale-translation-exhale wrapper for the top-level specification.
    res.main.name = method_.name;
    res.main.ctx = method_.ctx;
    res.main.body = Stmt::seq(Stmt::inhale(method_.requires_),
                              Stmt::seq(main_body, Stmt::exhale(method_.ensures_)));
    res.auxiliaries = std::move(aux_);
    return res;
  }

private:
  void require_self_framing(const AssertionPtr& a, const std::string& what) {
    std::vector<TypeError> errs;
    if (!check_assertion(method_.ctx, a, &errs))
      throw TranslationError{a->pos, what + ": ill-typed annotation", std::nullopt};
    const Bitset& d = cache_.denote(a);
    for (std::size_t i = 0; i < sp_.n_states(); ++i) {
      if (d.test(i) != d.test(sp_.stabilize_idx(i))) {
        throw TranslationError{a->pos, what + ": annotation is not self-framing",
                               sp_.state_at(d.test(i) ? i : sp_.stabilize_idx(i))};
      }
    }
  }

  StmtPtr translate_stmt(const PStmtPtr& c) {
    switch (c->kind) {
      case PStmt::Kind::Skip:
        return Stmt::skip(c->pos);
      case PStmt::Kind::Assign:
        return Stmt::assign(c->var, c->expr, c->pos);
      case PStmt::Kind::Load:
        return Stmt::assign(c->var,
                            Expr::field_read(Expr::variable(c->ref, c->pos), "v", c->pos), c->pos);
      case PStmt::Kind::Store:
        return Stmt::field_assign(Expr::variable(c->ref, c->pos), "v", c->expr, c->pos);
      case PStmt::Kind::Alloc: {
        // havoc r; inhale acc(r.v) * r.v = e
        ExprPtr r = Expr::variable(c->var, c->pos);
        AssertionPtr gained =
            conj(Assertion::acc(r, "v", Expr::lit(Value::make_perm(Rational::from_int(1))), c->pos),
                 Assertion::pure(
                     Expr::binary(BinOp::Eq, Expr::field_read(r, "v", c->pos), c->expr, c->pos)));
        std::vector<std::string> init_vars;
        collect_expr_vars(c->expr, init_vars);
        for (const auto& v : init_vars)
          if (v == c->var)
            throw TranslationError{c->pos, "alloc target occurs in its initializer", std::nullopt};
        return Stmt::seq(Stmt::havoc(c->var, c->pos), Stmt::inhale(gained, c->pos));
      }
      case PStmt::Kind::Free:
        return Stmt::exhale(
            Assertion::acc(Expr::variable(c->ref, c->pos), "v",
                           Expr::lit(Value::make_perm(Rational::from_int(1))), c->pos),
            c->pos);
      case PStmt::Kind::Seq:
        return Stmt::seq(translate_stmt(c->s1), translate_stmt(c->s2));
      case PStmt::Kind::If:
        return Stmt::ite(c->expr, translate_stmt(c->s1), translate_stmt(c->s2), c->pos);
      case PStmt::Kind::While: {
        require_self_framing(c->invariant, "invariant");
        StmtPtr body = translate_stmt(c->s1);
        AssertionPtr inv_and_b = conj(c->invariant, Assertion::pure(c->expr));
        AssertionPtr inv_and_nb = conj(c->invariant, pure_not(c->expr));
        Method aux;
        aux.name = method_.name + "__while" + std::to_string(aux_counter_++);
        aux.ctx = method_.ctx;
        aux.body =
            Stmt::seq(Stmt::inhale(inv_and_b, c->pos), Stmt::seq(body, Stmt::exhale(c->invariant, c->pos)));
        aux_.push_back(std::move(aux));
        return Stmt::seq(
            Stmt::exhale(c->invariant, c->pos),
            havoc_all(mod_vars_parimp(c->s1), Stmt::inhale(inv_and_nb, c->pos)));
      }
      case PStmt::Kind::Par: {
        require_self_framing(c->pre_l, "par left pre");
        require_self_framing(c->post_l, "par left post");
        require_self_framing(c->pre_r, "par right pre");
        require_self_framing(c->post_r, "par right post");
        check_par_side_conditions(c);
        StmtPtr body_l = translate_stmt(c->s1);
        StmtPtr body_r = translate_stmt(c->s2);
        int id = aux_counter_++;
        Method aux_l, aux_r;
        aux_l.name = method_.name + "__par" + std::to_string(id) + "_l";
        aux_l.ctx = method_.ctx;
        aux_l.body = Stmt::seq(Stmt::inhale(c->pre_l, c->pos),
                               Stmt::seq(body_l, Stmt::exhale(c->post_l, c->pos)));
        aux_r.name = method_.name + "__par" + std::to_string(id) + "_r";
        aux_r.ctx = method_.ctx;
        aux_r.body = Stmt::seq(Stmt::inhale(c->pre_r, c->pos),
                               Stmt::seq(body_r, Stmt::exhale(c->post_r, c->pos)));
        aux_.push_back(std::move(aux_l));
        aux_.push_back(std::move(aux_r));
        std::set<std::string> mods = mod_vars_parimp(c->s1);
        auto mr = mod_vars_parimp(c->s2);
        mods.insert(mr.begin(), mr.end());
        return Stmt::seq(
            Stmt::exhale(conj(c->pre_l, c->pre_r), c->pos),
            havoc_all(mods, Stmt::inhale(conj(c->post_l, c->post_r), c->pos)));
      }
    }
    throw TranslationError{c->pos, "unhandled statement", std::nullopt};
  }

  void check_par_side_conditions(const PStmtPtr& c) {
    auto mod_l = mod_vars_parimp(c->s1);
    auto mod_r = mod_vars_parimp(c->s2);
    auto free_r = free_vars_parimp(c->s2);
    auto free_l = free_vars_parimp(c->s1);
    auto fq_r = assertion_free_vars(c->post_r);
    auto fq_l = assertion_free_vars(c->post_l);
    free_r.insert(fq_r.begin(), fq_r.end());
    free_l.insert(fq_l.begin(), fq_l.end());
    for (const auto& x : mod_l)
      if (free_r.count(x))
        throw TranslationError{
            c->pos, "parallel branches conflict on variable " + x, std::nullopt};
    for (const auto& x : mod_r)
      if (free_l.count(x))
        throw TranslationError{
            c->pos, "parallel branches conflict on variable " + x, std::nullopt};
  }

  const PMethod& method_;
  const StateSpace& sp_;
  DenoteCache cache_;
  std::vector<Method> aux_;
  int aux_counter_ = 0;
};

}  // namespace

TranslationResult translate(const PMethod& m, const StateSpace& sp) {
  Translator t(m, sp);
  return t.run();
}

}  // namespace ivl
