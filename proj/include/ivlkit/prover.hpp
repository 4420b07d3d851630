#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ivlkit/symexpr.hpp"

namespace ivl {

// Two-valued verdict: Valid is only returned when the claim genuinely holds;
// Unknown is always a safe answer and simply fails the obligation.
enum class Verdict { Valid, Unknown };

class Prover {
public:
  virtual ~Prover() = default;

  // Valid => every assignment satisfying pc satisfies goal.
  virtual Verdict entails(const SymExprPtr& pc, const SymExprPtr& goal);

  // Valid => pc has no model.
  virtual Verdict is_unsat(const SymExprPtr& pc) = 0;

  std::size_t query_count() const { return queries_; }

protected:
  std::size_t queries_ = 0;
};

// Incomplete built-in decision procedure: ground evaluation, congruence
// closure over equalities, Fourier-Motzkin over the rationals, and boolean
// splitting up to a configurable depth.
class BuiltinProver : public Prover {
public:
  struct Options {
    int split_depth = 8;
    std::size_t max_constraints = 4000;
  };

  explicit BuiltinProver(Options opts = {}) : opts_(opts) {}

  Verdict is_unsat(const SymExprPtr& pc) override;

private:
  Options opts_;
};

// Delegates (pc and not goal) unsatisfiability to an external SMT-LIB2 solver
// process spawned from a command line. One process per verification task,
// reset between queries via push/pop. Any response other than "unsat" (or a
// dead/failed solver) yields Unknown.
class SmtSolverClient : public Prover {
public:
  explicit SmtSolverClient(std::string command);
  ~SmtSolverClient() override;

  SmtSolverClient(const SmtSolverClient&) = delete;
  SmtSolverClient& operator=(const SmtSolverClient&) = delete;

  Verdict is_unsat(const SymExprPtr& pc) override;

  const std::string& last_diagnostic() const { return diagnostic_; }

private:
  bool ensure_started();
  void shutdown();
  bool send(const std::string& line);
  std::string read_line(int timeout_ms);

  std::string command_;
  std::string diagnostic_;
  int to_child_ = -1;
  int from_child_ = -1;
  long pid_ = -1;
  bool broken_ = false;
};

// Emits the SMT-LIB2 script checking unsatisfiability of `formula`
// (declarations plus assert; no set-logic/push lines). Exposed for tests.
std::string smtlib_render_query(const SymExprPtr& formula);

}  // namespace ivl
