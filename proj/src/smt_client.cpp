#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <map>
#include <sstream>

#include "ivlkit/prover.hpp"

namespace ivl {

namespace {

// SMT-LIB2 rendering. Integers are emitted as Reals (a sound relaxation for
// unsat checks inside QF_UFLRA); permissions are Reals constrained to [0,1]
// where declared; references use an uninterpreted sort.
class SmtRenderer {
public:
  std::string render(const SymExprPtr& e) {
    std::string body = term(e);
    std::ostringstream os;
    for (const auto& [id, decl] : decls_) {
      (void)id;
      os << decl;
    }
    os << "(assert " << body << ")\n";
    return os.str();
  }

private:
  std::string term(const SymExprPtr& e) {
    switch (e->kind) {
      case SymExpr::Kind::Var: {
        std::string name = "v" + std::to_string(e->var_id);
        if (!decls_.count(e->var_id)) {
          std::string sort = e->type == TypeKind::Bool ? "Bool"
                             : e->type == TypeKind::Ref ? "Ref"
                                                        : "Real";
          std::string d = "(declare-const " + name + " " + sort + ")\n";
          if (e->type == TypeKind::Perm)
            d += "(assert (and (<= 0 " + name + ") (<= " + name + " 1)))\n";
          decls_.emplace(e->var_id, d);
        }
        return name;
      }
      case SymExpr::Kind::Lit:
        return literal(e->lit);
      case SymExpr::Kind::Unary:
        return e->uop == SymUnOp::Not ? "(not " + term(e->a) + ")"
                                      : "(- " + term(e->a) + ")";
      case SymExpr::Kind::Binary: {
        const char* op = nullptr;
        switch (e->bop) {
          case SymBinOp::And: op = "and"; break;
          case SymBinOp::Or: op = "or"; break;
          case SymBinOp::Eq: op = "="; break;
          case SymBinOp::Lt: op = "<"; break;
          case SymBinOp::Le: op = "<="; break;
          case SymBinOp::Add: op = "+"; break;
          case SymBinOp::Sub: op = "-"; break;
          case SymBinOp::Mul: op = "*"; break;
          case SymBinOp::Div: op = "/"; break;
        }
        return std::string("(") + op + " " + term(e->a) + " " + term(e->b) + ")";
      }
    }
    return "false";
  }

  std::string literal(const Value& v) {
    switch (v.kind()) {
      case TypeKind::Bool:
        return v.as_bool() ? "true" : "false";
      case TypeKind::Int: {
        auto n = v.as_int();
        if (n < 0) return "(- " + std::to_string(-n) + ")";
        return std::to_string(n);
      }
      case TypeKind::Perm: {
        const Rational& r = v.as_perm();
        std::string num = r.num() < 0 ? "(- " + std::to_string(-r.num()) + ")"
                                      : std::to_string(r.num());
        if (r.den() == 1) return num;
        return "(/ " + num + " " + std::to_string(r.den()) + ")";
      }
      case TypeKind::Ref: {
        if (v.as_ref().is_null()) return "refnull";
        // Concrete references only arise as null in emitted queries; name any
        // other id as an opaque constant.
        return "ref" + std::to_string(v.as_ref().id);
      }
    }
    return "false";
  }

  std::map<std::uint64_t, std::string> decls_;
};

}  // namespace

std::string smtlib_render_query(const SymExprPtr& formula) {
  SmtRenderer r;
  return r.render(formula);
}

SmtSolverClient::SmtSolverClient(std::string command) : command_(std::move(command)) {}

SmtSolverClient::~SmtSolverClient() { shutdown(); }

bool SmtSolverClient::ensure_started() {
  if (pid_ > 0) return true;
  if (broken_) return false;

  int to_pipe[2], from_pipe[2];
  if (pipe(to_pipe) != 0) return false;
  if (pipe(from_pipe) != 0) {
    close(to_pipe[0]);
    close(to_pipe[1]);
    return false;
  }
  pid_t pid = fork();
  if (pid < 0) {
    diagnostic_ = "fork failed";
    broken_ = true;
    return false;
  }
  if (pid == 0) {
    dup2(to_pipe[0], STDIN_FILENO);
    dup2(from_pipe[1], STDOUT_FILENO);
    close(to_pipe[0]);
    close(to_pipe[1]);
    close(from_pipe[0]);
    close(from_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), (char*)nullptr);
    _exit(127);
  }
  close(to_pipe[0]);
  close(from_pipe[1]);
  to_child_ = to_pipe[1];
  from_child_ = from_pipe[0];
  pid_ = pid;
  signal(SIGPIPE, SIG_IGN);

  // Session preamble; one solver process serves the whole task.
  std::string preamble =
      "(set-logic QF_UFLRA)\n"
      "(declare-sort Ref 0)\n"
      "(declare-const refnull Ref)\n";
  for (int r = 0; r < 8; ++r)
    preamble += "(declare-const ref" + std::to_string(r) + " Ref)\n";
  if (!send(preamble)) {
    diagnostic_ = "solver rejected preamble";
    shutdown();
    broken_ = true;
    return false;
  }
  return true;
}

void SmtSolverClient::shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = -1;
  from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    kill(pid_t(pid_), SIGTERM);
    waitpid(pid_t(pid_), &status, 0);
    pid_ = -1;
  }
}

bool SmtSolverClient::send(const std::string& text) {
  if (to_child_ < 0) return false;
  const char* p = text.c_str();
  std::size_t left = text.size();
  while (left > 0) {
    ssize_t w = write(to_child_, p, left);
    if (w <= 0) return false;
    p += w;
    left -= std::size_t(w);
  }
  return true;
}

std::string SmtSolverClient::read_line(int timeout_ms) {
  std::string line;
  while (true) {
    pollfd pfd{from_child_, POLLIN, 0};
    int pr = poll(&pfd, 1, timeout_ms);
    if (pr <= 0) return "";  // timeout or error
    char c;
    ssize_t r = read(from_child_, &c, 1);
    if (r <= 0) return "";
    if (c == '\n') {
      if (!line.empty()) return line;
      continue;
    }
    line.push_back(c);
  }
}

Verdict SmtSolverClient::is_unsat(const SymExprPtr& pc) {
  ++queries_;
  if (!ensure_started()) return Verdict::Unknown;

  std::string query = "(push 1)\n" + smtlib_render_query(pc) + "(check-sat)\n";
  if (!send(query)) {
    diagnostic_ = "failed to write query; solver process lost";
    shutdown();
    broken_ = true;
    return Verdict::Unknown;
  }
  std::string answer = read_line(10000);
  if (!send("(pop 1)\n")) {
    shutdown();
    broken_ = true;
  }
  if (answer == "unsat") return Verdict::Valid;
  if (answer == "sat" || answer == "unknown") return Verdict::Unknown;
  diagnostic_ = answer.empty() ? "no response from solver (timeout or crash)"
                               : "unexpected solver response: " + answer;
  return Verdict::Unknown;
}

}  // namespace ivl
