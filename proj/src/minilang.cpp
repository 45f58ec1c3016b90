#include "covrank/minilang.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "covrank/error.hpp"

namespace covrank::mini {

std::string_view to_string(BinOp op) {
  switch (op) {
    case BinOp::add: return "+";
    case BinOp::sub: return "-";
    case BinOp::mul: return "*";
    case BinOp::div: return "/";
  }
  return "?";
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
    case CmpOp::eq: return "==";
    case CmpOp::ne: return "!=";
  }
  return "?";
}

namespace {

std::optional<BinOp> binop_from(std::string_view s) {
  if (s == "+") return BinOp::add;
  if (s == "-") return BinOp::sub;
  if (s == "*") return BinOp::mul;
  if (s == "/") return BinOp::div;
  return std::nullopt;
}

std::optional<CmpOp> cmpop_from(std::string_view s) {
  if (s == "<") return CmpOp::lt;
  if (s == "<=") return CmpOp::le;
  if (s == ">") return CmpOp::gt;
  if (s == ">=") return CmpOp::ge;
  if (s == "==") return CmpOp::eq;
  if (s == "!=") return CmpOp::ne;
  return std::nullopt;
}

int precedence(const Expr& e) {
  if (e.kind != Expr::Kind::bin) return 3;
  return (e.op == BinOp::add || e.op == BinOp::sub) ? 1 : 2;
}

}  // namespace

Expr Expr::lit(std::int64_t v) {
  Expr e;
  e.kind = Kind::lit;
  e.value = v;
  return e;
}

Expr Expr::var(std::string n) {
  Expr e;
  e.kind = Kind::var;
  e.name = std::move(n);
  return e;
}

Expr Expr::bin(BinOp op, Expr l, Expr r) {
  Expr e;
  e.kind = Kind::bin;
  e.op = op;
  e.args.push_back(std::move(l));
  e.args.push_back(std::move(r));
  return e;
}

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::lit: return std::to_string(e.value);
    case Expr::Kind::var: return e.name;
    case Expr::Kind::bin: {
      const int p = precedence(e);
      std::string l = print_expr(e.args[0]);
      std::string r = print_expr(e.args[1]);
      if (precedence(e.args[0]) < p) l = "(" + l + ")";
      if (precedence(e.args[1]) <= p) r = "(" + r + ")";
      return l + " " + std::string(to_string(e.op)) + " " + r;
    }
  }
  return {};
}

std::string print_cond(const Cond& c) {
  std::string out;
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    if (i) out += " && ";
    out += print_expr(c.terms[i].lhs) + " " + std::string(to_string(c.terms[i].op)) + " " + print_expr(c.terms[i].rhs);
  }
  return out;
}

namespace {

std::string statement_text(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::assign: return (s.declares ? "int " : "") + s.var + " = " + print_expr(s.expr) + ";";
    case Stmt::Kind::if_: return "if (" + print_cond(s.cond) + ")";
    case Stmt::Kind::while_: return "while (" + print_cond(s.cond) + ")";
    case Stmt::Kind::ret: return "return " + print_expr(s.expr) + ";";
  }
  return {};
}

struct Emitter {
  std::vector<std::string> lines;
  std::vector<FlatStmt> flat;

  void block(const std::vector<Stmt>& body, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
    for (const Stmt& s : body) {
      const std::string text = statement_text(s);
      flat.push_back({&s, flat.size(), static_cast<int>(lines.size()) + 1, text});
      switch (s.kind) {
        case Stmt::Kind::assign:
        case Stmt::Kind::ret:
          lines.push_back(pad + text);
          break;
        case Stmt::Kind::if_:
          lines.push_back(pad + text + " {");
          block(s.then_body, depth + 1);
          if (!s.else_body.empty()) {
            lines.push_back(pad + "} else {");
            block(s.else_body, depth + 1);
          }
          lines.push_back(pad + "}");
          break;
        case Stmt::Kind::while_:
          lines.push_back(pad + text + " {");
          block(s.then_body, depth + 1);
          lines.push_back(pad + "}");
          break;
      }
    }
  }

  void program(const MiniProgram& p) {
    std::string sig = "int " + p.name + "(";
    for (std::size_t i = 0; i < p.params.size(); ++i) sig += (i ? ", int " : "int ") + p.params[i];
    lines.push_back(sig + ") {");
    block(p.body, 1);
    lines.push_back("}");
  }
};

}  // namespace

std::vector<FlatStmt> flatten(const MiniProgram& p) {
  Emitter em;
  em.program(p);
  return std::move(em.flat);
}

std::size_t statement_count(const MiniProgram& p) { return flatten(p).size(); }

std::string print_program(const MiniProgram& p) {
  Emitter em;
  em.program(p);
  std::string out;
  for (const auto& l : em.lines) out += l + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) { lex(text); }

  MiniProgram program() {
    MiniProgram p;
    expect("int");
    p.name = ident();
    expect("(");
    if (!accept(")")) {
      do {
        expect("int");
        p.params.push_back(ident());
      } while (accept(","));
      expect(")");
    }
    p.body = block();
    if (pos_ != toks_.size()) error("trailing input");
    return p;
  }

 private:
  std::vector<std::string> toks_;
  std::size_t pos_ = 0;

  void lex(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size()) {
      const char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        toks_.push_back(s.substr(i, j - i));
        i = j;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        toks_.push_back(s.substr(i, j - i));
        i = j;
      } else {
        const std::string two = s.substr(i, 2);
        if (two == "==" || two == "!=" || two == "<=" || two == ">=" || two == "&&") {
          toks_.push_back(two);
          i += 2;
        } else {
          toks_.push_back(std::string(1, c));
          ++i;
        }
      }
    }
  }

  [[noreturn]] void error(const std::string& what) const {
    const std::string at = pos_ < toks_.size() ? "'" + toks_[pos_] + "'" : "end of input";
    fail(ErrorKind::data, "mini-language parse error near " + at + ": " + what);
  }

  const std::string& peek() const {
    static const std::string end;
    return pos_ < toks_.size() ? toks_[pos_] : end;
  }
  bool accept(const std::string& t) {
    if (peek() == t) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const std::string& t) {
    if (!accept(t)) error("expected '" + t + "'");
  }
  std::string ident() {
    const std::string& t = peek();
    if (t.empty() || !(std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '_')) error("expected identifier");
    ++pos_;
    return t;
  }

  std::vector<Stmt> block() {
    expect("{");
    std::vector<Stmt> out;
    while (!accept("}")) {
      if (pos_ >= toks_.size()) error("unterminated block");
      out.push_back(statement());
    }
    return out;
  }

  Stmt statement() {
    Stmt s;
    if (accept("if")) {
      s.kind = Stmt::Kind::if_;
      expect("(");
      s.cond = cond();
      expect(")");
      s.then_body = block();
      if (accept("else")) s.else_body = block();
    } else if (accept("while")) {
      s.kind = Stmt::Kind::while_;
      expect("(");
      s.cond = cond();
      expect(")");
      s.then_body = block();
    } else if (accept("return")) {
      s.kind = Stmt::Kind::ret;
      s.expr = expr();
      expect(";");
    } else {
      s.kind = Stmt::Kind::assign;
      s.declares = accept("int");
      s.var = ident();
      expect("=");
      s.expr = expr();
      expect(";");
    }
    return s;
  }

  Cond cond() {
    Cond c;
    do {
      Comparison cmp;
      cmp.lhs = expr();
      const auto op = cmpop_from(peek());
      if (!op) error("expected comparison operator");
      ++pos_;
      cmp.op = *op;
      cmp.rhs = expr();
      c.terms.push_back(std::move(cmp));
    } while (accept("&&") || accept("&"));
    return c;
  }

  Expr expr() {
    Expr e = term();
    while (peek() == "+" || peek() == "-") {
      const BinOp op = *binop_from(peek());
      ++pos_;
      e = Expr::bin(op, std::move(e), term());
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    while (peek() == "*" || peek() == "/") {
      const BinOp op = *binop_from(peek());
      ++pos_;
      e = Expr::bin(op, std::move(e), factor());
    }
    return e;
  }

  Expr factor() {
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    bool neg = accept("-");
    const std::string& t = peek();
    if (!t.empty() && std::isdigit(static_cast<unsigned char>(t[0]))) {
      ++pos_;
      const std::int64_t v = std::stoll(t);
      return Expr::lit(neg ? -v : v);
    }
    if (neg) error("expected integer after unary minus");
    return Expr::var(ident());
  }
};

}  // namespace

MiniProgram parse_program(const std::string& text) { return Parser(text).program(); }

// ---------------------------------------------------------------------------
// Interpreter

namespace {

class Interp {
 public:
  explicit Interp(const MiniProgram& p) { number(p.body); }

  ExecResult result;
  std::map<std::string, std::int64_t> env;

  enum class Flow { next, returned, crashed };

  Flow block(const std::vector<Stmt>& body) {
    for (const Stmt& s : body) {
      const Flow f = stmt(s);
      if (f != Flow::next) return f;
    }
    return Flow::next;
  }

 private:
  std::unordered_map<const Stmt*, StmtId> ids_;

  void number(const std::vector<Stmt>& body) {
    for (const Stmt& s : body) {
      ids_.emplace(&s, ids_.size());
      number(s.then_body);
      number(s.else_body);
    }
  }

  Flow crash(StmtId id, std::string reason) {
    result.crashed = true;
    result.crash_stmt = id;
    result.crash_reason = std::move(reason);
    return Flow::crashed;
  }

  // Returns nullopt and records a crash on runtime error.
  std::optional<std::int64_t> eval(const Expr& e, StmtId id) {
    switch (e.kind) {
      case Expr::Kind::lit: return e.value;
      case Expr::Kind::var: {
        auto it = env.find(e.name);
        if (it == env.end()) {
          crash(id, "undefined variable " + e.name);
          return std::nullopt;
        }
        return it->second;
      }
      case Expr::Kind::bin: {
        const auto l = eval(e.args[0], id);
        if (!l) return std::nullopt;
        const auto r = eval(e.args[1], id);
        if (!r) return std::nullopt;
        const auto ul = static_cast<std::uint64_t>(*l), ur = static_cast<std::uint64_t>(*r);
        switch (e.op) {
          case BinOp::add: return static_cast<std::int64_t>(ul + ur);
          case BinOp::sub: return static_cast<std::int64_t>(ul - ur);
          case BinOp::mul: return static_cast<std::int64_t>(ul * ur);
          case BinOp::div:
            if (*r == 0) {
              crash(id, "ArithmeticException: / by zero");
              return std::nullopt;
            }
            if (*l == std::numeric_limits<std::int64_t>::min() && *r == -1) return *l;
            return *l / *r;
        }
      }
    }
    return std::nullopt;
  }

  std::optional<bool> test(const Cond& c, StmtId id) {
    for (const auto& t : c.terms) {
      const auto l = eval(t.lhs, id);
      if (!l) return std::nullopt;
      const auto r = eval(t.rhs, id);
      if (!r) return std::nullopt;
      bool ok = false;
      switch (t.op) {
        case CmpOp::lt: ok = *l < *r; break;
        case CmpOp::le: ok = *l <= *r; break;
        case CmpOp::gt: ok = *l > *r; break;
        case CmpOp::ge: ok = *l >= *r; break;
        case CmpOp::eq: ok = *l == *r; break;
        case CmpOp::ne: ok = *l != *r; break;
      }
      if (!ok) return false;
    }
    return true;
  }

  Flow stmt(const Stmt& s) {
    const StmtId id = ids_.at(&s);
    switch (s.kind) {
      case Stmt::Kind::assign: {
        result.path.push_back(id);
        const auto v = eval(s.expr, id);
        if (!v) return Flow::crashed;
        env[s.var] = *v;
        return Flow::next;
      }
      case Stmt::Kind::ret: {
        result.path.push_back(id);
        const auto v = eval(s.expr, id);
        if (!v) return Flow::crashed;
        result.value = *v;
        return Flow::returned;
      }
      case Stmt::Kind::if_: {
        result.path.push_back(id);
        const auto c = test(s.cond, id);
        if (!c) return Flow::crashed;
        return block(*c ? s.then_body : s.else_body);
      }
      case Stmt::Kind::while_: {
        int iters = 0;
        for (;;) {
          result.path.push_back(id);
          const auto c = test(s.cond, id);
          if (!c) return Flow::crashed;
          if (!*c) return Flow::next;
          if (++iters > s.max_iters) return crash(id, "IterationLimitExceeded");
          const Flow f = block(s.then_body);
          if (f != Flow::next) return f;
        }
      }
    }
    return Flow::next;
  }
};

}  // namespace

ExecResult run(const MiniProgram& p, const std::vector<std::int64_t>& inputs) {
  if (inputs.size() != p.params.size()) {
    fail(ErrorKind::data, "run: expected " + std::to_string(p.params.size()) + " inputs, got " +
                              std::to_string(inputs.size()));
  }
  Interp in(p);
  for (std::size_t i = 0; i < inputs.size(); ++i) in.env[p.params[i]] = inputs[i];
  const auto flow = in.block(p.body);
  if (flow == Interp::Flow::next && !in.result.crashed) {
    // Falling off the end counts as a crash at the last executed statement.
    in.result.crashed = true;
    in.result.crash_stmt = in.result.path.empty() ? 0 : in.result.path.back();
    in.result.crash_reason = "missing return";
  }
  return std::move(in.result);
}

// ---------------------------------------------------------------------------
// Static structure

std::optional<std::string> defined_var(const Stmt& s) {
  if (s.kind == Stmt::Kind::assign) return s.var;
  return std::nullopt;
}

namespace {

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == Expr::Kind::var) out.push_back(e.name);
  for (const auto& a : e.args) collect_vars(a, out);
}

}  // namespace

std::vector<std::string> used_vars(const Stmt& s) {
  std::vector<std::string> out;
  switch (s.kind) {
    case Stmt::Kind::assign:
    case Stmt::Kind::ret:
      collect_vars(s.expr, out);
      break;
    case Stmt::Kind::if_:
    case Stmt::Kind::while_:
      for (const auto& t : s.cond.terms) {
        collect_vars(t.lhs, out);
        collect_vars(t.rhs, out);
      }
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::vector<StmtId>> control_flow(const MiniProgram& p) {
  const auto flat = flatten(p);
  std::map<const Stmt*, StmtId> ids;
  for (const auto& f : flat) ids[f.stmt] = f.id;
  std::vector<std::vector<StmtId>> succ(flat.size());

  auto link = [&](auto&& self, const std::vector<Stmt>& body, StmtId follow) -> void {
    for (std::size_t i = 0; i < body.size(); ++i) {
      const Stmt& s = body[i];
      const StmtId id = ids.at(&s);
      const StmtId next = i + 1 < body.size() ? ids.at(&body[i + 1]) : follow;
      switch (s.kind) {
        case Stmt::Kind::assign: succ[id] = {next}; break;
        case Stmt::Kind::ret: succ[id] = {}; break;
        case Stmt::Kind::if_: {
          const StmtId t = s.then_body.empty() ? next : ids.at(&s.then_body.front());
          const StmtId e = s.else_body.empty() ? next : ids.at(&s.else_body.front());
          succ[id] = t == e ? std::vector<StmtId>{t} : std::vector<StmtId>{t, e};
          self(self, s.then_body, next);
          self(self, s.else_body, next);
          break;
        }
        case Stmt::Kind::while_: {
          const StmtId b = s.then_body.empty() ? id : ids.at(&s.then_body.front());
          succ[id] = b == next ? std::vector<StmtId>{b} : std::vector<StmtId>{b, next};
          self(self, s.then_body, id);
          break;
        }
      }
    }
  };
  link(link, p.body, kExit);
  return succ;
}

std::vector<std::pair<StmtId, StmtId>> build_dfg(const MiniProgram& p) {
  const auto flat = flatten(p);
  const std::size_t n = flat.size();
  const auto succ = control_flow(p);
  std::vector<std::vector<StmtId>> pred(n);
  for (StmtId s = 0; s < n; ++s) {
    for (StmtId t : succ[s]) {
      if (t != kExit) pred[t].push_back(s);
    }
  }
  std::vector<std::optional<std::string>> def(n);
  for (StmtId s = 0; s < n; ++s) def[s] = defined_var(*flat[s].stmt);

  // Reaching definitions: one definition per assignment statement.
  std::vector<std::vector<bool>> in(n, std::vector<bool>(n, false)), out(n, std::vector<bool>(n, false));
  bool changed = true;
  while (changed) {
    changed = false;
    for (StmtId s = 0; s < n; ++s) {
      std::vector<bool> nin(n, false);
      for (StmtId q : pred[s]) {
        for (StmtId d = 0; d < n; ++d) nin[d] = nin[d] || out[q][d];
      }
      std::vector<bool> nout = nin;
      if (def[s]) {
        for (StmtId d = 0; d < n; ++d) {
          if (def[d] && *def[d] == *def[s]) nout[d] = false;
        }
        nout[s] = true;
      }
      if (nin != in[s] || nout != out[s]) {
        in[s] = std::move(nin);
        out[s] = std::move(nout);
        changed = true;
      }
    }
  }

  std::vector<std::pair<StmtId, StmtId>> edges;
  for (StmtId s = 0; s < n; ++s) {
    const auto uses = used_vars(*flat[s].stmt);
    for (StmtId d = 0; d < n; ++d) {
      if (d == s || !in[s][d] || !def[d]) continue;
      if (std::binary_search(uses.begin(), uses.end(), *def[d])) edges.emplace_back(d, s);
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<std::string> variables_in_scope(const MiniProgram& p, StmtId id) {
  const auto flat = flatten(p);
  std::map<const Stmt*, StmtId> ids;
  for (const auto& f : flat) ids[f.stmt] = f.id;
  std::optional<std::vector<std::string>> found;

  auto walk = [&](auto&& self, const std::vector<Stmt>& body, std::vector<std::string> scope) -> void {
    for (const Stmt& s : body) {
      if (found) return;
      if (ids.at(&s) == id) {
        found = scope;
        return;
      }
      if (s.kind == Stmt::Kind::if_ || s.kind == Stmt::Kind::while_) {
        self(self, s.then_body, scope);
        self(self, s.else_body, scope);
      }
      if (s.kind == Stmt::Kind::assign && s.declares) scope.push_back(s.var);
    }
  };
  walk(walk, p.body, p.params);
  if (!found) fail(ErrorKind::data, "variables_in_scope: no statement " + std::to_string(id));
  std::sort(found->begin(), found->end());
  found->erase(std::unique(found->begin(), found->end()), found->end());
  return *found;
}

namespace {

AstNode leaf(std::string kind, std::string token) { return AstNode{std::move(kind), std::move(token), {}}; }

AstNode expr_ast(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::lit: return leaf("IntegerLiteral", std::to_string(e.value));
    case Expr::Kind::var: return leaf("NameExpr", e.name);
    case Expr::Kind::bin: {
      AstNode n{"BinaryExpr:" + std::string(to_string(e.op)), std::nullopt, {}};
      n.children.push_back(expr_ast(e.args[0]));
      n.children.push_back(expr_ast(e.args[1]));
      return n;
    }
  }
  return {};
}

AstNode cond_ast(const Cond& c) {
  auto cmp = [](const Comparison& t) {
    AstNode n{"BinaryExpr:" + std::string(to_string(t.op)), std::nullopt, {}};
    n.children.push_back(expr_ast(t.lhs));
    n.children.push_back(expr_ast(t.rhs));
    return n;
  };
  if (c.terms.size() == 1) return cmp(c.terms[0]);
  AstNode n{"BinaryExpr:&&", std::nullopt, {}};
  for (const auto& t : c.terms) n.children.push_back(cmp(t));
  return n;
}

AstNode block_ast(const std::vector<Stmt>& body);

AstNode stmt_ast(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::assign: {
      AstNode n{s.declares ? "VariableDeclaration" : "Assignment", std::nullopt, {}};
      n.children.push_back(leaf(s.declares ? "SimpleName" : "NameExpr", s.var));
      n.children.push_back(expr_ast(s.expr));
      return n;
    }
    case Stmt::Kind::ret: return AstNode{"ReturnStatement", std::nullopt, {expr_ast(s.expr)}};
    case Stmt::Kind::if_: {
      AstNode n{"IfStatement", std::nullopt, {cond_ast(s.cond), block_ast(s.then_body)}};
      if (!s.else_body.empty()) n.children.push_back(block_ast(s.else_body));
      return n;
    }
    case Stmt::Kind::while_:
      return AstNode{"WhileStatement", std::nullopt, {cond_ast(s.cond), block_ast(s.then_body)}};
  }
  return {};
}

AstNode block_ast(const std::vector<Stmt>& body) {
  if (body.empty()) return leaf("Block", "{}");
  AstNode n{"Block", std::nullopt, {}};
  for (const auto& s : body) n.children.push_back(stmt_ast(s));
  return n;
}

}  // namespace

AstNode to_ast(const MiniProgram& p) {
  AstNode root{"MethodDeclaration", std::nullopt, {}};
  root.children.push_back(leaf("SimpleName", p.name));
  for (const auto& param : p.params) {
    root.children.push_back(AstNode{"Parameter", std::nullopt, {leaf("SimpleName", param)}});
  }
  root.children.push_back(block_ast(p.body));
  return root;
}

namespace {

template <class Body, class S>
S* find_stmt(Body& body, StmtId& counter, StmtId id) {
  for (auto& s : body) {
    if (counter++ == id) return &s;
    if (s.kind == Stmt::Kind::if_ || s.kind == Stmt::Kind::while_) {
      if (auto* r = find_stmt<Body, S>(s.then_body, counter, id)) return r;
      if (auto* r = find_stmt<Body, S>(s.else_body, counter, id)) return r;
    }
  }
  return nullptr;
}

}  // namespace

Stmt& statement_at(MiniProgram& p, StmtId id) {
  StmtId counter = 0;
  Stmt* s = find_stmt<std::vector<Stmt>, Stmt>(p.body, counter, id);
  if (!s) fail(ErrorKind::data, "no statement " + std::to_string(id));
  return *s;
}

const Stmt& statement_at(const MiniProgram& p, StmtId id) {
  StmtId counter = 0;
  const Stmt* s = find_stmt<const std::vector<Stmt>, const Stmt>(p.body, counter, id);
  if (!s) fail(ErrorKind::data, "no statement " + std::to_string(id));
  return *s;
}

// ---------------------------------------------------------------------------
// Faults and mutation

std::string_view to_string(FaultKind k) {
  switch (k) {
    case FaultKind::wrong_operator: return "wrong_operator";
    case FaultKind::wrong_variable: return "wrong_variable";
    case FaultKind::wrong_constant: return "wrong_constant";
    case FaultKind::wrong_comparison: return "wrong_comparison";
  }
  return "?";
}

std::string FaultSpec::detail() const {
  return std::string(to_string(kind)) + "@" + std::to_string(target_stmt) + "#" + std::to_string(site) + "->" +
         replacement;
}

namespace {

// Preorder sites inside the expressions a statement evaluates.
template <class E>
void expr_sites(E& e, Expr::Kind kind, std::vector<E*>& out) {
  if (e.kind == kind) out.push_back(&e);
  for (auto& a : e.args) expr_sites(a, kind, out);
}

std::vector<Expr*> statement_sites(Stmt& s, Expr::Kind kind) {
  std::vector<Expr*> out;
  if (s.kind == Stmt::Kind::assign || s.kind == Stmt::Kind::ret) {
    expr_sites(s.expr, kind, out);
  } else {
    for (auto& t : s.cond.terms) {
      expr_sites(t.lhs, kind, out);
      expr_sites(t.rhs, kind, out);
    }
  }
  return out;
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return std::nullopt;
  for (std::size_t j = i; j < s.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(s[j]))) return std::nullopt;
  }
  return std::stoll(s);
}

}  // namespace

MiniProgram inject_fault(const MiniProgram& p, const FaultSpec& spec) {
  MiniProgram out = p;
  Stmt& s = statement_at(out, spec.target_stmt);
  auto inapplicable = [&](const std::string& why) -> MiniProgram {
    fail(ErrorKind::data, "fault " + spec.detail() + " inapplicable: " + why);
  };
  switch (spec.kind) {
    case FaultKind::wrong_operator: {
      auto sites = statement_sites(s, Expr::Kind::bin);
      if (spec.site >= sites.size()) return inapplicable("no arithmetic operator at site");
      const auto op = binop_from(spec.replacement);
      if (!op) return inapplicable("replacement is not an arithmetic operator");
      if (*op == sites[spec.site]->op) return inapplicable("replacement equals the original operator");
      sites[spec.site]->op = *op;
      break;
    }
    case FaultKind::wrong_variable: {
      auto sites = statement_sites(s, Expr::Kind::var);
      if (spec.site >= sites.size()) return inapplicable("no variable use at site");
      if (sites[spec.site]->name == spec.replacement) return inapplicable("replacement equals the original variable");
      const auto scope = variables_in_scope(p, spec.target_stmt);
      if (!std::binary_search(scope.begin(), scope.end(), spec.replacement)) {
        return inapplicable("variable '" + spec.replacement + "' is not in scope");
      }
      sites[spec.site]->name = spec.replacement;
      break;
    }
    case FaultKind::wrong_constant: {
      auto sites = statement_sites(s, Expr::Kind::lit);
      if (spec.site >= sites.size()) return inapplicable("no literal at site");
      const auto v = parse_int(spec.replacement);
      if (!v) return inapplicable("replacement is not an integer");
      if (*v == sites[spec.site]->value) return inapplicable("replacement equals the original constant");
      sites[spec.site]->value = *v;
      break;
    }
    case FaultKind::wrong_comparison: {
      if (s.kind != Stmt::Kind::if_ && s.kind != Stmt::Kind::while_) return inapplicable("statement has no condition");
      if (spec.site >= s.cond.terms.size()) return inapplicable("no comparison at site");
      Comparison& c = s.cond.terms[spec.site];
      if (const auto op = cmpop_from(spec.replacement)) {
        if (*op == c.op) return inapplicable("replacement equals the original comparison");
        c.op = *op;
      } else if (const auto v = parse_int(spec.replacement)) {
        std::vector<Expr*> lits;
        expr_sites(c.rhs, Expr::Kind::lit, lits);
        if (lits.empty()) expr_sites(c.lhs, Expr::Kind::lit, lits);
        if (lits.empty()) return inapplicable("comparison has no literal bound");
        if (lits[0]->value == *v) return inapplicable("replacement equals the original bound");
        lits[0]->value = *v;
      } else {
        return inapplicable("replacement is neither a comparison operator nor an integer");
      }
      break;
    }
  }
  return out;
}

std::string_view to_string(Mutator m) {
  switch (m) {
    case Mutator::arith_replace: return "arith_replace";
    case Mutator::rel_replace: return "rel_replace";
    case Mutator::const_plus_one: return "const_plus_one";
  }
  return "?";
}

std::optional<Mutator> mutator_from_string(std::string_view s) {
  if (s == "arith_replace") return Mutator::arith_replace;
  if (s == "rel_replace") return Mutator::rel_replace;
  if (s == "const_plus_one") return Mutator::const_plus_one;
  return std::nullopt;
}

std::optional<MiniProgram> mutate(const MiniProgram& p, StmtId target, Mutator m) {
  MiniProgram out = p;
  Stmt& s = statement_at(out, target);
  switch (m) {
    case Mutator::arith_replace: {
      auto sites = statement_sites(s, Expr::Kind::bin);
      if (sites.empty()) return std::nullopt;
      BinOp& op = sites[0]->op;
      op = op == BinOp::add ? BinOp::sub : op == BinOp::sub ? BinOp::add : op == BinOp::mul ? BinOp::add : BinOp::mul;
      return out;
    }
    case Mutator::rel_replace: {
      if (s.kind != Stmt::Kind::if_ && s.kind != Stmt::Kind::while_) return std::nullopt;
      CmpOp& op = s.cond.terms[0].op;
      switch (op) {
        case CmpOp::lt: op = CmpOp::le; break;
        case CmpOp::le: op = CmpOp::lt; break;
        case CmpOp::gt: op = CmpOp::ge; break;
        case CmpOp::ge: op = CmpOp::gt; break;
        case CmpOp::eq: op = CmpOp::ne; break;
        case CmpOp::ne: op = CmpOp::eq; break;
      }
      return out;
    }
    case Mutator::const_plus_one: {
      auto sites = statement_sites(s, Expr::Kind::lit);
      if (sites.empty()) return std::nullopt;
      sites[0]->value += 1;
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace covrank::mini
