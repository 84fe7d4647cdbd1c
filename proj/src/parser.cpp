#include "slice/parser.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace slice {

namespace {

enum class Tok { Ident, Number, LParen, RParen, Comma, Semi, Eq, Ne, Le, Ge, Plus, Minus, Star, Slash, End };

struct Token {
  Tok kind;
  std::string text;
  SourceLoc loc;
};

const std::set<std::string> kKeywords = {"agents", "def",  "let",   "in",   "if",    "then",  "else",
                                         "cake",   "left", "right", "divide", "alloc", "piece", "true",
                                         "false",  "and",  "or",    "not"};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourceLoc loc{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", loc});
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                                      src_[pos_] == '\''))
          advance();
        out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), loc});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
          advance();
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        }
        out.push_back({Tok::Number, std::string(src_.substr(start, pos_ - start)), loc});
      } else {
        out.push_back(symbol(loc));
      }
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#' || (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  Token take(Tok kind, std::string_view s, SourceLoc loc) {
    for (std::size_t i = 0; i < s.size(); ++i) advance();
    return {kind, std::string(s), loc};
  }

  Token symbol(SourceLoc loc) {
    static const std::pair<std::string_view, Tok> table[] = {
        {"!=", Tok::Ne},        {"<=", Tok::Le},        {">=", Tok::Ge},         {"\xE2\x89\xA0", Tok::Ne},
        {"\xE2\x89\xA4", Tok::Le}, {"\xE2\x89\xA5", Tok::Ge}, {"(", Tok::LParen},   {")", Tok::RParen},
        {",", Tok::Comma},      {";", Tok::Semi},       {"=", Tok::Eq},          {"+", Tok::Plus},
        {"-", Tok::Minus},      {"*", Tok::Star},       {"/", Tok::Slash}};
    for (const auto& [text, kind] : table)
      if (starts(text)) {
        Token t = take(kind, text, loc);
        if (text.size() > 1 && static_cast<unsigned char>(text[0]) >= 0x80)
          t.text = kind == Tok::Ne ? "!=" : kind == Tok::Le ? "<=" : ">=";
        return t;
      }
    std::string bad(1, src_[pos_]);
    throw ParseError(ParseError::Kind::Syntax, "unexpected character '" + bad + "'", loc);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

SurfacePtr make(SurfaceKind kind, std::vector<SurfacePtr> kids, SourceLoc loc) {
  auto e = std::make_shared<SurfaceExpr>();
  e->kind = kind;
  e->kids = std::move(kids);
  e->loc = loc;
  return e;
}

std::shared_ptr<SurfaceExpr> mutable_make(SurfaceKind kind, std::vector<SurfacePtr> kids, SourceLoc loc) {
  return std::const_pointer_cast<SurfaceExpr>(make(kind, std::move(kids), loc));
}

bool has_prefix(const std::string& s, std::string_view p) { return s.size() > p.size() && s.starts_with(p); }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    expect_keyword("agents");
    const Token& n = expect(Tok::Number, "agent count");
    if (n.text.find('.') != std::string::npos || std::stoi(n.text) < 1)
      throw ParseError(ParseError::Kind::Syntax, "agent count must be a positive integer", n.loc);
    p.agent_count = std::stoi(n.text);
    while (is_keyword("def")) p.defs.push_back(definition());
    p.main = expr();
    if (peek().kind != Tok::End)
      throw ParseError(ParseError::Kind::Syntax, "unexpected " + describe(peek()) + " after expression", peek().loc);
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_keyword(std::string_view k) const { return peek().kind == Tok::Ident && peek().text == k; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const std::string& what) {
    if (peek().kind != k)
      throw ParseError(ParseError::Kind::Syntax, "expected " + what + ", found " + describe(peek()), peek().loc);
    return next();
  }
  void expect_keyword(std::string_view k) {
    if (!is_keyword(k))
      throw ParseError(ParseError::Kind::Syntax, "expected '" + std::string(k) + "', found " + describe(peek()),
                       peek().loc);
    next();
  }
  std::string identifier(const std::string& what) {
    const Token& t = expect(Tok::Ident, what);
    if (kKeywords.contains(t.text) || has_prefix(t.text, "mark_") || has_prefix(t.text, "eval_") ||
        has_prefix(t.text, "sort_"))
      throw ParseError(ParseError::Kind::Syntax, "reserved word '" + t.text + "' used as " + what, t.loc);
    return t.text;
  }

  Definition definition() {
    Definition d;
    d.loc = peek().loc;
    expect_keyword("def");
    d.name = identifier("definition name");
    expect(Tok::LParen, "'('");
    if (peek().kind != Tok::RParen) {
      do d.params.push_back(identifier("parameter")); while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Eq, "'='");
    d.body = expr();
    expect(Tok::Semi, "';' after definition body");
    return d;
  }

  SurfacePtr expr() {
    SourceLoc loc = peek().loc;
    if (is_keyword("let")) {
      next();
      std::vector<std::string> names;
      bool tuple = accept(Tok::LParen);
      if (tuple) {
        do names.push_back(identifier("pattern variable")); while (accept(Tok::Comma));
        expect(Tok::RParen, "')'");
        if (names.size() < 2)
          throw ParseError(ParseError::Kind::Syntax, "tuple pattern needs at least two names", loc);
      } else {
        names.push_back(identifier("let-bound variable"));
      }
      expect(Tok::Eq, "'='");
      SurfacePtr bound = expr();
      expect_keyword("in");
      SurfacePtr body = expr();
      auto e = mutable_make(tuple ? SurfaceKind::LetTuple : SurfaceKind::Let, {bound, body}, loc);
      if (tuple)
        e->names = names;
      else
        e->name = names[0];
      return e;
    }
    if (is_keyword("if")) {
      next();
      SurfacePtr g = expr();
      expect_keyword("then");
      SurfacePtr t = expr();
      expect_keyword("else");
      SurfacePtr f = expr();
      return make(SurfaceKind::If, {g, t, f}, loc);
    }
    return disjunction();
  }

  SurfacePtr binary(PrimOp op, SurfacePtr a, SurfacePtr b, SourceLoc loc) {
    auto e = mutable_make(SurfaceKind::Prim, {std::move(a), std::move(b)}, loc);
    e->op = op;
    return e;
  }

  SurfacePtr disjunction() {
    SurfacePtr e = conjunction();
    while (is_keyword("or")) {
      SourceLoc loc = next().loc;
      e = binary(PrimOp::Or, e, conjunction(), loc);
    }
    return e;
  }

  SurfacePtr conjunction() {
    SurfacePtr e = negation();
    while (is_keyword("and")) {
      SourceLoc loc = next().loc;
      e = binary(PrimOp::And, e, negation(), loc);
    }
    return e;
  }

  SurfacePtr negation() {
    if (is_keyword("not")) {
      SourceLoc loc = next().loc;
      auto e = mutable_make(SurfaceKind::Prim, {negation()}, loc);
      e->op = PrimOp::Not;
      return e;
    }
    return comparison();
  }

  SurfacePtr comparison() {
    SurfacePtr e = additive();
    static const std::map<Tok, PrimOp> ops = {
        {Tok::Eq, PrimOp::Eq}, {Tok::Ne, PrimOp::Ne}, {Tok::Le, PrimOp::Le}, {Tok::Ge, PrimOp::Ge}};
    if (auto it = ops.find(peek().kind); it != ops.end()) {
      SourceLoc loc = next().loc;
      e = binary(it->second, e, additive(), loc);
      if (ops.contains(peek().kind))
        throw ParseError(ParseError::Kind::Syntax, "comparisons do not chain", peek().loc);
    }
    return e;
  }

  SurfacePtr additive() {
    SurfacePtr e = multiplicative();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token& t = next();
      e = binary(t.kind == Tok::Plus ? PrimOp::Add : PrimOp::Sub, e, multiplicative(), t.loc);
    }
    return e;
  }

  SurfacePtr multiplicative() {
    SurfacePtr e = prefix();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Token& t = next();
      SurfacePtr rhs = prefix();
      if (t.kind == Tok::Slash && e->kind == SurfaceKind::Lit && rhs->kind == SurfaceKind::Lit &&
          e->lit.is_number() && rhs->lit.is_number()) {
        if (rhs->lit.as_number() == 0)
          throw ParseError(ParseError::Kind::Syntax, "division by zero", t.loc);
        auto folded = mutable_make(SurfaceKind::Lit, {}, e->loc);
        folded->lit = Value::number(e->lit.as_number() / rhs->lit.as_number());
        e = folded;
        continue;
      }
      e = binary(t.kind == Tok::Star ? PrimOp::Mul : PrimOp::Div, e, rhs, t.loc);
    }
    return e;
  }

  SurfacePtr prefix() {
    if (is_keyword("left") || is_keyword("right")) {
      const Token& t = next();
      return make(t.text == "left" ? SurfaceKind::Left : SurfaceKind::Right, {prefix()}, t.loc);
    }
    return primary();
  }

  std::vector<SurfacePtr> args() {
    expect(Tok::LParen, "'('");
    std::vector<SurfacePtr> out;
    if (peek().kind != Tok::RParen) {
      do out.push_back(expr()); while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    return out;
  }

  void arity(const std::vector<SurfacePtr>& a, std::size_t n, const std::string& what, SourceLoc loc) {
    if (a.size() != n)
      throw ParseError(ParseError::Kind::Arity,
                       what + " expects " + std::to_string(n) + " arguments, got " + std::to_string(a.size()), loc);
  }

  AgentRef agent_ref(const Token& t, std::size_t prefix_len) {
    std::string sub = t.text.substr(prefix_len);
    AgentRef r;
    if (std::all_of(sub.begin(), sub.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      r.index = std::stoi(sub);
      if (r.index < 1) throw ParseError(ParseError::Kind::Syntax, "agent index must be positive", t.loc);
    } else {
      r.param = sub;
    }
    return r;
  }

  SurfacePtr primary() {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    if (t.kind == Tok::Number) {
      next();
      auto e = mutable_make(SurfaceKind::Lit, {}, loc);
      e->lit = Value::number(parse_rational(t.text));
      return e;
    }
    if (t.kind == Tok::LParen) {
      next();
      std::vector<SurfacePtr> elems;
      do elems.push_back(expr()); while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
      if (elems.size() == 1) return elems[0];
      return make(SurfaceKind::Tuple, std::move(elems), loc);
    }
    if (t.kind != Tok::Ident)
      throw ParseError(ParseError::Kind::Syntax, "unexpected " + describe(t), loc);
    const std::string text = next().text;
    if (text == "true" || text == "false") {
      auto e = mutable_make(SurfaceKind::Lit, {}, loc);
      e->lit = Value::boolean(text == "true");
      return e;
    }
    if (text == "cake") return make(SurfaceKind::Cake, {}, loc);
    if (text == "divide") {
      auto a = args();
      arity(a, 2, "divide", loc);
      return make(SurfaceKind::Divide, std::move(a), loc);
    }
    if (text == "alloc") return make(SurfaceKind::Alloc, args(), loc);
    if (text == "piece") {
      expect(Tok::LParen, "'('");
      SurfacePtr e = expr();
      expect(Tok::Comma, "','");
      const Token& k = expect(Tok::Number, "piece index");
      expect(Tok::RParen, "')'");
      if (k.text.find('.') != std::string::npos || std::stoi(k.text) < 1)
        throw ParseError(ParseError::Kind::Syntax, "piece index must be a positive integer", k.loc);
      auto p = mutable_make(SurfaceKind::Proj, {e}, loc);
      p->index = std::stoi(k.text);
      return p;
    }
    if (kKeywords.contains(text))
      throw ParseError(ParseError::Kind::Syntax, "unexpected keyword '" + text + "'", loc);
    Token tok{Tok::Ident, text, loc};
    if (has_prefix(text, "mark_")) {
      auto a = args();
      arity(a, 2, text, loc);
      auto e = mutable_make(SurfaceKind::Mark, std::move(a), loc);
      e->agent = agent_ref(tok, 5);
      return e;
    }
    if (has_prefix(text, "eval_")) {
      auto a = args();
      arity(a, 1, text, loc);
      auto e = mutable_make(SurfaceKind::Eval, std::move(a), loc);
      e->agent = agent_ref(tok, 5);
      return e;
    }
    if (has_prefix(text, "sort_")) {
      auto a = args();
      if (a.size() < 2) throw ParseError(ParseError::Kind::Arity, text + " expects at least two pieces", loc);
      auto e = mutable_make(SurfaceKind::Sort, std::move(a), loc);
      e->agent = agent_ref(tok, 5);
      return e;
    }
    if (peek().kind == Tok::LParen) {
      auto e = mutable_make(SurfaceKind::Call, args(), loc);
      e->name = text;
      return e;
    }
    auto e = mutable_make(SurfaceKind::Var, {}, loc);
    e->name = text;
    return e;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void collect_agent_params(const SurfaceExpr& e, std::set<std::string>& out) {
  if ((e.kind == SurfaceKind::Mark || e.kind == SurfaceKind::Eval || e.kind == SurfaceKind::Sort) &&
      e.agent.is_param())
    out.insert(e.agent.param);
  for (const auto& k : e.kids) collect_agent_params(*k, out);
}

// Scope and arity checks over the parsed program.
class Resolver {
 public:
  explicit Resolver(Program& p) : prog_(p) {}

  void run() {
    for (std::size_t i = 0; i < prog_.defs.size(); ++i) {
      Definition& d = prog_.defs[i];
      for (std::size_t j = 0; j < i; ++j)
        if (prog_.defs[j].name == d.name)
          throw ParseError(ParseError::Kind::Syntax, "duplicate definition '" + d.name + "'", d.loc);
      std::set<std::string> agents;
      collect_agent_params(*d.body, agents);
      std::set<std::string> seen;
      d.agent_param.clear();
      for (const auto& p : d.params) {
        if (!seen.insert(p).second)
          throw ParseError(ParseError::Kind::Syntax, "duplicate parameter '" + p + "'", d.loc);
        d.agent_param.push_back(agents.contains(p));
      }
      agent_params_.clear();
      std::vector<std::string> scope;
      for (std::size_t j = 0; j < d.params.size(); ++j) {
        if (d.agent_param[j])
          agent_params_.insert(d.params[j]);
        else
          scope.push_back(d.params[j]);
      }
      visible_defs_ = i;
      check(*d.body, scope);
    }
    agent_params_.clear();
    visible_defs_ = prog_.defs.size();
    std::vector<std::string> scope;
    check(*prog_.main, scope);
  }

 private:
  const Definition* find_def(const std::string& name) const {
    for (std::size_t i = 0; i < visible_defs_; ++i)
      if (prog_.defs[i].name == name) return &prog_.defs[i];
    return nullptr;
  }

  void check_agent(const AgentRef& a, SourceLoc loc) {
    if (a.is_param()) {
      if (!agent_params_.contains(a.param))
        throw ParseError(ParseError::Kind::UnknownIdentifier, "unknown agent '" + a.param + "'", loc);
    } else if (a.index > prog_.agent_count) {
      throw ParseError(ParseError::Kind::UnknownIdentifier,
                       "agent " + std::to_string(a.index) + " does not exist in a " +
                           std::to_string(prog_.agent_count) + "-agent protocol",
                       loc);
    }
  }

  void check(const SurfaceExpr& e, std::vector<std::string>& scope) {
    switch (e.kind) {
      case SurfaceKind::Var:
        if (std::find(scope.begin(), scope.end(), e.name) == scope.end()) {
          if (agent_params_.contains(e.name))
            throw ParseError(ParseError::Kind::Syntax, "agent parameter '" + e.name + "' used as a value", e.loc);
          throw ParseError(ParseError::Kind::UnknownIdentifier, "unknown identifier '" + e.name + "'", e.loc);
        }
        return;
      case SurfaceKind::Let:
      case SurfaceKind::LetTuple: {
        check(*e.kids[0], scope);
        std::vector<std::string> bound = e.kind == SurfaceKind::Let ? std::vector<std::string>{e.name} : e.names;
        for (const auto& b : bound) scope.push_back(b);
        check(*e.kids[1], scope);
        scope.resize(scope.size() - bound.size());
        return;
      }
      case SurfaceKind::Mark:
      case SurfaceKind::Eval:
      case SurfaceKind::Sort: check_agent(e.agent, e.loc); break;
      case SurfaceKind::Alloc:
        if (static_cast<int>(e.kids.size()) != prog_.agent_count)
          throw ParseError(ParseError::Kind::Arity,
                           "alloc expects " + std::to_string(prog_.agent_count) + " pieces, got " +
                               std::to_string(e.kids.size()),
                           e.loc);
        break;
      case SurfaceKind::Call: {
        const Definition* d = find_def(e.name);
        if (!d) throw ParseError(ParseError::Kind::UnknownIdentifier, "unknown definition '" + e.name + "'", e.loc);
        if (e.kids.size() != d->params.size())
          throw ParseError(ParseError::Kind::Arity,
                           e.name + " expects " + std::to_string(d->params.size()) + " arguments, got " +
                               std::to_string(e.kids.size()),
                           e.loc);
        for (std::size_t i = 0; i < e.kids.size(); ++i) {
          const SurfaceExpr& a = *e.kids[i];
          if (!d->agent_param[i]) continue;
          bool literal = a.kind == SurfaceKind::Lit && a.lit.is_number() && is_integer(a.lit.as_number()) &&
                         a.lit.as_number() >= 1;
          if (literal) {
            if (a.lit.as_number() > prog_.agent_count)
              throw ParseError(ParseError::Kind::UnknownIdentifier,
                               "agent " + to_string(a.lit.as_number()) + " does not exist", a.loc);
          } else if (!(a.kind == SurfaceKind::Var && agent_params_.contains(a.name))) {
            throw ParseError(ParseError::Kind::Syntax,
                             "argument " + std::to_string(i + 1) + " of " + e.name + " must be an agent", a.loc);
          }
        }
        for (std::size_t i = 0; i < e.kids.size(); ++i)
          if (!d->agent_param[i]) check(*e.kids[i], scope);
        return;
      }
      default: break;
    }
    for (const auto& k : e.kids) check(*k, scope);
  }

  Program& prog_;
  std::set<std::string> agent_params_;
  std::size_t visible_defs_ = 0;
};

// Surface printer, mirroring the precedence levels of the grammar.
int level(const SurfaceExpr& e) {
  switch (e.kind) {
    case SurfaceKind::Let:
    case SurfaceKind::LetTuple:
    case SurfaceKind::If: return 0;
    case SurfaceKind::Prim:
      switch (e.op) {
        case PrimOp::Or: return 1;
        case PrimOp::And: return 2;
        case PrimOp::Not: return 3;
        case PrimOp::Eq:
        case PrimOp::Ne:
        case PrimOp::Le:
        case PrimOp::Ge: return 4;
        case PrimOp::Add:
        case PrimOp::Sub: return 5;
        case PrimOp::Mul:
        case PrimOp::Div: return 6;
      }
      return 0;
    case SurfaceKind::Left:
    case SurfaceKind::Right: return 7;
    case SurfaceKind::Lit:
      if (e.lit.is_number() && !is_integer(e.lit.as_number())) return 6;
      return 8;
    default: return 8;
  }
}

std::string agent_text(const AgentRef& a) { return a.is_param() ? a.param : std::to_string(a.index); }

class Printer {
 public:
  explicit Printer(std::ostream& os) : os_(os) {}

  void print(const SurfaceExpr& e, int min_level, int indent) {
    int lv = level(e);
    bool paren = lv < min_level;
    if (paren) os_ << "(";
    switch (e.kind) {
      case SurfaceKind::Lit:
        if (e.lit.is_number() && e.lit.as_number() < 0)
          throw std::invalid_argument("negative literals have no surface syntax");
        os_ << to_string(e.lit);
        break;
      case SurfaceKind::Var: os_ << e.name; break;
      case SurfaceKind::Prim:
        if (e.op == PrimOp::Not) {
          os_ << "not ";
          print(*e.kids[0], 3, indent);
        } else {
          print(*e.kids[0], lv == 4 ? 5 : lv, indent);
          os_ << " " << to_string(e.op) << " ";
          print(*e.kids[1], lv + 1, indent);
        }
        break;
      case SurfaceKind::Let:
      case SurfaceKind::LetTuple:
        os_ << "let ";
        if (e.kind == SurfaceKind::Let) {
          os_ << e.name;
        } else {
          os_ << "(";
          for (std::size_t i = 0; i < e.names.size(); ++i) os_ << (i ? ", " : "") << e.names[i];
          os_ << ")";
        }
        os_ << " = ";
        print(*e.kids[0], 0, indent + 1);
        os_ << " in";
        newline(paren ? indent + 1 : indent);
        print(*e.kids[1], 0, paren ? indent + 1 : indent);
        break;
      case SurfaceKind::If:
        os_ << "if ";
        print(*e.kids[0], 0, indent + 1);
        os_ << " then";
        newline(indent + 1);
        print(*e.kids[1], 0, indent + 1);
        newline(indent);
        os_ << "else";
        newline(indent + 1);
        print(*e.kids[2], 0, indent + 1);
        break;
      case SurfaceKind::Tuple: call("", e.kids, indent); break;
      case SurfaceKind::Proj:
        os_ << "piece(";
        print(*e.kids[0], 0, indent);
        os_ << ", " << e.index << ")";
        break;
      case SurfaceKind::Cake: os_ << "cake"; break;
      case SurfaceKind::Left:
      case SurfaceKind::Right:
        os_ << (e.kind == SurfaceKind::Left ? "left " : "right ");
        print(*e.kids[0], 7, indent);
        break;
      case SurfaceKind::Divide: call("divide", e.kids, indent); break;
      case SurfaceKind::Mark: call("mark_" + agent_text(e.agent), e.kids, indent); break;
      case SurfaceKind::Eval: call("eval_" + agent_text(e.agent), e.kids, indent); break;
      case SurfaceKind::Sort: call("sort_" + agent_text(e.agent), e.kids, indent); break;
      case SurfaceKind::Alloc: call("alloc", e.kids, indent); break;
      case SurfaceKind::Call: call(e.name, e.kids, indent); break;
    }
    if (paren) os_ << ")";
  }

 private:
  void newline(int indent) { os_ << "\n" << std::string(2 * indent, ' '); }

  void call(const std::string& head, const std::vector<SurfacePtr>& kids, int indent) {
    os_ << head << "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) os_ << ", ";
      print(*kids[i], 0, indent + 1);
    }
    os_ << ")";
  }

  std::ostream& os_;
};

class Desugarer {
 public:
  struct Env {
    std::map<std::string, std::string> rename;
    std::map<std::string, int> agents;
  };

  explicit Desugarer(const Program& p) : prog_(p) {}

  ExprPtr run() { return go(*prog_.main, Env{}); }

 private:
  std::string fresh(const std::string& base) { return base + "$" + std::to_string(++counter_); }

  int agent_of(const AgentRef& a, const Env& env) const {
    if (!a.is_param()) return a.index;
    return env.agents.at(a.param);
  }

  const Definition& def(const std::string& name) const {
    for (const auto& d : prog_.defs)
      if (d.name == name) return d;
    throw std::logic_error("unresolved definition " + name);
  }

  std::vector<ExprPtr> all(const std::vector<SurfacePtr>& kids, const Env& env) {
    std::vector<ExprPtr> out;
    for (const auto& k : kids) out.push_back(go(*k, env));
    return out;
  }

  // Stable descending insertion sort of `pieces` by agent `a`, as a decision tree.
  ExprPtr sort_tree(int a, const std::vector<std::string>& pieces, std::vector<int> order, std::size_t next,
                    SourceLoc loc) {
    if (next == pieces.size()) {
      std::vector<ExprPtr> elems;
      for (int i : order) elems.push_back(ex::var(pieces[i], loc));
      return ex::tuple(std::move(elems), loc);
    }
    return insert(a, pieces, order, next, order.size(), loc);
  }

  ExprPtr insert(int a, const std::vector<std::string>& pieces, const std::vector<int>& order, std::size_t next,
                 std::size_t pos, SourceLoc loc) {
    auto placed = [&](std::size_t at) {
      std::vector<int> o = order;
      o.insert(o.begin() + static_cast<std::ptrdiff_t>(at), static_cast<int>(next));
      return sort_tree(a, pieces, o, next + 1, loc);
    };
    if (pos == 0) return placed(0);
    ExprPtr guard = ex::prim(PrimOp::Ge,
                             {ex::eval(a, ex::var(pieces[order[pos - 1]], loc), loc),
                              ex::eval(a, ex::var(pieces[next], loc), loc)},
                             loc);
    return ex::cond(guard, placed(pos), insert(a, pieces, order, next, pos - 1, loc), loc);
  }

  ExprPtr go(const SurfaceExpr& e, const Env& env) {
    SourceLoc loc = e.loc;
    switch (e.kind) {
      case SurfaceKind::Lit: return ex::lit(e.lit, loc);
      case SurfaceKind::Var: {
        auto it = env.rename.find(e.name);
        return ex::var(it == env.rename.end() ? e.name : it->second, loc);
      }
      case SurfaceKind::Prim: return ex::prim(e.op, all(e.kids, env), loc);
      case SurfaceKind::Let: {
        Env inner = env;
        inner.rename.erase(e.name);
        return ex::let(e.name, go(*e.kids[0], env), go(*e.kids[1], inner), loc);
      }
      case SurfaceKind::LetTuple: {
        Env inner = env;
        for (const auto& n : e.names) inner.rename.erase(n);
        std::string h = fresh("H");
        ExprPtr body = go(*e.kids[1], inner);
        for (std::size_t i = e.names.size(); i-- > 0;)
          body = ex::let(e.names[i], ex::proj(static_cast<int>(i) + 1, ex::var(h, loc), loc), body, loc);
        return ex::let(h, go(*e.kids[0], env), body, loc);
      }
      case SurfaceKind::Tuple: return ex::tuple(all(e.kids, env), loc);
      case SurfaceKind::Proj: return ex::proj(e.index, go(*e.kids[0], env), loc);
      case SurfaceKind::If:
        return ex::cond(go(*e.kids[0], env), go(*e.kids[1], env), go(*e.kids[2], env), loc);
      case SurfaceKind::Cake: return ex::cake(loc);
      case SurfaceKind::Left: return ex::left(go(*e.kids[0], env), loc);
      case SurfaceKind::Right: return ex::right(go(*e.kids[0], env), loc);
      case SurfaceKind::Divide: return ex::divide(go(*e.kids[0], env), go(*e.kids[1], env), loc);
      case SurfaceKind::Mark:
        return ex::mark(agent_of(e.agent, env), go(*e.kids[0], env), go(*e.kids[1], env), loc);
      case SurfaceKind::Eval: return ex::eval(agent_of(e.agent, env), go(*e.kids[0], env), loc);
      case SurfaceKind::Alloc:
        if (e.kids.size() == 1) return go(*e.kids[0], env);
        return ex::tuple(all(e.kids, env), loc);
      case SurfaceKind::Sort: {
        int a = agent_of(e.agent, env);
        std::vector<std::string> pieces;
        std::vector<std::pair<std::string, ExprPtr>> bindings;
        for (const auto& k : e.kids) {
          ExprPtr piece = go(*k, env);
          if (piece->kind == ExprKind::Var) {
            pieces.push_back(piece->name);
          } else {
            pieces.push_back(fresh("S"));
            bindings.emplace_back(pieces.back(), piece);
          }
        }
        ExprPtr out = sort_tree(a, pieces, {0}, 1, loc);
        for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) out = ex::let(it->first, it->second, out, loc);
        return out;
      }
      case SurfaceKind::Call: {
        const Definition& d = def(e.name);
        Env inner;
        std::vector<std::pair<std::string, ExprPtr>> bindings;
        for (std::size_t i = 0; i < d.params.size(); ++i) {
          const SurfaceExpr& a = *e.kids[i];
          if (d.agent_param[i]) {
            inner.agents[d.params[i]] = a.kind == SurfaceKind::Lit ? static_cast<int>(a.lit.as_number().get_num().get_si())
                                                                    : env.agents.at(a.name);
          } else {
            std::string p = fresh(d.params[i]);
            inner.rename[d.params[i]] = p;
            bindings.emplace_back(p, go(a, env));
          }
        }
        ExprPtr out = go(*d.body, inner);
        for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) out = ex::let(it->first, it->second, out, loc);
        return out;
      }
    }
    throw std::logic_error("unknown surface form");
  }

  const Program& prog_;
  int counter_ = 0;
};

}  // namespace

Program parse(std::string_view text) {
  Parser parser(Lexer(text).run());
  Program p = parser.program();
  Resolver(p).run();
  return p;
}

Program load_program(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string to_string(const Program& p) {
  std::ostringstream os;
  Printer pr(os);
  os << "agents " << p.agent_count << "\n\n";
  for (const auto& d : p.defs) {
    os << "def " << d.name << "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) os << (i ? ", " : "") << d.params[i];
    os << ") =\n  ";
    pr.print(*d.body, 0, 1);
    os << ";\n\n";
  }
  pr.print(*p.main, 0, 0);
  os << "\n";
  return os.str();
}

ExprPtr desugar(const Program& p) { return Desugarer(p).run(); }

int count_program_lines(std::string_view text) {
  int n = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#' && !line.substr(first).starts_with("//")) ++n;
    start = end + 1;
  }
  return n;
}

}  // namespace slice
