#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hubex/aggregate_function.hpp"
#include "hubex/hubs.hpp"
#include "hubex/tags.hpp"

namespace hubex {

class QueryError : public std::runtime_error {
 public:
  QueryError(std::size_t line, std::size_t column, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

/// Semantic problem with an otherwise well-formed query.
class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Literal {
  enum class Kind { Int, Ident, String, Dot };
  Kind kind = Kind::Int;
  std::string text;
  std::int64_t value = 0;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Call {
  std::string name;       // canonical catalog name
  std::string qualifier;  // "e" in `e.Closeness()`, usually empty
  std::vector<Literal> args;
  std::size_t line = 0, column = 0;

  friend bool operator==(const Call& a, const Call& b) {
    return a.name == b.name && a.qualifier == b.qualifier && a.args == b.args;
  }
};

struct Source {
  std::optional<Call> call;  // empty when the source is a plain graph name
  std::string graph;         // graph name for plain sources
  std::string alias;

  friend bool operator==(const Source&, const Source&) = default;
};

struct GEQuery {
  Call select;
  Source from;
  Call group_by;
  std::vector<Call> summarize;

  friend bool operator==(const GEQuery&, const GEQuery&) = default;
};

// ---------------------------------------------------------------------------
// Function catalog

enum class Role { Selector, Source, Grouping, Summarizer };

struct Signature {
  std::string name;
  Role role;
  std::size_t min_args;
  std::size_t max_args;
  /// May take a leading graph reference (e.g. the G' in TopMaxDegreeVertices(G', 2)).
  bool graph_arg = false;
  /// Its first real argument is numeric.
  bool numeric_first = false;
};

class Catalog {
 public:
  void add(Signature s, std::vector<std::string> aliases = {}) {
    for (auto& a : aliases) index_[lower(a)] = sigs_.size();
    index_[lower(s.name)] = sigs_.size();
    sigs_.push_back(std::move(s));
  }

  const Signature* find(std::string_view name) const {
    auto it = index_.find(lower(name));
    return it == index_.end() ? nullptr : &sigs_[it->second];
  }

  static const Catalog& standard() {
    static const Catalog c = [] {
      Catalog c;
      c.add({"TopMaxDegreeVertices", Role::Selector, 1, 2, true, true});
      c.add({"TopCloseness", Role::Selector, 1, 2, true, true});
      c.add({"AttrEquals", Role::Selector, 2, 2, true, false});
      c.add({"AttrAbove", Role::Selector, 2, 2, true, false});
      c.add({"WholeGraph", Role::Source, 0, 0});
      c.add({"Subgraph", Role::Source, 3, 3, true, false});
      c.add({"betweenness", Role::Grouping, 0, 2}, {"betweeness"});
      c.add({"SumVMrByVGrpEGrp", Role::Summarizer, 0, 0});
      c.add({"SumEMrByVGrpEGrp", Role::Summarizer, 0, 0});
      c.add({"COUNT", Role::Summarizer, 0, 1});
      c.add({"vertexCount", Role::Summarizer, 0, 0});
      c.add({"relationshipType", Role::Summarizer, 0, 0});
      c.add({"relationshipStrength", Role::Summarizer, 0, 0});
      c.add({"Closeness", Role::Summarizer, 0, 2});
      c.add({"Agg", Role::Summarizer, 2, 3});
      return c;
    }();
    return c;
  }

  static std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
  }

 private:
  std::vector<Signature> sigs_;
  std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Lexer and parser

namespace detail {

struct Token {
  enum class Kind { Ident, Int, String, LParen, RParen, Comma, Dot, Semicolon, End };
  Kind kind;
  std::string text;
  std::int64_t value = 0;
  std::size_t line, column;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t{Token::Kind::End, "", 0, line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      while (j < src.size() && src[j] == '\'') ++j;  // G', G''
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = std::string(src.substr(i, j - i));
      auto v = parse_number<std::int64_t>(t.text);
      if (!v) throw QueryError(line, col, "integer out of range '" + t.text + "'");
      t.value = *v;
      advance(j - i);
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != c && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != c) throw QueryError(line, col, "unterminated string");
      t.kind = Token::Kind::String;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j + 1 - i);
    } else {
      switch (c) {
        case '(': t.kind = Token::Kind::LParen; break;
        case ')': t.kind = Token::Kind::RParen; break;
        case ',': t.kind = Token::Kind::Comma; break;
        case '.': t.kind = Token::Kind::Dot; break;
        case ';': t.kind = Token::Kind::Semicolon; break;
        default:
          throw QueryError(line, col, std::string("unexpected character '") + c + "'");
      }
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(t));
  }
  out.push_back({Token::Kind::End, "", 0, line, col});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Catalog& catalog)
      : toks_(std::move(tokens)), catalog_(catalog) {}

  GEQuery query() {
    GEQuery q;
    keyword("SELECT");
    q.select = call(Role::Selector);
    keyword("FROM");
    q.from = source();
    if (is_keyword("GROUP")) {
      keyword("GROUP");
      keyword("BY");
      q.group_by = call(Role::Grouping);
    } else {
      q.group_by.name = catalog_.find("betweenness")->name;
    }
    keyword("SUMMARIZE");
    keyword("BY");
    q.summarize.push_back(summary());
    while (true) {
      if (peek().kind == Token::Kind::Comma) {
        next();
        q.summarize.push_back(summary());
      } else if (peek().kind == Token::Kind::Ident) {
        q.summarize.push_back(summary());
      } else {
        break;
      }
    }
    if (peek().kind == Token::Kind::Semicolon) next();
    if (peek().kind != Token::Kind::End) fail(peek(), "unexpected '" + peek().text + "' after query");
    return q;
  }

  Call lone(Role role) {
    auto c = role == Role::Summarizer ? summary() : call(role);
    if (peek().kind != Token::Kind::End) fail(peek(), "unexpected '" + peek().text + "' after call");
    return c;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw QueryError(t.line, t.column, msg);
  }

  static std::string describe(const Token& t) {
    return t.kind == Token::Kind::End ? "end of query" : "'" + t.text + "'";
  }

  bool is_keyword(std::string_view kw) const {
    return peek().kind == Token::Kind::Ident && Catalog::lower(peek().text) == Catalog::lower(kw);
  }

  void keyword(std::string_view kw) {
    if (!is_keyword(kw)) fail(peek(), "expected " + std::string(kw) + ", found " + describe(peek()));
    next();
  }

  void expect(Token::Kind kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    next();
  }

  static bool reserved(const Token& t) {
    static const char* words[] = {"select", "from", "group", "by", "summarize"};
    auto l = Catalog::lower(t.text);
    return std::any_of(std::begin(words), std::end(words), [&](const char* w) { return l == w; });
  }

  Literal literal() {
    const auto& t = peek();
    Literal lit;
    switch (t.kind) {
      case Token::Kind::Int: lit = {Literal::Kind::Int, t.text, t.value}; break;
      case Token::Kind::Ident: lit = {Literal::Kind::Ident, t.text, 0}; break;
      case Token::Kind::String: lit = {Literal::Kind::String, t.text, 0}; break;
      case Token::Kind::Dot: lit = {Literal::Kind::Dot, ".", 0}; break;
      default: fail(t, "expected an argument, found " + describe(t));
    }
    next();
    return lit;
  }

  Call raw_call() {
    const auto& t = peek();
    if (t.kind != Token::Kind::Ident || reserved(t))
      fail(t, "expected a function call, found " + describe(t));
    Call c;
    c.name = t.text;
    c.line = t.line;
    c.column = t.column;
    next();
    expect(Token::Kind::LParen, "'('");
    if (peek().kind != Token::Kind::RParen) {
      c.args.push_back(literal());
      while (peek().kind == Token::Kind::Comma) {
        next();
        c.args.push_back(literal());
      }
    }
    expect(Token::Kind::RParen, "')'");
    return c;
  }

  Call call(Role role) {
    auto c = raw_call();
    check(c, role);
    return c;
  }

  void check(Call& c, Role role) {
    const auto* sig = catalog_.find(c.name);
    if (!sig) throw QueryError(c.line, c.column, "unknown function '" + c.name + "'");
    if (sig->role != role) {
      static const char* roles[] = {"selection", "source", "grouping", "summary"};
      throw QueryError(c.line, c.column,
                       "'" + sig->name + "' is a " + roles[static_cast<int>(sig->role)] +
                           " function, not a " + roles[static_cast<int>(role)] + " function");
    }
    c.name = sig->name;
    if (sig->graph_arg && !c.args.empty() && c.args[0].kind == Literal::Kind::Ident) {
      bool extra = c.args.size() > sig->max_args;
      bool numeric_follows = sig->numeric_first && c.args.size() >= 2 &&
                             c.args[1].kind == Literal::Kind::Int;
      if (extra || numeric_follows) c.args.erase(c.args.begin());
    }
    if (c.args.size() < sig->min_args || c.args.size() > sig->max_args) {
      std::string want = sig->min_args == sig->max_args
                             ? std::to_string(sig->min_args)
                             : std::to_string(sig->min_args) + ".." + std::to_string(sig->max_args);
      throw QueryError(c.line, c.column,
                       "'" + sig->name + "' takes " + want + " argument(s), got " +
                           std::to_string(c.args.size()));
    }
  }

  Source source() {
    Source s;
    const auto& t = peek();
    if (t.kind != Token::Kind::Ident || reserved(t))
      fail(t, "expected a graph or source function, found " + describe(t));
    if (peek(1).kind == Token::Kind::LParen) {
      s.call = call(Role::Source);
    } else {
      s.graph = t.text;
      next();
    }
    if (peek().kind == Token::Kind::Ident && !reserved(peek())) {
      s.alias = peek().text;
      next();
    }
    return s;
  }

  Call summary() {
    std::string qualifier;
    if (peek().kind == Token::Kind::Ident && peek(1).kind == Token::Kind::Dot) {
      qualifier = peek().text;
      next();
      next();
    }
    auto c = call(Role::Summarizer);
    c.qualifier = qualifier;
    return c;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Catalog& catalog_;
};

}  // namespace detail

/// Parses GE-query text. Keywords are case-insensitive; GROUP BY defaults to
/// betweenness(). Throws QueryError with the line and column of the problem.
inline GEQuery parse_query(std::string_view text, const Catalog& catalog = Catalog::standard()) {
  detail::Parser p(detail::tokenize(text), catalog);
  return p.query();
}

inline std::string to_string(const Call& c) {
  std::string out = c.qualifier.empty() ? "" : c.qualifier + ".";
  out += c.name + "(";
  for (std::size_t i = 0; i < c.args.size(); ++i) {
    if (i) out += ", ";
    const auto& a = c.args[i];
    out += a.kind == Literal::Kind::String ? "'" + a.text + "'" : a.text;
  }
  return out + ")";
}

inline std::string to_string(const GEQuery& q) {
  std::string out = "SELECT " + to_string(q.select) + " FROM ";
  out += q.from.call ? to_string(*q.from.call) : q.from.graph;
  if (!q.from.alias.empty()) out += " " + q.from.alias;
  out += " GROUP BY " + to_string(q.group_by) + " SUMMARIZE BY ";
  for (std::size_t i = 0; i < q.summarize.size(); ++i) {
    if (i) out += ", ";
    out += to_string(q.summarize[i]);
  }
  return out;
}

/// Parses a single call such as "TopCloseness(3)" for the given role.
inline Call parse_call(std::string_view text, Role role,
                       const Catalog& catalog = Catalog::standard()) {
  detail::Parser p(detail::tokenize(text), catalog);
  return p.lone(role);
}

// ---------------------------------------------------------------------------
// Binding: typed specifications from calls.

using Params = std::map<std::string, std::int64_t>;

struct SelectorSpec {
  enum class Kind { TopDegree, TopCloseness, AttrEquals, AttrAbove };
  Kind kind = Kind::TopDegree;
  std::size_t k = 0;
  DegreeMode degree = DegreeMode::Total;
  bool dynamic = false;
  std::string attr, value;
};

/// Anchor as written: a vid (Int) or a vertex name.
struct AnchorRef {
  std::optional<VertexId> vid;
  std::string name;

  std::string text() const { return vid ? std::to_string(*vid) : name; }
};

struct SourceSpec {
  bool whole = true;
  AnchorRef a, b;
  std::uint32_t h = 0;
};

struct GroupingSpec {
  std::optional<std::uint32_t> h;  // empty: unbounded betweenness
  HopBound mode = HopBound::Total;
};

struct SummarySpec {
  enum class Kind { Aggregate, VertexCount, RelationshipType, RelationshipStrength };
  std::string name;
  Kind kind = Kind::Aggregate;
  AggFunction fn;  // for Aggregate
};

namespace detail {

inline std::int64_t int_arg(const Call& c, std::size_t i, const Params& params) {
  const auto& a = c.args.at(i);
  if (a.kind == Literal::Kind::Int) return a.value;
  if (a.kind == Literal::Kind::Ident) {
    if (auto it = params.find(a.text); it != params.end()) return it->second;
    throw BindError(c.name + ": unbound parameter '" + a.text + "'");
  }
  throw BindError(c.name + ": argument " + std::to_string(i + 1) + " must be an integer");
}

inline std::string word_arg(const Call& c, std::size_t i) {
  const auto& a = c.args.at(i);
  if (a.kind == Literal::Kind::Int) return a.text;
  return Catalog::lower(a.text);
}

inline std::size_t count_arg(const Call& c, std::size_t i, const Params& params) {
  auto v = int_arg(c, i, params);
  if (v < 0) throw BindError(c.name + ": count must be non-negative");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline SelectorSpec bind_selector(const Call& c, const Params& params = {}) {
  SelectorSpec s;
  if (c.name == "TopMaxDegreeVertices" || c.name == "TopCloseness") {
    s.kind = c.name == "TopCloseness" ? SelectorSpec::Kind::TopCloseness : SelectorSpec::Kind::TopDegree;
    s.k = detail::count_arg(c, 0, params);
    if (c.args.size() > 1) {
      auto mode = detail::word_arg(c, 1);
      if (s.kind == SelectorSpec::Kind::TopDegree) {
        if (mode == "out") s.degree = DegreeMode::Out;
        else if (mode != "total") throw BindError(c.name + ": degree mode must be 'total' or 'out'");
      } else {
        if (mode == "dynamic") s.dynamic = true;
        else if (mode != "static") throw BindError(c.name + ": mode must be 'static' or 'dynamic'");
      }
    }
    return s;
  }
  s.kind = c.name == "AttrEquals" ? SelectorSpec::Kind::AttrEquals : SelectorSpec::Kind::AttrAbove;
  s.attr = detail::word_arg(c, 0);
  s.value = c.args.at(1).text;
  return s;
}

inline SourceSpec bind_source(const Source& src, const Params& params = {}) {
  SourceSpec s;
  if (!src.call || src.call->name == "WholeGraph") return s;
  const auto& c = *src.call;
  s.whole = false;
  auto anchor = [&](std::size_t i) {
    AnchorRef r;
    const auto& a = c.args.at(i);
    if (a.kind == Literal::Kind::Int) {
      if (a.value < 0) throw BindError("Subgraph: vertex ids are non-negative");
      r.vid = static_cast<VertexId>(a.value);
    } else if (a.kind == Literal::Kind::Dot) {
      throw BindError("Subgraph: '.' is not a vertex");
    } else {
      r.name = a.text;
    }
    return r;
  };
  s.a = anchor(0);
  s.b = anchor(1);
  auto h = detail::int_arg(c, 2, params);
  if (h < 0) throw BindError("Subgraph: hop budget must be non-negative");
  s.h = static_cast<std::uint32_t>(h);
  return s;
}

inline GroupingSpec bind_grouping(const Call& c, const Params& params = {}) {
  GroupingSpec g;
  if (c.args.empty()) return g;
  auto h = detail::int_arg(c, 0, params);
  if (h < 1) throw BindError("betweenness: hop budget must be at least 1");
  g.h = static_cast<std::uint32_t>(h);
  if (c.args.size() > 1) {
    auto mode = detail::word_arg(c, 1);
    if (mode == "each") g.mode = HopBound::PerSide;
    else if (mode != "total") throw BindError("betweenness: bound must be 'total' or 'each'");
  }
  return g;
}

namespace detail {
inline ElementKind kind_word(const std::string& fn, const std::string& w) {
  if (w == "v" || w == "vertex" || w == "vertices") return ElementKind::Vertex;
  if (w == "e" || w == "edge" || w == "edges" || w == ".") return ElementKind::Edge;
  throw BindError(fn + ": element kind must be 'v' or 'e', got '" + w + "'");
}
}  // namespace detail

inline SummarySpec bind_summary(const Call& c, const Params& params = {}) {
  using K = SummarySpec::Kind;
  SummarySpec s;
  s.name = c.name;
  const auto q = Catalog::lower(c.qualifier);
  auto check_qualifier = [&](ElementKind kind) {
    if (!q.empty() && detail::kind_word(c.name, q) != kind)
      throw BindError(c.name + " does not apply to '" + c.qualifier + "'");
  };
  if (c.name == "SumVMrByVGrpEGrp") {
    check_qualifier(ElementKind::Vertex);
    s.fn = vertex_function(s.name, Combine::Sum, GroupBy::VGrpEGrp);
  } else if (c.name == "SumEMrByVGrpEGrp") {
    check_qualifier(ElementKind::Edge);
    s.fn = edge_function(s.name, Combine::Sum, GroupBy::VGrpEGrp);
  } else if (c.name == "COUNT") {
    auto kind = q.empty() ? ElementKind::Edge : detail::kind_word(c.name, q);
    if (!c.args.empty()) kind = detail::kind_word(c.name, detail::word_arg(c, 0));
    s.fn = kind == ElementKind::Vertex ? vertex_function(s.name, Combine::Count, GroupBy::None)
                                       : edge_function(s.name, Combine::Count, GroupBy::None);
  } else if (c.name == "Closeness") {
    check_qualifier(ElementKind::Edge);
    Buckets b;
    if (c.args.size() >= 1) b.low_max = detail::int_arg(c, 0, params);
    if (c.args.size() >= 2) b.middle_max = detail::int_arg(c, 1, params);
    if (b.middle_max < b.low_max) throw BindError("Closeness: thresholds must be ascending");
    s.fn = edge_function(s.name, Combine::Count, GroupBy::EMrBucket, b);
  } else if (c.name == "Agg") {
    static const std::map<std::string, Combine> ops = {{"sum", Combine::Sum},
                                                       {"count", Combine::Count},
                                                       {"min", Combine::Min},
                                                       {"max", Combine::Max},
                                                       {"avg", Combine::Avg}};
    static const std::map<std::string, GroupBy> dims = {{"none", GroupBy::None},
                                                        {"v_grp", GroupBy::VGrp},
                                                        {"e_grp", GroupBy::EGrp},
                                                        {"v_grp_e_grp", GroupBy::VGrpEGrp},
                                                        {"bucket", GroupBy::EMrBucket}};
    auto op = ops.find(detail::word_arg(c, 0));
    if (op == ops.end()) throw BindError("Agg: unknown operator '" + c.args[0].text + "'");
    auto kind = detail::kind_word(c.name, detail::word_arg(c, 1));
    auto dim = c.args.size() > 2 ? dims.find(detail::word_arg(c, 2)) : dims.find("none");
    if (dim == dims.end()) throw BindError("Agg: unknown grouping '" + c.args[2].text + "'");
    s.name = to_string(c);
    try {
      s.fn = kind == ElementKind::Vertex ? vertex_function(s.name, op->second, dim->second)
                                         : edge_function(s.name, op->second, dim->second);
    } catch (const std::invalid_argument& e) {
      throw BindError(std::string("Agg: ") + e.what());
    }
  } else if (c.name == "vertexCount") {
    s.kind = K::VertexCount;
    s.fn = vertex_function(s.name, Combine::Count, GroupBy::None);
  } else if (c.name == "relationshipType") {
    s.kind = K::RelationshipType;
  } else if (c.name == "relationshipStrength") {
    s.kind = K::RelationshipStrength;
    s.fn = edge_function(s.name, Combine::Count, GroupBy::None);
  } else {
    throw BindError("no binding for summary '" + c.name + "'");
  }
  return s;
}

}  // namespace hubex
