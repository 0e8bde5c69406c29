#pragma once

/**
 * @file io.hpp
 * @brief Textual and JSON formats for every artifact: posets, functor
 *        expressions, relations, models, sequents, formulas, elements,
 *        proof trees and countermodels.
 *
 * Workspace grammar ('#' starts a comment running to the end of the line;
 * NAME and element labels are words over [A-Za-z0-9_]):
 *
 *     file     ::= decl*
 *     decl     ::= poset | functor | relation | model | sequent
 *     poset    ::= "poset" NAME "{" "elems" ":" names ";" "leq" ":" lpairs
 *                  [";"] "}"
 *     names    ::= [ NAME ("," NAME)* ]
 *     lpairs   ::= [ NAME "<" NAME ("," NAME "<" NAME)* ]
 *     functor  ::= "functor" NAME "=" fexpr [";"]
 *     fexpr    ::= fprod ("+" fprod)*
 *     fprod    ::= fpow ("*" fpow)*
 *     fpow     ::= fatom ("^" NAME)*
 *     fatom    ::= "id" | "const" "(" NAME ")" | "dual" "(" fexpr ")"
 *                | "low" "(" fexpr ")" | "up" "(" fexpr ")"
 *                | "(" fexpr ")" | NAME
 *     relation ::= "relation" NAME "{" "src" ":" NAME ";" "tgt" ":" NAME ";"
 *                  "pairs" ":" [ rpair ("," rpair)* ] [";"] "}"
 *     rpair    ::= "(" NAME "," NAME ")"
 *     model    ::= "model" NAME "{" "states" ":" NAME ";"
 *                  "functor" ":" fexpr ";" "atoms" ":" NAME ";"
 *                  "structure" ":" [ NAME "->" element ("," ...)* ] ";"
 *                  "valuation" ":" [ NAME "->" "{" names "}" ("," ...)* ]
 *                  ";" [ "state" ":" NAME [";"] ] "}"
 *     sequent  ::= "sequent" NAME "{" [ "functor" ":" fexpr ";" ]
 *                  [ "atoms" ":" NAME ";" ]
 *                  "lhs" ":" [ formula ("," formula)* ] ";"
 *                  "rhs" ":" [ formula ("," formula)* ] [";"] "}"
 *     formula  ::= NAME | ("and" | "or") "(" [ formula ("," formula)* ] ")"
 *                | ("nabla" | "delta") element
 *     element  ::=  shape-directed by the (dual-free) functor:
 *                   const(P)  - a label of P
 *                   id        - a leaf: state label, or formula in payloads
 *                   F + G     - "inl(e)" or "inr(e)"
 *                   F * G     - "(e,e)"
 *                   F ^ E     - "[lbl: e, ...]", one entry per element of E
 *                   low/up(F) - "{e, ...}"
 *
 * Relation pairs are written (src-element, tgt-element); the listed pairs
 * generate the relation, so the monotone closure is applied: a listed (x, y)
 * makes every (x', y') with x <= x' and y' <= y hold.  Printers emit every
 * holding pair, sorted by source index then target index.
 *
 * Model valuations list, per atom, states that satisfy it; the closure in
 * both directions (up in the state, covariant in the atom) is applied before
 * the model is constructed.
 *
 * The JSON mirror carries the same information with functor expressions,
 * formulas and elements as canonical strings; each document embeds the
 * posets it references, so it is self-contained.  See docs/formats.md.
 */

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "moss/calculus.hpp"
#include "moss/element.hpp"
#include "moss/errors.hpp"
#include "moss/functor.hpp"
#include "moss/logic.hpp"
#include "moss/model.hpp"
#include "moss/poset.hpp"
#include "moss/relation.hpp"

namespace moss {

namespace iodetail {

struct Token {
  enum class Kind { Word, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
};

inline bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline bool is_word(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!word_char(c)) return false;
  return true;
}

/// Splits input into words and punctuation, tracking line numbers.
inline std::vector<Token> tokenize(const std::string& text) {
  static const std::string singles = "(){}[],:;<=^+*";
  std::vector<Token> out;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (word_char(c)) {
      std::size_t j = i;
      while (j < text.size() && word_char(text[j])) ++j;
      out.push_back({Token::Kind::Word, text.substr(i, j - i), line});
      i = j;
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      out.push_back({Token::Kind::Punct, "->", line});
      i += 2;
      continue;
    }
    if (singles.find(c) != std::string::npos) {
      out.push_back({Token::Kind::Punct, std::string(1, c), line});
      ++i;
      continue;
    }
    throw ParseError("line " + std::to_string(line) + ": stray character '" +
                     std::string(1, c) + "'");
  }
  out.push_back({Token::Kind::End, "", line});
  return out;
}

/// Forward-only view over a token list with located error reporting.
class Cursor {
public:
  explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {
    if (toks_.empty() || toks_.back().kind != Token::Kind::End)
      toks_.push_back(Token{});
  }

  const Token& peek() const { return toks_[i_]; }
  bool done() const { return peek().kind == Token::Kind::End; }

  Token take() {
    Token t = toks_[i_];
    if (t.kind != Token::Kind::End) ++i_;
    return t;
  }

  bool at_word(const std::string& w) const {
    return peek().kind == Token::Kind::Word && peek().text == w;
  }
  bool at_punct(const std::string& p) const {
    return peek().kind == Token::Kind::Punct && peek().text == p;
  }
  bool eat_word(const std::string& w) {
    if (!at_word(w)) return false;
    take();
    return true;
  }
  bool eat_punct(const std::string& p) {
    if (!at_punct(p)) return false;
    take();
    return true;
  }
  void expect_word(const std::string& w) {
    if (!eat_word(w)) fail("expected '" + w + "'");
  }
  void expect_punct(const std::string& p) {
    if (!eat_punct(p)) fail("expected '" + p + "'");
  }

  std::string take_name(const std::string& what) {
    if (peek().kind != Token::Kind::Word) fail("expected " + what);
    return take().text;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string got =
        t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError("line " + std::to_string(t.line) + ": " + msg +
                     " (found " + got + ")");
  }

private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

/// Joins tokens back into parseable text (single spaces, whitespace being
/// insignificant); used to keep sequent bodies verbatim until a functor is
/// available to interpret them.
inline std::string join(const std::vector<Token>& toks) {
  std::string out;
  for (const Token& t : toks) {
    if (t.kind == Token::Kind::End) break;
    if (!out.empty()) out += ' ';
    out += t.text;
  }
  return out;
}

} // namespace iodetail

// ---------------------------------------------------------------------------
// Workspace: named declarations loaded from files
// ---------------------------------------------------------------------------

struct RelationDecl {
  std::string name, src_name, tgt_name;
  MonotoneRel rel;
};

struct ModelDecl {
  std::string name, states_name, atoms_name;
  FunctorPtr functor; ///< as written (dual constructors allowed)
  Model model;
  std::optional<Index> state;
};

struct SequentDecl {
  std::string name;
  FunctorPtr functor; ///< null when the declaration omits it
  std::string atoms_name;
  FinPoset atoms;
  std::vector<iodetail::Token> lhs, rhs; ///< kept verbatim until built
};

struct Workspace {
  std::vector<std::pair<std::string, FinPoset>> posets;
  std::vector<std::pair<std::string, FunctorPtr>> functors;
  std::vector<RelationDecl> relations;
  std::vector<ModelDecl> models;
  std::vector<SequentDecl> sequents;

  const FinPoset* find_poset(const std::string& name) const {
    for (const auto& [n, p] : posets)
      if (n == name) return &p;
    return nullptr;
  }
  FunctorPtr find_functor(const std::string& name) const {
    for (const auto& [n, f] : functors)
      if (n == name) return f;
    return nullptr;
  }
  const RelationDecl* find_relation(const std::string& name) const {
    for (const auto& r : relations)
      if (r.name == name) return &r;
    return nullptr;
  }
  const ModelDecl* find_model(const std::string& name) const {
    for (const auto& m : models)
      if (m.name == name) return &m;
    return nullptr;
  }
  const SequentDecl* find_sequent(const std::string& name) const {
    for (const auto& s : sequents)
      if (s.name == name) return &s;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Parsers
// ---------------------------------------------------------------------------

/// fatom ::= id | const(NAME) | dual/low/up(fexpr) | (fexpr) | NAME
inline FunctorPtr parse_functor_expr(iodetail::Cursor& cur, const Workspace& ws);

namespace iodetail {

inline FunctorPtr parse_functor_atom(Cursor& cur, const Workspace& ws) {
  if (cur.eat_punct("(")) {
    FunctorPtr f = parse_functor_expr(cur, ws);
    cur.expect_punct(")");
    return f;
  }
  if (cur.peek().kind != Token::Kind::Word) cur.fail("expected a functor expression");
  if (cur.eat_word("id")) return FunctorExpr::identity();
  if (cur.eat_word("const")) {
    cur.expect_punct("(");
    std::string name = cur.take_name("a poset name");
    const FinPoset* p = ws.find_poset(name);
    if (!p) cur.fail("unknown poset '" + name + "'");
    cur.expect_punct(")");
    return FunctorExpr::constant(*p, name);
  }
  for (const char* u : {"dual", "low", "up"}) {
    if (!cur.at_word(u)) continue;
    cur.take();
    cur.expect_punct("(");
    FunctorPtr f = parse_functor_expr(cur, ws);
    cur.expect_punct(")");
    if (u[0] == 'd') return FunctorExpr::dual(f);
    return u[0] == 'l' ? FunctorExpr::low(f) : FunctorExpr::up(f);
  }
  std::string name = cur.take_name("a functor expression");
  FunctorPtr f = ws.find_functor(name);
  if (!f) cur.fail("unknown functor '" + name + "'");
  return f;
}

inline FunctorPtr parse_functor_pow(Cursor& cur, const Workspace& ws) {
  FunctorPtr f = parse_functor_atom(cur, ws);
  while (cur.eat_punct("^")) {
    std::string name = cur.take_name("an exponent poset name");
    const FinPoset* p = ws.find_poset(name);
    if (!p) cur.fail("unknown poset '" + name + "'");
    f = FunctorExpr::exp(f, *p, name);
  }
  return f;
}

inline FunctorPtr parse_functor_prod(Cursor& cur, const Workspace& ws) {
  FunctorPtr f = parse_functor_pow(cur, ws);
  while (cur.eat_punct("*")) f = FunctorExpr::prod(f, parse_functor_pow(cur, ws));
  return f;
}

} // namespace iodetail

/// Precedence ^ over * over +, all left-associative; parentheses free.
inline FunctorPtr parse_functor_expr(iodetail::Cursor& cur, const Workspace& ws) {
  FunctorPtr f = iodetail::parse_functor_prod(cur, ws);
  while (cur.eat_punct("+")) f = FunctorExpr::sum(f, iodetail::parse_functor_prod(cur, ws));
  return f;
}

/// Element parser directed by the functor shape; `leaf` consumes an id-leaf
/// and yields its index (into a carrier or into a growing formula support).
inline Element parse_element(iodetail::Cursor& cur, const FunctorPtr& f,
                             const std::function<Index(iodetail::Cursor&)>& leaf) {
  switch (f->kind) {
    case FKind::Const: {
      std::string name = cur.take_name("an element of '" + f->name + "'");
      std::optional<Index> i = f->param.find(name);
      if (!i) cur.fail("'" + name + "' is not an element of '" + f->name + "'");
      return Element::point(*i);
    }
    case FKind::Id: return Element::point(leaf(cur));
    case FKind::Sum: {
      bool left = cur.at_word("inl");
      if (!left && !cur.at_word("inr")) cur.fail("expected 'inl' or 'inr'");
      cur.take();
      cur.expect_punct("(");
      Element k = parse_element(cur, left ? f->lhs : f->rhs, leaf);
      cur.expect_punct(")");
      return left ? Element::inl(std::move(k)) : Element::inr(std::move(k));
    }
    case FKind::Prod: {
      cur.expect_punct("(");
      Element a = parse_element(cur, f->lhs, leaf);
      cur.expect_punct(",");
      Element b = parse_element(cur, f->rhs, leaf);
      cur.expect_punct(")");
      return Element::pair(std::move(a), std::move(b));
    }
    case FKind::Exp: {
      cur.expect_punct("[");
      std::vector<std::optional<Element>> cells(f->param.size());
      if (!cur.eat_punct("]")) {
        do {
          std::string name = cur.take_name("an exponent label");
          std::optional<Index> i = f->param.find(name);
          if (!i) cur.fail("'" + name + "' is not an element of '" + f->name + "'");
          if (cells[*i]) cur.fail("duplicate entry for '" + name + "'");
          cur.expect_punct(":");
          cells[*i] = parse_element(cur, f->lhs, leaf);
        } while (cur.eat_punct(","));
        cur.expect_punct("]");
      }
      std::vector<Element> table;
      for (Index i = 0; i < cells.size(); ++i) {
        if (!cells[i]) cur.fail("missing entry for '" + f->param.label(i) + "'");
        table.push_back(std::move(*cells[i]));
      }
      return Element::table(std::move(table));
    }
    case FKind::Low:
    case FKind::Up: {
      cur.expect_punct("{");
      std::vector<Element> gens;
      if (!cur.eat_punct("}")) {
        do gens.push_back(parse_element(cur, f->lhs, leaf));
        while (cur.eat_punct(","));
        cur.expect_punct("}");
      }
      return f->kind == FKind::Low ? Element::lowset(std::move(gens))
                                   : Element::upset(std::move(gens));
    }
    case FKind::Dual: throw TypeError("parse element: normalize dual constructors away first");
  }
  throw InvariantError("parse_element: unreachable");
}

/// Leaf parser resolving carrier labels of a poset.
inline std::function<Index(iodetail::Cursor&)> poset_leaf_parser(const FinPoset& x) {
  return [&x](iodetail::Cursor& cur) -> Index {
    std::string name = cur.take_name("a carrier element");
    std::optional<Index> i = x.find(name);
    if (!i) cur.fail("unknown carrier element '" + name + "'");
    return *i;
  };
}

/// formula ::= ATOM | and(...) | or(...) | nabla EL | delta EL.  Modal
/// payloads are parsed against the dualised signature with formulas at the
/// id-leaves; the arena canonicalises supports and payload generators.
inline FormulaId parse_formula(iodetail::Cursor& cur, FormulaArena& a) {
  if (cur.peek().kind != iodetail::Token::Kind::Word) cur.fail("expected a formula");
  bool is_and = cur.at_word("and");
  if (is_and || cur.at_word("or")) {
    cur.take();
    cur.expect_punct("(");
    std::vector<FormulaId> args;
    if (!cur.eat_punct(")")) {
      do args.push_back(parse_formula(cur, a));
      while (cur.eat_punct(","));
      cur.expect_punct(")");
    }
    return is_and ? a.conj(std::move(args)) : a.disj(std::move(args));
  }
  bool is_nabla = cur.at_word("nabla");
  if (is_nabla || cur.at_word("delta")) {
    cur.take();
    std::vector<FormulaId> support;
    auto leaf = [&a, &support](iodetail::Cursor& c) -> Index {
      support.push_back(parse_formula(c, a));
      return support.size() - 1;
    };
    Element payload = parse_element(cur, a.td(), leaf);
    return is_nabla ? a.nabla(std::move(payload), std::move(support))
                    : a.delta(std::move(payload), std::move(support));
  }
  iodetail::Token t = cur.peek();
  std::optional<Index> i = a.atoms().find(t.text);
  if (!i) cur.fail("unknown atom '" + t.text + "'");
  cur.take();
  return a.atom(*i);
}

namespace iodetail {

inline void parse_poset_decl(Cursor& cur, Workspace& ws) {
  std::string name = cur.take_name("a poset name");
  if (ws.find_poset(name)) cur.fail("poset '" + name + "' declared twice");
  cur.expect_punct("{");
  cur.expect_word("elems");
  cur.expect_punct(":");
  std::vector<std::string> labels;
  if (!cur.at_punct(";")) {
    do {
      std::string l = cur.take_name("an element label");
      if (std::find(labels.begin(), labels.end(), l) != labels.end())
        cur.fail("duplicate element '" + l + "'");
      labels.push_back(l);
    } while (cur.eat_punct(","));
  }
  cur.expect_punct(";");
  cur.expect_word("leq");
  cur.expect_punct(":");
  std::vector<std::pair<std::string, std::string>> pairs;
  auto known = [&labels](const std::string& l) {
    return std::find(labels.begin(), labels.end(), l) != labels.end();
  };
  if (!cur.at_punct(";") && !cur.at_punct("}")) {
    do {
      std::string lo = cur.take_name("an element label");
      if (!known(lo)) cur.fail("unknown element '" + lo + "'");
      cur.expect_punct("<");
      std::string hi = cur.take_name("an element label");
      if (!known(hi)) cur.fail("unknown element '" + hi + "'");
      pairs.emplace_back(std::move(lo), std::move(hi));
    } while (cur.eat_punct(","));
  }
  cur.eat_punct(";");
  cur.expect_punct("}");
  ws.posets.emplace_back(std::move(name), FinPoset::make(std::move(labels), pairs));
}

inline void parse_functor_decl(Cursor& cur, Workspace& ws) {
  std::string name = cur.take_name("a functor name");
  if (ws.find_functor(name)) cur.fail("functor '" + name + "' declared twice");
  cur.expect_punct("=");
  FunctorPtr f = parse_functor_expr(cur, ws);
  cur.eat_punct(";");
  ws.functors.emplace_back(std::move(name), std::move(f));
}

inline void parse_relation_decl(Cursor& cur, Workspace& ws) {
  std::string name = cur.take_name("a relation name");
  if (ws.find_relation(name)) cur.fail("relation '" + name + "' declared twice");
  cur.expect_punct("{");
  cur.expect_word("src");
  cur.expect_punct(":");
  std::string src_name = cur.take_name("a poset name");
  const FinPoset* src = ws.find_poset(src_name);
  if (!src) cur.fail("unknown poset '" + src_name + "'");
  cur.expect_punct(";");
  cur.expect_word("tgt");
  cur.expect_punct(":");
  std::string tgt_name = cur.take_name("a poset name");
  const FinPoset* tgt = ws.find_poset(tgt_name);
  if (!tgt) cur.fail("unknown poset '" + tgt_name + "'");
  cur.expect_punct(";");
  cur.expect_word("pairs");
  cur.expect_punct(":");
  std::vector<std::vector<bool>> table(tgt->size(), std::vector<bool>(src->size(), false));
  if (cur.at_punct("(")) {
    do {
      cur.expect_punct("(");
      std::string xs = cur.take_name("a source element");
      std::optional<Index> x = src->find(xs);
      if (!x) cur.fail("unknown source element '" + xs + "'");
      cur.expect_punct(",");
      std::string ys = cur.take_name("a target element");
      std::optional<Index> y = tgt->find(ys);
      if (!y) cur.fail("unknown target element '" + ys + "'");
      cur.expect_punct(")");
      // monotone closure of the listed pair
      for (Index y2 = 0; y2 < tgt->size(); ++y2)
        for (Index x2 = 0; x2 < src->size(); ++x2)
          if (tgt->leq(y2, *y) && src->leq(*x, x2)) table[y2][x2] = true;
    } while (cur.eat_punct(","));
  }
  cur.eat_punct(";");
  cur.expect_punct("}");
  ws.relations.push_back(
      {std::move(name), src_name, tgt_name, MonotoneRel(*src, *tgt, std::move(table))});
}

inline void parse_model_decl(Cursor& cur, Workspace& ws) {
  std::string name = cur.take_name("a model name");
  if (ws.find_model(name)) cur.fail("model '" + name + "' declared twice");
  cur.expect_punct("{");
  cur.expect_word("states");
  cur.expect_punct(":");
  std::string states_name = cur.take_name("a poset name");
  const FinPoset* states = ws.find_poset(states_name);
  if (!states) cur.fail("unknown poset '" + states_name + "'");
  cur.expect_punct(";");
  cur.expect_word("functor");
  cur.expect_punct(":");
  FunctorPtr t_raw = parse_functor_expr(cur, ws);
  FunctorPtr t = normalize_dual(t_raw);
  cur.expect_punct(";");
  cur.expect_word("atoms");
  cur.expect_punct(":");
  std::string atoms_name = cur.take_name("a poset name");
  const FinPoset* atoms = ws.find_poset(atoms_name);
  if (!atoms) cur.fail("unknown poset '" + atoms_name + "'");
  cur.expect_punct(";");

  cur.expect_word("structure");
  cur.expect_punct(":");
  std::vector<std::optional<Element>> structure(states->size());
  if (!cur.at_punct(";")) {
    do {
      std::string sl = cur.take_name("a state label");
      std::optional<Index> s = states->find(sl);
      if (!s) cur.fail("unknown state '" + sl + "'");
      if (structure[*s]) cur.fail("duplicate transition for '" + sl + "'");
      cur.expect_punct("->");
      structure[*s] = parse_element(cur, t, poset_leaf_parser(*states));
    } while (cur.eat_punct(","));
  }
  cur.expect_punct(";");
  for (Index s = 0; s < states->size(); ++s)
    if (!structure[s]) cur.fail("no transition for state '" + states->label(s) + "'");

  cur.expect_word("valuation");
  cur.expect_punct(":");
  std::vector<std::vector<bool>> val(atoms->size(), std::vector<bool>(states->size(), false));
  std::vector<bool> seen(atoms->size(), false);
  if (!cur.at_punct(";")) {
    do {
      std::string al = cur.take_name("an atom label");
      std::optional<Index> a = atoms->find(al);
      if (!a) cur.fail("unknown atom '" + al + "'");
      if (seen[*a]) cur.fail("duplicate valuation for '" + al + "'");
      seen[*a] = true;
      cur.expect_punct("->");
      cur.expect_punct("{");
      if (!cur.eat_punct("}")) {
        do {
          std::string sl = cur.take_name("a state label");
          std::optional<Index> s = states->find(sl);
          if (!s) cur.fail("unknown state '" + sl + "'");
          val[*a][*s] = true;
        } while (cur.eat_punct(","));
        cur.expect_punct("}");
      }
    } while (cur.eat_punct(","));
  }
  cur.expect_punct(";");
  // closure: up in the state, then covariantly in the atom
  for (Index a = 0; a < atoms->size(); ++a)
    for (Index x = 0; x < states->size(); ++x)
      if (val[a][x])
        for (Index y = 0; y < states->size(); ++y)
          if (states->leq(x, y)) val[a][y] = true;
  for (Index a = 0; a < atoms->size(); ++a)
    for (Index b = 0; b < atoms->size(); ++b)
      if (atoms->leq(a, b))
        for (Index x = 0; x < states->size(); ++x)
          if (val[a][x]) val[b][x] = true;

  std::optional<Index> state;
  if (cur.eat_word("state")) {
    cur.expect_punct(":");
    std::string sl = cur.take_name("a state label");
    std::optional<Index> s = states->find(sl);
    if (!s) cur.fail("unknown state '" + sl + "'");
    state = s;
    cur.eat_punct(";");
  }
  cur.expect_punct("}");

  std::vector<Element> cells;
  cells.reserve(structure.size());
  for (auto& c : structure) cells.push_back(std::move(*c));
  ws.models.push_back({std::move(name), states_name, atoms_name, t_raw,
                       Model(*states, t_raw, *atoms, std::move(cells), std::move(val)), state});
}

/// Collects tokens up to a ';' at bracket depth zero (consumed) or a '}'
/// closing the declaration (left in place); used for sequent formula lists.
inline std::vector<Token> take_until_semicolon(Cursor& cur) {
  std::vector<Token> out;
  int depth = 0;
  for (;;) {
    if (cur.done()) cur.fail("unterminated formula list");
    if (depth == 0 && cur.at_punct(";")) {
      cur.take();
      break;
    }
    if (depth == 0 && cur.at_punct("}")) break;
    Token t = cur.take();
    if (t.kind == Token::Kind::Punct) {
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      if (depth < 0) cur.fail("unbalanced bracket in formula list");
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Token::Kind::End, "", cur.peek().line});
  return out;
}

inline void parse_sequent_decl(Cursor& cur, Workspace& ws) {
  std::string name = cur.take_name("a sequent name");
  if (ws.find_sequent(name)) cur.fail("sequent '" + name + "' declared twice");
  cur.expect_punct("{");
  FunctorPtr functor;
  if (cur.eat_word("functor")) {
    cur.expect_punct(":");
    functor = parse_functor_expr(cur, ws);
    cur.expect_punct(";");
  }
  std::string atoms_name;
  FinPoset atoms = FinPoset::discrete({});
  if (cur.eat_word("atoms")) {
    cur.expect_punct(":");
    atoms_name = cur.take_name("a poset name");
    const FinPoset* p = ws.find_poset(atoms_name);
    if (!p) cur.fail("unknown poset '" + atoms_name + "'");
    atoms = *p;
    cur.expect_punct(";");
  }
  cur.expect_word("lhs");
  cur.expect_punct(":");
  std::vector<Token> lhs = take_until_semicolon(cur);
  cur.expect_word("rhs");
  cur.expect_punct(":");
  std::vector<Token> rhs = take_until_semicolon(cur);
  cur.expect_punct("}");
  ws.sequents.push_back({std::move(name), std::move(functor), std::move(atoms_name),
                         std::move(atoms), std::move(lhs), std::move(rhs)});
}

} // namespace iodetail

/// Parses declarations from `text` into an existing workspace (several files
/// may accumulate; later declarations may reference earlier ones).
inline void parse_workspace_into(Workspace& ws, const std::string& text,
                                 const std::string& source = "") {
  try {
    iodetail::Cursor cur(iodetail::tokenize(text));
    while (!cur.done()) {
      if (cur.eat_word("poset")) iodetail::parse_poset_decl(cur, ws);
      else if (cur.eat_word("functor")) iodetail::parse_functor_decl(cur, ws);
      else if (cur.eat_word("relation")) iodetail::parse_relation_decl(cur, ws);
      else if (cur.eat_word("model")) iodetail::parse_model_decl(cur, ws);
      else if (cur.eat_word("sequent")) iodetail::parse_sequent_decl(cur, ws);
      else cur.fail("expected a declaration (poset, functor, relation, model, sequent)");
    }
  } catch (const ParseError& e) {
    if (source.empty()) throw;
    throw ParseError(source + ": " + e.what());
  }
}

inline Workspace parse_workspace(const std::string& text, const std::string& source = "") {
  Workspace ws;
  parse_workspace_into(ws, text, source);
  return ws;
}

/// Whole-string convenience parsers (the entire input must be consumed).
inline FunctorPtr parse_functor_str(const Workspace& ws, const std::string& text) {
  iodetail::Cursor cur(iodetail::tokenize(text));
  FunctorPtr f = parse_functor_expr(cur, ws);
  if (!cur.done()) cur.fail("trailing input after functor expression");
  return f;
}

inline FormulaId parse_formula_str(FormulaArena& a, const std::string& text) {
  iodetail::Cursor cur(iodetail::tokenize(text));
  FormulaId f = parse_formula(cur, a);
  if (!cur.done()) cur.fail("trailing input after formula");
  return f;
}

inline Element parse_element_str(const FunctorPtr& f, const FinPoset& x,
                                 const std::string& text) {
  iodetail::Cursor cur(iodetail::tokenize(text));
  Element e = parse_element(cur, f, poset_leaf_parser(x));
  if (!cur.done()) cur.fail("trailing input after element");
  return e;
}

/// A sequent declaration resolved against a signature: its own functor field
/// when present, else the supplied fallback.
struct BuiltSequent {
  std::string name;
  FunctorPtr functor; ///< as written
  FinPoset atoms;
  std::shared_ptr<FormulaArena> arena;
  std::vector<FormulaId> lhs, rhs;
};

inline BuiltSequent build_sequent(const SequentDecl& d, FunctorPtr fallback = nullptr) {
  FunctorPtr t = d.functor ? d.functor : std::move(fallback);
  if (!t)
    throw ParseError("sequent '" + d.name +
                     "': no functor declared and none supplied");
  BuiltSequent b{d.name, t, d.atoms, std::make_shared<FormulaArena>(t, d.atoms), {}, {}};
  for (const std::vector<iodetail::Token>* side : {&d.lhs, &d.rhs}) {
    std::vector<FormulaId>& out = side == &d.lhs ? b.lhs : b.rhs;
    iodetail::Cursor cur(*side);
    if (cur.done()) continue;
    do out.push_back(parse_formula(cur, *b.arena));
    while (cur.eat_punct(","));
    if (!cur.done()) cur.fail("expected ',' between formulas");
  }
  return b;
}

// ---------------------------------------------------------------------------
// Printers (inverse of the parsers; parse(print(v)) == v)
// ---------------------------------------------------------------------------

/// Strict cover pairs (i, j) of the order: i < j with nothing in between.
inline std::vector<std::pair<Index, Index>> cover_pairs(const FinPoset& p) {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < p.size(); ++i)
    for (Index j = 0; j < p.size(); ++j) {
      if (i == j || !p.leq(i, j)) continue;
      bool direct = true;
      for (Index k = 0; direct && k < p.size(); ++k)
        if (k != i && k != j && p.leq(i, k) && p.leq(k, j)) direct = false;
      if (direct) out.emplace_back(i, j);
    }
  return out;
}

namespace iodetail {

inline void check_printable(const FinPoset& p) {
  for (const std::string& l : p.labels())
    if (!is_word(l))
      throw TypeError("print: label '" + l + "' is not a printable word");
}

/// Named posets a functor expression references (const values and exponents).
inline void collect_params(const FunctorPtr& f, std::map<std::string, FinPoset>& out) {
  switch (f->kind) {
    case FKind::Const: out.emplace(f->name, f->param); return;
    case FKind::Id: return;
    case FKind::Sum:
    case FKind::Prod:
      collect_params(f->lhs, out);
      collect_params(f->rhs, out);
      return;
    case FKind::Exp: out.emplace(f->name, f->param); [[fallthrough]];
    case FKind::Dual:
    case FKind::Low:
    case FKind::Up: collect_params(f->lhs, out); return;
  }
}

} // namespace iodetail

inline std::string print_poset_decl(const std::string& name, const FinPoset& p) {
  iodetail::check_printable(p);
  std::string out = "poset " + name + " { elems: ";
  for (Index i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    out += p.label(i);
  }
  out += "; leq:";
  std::vector<std::pair<Index, Index>> cov = cover_pairs(p);
  for (Index i = 0; i < cov.size(); ++i) {
    out += i ? ", " : " ";
    out += p.label(cov[i].first) + "<" + p.label(cov[i].second);
  }
  return out + " }";
}

inline std::string print_functor_decl(const std::string& name, const FunctorPtr& f) {
  return "functor " + name + " = " + print(f) + ";";
}

inline std::string print_relation_decl(const RelationDecl& r) {
  std::string out = "relation " + r.name + " { src: " + r.src_name +
                    "; tgt: " + r.tgt_name + "; pairs: ";
  bool first = true;
  for (Index x = 0; x < r.rel.src().size(); ++x)
    for (Index y = 0; y < r.rel.tgt().size(); ++y) {
      if (!r.rel.holds(y, x)) continue;
      if (!first) out += ", ";
      first = false;
      out += "(" + r.rel.src().label(x) + ", " + r.rel.tgt().label(y) + ")";
    }
  return out + " }";
}

inline std::string print_model_decl(const ModelDecl& m) {
  const Model& mo = m.model;
  std::string out = "model " + m.name + " {\n";
  out += "  states: " + m.states_name + ";\n";
  out += "  functor: " + print(m.functor) + ";\n";
  out += "  atoms: " + m.atoms_name + ";\n";
  out += "  structure: ";
  for (Index s = 0; s < mo.states.size(); ++s) {
    if (s) out += ", ";
    out += mo.states.label(s) + " -> " + print_el(mo.t, mo.states, mo.structure[s]);
  }
  out += ";\n  valuation: ";
  for (Index a = 0; a < mo.atoms.size(); ++a) {
    if (a) out += ", ";
    out += mo.atoms.label(a) + " -> {";
    bool first = true;
    for (Index s = 0; s < mo.states.size(); ++s) {
      if (!mo.val[a][s]) continue;
      if (!first) out += ", ";
      first = false;
      out += mo.states.label(s);
    }
    out += "}";
  }
  out += ";\n";
  if (m.state) out += "  state: " + mo.states.label(*m.state) + ";\n";
  return out + "}";
}

inline std::string print_sequent_decl(const SequentDecl& d) {
  std::string out = "sequent " + d.name + " {\n";
  if (d.functor) out += "  functor: " + print(d.functor) + ";\n";
  if (!d.atoms_name.empty()) out += "  atoms: " + d.atoms_name + ";\n";
  out += "  lhs: " + iodetail::join(d.lhs) + ";\n";
  out += "  rhs: " + iodetail::join(d.rhs) + ";\n";
  return out + "}";
}

/// Prints the whole workspace grouped by declaration kind (posets first so
/// every later reference resolves on reparse).
inline std::string print_workspace(const Workspace& ws) {
  std::string out;
  auto add = [&out](const std::string& s) {
    if (!out.empty()) out += "\n";
    out += s + "\n";
  };
  for (const auto& [n, p] : ws.posets) add(print_poset_decl(n, p));
  for (const auto& [n, f] : ws.functors) add(print_functor_decl(n, f));
  for (const auto& r : ws.relations) add(print_relation_decl(r));
  for (const auto& m : ws.models) add(print_model_decl(m));
  for (const auto& s : ws.sequents) add(print_sequent_decl(s));
  return out;
}

/// Renders a countermodel as a self-contained workspace file: the posets the
/// functor references, the carrier and atom posets, and one model whose
/// distinguished state is the refuting witness.
inline std::string print_countermodel_file(const Countermodel& cm, const FunctorPtr& t_raw,
                                           const std::string& model_name = "countermodel") {
  std::map<std::string, FinPoset> params;
  iodetail::collect_params(t_raw, params);
  std::string out;
  for (const auto& [n, p] : params) {
    if (!iodetail::is_word(n))
      throw TypeError("print: functor parameter '" + n + "' has no printable name");
    out += print_poset_decl(n, p) + "\n";
  }
  out += print_poset_decl("cm_states", cm.model.states) + "\n";
  out += print_poset_decl("cm_atoms", cm.model.atoms) + "\n\n";
  ModelDecl decl{model_name, "cm_states", "cm_atoms", t_raw, cm.model, cm.witness};
  return out + print_model_decl(decl) + "\n";
}

// ---------------------------------------------------------------------------
// JSON mirrors (self-contained documents; see docs/formats.md)
// ---------------------------------------------------------------------------

using nlohmann::json;

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("json: ") + e.what());
  }
}

inline json poset_to_json(const FinPoset& p) {
  iodetail::check_printable(p);
  json j;
  j["elems"] = json::array();
  for (const std::string& l : p.labels()) j["elems"].push_back(l);
  j["leq"] = json::array();
  for (const auto& [i, k] : cover_pairs(p)) j["leq"].push_back({p.label(i), p.label(k)});
  return j;
}

inline FinPoset poset_from_json(const json& j) {
  try {
    std::vector<std::string> labels;
    for (const auto& l : j.at("elems")) {
      std::string s = l.get<std::string>();
      if (!iodetail::is_word(s)) throw ParseError("json: label '" + s + "' is not a word");
      labels.push_back(std::move(s));
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& pr : j.at("leq"))
      pairs.emplace_back(pr.at(0).get<std::string>(), pr.at(1).get<std::string>());
    return FinPoset::make(std::move(labels), pairs);
  } catch (const json::exception& e) {
    throw ParseError(std::string("json poset: ") + e.what());
  }
}

namespace iodetail {

inline json params_json(const FunctorPtr& f) {
  std::map<std::string, FinPoset> params;
  collect_params(f, params);
  json j = json::object();
  for (const auto& [n, p] : params) {
    if (!is_word(n)) throw TypeError("json: functor parameter '" + n + "' has no printable name");
    j[n] = poset_to_json(p);
  }
  return j;
}

inline Workspace params_workspace(const json& doc) {
  Workspace ws;
  if (doc.contains("posets"))
    for (const auto& [name, pj] : doc.at("posets").items())
      ws.posets.emplace_back(name, poset_from_json(pj));
  return ws;
}

} // namespace iodetail

inline json relation_to_json(const RelationDecl& r) {
  json j;
  j["name"] = r.name;
  j["src"] = poset_to_json(r.rel.src());
  j["tgt"] = poset_to_json(r.rel.tgt());
  j["pairs"] = json::array();
  for (Index x = 0; x < r.rel.src().size(); ++x)
    for (Index y = 0; y < r.rel.tgt().size(); ++y)
      if (r.rel.holds(y, x))
        j["pairs"].push_back({r.rel.src().label(x), r.rel.tgt().label(y)});
  return j;
}

inline RelationDecl relation_from_json(const json& j) {
  try {
    FinPoset src = poset_from_json(j.at("src"));
    FinPoset tgt = poset_from_json(j.at("tgt"));
    std::vector<std::vector<bool>> table(tgt.size(), std::vector<bool>(src.size(), false));
    for (const auto& pr : j.at("pairs")) {
      std::optional<Index> x = src.find(pr.at(0).get<std::string>());
      std::optional<Index> y = tgt.find(pr.at(1).get<std::string>());
      if (!x || !y) throw ParseError("json relation: pair references unknown element");
      for (Index y2 = 0; y2 < tgt.size(); ++y2)
        for (Index x2 = 0; x2 < src.size(); ++x2)
          if (tgt.leq(y2, *y) && src.leq(*x, x2)) table[y2][x2] = true;
    }
    return {j.value("name", std::string("r")), "src", "tgt",
            MonotoneRel(std::move(src), std::move(tgt), std::move(table))};
  } catch (const json::exception& e) {
    throw ParseError(std::string("json relation: ") + e.what());
  }
}

inline json model_to_json(const Model& m, const FunctorPtr& t_raw,
                          std::optional<Index> state = std::nullopt,
                          const std::string& name = "m") {
  json j;
  j["name"] = name;
  j["functor"] = print(t_raw);
  j["posets"] = iodetail::params_json(t_raw);
  j["states"] = poset_to_json(m.states);
  j["atoms"] = poset_to_json(m.atoms);
  j["structure"] = json::object();
  for (Index s = 0; s < m.states.size(); ++s)
    j["structure"][m.states.label(s)] = print_el(m.t, m.states, m.structure[s]);
  j["valuation"] = json::object();
  for (Index a = 0; a < m.atoms.size(); ++a) {
    json row = json::array();
    for (Index s = 0; s < m.states.size(); ++s)
      if (m.val[a][s]) row.push_back(m.states.label(s));
    j["valuation"][m.atoms.label(a)] = std::move(row);
  }
  if (state) j["state"] = m.states.label(*state);
  return j;
}

inline ModelDecl model_from_json(const json& j) {
  try {
    Workspace env = iodetail::params_workspace(j);
    FunctorPtr t_raw = parse_functor_str(env, j.at("functor").get<std::string>());
    FunctorPtr t = normalize_dual(t_raw);
    FinPoset states = poset_from_json(j.at("states"));
    FinPoset atoms = poset_from_json(j.at("atoms"));
    std::vector<Element> structure;
    for (Index s = 0; s < states.size(); ++s) {
      const json& sj = j.at("structure").at(states.label(s));
      structure.push_back(parse_element_str(t, states, sj.get<std::string>()));
    }
    std::vector<std::vector<bool>> val(atoms.size(), std::vector<bool>(states.size(), false));
    for (Index a = 0; a < atoms.size(); ++a)
      if (j.at("valuation").contains(atoms.label(a)))
        for (const auto& sl : j.at("valuation").at(atoms.label(a))) {
          std::optional<Index> s = states.find(sl.get<std::string>());
          if (!s) throw ParseError("json model: unknown state '" + sl.get<std::string>() + "'");
          val[a][*s] = true;
        }
    std::optional<Index> state;
    if (j.contains("state")) {
      state = states.find(j.at("state").get<std::string>());
      if (!state) throw ParseError("json model: unknown distinguished state");
    }
    return {j.value("name", std::string("m")), "states", "atoms", t_raw,
            Model(states, t_raw, atoms, std::move(structure), std::move(val)), state};
  } catch (const json::exception& e) {
    throw ParseError(std::string("json model: ") + e.what());
  }
}

// --- proof trees ---

inline RuleTag rule_from_name(const std::string& name) {
  for (RuleTag r : {RuleTag::Ax, RuleTag::Weaken, RuleTag::AndL, RuleTag::AndR, RuleTag::OrL,
                    RuleTag::OrR, RuleTag::DeltaL, RuleTag::NablaR, RuleTag::NablaDelta})
    if (name == rule_name(r)) return r;
  throw ParseError("unknown rule '" + name + "'");
}

inline bool rule_has_principal(RuleTag r) {
  switch (r) {
    case RuleTag::AndL:
    case RuleTag::AndR:
    case RuleTag::OrL:
    case RuleTag::OrR:
    case RuleTag::DeltaL:
    case RuleTag::NablaR: return true;
    default: return false;
  }
}

inline json proof_node_to_json(const FormulaArena& a, const ProofNode& n) {
  json j;
  json lhs = json::array(), rhs = json::array();
  for (FormulaId f : n.seq.lhs) lhs.push_back(a.print(f));
  for (FormulaId f : n.seq.rhs) rhs.push_back(a.print(f));
  j["sequent"] = {{"lhs", std::move(lhs)}, {"rhs", std::move(rhs)}};
  j["rule"] = rule_name(n.rule);
  if (rule_has_principal(n.rule)) j["principal"] = a.print(n.principal);
  j["premises"] = json::array();
  for (const ProofNode& p : n.premises) j["premises"].push_back(proof_node_to_json(a, p));
  return j;
}

/// Self-contained proof document: signature header plus the tree with every
/// formula in canonical syntax.
inline json proof_to_json(const FormulaArena& a, const ProofNode& root,
                          const FunctorPtr& t_raw) {
  json j;
  j["functor"] = print(t_raw);
  j["posets"] = iodetail::params_json(t_raw);
  j["atoms"] = poset_to_json(a.atoms());
  j["root"] = proof_node_to_json(a, root);
  return j;
}

struct ParsedProof {
  FunctorPtr functor;
  std::shared_ptr<FormulaArena> arena;
  ProofNode root;
};

namespace iodetail {
inline ProofNode proof_node_from_json(FormulaArena& a, const json& j) {
  ProofNode n;
  for (const auto& f : j.at("sequent").at("lhs"))
    n.seq.lhs.push_back(parse_formula_str(a, f.get<std::string>()));
  for (const auto& f : j.at("sequent").at("rhs"))
    n.seq.rhs.push_back(parse_formula_str(a, f.get<std::string>()));
  n.rule = rule_from_name(j.at("rule").get<std::string>());
  if (j.contains("principal"))
    n.principal = parse_formula_str(a, j.at("principal").get<std::string>());
  if (j.contains("premises"))
    for (const auto& p : j.at("premises")) n.premises.push_back(proof_node_from_json(a, p));
  return n;
}
} // namespace iodetail

inline ParsedProof proof_from_json(const json& j) {
  try {
    Workspace env = iodetail::params_workspace(j);
    FunctorPtr t_raw = parse_functor_str(env, j.at("functor").get<std::string>());
    FinPoset atoms = poset_from_json(j.at("atoms"));
    auto arena = std::make_shared<FormulaArena>(t_raw, std::move(atoms));
    ProofNode root = iodetail::proof_node_from_json(*arena, j.at("root"));
    return {std::move(t_raw), std::move(arena), std::move(root)};
  } catch (const json::exception& e) {
    throw ParseError(std::string("json proof: ") + e.what());
  }
}

inline json countermodel_to_json(const Countermodel& cm, const FunctorPtr& t_raw) {
  json j;
  j["witness"] = cm.model.states.label(cm.witness);
  j["model"] = model_to_json(cm.model, t_raw, cm.witness, "countermodel");
  return j;
}

/// Indented rule trace of a proof tree (one line per node).
inline std::string print_proof_trace(const FormulaArena& a, const ProofNode& n,
                                     std::size_t indent = 0) {
  std::string out(indent, ' ');
  out += std::string(rule_name(n.rule)) + "  " + print_seq(a, n.seq) + "\n";
  for (const ProofNode& p : n.premises) out += print_proof_trace(a, p, indent + 2);
  return out;
}

} // namespace moss
