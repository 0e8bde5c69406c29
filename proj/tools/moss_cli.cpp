/**
 * @file moss_cli.cpp
 * @brief Command-line front end for the moss library.
 *
 * Usage:  moss SUBCOMMAND [options] [files...]
 *
 *   lift FUNCTOR FILES...        lift a declared relation along a functor and
 *                                print both engines' results (--rel NAME)
 *   base FUNCTOR ELEMENT FILES.. least support of an element (--poset NAME)
 *   eval FORMULA FILES...        evaluate a formula at a model state
 *                                (--model NAME, --state LABEL)
 *   simulate FILES...            greatest simulation between two models
 *                                (--left/--right NAME, optional --x/--y pair)
 *   distinguish FILES...         formula separating --x from --y, if any
 *   prove FILES...               decide a sequent; print a proof trace
 *                                (--trace) or a countermodel file
 *   check-proof FILE             validate a proof document (JSON)
 *   selftest                     run the built-in regression corpus
 *
 * Workspace files are accumulated left to right; later declarations may
 * reference earlier ones (grammar in docs/formats.md).  `--json` switches
 * any subcommand to structured output.  Input guards: `--max-states N`
 * bounds declared model sizes, `--depth K` bounds input formula depth,
 * `--allow-nontame` lifts the (syntactically always satisfied) tameness
 * check on declared functors.
 *
 * Exit codes: 0 positive verdict (provable / true / similar / valid /
 * engines agree), 1 negative verdict, 2 parse error, 3 type or capacity
 * error.  Internal invariant violations are never caught.
 */

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moss/io.hpp"
#include "moss/simulation.hpp"

namespace {

using namespace moss;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw moss::ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Guards {
  std::size_t max_states = 0;  ///< 0 = unbounded
  std::size_t depth = 0;       ///< 0 = unbounded
  bool allow_nontame = false;
};

/// Loads every file into one workspace and applies the input guards.
Workspace load_files(const std::vector<std::string>& paths, const Guards& g) {
  Workspace ws;
  for (const std::string& p : paths) parse_workspace_into(ws, slurp(p), p);
  if (!g.allow_nontame)
    for (const auto& [name, f] : ws.functors)
      if (!is_tame(f))
        throw TypeError("functor '" + name + "' is not tame (--allow-nontame overrides)");
  if (g.max_states)
    for (const ModelDecl& m : ws.models)
      if (m.model.states.size() > g.max_states)
        throw CapacityError("model '" + m.name + "' has " +
                            std::to_string(m.model.states.size()) +
                            " states, --max-states is " + std::to_string(g.max_states));
  return ws;
}

void guard_depth(const FormulaArena& a, FormulaId f, const Guards& g) {
  if (g.depth && a.depth(f) > g.depth)
    throw CapacityError("formula '" + a.print(f) + "' has depth " +
                        std::to_string(a.depth(f)) + ", --depth is " +
                        std::to_string(g.depth));
}

const ModelDecl& pick_model(const Workspace& ws, const std::string& name,
                            const char* flag) {
  if (!name.empty()) {
    const ModelDecl* m = ws.find_model(name);
    if (!m) throw moss::ParseError("unknown model '" + name + "'");
    return *m;
  }
  if (ws.models.size() == 1) return ws.models.front();
  throw moss::ParseError(ws.models.empty()
                             ? std::string("no model declared")
                             : "several models declared; pick one with " + std::string(flag));
}

const RelationDecl& pick_relation(const Workspace& ws, const std::string& name) {
  if (!name.empty()) {
    const RelationDecl* r = ws.find_relation(name);
    if (!r) throw moss::ParseError("unknown relation '" + name + "'");
    return *r;
  }
  if (ws.relations.size() == 1) return ws.relations.front();
  throw moss::ParseError(ws.relations.empty()
                             ? std::string("no relation declared")
                             : std::string("several relations declared; pick one with --rel"));
}

const SequentDecl& pick_sequent(const Workspace& ws, const std::string& name) {
  if (!name.empty()) {
    const SequentDecl* s = ws.find_sequent(name);
    if (!s) throw moss::ParseError("unknown sequent '" + name + "'");
    return *s;
  }
  if (ws.sequents.size() == 1) return ws.sequents.front();
  throw moss::ParseError(ws.sequents.empty()
                             ? std::string("no sequent declared")
                             : std::string("several sequents declared; pick one with --sequent"));
}

Index state_index(const FinPoset& states, const std::string& label) {
  for (Index i = 0; i < states.size(); ++i)
    if (states.label(i) == label) return i;
  throw moss::ParseError("unknown state '" + label + "'");
}

/// Pairs (src-element, tgt-element) of a relation table, sorted by source
/// index then target index — the same order the file printer uses.
std::vector<std::pair<std::string, std::string>> table_pairs(
    const FinPoset& src, const FinPoset& tgt,
    const std::function<bool(Index, Index)>& holds /* (tgt, src) */) {
  std::vector<std::pair<std::string, std::string>> out;
  for (Index x = 0; x < src.size(); ++x)
    for (Index y = 0; y < tgt.size(); ++y)
      if (holds(y, x)) out.emplace_back(src.label(x), tgt.label(y));
  return out;
}

void print_pairs(std::ostream& os,
                 const std::vector<std::pair<std::string, std::string>>& ps) {
  for (const auto& [a, b] : ps) os << "  (" << a << ", " << b << ")\n";
}

json pairs_json(const std::vector<std::pair<std::string, std::string>>& ps) {
  json arr = json::array();
  for (const auto& [a, b] : ps) arr.push_back(json::array({a, b}));
  return arr;
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_lift(const std::vector<std::string>& files, const std::string& fexpr,
             const std::string& rel_name, bool as_json, const Guards& g) {
  Workspace ws = load_files(files, g);
  FunctorPtr t_raw = parse_functor_str(ws, fexpr);
  if (!g.allow_nontame && !is_tame(t_raw))
    throw TypeError("functor is not tame (--allow-nontame overrides)");
  FunctorPtr t = normalize_dual(t_raw);
  const RelationDecl& rd = pick_relation(ws, rel_name);

  MonotoneRel ind = lift_rel(t, rd.rel);
  EnumObj fx = apply_obj(t, rd.rel.src());
  EnumObj fy = apply_obj(t, rd.rel.tgt());
  std::vector<std::vector<bool>> gen(fy.elems.size(),
                                     std::vector<bool>(fx.elems.size(), false));
  bool agree = true;
  for (Index b = 0; b < fy.elems.size(); ++b)
    for (Index a = 0; a < fx.elems.size(); ++a) {
      gen[b][a] = lift_generic(t, rd.rel, fy.elems[b], fx.elems[a]);
      agree = agree && gen[b][a] == ind.holds(b, a);
    }

  auto ind_pairs = table_pairs(fx.poset, fy.poset,
                               [&ind](Index y, Index x) { return ind.holds(y, x); });
  auto gen_pairs = table_pairs(fx.poset, fy.poset,
                               [&gen](Index y, Index x) { return gen[y][x]; });
  if (as_json) {
    json j;
    j["functor"] = print(t_raw);
    j["relation"] = rd.name;
    j["src"] = rd.src_name;
    j["tgt"] = rd.tgt_name;
    j["inductive"] = pairs_json(ind_pairs);
    j["generic"] = pairs_json(gen_pairs);
    j["agree"] = agree;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "functor: " << print(t_raw) << "\n";
    std::cout << "relation: " << rd.name << " : " << rd.src_name << " -/-> "
              << rd.tgt_name << "\n";
    std::cout << "inductive (" << ind_pairs.size() << " pairs):\n";
    print_pairs(std::cout, ind_pairs);
    std::cout << "generic (" << gen_pairs.size() << " pairs):\n";
    print_pairs(std::cout, gen_pairs);
    std::cout << "agree: " << (agree ? "yes" : "no") << "\n";
  }
  return agree ? 0 : 1;
}

int cmd_base(const std::vector<std::string>& files, const std::string& fexpr,
             const std::string& elem, const std::string& poset_name, bool as_json,
             const Guards& g) {
  Workspace ws = load_files(files, g);
  FunctorPtr t_raw = parse_functor_str(ws, fexpr);
  if (!g.allow_nontame && !is_tame(t_raw))
    throw TypeError("functor is not tame (--allow-nontame overrides)");
  FunctorPtr t = normalize_dual(t_raw);
  const FinPoset* x = nullptr;
  if (!poset_name.empty()) {
    x = ws.find_poset(poset_name);
    if (!x) throw moss::ParseError("unknown poset '" + poset_name + "'");
  } else if (ws.posets.size() == 1) {
    x = &ws.posets.front().second;
  } else {
    throw moss::ParseError(ws.posets.empty()
                               ? std::string("no poset declared")
                               : std::string("several posets declared; pick one with --poset"));
  }
  Element e = parse_element_str(t, *x, elem);
  IndexSet b = base_of(t, e);
  std::vector<std::string> labels;
  for (Index i : b) labels.push_back(x->label(i));
  if (as_json) {
    json j;
    j["functor"] = print(t_raw);
    j["element"] = print_el(t, *x, e);
    j["base"] = labels;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "element: " << print_el(t, *x, e) << "\n";
    std::cout << "base:";
    for (const std::string& l : labels) std::cout << " " << l;
    std::cout << "\n";
  }
  return 0;
}

int cmd_eval(const std::vector<std::string>& files, const std::string& ftext,
             const std::string& model_name, const std::string& state_label,
             bool as_json, const Guards& g) {
  Workspace ws = load_files(files, g);
  const ModelDecl& md = pick_model(ws, model_name, "--model");
  FormulaArena arena(md.functor, md.model.atoms);
  FormulaId f = parse_formula_str(arena, ftext);
  guard_depth(arena, f, g);
  Index x;
  if (!state_label.empty())
    x = state_index(md.model.states, state_label);
  else if (md.state)
    x = *md.state;
  else
    throw moss::ParseError("model '" + md.name +
                           "' has no distinguished state; pass --state");
  Evaluator ev(md.model, arena);
  bool v = ev.sat(f, x);
  if (as_json) {
    json j;
    j["model"] = md.name;
    j["state"] = md.model.states.label(x);
    j["formula"] = arena.print(f);
    j["verdict"] = v;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (v ? "true" : "false") << "\n";
  }
  return v ? 0 : 1;
}

/// Resolves the two models of `simulate`/`distinguish`: explicit names, or
/// the first two declarations in file order.
std::pair<const ModelDecl*, const ModelDecl*> pick_two(const Workspace& ws,
                                                       const std::string& left,
                                                       const std::string& right) {
  if (!left.empty() || !right.empty()) {
    const ModelDecl& l = pick_model(ws, left, "--left");
    const ModelDecl& r = pick_model(ws, right, "--right");
    return {&l, &r};
  }
  if (ws.models.size() == 2) return {&ws.models[0], &ws.models[1]};
  if (ws.models.size() == 1) return {&ws.models[0], &ws.models[0]};
  throw moss::ParseError(ws.models.empty()
                             ? std::string("no model declared")
                             : std::string("more than two models declared; use --left/--right"));
}

int cmd_simulate(const std::vector<std::string>& files, const std::string& left,
                 const std::string& right, const std::string& xl, const std::string& yl,
                 bool as_json, const Guards& g) {
  Workspace ws = load_files(files, g);
  auto [ml, mr] = pick_two(ws, left, right);
  MonotoneRel sim = greatest_simulation(ml->model, mr->model);
  if (!xl.empty() || !yl.empty()) {
    if (xl.empty() || yl.empty())
      throw moss::ParseError("--x and --y must be given together");
    Index x = state_index(ml->model.states, xl);
    Index y = state_index(mr->model.states, yl);
    bool v = sim.holds(x, y);
    if (as_json) {
      json j;
      j["left"] = ml->name;
      j["right"] = mr->name;
      j["x"] = xl;
      j["y"] = yl;
      j["similar"] = v;
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << (v ? "similar" : "dissimilar") << "\n";
    }
    return v ? 0 : 1;
  }
  std::vector<std::pair<std::string, std::string>> ps;
  for (Index x = 0; x < ml->model.states.size(); ++x)
    for (Index y = 0; y < mr->model.states.size(); ++y)
      if (sim.holds(x, y))
        ps.emplace_back(ml->model.states.label(x), mr->model.states.label(y));
  if (as_json) {
    json j;
    j["left"] = ml->name;
    j["right"] = mr->name;
    j["pairs"] = pairs_json(ps);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "greatest simulation (" << ps.size() << " pairs):\n";
    print_pairs(std::cout, ps);
  }
  return 0;
}

int cmd_distinguish(const std::vector<std::string>& files, const std::string& left,
                    const std::string& right, const std::string& xl, const std::string& yl,
                    bool as_json, const Guards& g) {
  Workspace ws = load_files(files, g);
  auto [ml, mr] = pick_two(ws, left, right);
  Index x = state_index(ml->model.states, xl);
  Index y = state_index(mr->model.states, yl);
  FormulaArena arena(ml->functor, ml->model.atoms);
  std::optional<FormulaId> f = distinguishing_formula(arena, ml->model, x, mr->model, y);
  if (as_json) {
    json j;
    j["left"] = ml->name;
    j["right"] = mr->name;
    j["x"] = xl;
    j["y"] = yl;
    j["formula"] = f ? json(arena.print(*f)) : json(nullptr);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (f ? arena.print(*f) : "none") << "\n";
  }
  return f ? 0 : 1;
}

int cmd_prove(const std::vector<std::string>& files, const std::string& seq_name,
              const std::string& fallback_expr, bool trace, bool as_json,
              const Guards& g) {
  Workspace ws = load_files(files, g);
  const SequentDecl& sd = pick_sequent(ws, seq_name);
  FunctorPtr fallback =
      fallback_expr.empty() ? nullptr : parse_functor_str(ws, fallback_expr);
  BuiltSequent b = build_sequent(sd, fallback);
  if (!g.allow_nontame && !is_tame(b.functor))
    throw TypeError("functor is not tame (--allow-nontame overrides)");
  for (FormulaId f : b.lhs) guard_depth(*b.arena, f, g);
  for (FormulaId f : b.rhs) guard_depth(*b.arena, f, g);

  Prover pr(*b.arena);
  Sequent s{b.lhs, b.rhs};
  if (pr.provable(s)) {
    ProofNode t = pr.proof(s);
    if (as_json) {
      std::cout << proof_to_json(*b.arena, t, b.functor).dump(2) << "\n";
    } else {
      std::cout << "provable: " << print_seq(*b.arena, t.seq) << "\n";
      if (trace) std::cout << print_proof_trace(*b.arena, t);
    }
    return 0;
  }
  Countermodel cm = pr.countermodel(s);
  if (as_json) {
    json j;
    j["verdict"] = "refutable";
    j["sequent"] = print_seq(*b.arena, canon_seq(*b.arena, b.lhs, b.rhs));
    j["countermodel"] = countermodel_to_json(cm, b.functor);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "refutable: " << print_seq(*b.arena, canon_seq(*b.arena, b.lhs, b.rhs))
              << "\n";
    std::cout << print_countermodel_file(cm, b.functor);
  }
  return 1;
}

int cmd_check_proof(const std::string& file, bool as_json) {
  ParsedProof p = proof_from_json(parse_json_text(slurp(file)));
  std::string why;
  bool ok = check_proof(*p.arena, p.root, kElemCap, &why);
  if (as_json) {
    json j;
    j["valid"] = ok;
    if (!ok) j["why"] = why;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (ok ? std::string("valid") : "invalid: " + why) << "\n";
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// built-in regression corpus

int cmd_selftest(bool as_json) {
  struct Item {
    std::string name;
    std::function<void()> run;  ///< throws on failure
  };
  auto expect = [](bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
  };

  std::vector<Item> items;

  items.push_back({"one-step relation of the bottom-singleton cover", [&] {
    FormulaArena a(FunctorExpr::up(FunctorExpr::identity()), FinPoset::discrete({"p"}));
    Family r = r_alpha(a, parse_formula_str(a, "nabla {or()}"));
    expect(r.formulas.size() == 1, "expected a singleton");
    expect(a.print(r.formulas[0]) == "delta {or(or())}",
           "got " + a.print(r.formulas[0]));
    Family re = r_alpha(a, parse_formula_str(a, "nabla {}"));
    expect(re.formulas.size() == 1 && a.print(re.formulas[0]) == "delta {or()}",
           "empty cover unfolds wrong");
  }});

  items.push_back({"empty cover proves the bottom-singleton cover", [&] {
    FormulaArena a(FunctorExpr::up(FunctorExpr::identity()), FinPoset::discrete({"p"}));
    Sequent s{{parse_formula_str(a, "nabla {}")}, {parse_formula_str(a, "nabla {or()}")}};
    Prover pr(a);
    expect(pr.provable(s), "sequent should be provable");
    ProofNode t = pr.proof(s);
    expect(std::string(rule_name(t.rule)) == "nabla-r", "root should be nabla-r");
    expect(t.premises.size() == 1, "nabla-r should have one premise");
    expect(std::string(rule_name(t.premises[0].rule)) == "nabla-delta",
           "premise should close by nabla-delta");
    expect(t.premises[0].premises.empty(), "nabla-delta should need no premises");
    std::string why;
    expect(check_proof(a, t, kElemCap, &why), "check_proof rejected: " + why);
  }});

  items.push_back({"output-and-successor lifting decomposes clause-wise", [&] {
    FinPoset p = FinPoset::chain(2, "a");
    FinPoset x = FinPoset::chain(2, "x"), y = FinPoset::chain(2, "y");
    // relation generated by the single pair (x1, y0)
    std::vector<std::vector<bool>> t(2, std::vector<bool>(2, false));
    for (Index iy = 0; iy < 2; ++iy)
      for (Index ix = 0; ix < 2; ++ix)
        t[iy][ix] = y.leq(iy, 0) && x.leq(1, ix);
    MonotoneRel r(x, y, t);
    FunctorPtr f = FunctorExpr::prod(FunctorExpr::constant(p, "A"), FunctorExpr::identity());
    MonotoneRel l = lift_rel(f, r);
    EnumObj fx = apply_obj(f, x), fy = apply_obj(f, y);
    for (Index b = 0; b < fy.elems.size(); ++b)
      for (Index a = 0; a < fx.elems.size(); ++a) {
        bool want = p.leq(fy.elems[b].kids[0].pt, fx.elems[a].kids[0].pt) &&
                    r.holds(fy.elems[b].kids[1].pt, fx.elems[a].kids[1].pt);
        expect(l.holds(b, a) == want, "clause mismatch at (" + fy.poset.label(b) +
                                          ", " + fx.poset.label(a) + ")");
      }
  }});

  items.push_back({"base of constants, points, and generated lowersets", [&] {
    FinPoset x = FinPoset::discrete({"u", "v"});
    FinPoset p = FinPoset::chain(2, "a");
    FunctorPtr fc = FunctorExpr::constant(p, "A");
    expect(base_of(fc, Element::point(1)).empty(), "constants have empty base");
    expect(base_bruteforce(fc, x, Element::point(1)).empty(), "brute force disagrees");
    FunctorPtr fi = FunctorExpr::identity();
    IndexSet bi = base_of(fi, Element::point(0));
    expect(bi == IndexSet{0}, "point base should be the point");
    expect(base_bruteforce(fi, x, Element::point(0)) == bi, "brute force disagrees");
    FunctorPtr fl = FunctorExpr::low(FunctorExpr::identity());
    Element two = Element::lowset({Element::point(0), Element::point(1)});
    IndexSet bl = base_of(fl, canon_el(fl, x, two));
    expect(bl == (IndexSet{0, 1}), "lowerset base should be its generators");
    expect(base_bruteforce(fl, x, canon_el(fl, x, two)) == bl, "brute force disagrees");
  }});

  items.push_back({"empty conjunction holds everywhere", [&] {
    FinPoset one = FinPoset::chain(1, "w");
    FunctorPtr t = FunctorExpr::low(FunctorExpr::identity());
    Model m(one, t, FinPoset::discrete({"p"}), {Element::lowset({})}, {{false}});
    FormulaArena a(t, m.atoms);
    Evaluator ev(m, a);
    expect(ev.sat(parse_formula_str(a, "and()"), 0), "empty conjunction must hold");
  }});

  bool all = true;
  json report = json::array();
  for (const Item& it : items) {
    std::string err;
    try {
      it.run();
    } catch (const std::exception& e) {
      err = e.what();
      all = false;
    }
    if (as_json) {
      json j;
      j["name"] = it.name;
      j["ok"] = err.empty();
      if (!err.empty()) j["error"] = err;
      report.push_back(j);
    } else {
      std::cout << (err.empty() ? "ok   " : "FAIL ") << it.name
                << (err.empty() ? "" : ": " + err) << "\n";
    }
  }
  if (as_json) {
    json j;
    j["items"] = report;
    j["ok"] = all;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (all ? "selftest: all passed" : "selftest: FAILURES") << "\n";
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moss — ordered coalgebraic models, cover modalities, and proof search"};
  app.require_subcommand(1);

  Guards guards;
  app.add_option("--max-states", guards.max_states,
                 "reject input models with more states than this");
  app.add_option("--depth", guards.depth, "reject input formulas deeper than this");
  app.add_flag("--allow-nontame", guards.allow_nontame,
               "skip the tameness check on declared functors");

  bool as_json = false, trace = false;
  std::vector<std::string> files;
  std::string fexpr, elem, ftext, rel_name, poset_name, model_name, state_label;
  std::string left, right, xl, yl, seq_name, fallback_expr, proof_file;

  auto add_common = [&](CLI::App* sub) {
    sub->fallthrough();
    sub->add_flag("--json", as_json, "structured output");
    return sub;
  };

  CLI::App* lift = add_common(app.add_subcommand("lift", "lift a relation along a functor"));
  lift->add_option("functor", fexpr, "functor expression")->required();
  lift->add_option("files", files, "workspace files")->required();
  lift->add_option("--rel", rel_name, "relation to lift (default: the only one)");

  CLI::App* base = add_common(app.add_subcommand("base", "least support of an element"));
  base->add_option("functor", fexpr, "functor expression")->required();
  base->add_option("element", elem, "element over the carrier poset")->required();
  base->add_option("files", files, "workspace files")->required();
  base->add_option("--poset", poset_name, "carrier poset (default: the only one)");

  CLI::App* eval = add_common(app.add_subcommand("eval", "evaluate a formula at a state"));
  eval->add_option("formula", ftext, "formula text")->required();
  eval->add_option("files", files, "workspace files")->required();
  eval->add_option("--model", model_name, "model to use (default: the only one)");
  eval->add_option("--state", state_label, "state label (default: the model's state)");

  CLI::App* sim = add_common(app.add_subcommand("simulate", "greatest simulation"));
  sim->add_option("files", files, "workspace files")->required();
  sim->add_option("--left", left, "left model");
  sim->add_option("--right", right, "right model");
  sim->add_option("--x", xl, "left state: verdict for the pair (--x, --y)");
  sim->add_option("--y", yl, "right state");

  CLI::App* dis = add_common(app.add_subcommand("distinguish", "separating formula"));
  dis->add_option("files", files, "workspace files")->required();
  dis->add_option("--left", left, "left model");
  dis->add_option("--right", right, "right model");
  dis->add_option("--x", xl, "left state")->required();
  dis->add_option("--y", yl, "right state")->required();

  CLI::App* prove = add_common(app.add_subcommand("prove", "decide a sequent"));
  prove->add_option("files", files, "workspace files")->required();
  prove->add_option("--sequent", seq_name, "sequent to decide (default: the only one)");
  prove->add_option("--functor", fallback_expr,
                    "fallback functor for sequents that omit one");
  prove->add_flag("--trace", trace, "print the proof tree rule trace");

  CLI::App* chk = add_common(app.add_subcommand("check-proof", "validate a proof document"));
  chk->add_option("file", proof_file, "proof document (JSON)")->required();

  CLI::App* st = add_common(app.add_subcommand("selftest", "run the regression corpus"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (lift->parsed()) return cmd_lift(files, fexpr, rel_name, as_json, guards);
    if (base->parsed()) return cmd_base(files, fexpr, elem, poset_name, as_json, guards);
    if (eval->parsed()) return cmd_eval(files, ftext, model_name, state_label, as_json, guards);
    if (sim->parsed()) return cmd_simulate(files, left, right, xl, yl, as_json, guards);
    if (dis->parsed()) return cmd_distinguish(files, left, right, xl, yl, as_json, guards);
    if (prove->parsed()) return cmd_prove(files, seq_name, fallback_expr, trace, as_json, guards);
    if (chk->parsed()) return cmd_check_proof(proof_file, as_json);
    if (st->parsed()) return cmd_selftest(as_json);
  } catch (const moss::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const moss::TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return 3;
  } catch (const moss::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
