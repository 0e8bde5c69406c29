#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

#include "moss/calculus.hpp"

#include <memory>
#include <random>

using namespace moss;
using namespace mosstest;

namespace {

/// Modal formula whose payload is the plain set of the given formulas, for
/// signatures whose dual shape is a lowerset or upperset functor.
FormulaId modal_set(FormulaArena& a, FormKind kind, const std::vector<FormulaId>& fs) {
  std::vector<Element> pts;
  for (Index i = 0; i < fs.size(); ++i) pts.push_back(Element::point(i));
  Element pay = a.td()->kind == FKind::Up ? Element::upset(std::move(pts))
                                          : Element::lowset(std::move(pts));
  return kind == FormKind::Nabla ? a.nabla(std::move(pay), fs) : a.delta(std::move(pay), fs);
}

std::vector<FinPoset> small_states() {
  return {FinPoset::chain(1), FinPoset::chain(2), FinPoset::discrete({"a", "b"})};
}

/// True when some state of some model over a small state poset satisfies the
/// whole left side but no right formula.
bool small_refutation(FormulaArena& a, const Sequent& s) {
  for (const FinPoset& st : small_states()) {
    bool survived = for_each_model(a.t(), a.atoms(), st, [&](const Model& m) {
      Evaluator ev(m, a);
      for (Index x = 0; x < m.states.size(); ++x) {
        bool refutes = true;
        for (FormulaId f : s.lhs) refutes = refutes && ev.sat(f, x);
        for (FormulaId f : s.rhs) refutes = refutes && !ev.sat(f, x);
        if (refutes) return false;
      }
      return true;
    });
    if (!survived) return true;
  }
  return false;
}

void require_refutes(FormulaArena& a, const Countermodel& cm, const Sequent& s) {
  Evaluator ev(cm.model, a);
  for (FormulaId f : s.lhs) REQUIRE(ev.sat(f, cm.witness));
  for (FormulaId f : s.rhs) REQUIRE_FALSE(ev.sat(f, cm.witness));
}

void require_measure_decreasing(const FormulaArena& a, const ProofNode& n) {
  Measure m = seq_measure(a, n.seq);
  for (const ProofNode& k : n.premises) {
    if (n.rule == RuleTag::Weaken)
      REQUIRE(seq_measure(a, k.seq) <= m);
    else
      REQUIRE(seq_measure(a, k.seq) < m);
    require_measure_decreasing(a, k);
  }
}

/// Runs the full verdict discipline on one sequent: provable sequents must
/// have no small refutation and carry a checkable proof tree; refutable ones
/// must yield a countermodel that refutes them under a fresh evaluator.
void require_verdict_discipline(FormulaArena& a, Prover& pr, const Sequent& s) {
  if (pr.provable(s)) {
    REQUIRE_FALSE(small_refutation(a, s));
    try {
      ProofNode t = pr.proof(s);
      std::string why;
      INFO(why);
      REQUIRE(check_proof(a, t, kElemCap, &why));
      require_measure_decreasing(a, t);
    } catch (const CapacityError&) {
      // materialising every redistribution can overflow the carrier cap even
      // though the verdict itself is computed structurally
    }
  } else {
    require_refutes(a, pr.countermodel(s), s);
  }
}

} // namespace

TEST_CASE("unfolding families over the upperset signature") {
  FormulaArena a(FunctorExpr::up(FunctorExpr::identity()), FinPoset::discrete({"p"}));
  FormulaId bot = a.bottom();

  // nabla {bot}: the only right-unfolding element is the lowerset generated
  // by the support, and its formula is delta of the singleton disjunction
  FormulaId nb = modal_set(a, FormKind::Nabla, {bot});
  Family r = r_alpha(a, nb);
  REQUIRE(r.members.size() == 1);
  REQUIRE(r.formulas.size() == 1);
  CHECK(a.print(r.formulas[0]) == "delta {or(or())}");

  // nabla {}: unfolds to delta of the empty disjunction, i.e. "some successor
  // satisfies bottom-or-nothing" collapses to delta {bot}
  FormulaId ne = modal_set(a, FormKind::Nabla, {});
  Family re = r_alpha(a, ne);
  REQUIRE(re.formulas.size() == 1);
  CHECK(a.print(re.formulas[0]) == "delta {or()}");
  CHECK(re.formulas[0] == modal_set(a, FormKind::Delta, {bot}));

  // delta {bot}: two left-unfolding elements (the empty lowerset and the one
  // generated by the upperset containing bot)
  FormulaId db = modal_set(a, FormKind::Delta, {bot});
  Family l = l_beta(a, db);
  CHECK(l.members.size() == 2);
  REQUIRE(l.members.size() == l.formulas.size());

  CHECK_THROWS_AS(r_alpha(a, db), TypeError);
  CHECK_THROWS_AS(l_beta(a, nb), TypeError);
}

TEST_CASE("the empty cover entails a bottom successor") {
  FormulaArena a(FunctorExpr::up(FunctorExpr::identity()), FinPoset::discrete({"p"}));
  FormulaId ne = modal_set(a, FormKind::Nabla, {});
  FormulaId db = modal_set(a, FormKind::Delta, {a.bottom()});
  Sequent s{{ne}, {db}};

  // no redistribution exists, so the modal rule closes with zero premises
  NdContext ctx = nd_context(a, {ne}, {db});
  CHECK(redistributions(a, ctx).empty());

  Prover pr(a);
  REQUIRE(pr.provable(s));
  ProofNode t = pr.proof(s);
  CHECK(t.rule == RuleTag::NablaDelta);
  CHECK(t.premises.empty());
  std::string why;
  INFO(why);
  CHECK(check_proof(a, t, kElemCap, &why));
  CHECK_THROWS_AS(pr.countermodel(s), TypeError);

  // the entailment is semantically valid over every small model
  for (const FinPoset& st : small_states())
    for_each_model(a.t(), a.atoms(), st, [&](const Model& m) {
      Evaluator ev(m, a);
      for (Index x = 0; x < m.states.size(); ++x)
        if (ev.sat(ne, x)) CHECK(ev.sat(db, x));
      return true;
    });
}

TEST_CASE("unfolding families are semantically exact") {
  for (bool up : {false, true}) {
    FunctorPtr t = up ? FunctorExpr::up(FunctorExpr::identity())
                      : FunctorExpr::low(FunctorExpr::identity());
    FormulaArena a(t, FinPoset::discrete({"p"}));
    FormulaId p = a.atom("p"), bot = a.bottom();
    std::vector<std::vector<FormulaId>> supports = {{}, {p}, {bot}, {p, bot}};

    std::vector<std::pair<FormulaId, Family>> nablas, deltas;
    for (const auto& sup : supports) {
      FormulaId nf = modal_set(a, FormKind::Nabla, sup);
      nablas.emplace_back(nf, r_alpha(a, nf));
      FormulaId df = modal_set(a, FormKind::Delta, sup);
      deltas.emplace_back(df, l_beta(a, df));
    }

    // a nabla is equivalent to the conjunction of its delta unfoldings, and a
    // delta to the disjunction of its nabla unfoldings, in every model
    for (const FinPoset& st : {FinPoset::chain(2), FinPoset::discrete({"a", "b"})})
      for_each_model(a.t(), a.atoms(), st, [&](const Model& m) {
        Evaluator ev(m, a);
        for (Index x = 0; x < m.states.size(); ++x) {
          for (const auto& [nf, fam] : nablas) {
            bool all = true;
            for (FormulaId g : fam.formulas) all = all && ev.sat(g, x);
            REQUIRE(ev.sat(nf, x) == all);
          }
          for (const auto& [df, fam] : deltas) {
            bool some = false;
            for (FormulaId g : fam.formulas) some = some || ev.sat(g, x);
            REQUIRE(ev.sat(df, x) == some);
          }
        }
        return true;
      });
  }
}

TEST_CASE("prover verdicts on curated sequents") {
  FormulaArena a(FunctorExpr::low(FunctorExpr::identity()), FinPoset::discrete({"p", "q"}));
  FormulaId p = a.atom("p"), q = a.atom("q");
  FormulaId top = a.top(), bot = a.bottom();
  Prover pr(a);

  SECTION("propositional verdicts") {
    CHECK(pr.provable({{p}, {p}}));
    CHECK_FALSE(pr.provable({{p}, {q}}));
    CHECK(pr.provable({{a.conj({p, q})}, {p}}));
    CHECK(pr.provable({{p}, {a.disj({p, q})}}));
    CHECK_FALSE(pr.provable({{top}, {bot}}));
    CHECK(pr.provable({{bot}, {}}));
    CHECK(pr.provable({{}, {top}}));
    CHECK_FALSE(pr.provable({{}, {}}));
    CHECK_FALSE(pr.provable({{a.disj({p, q})}, {a.conj({p, q})}}));
    CHECK(pr.provable({{a.conj({p, q})}, {a.disj({p, q})}}));
  }

  SECTION("atomic countermodels live on one state") {
    Countermodel cm = pr.countermodel({{p}, {q}});
    CHECK(cm.model.states.size() == 1);
    require_refutes(a, cm, {{p}, {q}});
    require_refutes(a, pr.countermodel({{top}, {bot}}), {{top}, {bot}});
  }

  SECTION("modal verdicts agree with the lowerset semantics") {
    FormulaId np = modal_set(a, FormKind::Nabla, {p});
    FormulaId dp = modal_set(a, FormKind::Delta, {p});
    FormulaId nempty = modal_set(a, FormKind::Nabla, {});
    FormulaId dempty = modal_set(a, FormKind::Delta, {});
    FormulaId dtop = modal_set(a, FormKind::Delta, {top});

    // over downward-closed successor sets the cover and its dual coincide on
    // singletons, the empty cover is trivially true, and the empty delta
    // asserts a successor exists
    CHECK(pr.provable({{np}, {dp}}));
    CHECK(pr.provable({{dp}, {np}}));
    CHECK(pr.provable({{}, {nempty}}));
    CHECK(pr.provable({{np}, {dtop}}));
    CHECK(pr.provable({{dempty}, {dtop}}));
    CHECK(pr.provable({{dtop}, {dempty}}));
    CHECK_FALSE(pr.provable({{dempty}, {}}));
    CHECK_FALSE(pr.provable({{dtop}, {dp}}));
    CHECK_FALSE(pr.provable({{np}, {modal_set(a, FormKind::Delta, {q})}}));

    // a refutable modal sequent yields a genuine model with a root state
    Sequent s{{dtop}, {dp}};
    Countermodel cm = pr.countermodel(s);
    require_refutes(a, cm, s);
    CHECK(cm.model.states.size() >= 2);

    for (const Sequent& s2 : {Sequent{{np}, {dp}}, Sequent{{dp}, {np}}, Sequent{{dtop}, {dp}},
                              Sequent{{np}, {dempty}}, Sequent{{dempty}, {np}}})
      require_verdict_discipline(a, pr, s2);
  }

  SECTION("the modal rule matches redistribution enumeration") {
    FormulaId np = modal_set(a, FormKind::Nabla, {p});
    FormulaId npq = modal_set(a, FormKind::Nabla, {p, q});
    FormulaId dp = modal_set(a, FormKind::Delta, {p});
    FormulaId dq = modal_set(a, FormKind::Delta, {q});
    std::vector<std::pair<std::vector<FormulaId>, std::vector<FormulaId>>> cases = {
        {{np}, {dp}}, {{npq}, {dp, dq}}, {{np, npq}, {dp}}, {{}, {dq}}, {{npq}, {}}};
    for (const auto& [ns, ds] : cases) {
      NdContext ctx = nd_context(a, ns, ds);
      bool enumerated = true;
      for (const Element& rd : redistributions(a, ctx)) {
        bool has_provable = false;
        for (Index z : base_of(a.td(), rd))
          has_provable = has_provable || pr.provable(nd_premise(a, ctx, z));
        enumerated = enumerated && has_provable;
      }
      std::vector<FormulaId> lhs = ns, rhs = ds;
      CHECK(pr.provable({lhs, rhs}) == enumerated);
    }
  }

  SECTION("proof trees for provable sequents check out") {
    FormulaId np = modal_set(a, FormKind::Nabla, {p});
    FormulaId dp = modal_set(a, FormKind::Delta, {p});
    for (const Sequent& s :
         {Sequent{{p}, {p}}, Sequent{{a.conj({p, q})}, {p}}, Sequent{{p}, {a.disj({p, q})}},
          Sequent{{bot}, {}}, Sequent{{}, {top}}, Sequent{{np}, {dp}}, Sequent{{dp}, {np}},
          Sequent{{p, np}, {dp, q}}}) {
      ProofNode t = pr.proof(s);
      std::string why;
      INFO(why);
      REQUIRE(check_proof(a, t, kElemCap, &why));
      require_measure_decreasing(a, t);
    }
    CHECK_THROWS_AS(pr.proof({{p}, {q}}), TypeError);
  }
}

TEST_CASE("prover discipline on random sequents") {
  struct Sig {
    FunctorPtr t;
    const char* name;
  };
  std::vector<Sig> sigs = {
      {FunctorExpr::low(FunctorExpr::identity()), "lowersets"},
      {FunctorExpr::up(FunctorExpr::identity()), "uppersets"},
      {FunctorExpr::prod(FunctorExpr::constant(FinPoset::chain(2, "n"), "N"),
                         FunctorExpr::identity()),
       "streams"},
  };
  for (const Sig& sig : sigs) {
    DYNAMIC_SECTION("signature " << sig.name) {
      FormulaArena a(sig.t, FinPoset::discrete({"p", "q"}));
      FormulaId p = a.atom("p"), q = a.atom("q");
      std::vector<FormulaId> pool = {p, q, a.top(), a.bottom(), a.conj({p, q}), a.disj({p, q})};
      if (sig.t->kind == FKind::Prod) {
        auto stream = [&a](FormKind kind, Index out, FormulaId f) {
          Element pay = Element::pair(Element::point(out), Element::point(0));
          return kind == FormKind::Nabla ? a.nabla(pay, {f}) : a.delta(pay, {f});
        };
        FormulaId inner = stream(FormKind::Nabla, 0, p);
        pool.insert(pool.end(),
                    {inner, stream(FormKind::Nabla, 1, q), stream(FormKind::Delta, 1, p),
                     stream(FormKind::Delta, 0, a.top()), stream(FormKind::Nabla, 1, inner)});
      } else {
        FormulaId inner = modal_set(a, FormKind::Nabla, {p});
        pool.insert(pool.end(),
                    {inner, modal_set(a, FormKind::Nabla, {}),
                     modal_set(a, FormKind::Nabla, {p, q}), modal_set(a, FormKind::Delta, {}),
                     modal_set(a, FormKind::Delta, {q}),
                     modal_set(a, FormKind::Delta, {inner})});
      }

      Prover pr(a);
      std::mt19937 rng(20260814);
      for (int round = 0; round < 60; ++round) {
        std::vector<FormulaId> lhs, rhs;
        for (Index i = rng() % 3; i > 0; --i) lhs.push_back(pool[rng() % pool.size()]);
        for (Index i = rng() % 3; i > 0; --i) rhs.push_back(pool[rng() % pool.size()]);
        Sequent s{lhs, rhs};
        INFO("sequent: " << print_seq(a, canon_seq(a, lhs, rhs)));
        require_verdict_discipline(a, pr, s);
      }
      CHECK(pr.decided() > 60);
    }
  }
}

TEST_CASE("constrained search agrees with enumeration") {
  FinPoset x = vee();
  for (const FunctorPtr& f : functor_catalogue()) {
    std::vector<Element> fixed_pool;
    try {
      fixed_pool = apply_obj(f, x).elems;
    } catch (const CapacityError&) {
      continue;
    }
    if (fixed_pool.empty()) continue;
    for (const FinPoset& c : {FinPoset::chain(2), FinPoset::discrete({"a", "b"})}) {
      std::vector<Element> candidates;
      try {
        candidates = apply_obj(f, c).elems;
      } catch (const CapacityError&) {
        continue;
      }
      for (unsigned seed = 1; seed <= 6; ++seed) {
        MonotoneRel rb = random_rel(x, c, seed);        // x -|-> c, holds(c, x)
        MonotoneRel ra = random_rel(c, x, seed + 100);  // c -|-> x, holds(x, c)
        auto relb = [&rb](Index cc, Index xx) { return rb.holds(cc, xx); };
        auto rela = [&ra](Index xx, Index cc) { return ra.holds(xx, cc); };
        std::mt19937 rng(seed * 977);
        std::vector<LiftConstraint> bs, as;
        for (Index i = rng() % 3; i > 0; --i)
          bs.push_back({&fixed_pool[rng() % fixed_pool.size()], relb});
        for (Index i = rng() % 3; i > 0; --i)
          as.push_back({&fixed_pool[rng() % fixed_pool.size()], rela});

        auto satisfies = [&](const Element& e) {
          bool ok = true;
          for (const LiftConstraint& b : bs) ok = ok && lift_holds(f, b.rel, e, *b.fixed);
          for (const LiftConstraint& aa : as) ok = ok && lift_holds(f, aa.rel, *aa.fixed, e);
          return ok;
        };
        bool brute = false;
        for (const Element& e : candidates) brute = brute || satisfies(e);

        std::optional<Element> got = exists_elem(f, c, bs, as);
        REQUIRE(got.has_value() == brute);
        if (got) CHECK(satisfies(*got));
      }
    }
  }
}

TEST_CASE("constrained search handles forced and impossible generator sets") {
  FunctorPtr f = FunctorExpr::low(FunctorExpr::identity());
  FinPoset c2 = FinPoset::chain(2);
  auto leq_rel = [&c2](Index i, Index j) { return c2.leq(i, j); };
  Element empty = Element::lowset({});
  Element d0 = Element::lowset({Element::point(0)});
  Element d1 = Element::lowset({Element::point(1)});

  // a covering demand cannot be met when an eligibility constraint is empty
  CHECK_FALSE(exists_elem(f, c2, {{&empty, leq_rel}}, {{&d1, leq_rel}}).has_value());
  // with no demands the empty lowerset always works
  auto e = exists_elem(f, c2, {{&empty, leq_rel}}, {});
  REQUIRE(e.has_value());
  CHECK(e->kids.empty());
  // demand below an upper bound picks a generator between them
  auto w = exists_elem(f, c2, {{&d1, leq_rel}}, {{&d0, leq_rel}});
  REQUIRE(w.has_value());
  CHECK(lift_holds(f, leq_rel, *w, d1));
  CHECK(lift_holds(f, leq_rel, d0, *w));
}

TEST_CASE("proof checker rejects corrupted trees") {
  FormulaArena a(FunctorExpr::low(FunctorExpr::identity()), FinPoset::discrete({"p", "q"}));
  FormulaId p = a.atom("p"), q = a.atom("q");
  Prover pr(a);
  std::string why;

  ProofNode t1 = pr.proof({{a.conj({p, q})}, {p}});
  REQUIRE(check_proof(a, t1, kElemCap, &why));

  ProofNode bad_rule = t1;
  bad_rule.rule = RuleTag::OrL;
  CHECK_FALSE(check_proof(a, bad_rule, kElemCap, &why));
  CHECK_FALSE(why.empty());

  ProofNode bad_missing = t1;
  REQUIRE_FALSE(bad_missing.premises.empty());
  bad_missing.premises.clear();
  CHECK_FALSE(check_proof(a, bad_missing, kElemCap, &why));

  ProofNode bad_seq = t1;
  bad_seq.premises[0].seq = canon_seq(a, {q}, bad_seq.premises[0].seq.rhs);
  CHECK_FALSE(check_proof(a, bad_seq, kElemCap, &why));

  // modal node: dropping one premise per redistribution must be caught
  FormulaId np = modal_set(a, FormKind::Nabla, {p});
  FormulaId dp = modal_set(a, FormKind::Delta, {p});
  ProofNode t2 = pr.proof({{np}, {dp}});
  REQUIRE(check_proof(a, t2, kElemCap, &why));
  ProofNode* modal = &t2;
  while (modal->rule != RuleTag::NablaDelta && !modal->premises.empty())
    modal = &modal->premises[0];
  if (modal->rule == RuleTag::NablaDelta && !modal->premises.empty()) {
    modal->premises.pop_back();
    CHECK_FALSE(check_proof(a, t2, kElemCap, &why));
    CHECK_FALSE(why.empty());
  }

  // a non-canonical sequent is rejected outright
  ProofNode raw{Sequent{{p, a.conj({p, q})}, {p}}, RuleTag::Ax, 0, {}};
  CHECK_FALSE(check_proof(a, raw, kElemCap, &why));
}
