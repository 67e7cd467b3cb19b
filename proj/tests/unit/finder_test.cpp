#include <doctest.h>

#include <algorithm>

#include "a4f/finder/evaluator.hpp"
#include "a4f/finder/finder.hpp"
#include "a4f/finder/oracle.hpp"
#include "a4f/lang/parser.hpp"

using namespace a4f;

namespace {

ResolvedModel load(std::string_view text) { return resolve(parse(text)); }

std::vector<Instance> all_instances(const ResolvedModel& m, const ResolvedCommand& cmd, FinderOptions opts = {}) {
  Enumerator en(m, cmd, opts);
  std::vector<Instance> out;
  while (auto inst = en.next()) out.push_back(std::move(*inst));
  return out;
}

std::vector<Instance> all_instances(const ResolvedModel& m, FinderOptions opts = {}) {
  return all_instances(m, m.commands.front(), opts);
}

}  // namespace

TEST_CASE("bounds: candidate atoms and variable numbering") {
  auto m = load("sig A {}\nrun {} for 3");
  Bounds b = compute_bounds(m, m.commands[0].scope);
  CHECK(b.atoms == std::vector<std::string>{"A$0", "A$1", "A$2"});
  CHECK(b.presence == std::vector<int>{1, 2, 3});
  CHECK(b.num_vars == 3);

  auto e = load("sig A {}\nsig B extends A {}\nsig C { f: set A }\nrun {} for exactly 2 but 1 C");
  Bounds be = compute_bounds(e, e.commands[0].scope);
  CHECK(be.atoms == std::vector<std::string>{"A$0", "A$1", "C$0"});
  CHECK(be.presence == std::vector<int>{0, 0, 1});
  // B membership vars follow presence; the field ranges over C x A.
  CHECK(be.membership[e.find_sig("B")] == std::vector<int>{2, 3, -1});
  CHECK(be.fields[0].tuples == std::vector<std::vector<int>>{{2, 0}, {2, 1}});
  CHECK(be.num_vars == 5);
}

TEST_CASE("bounds: scope limits") {
  auto m = load("sig A {}\nrun {} for 9");
  CHECK_THROWS_AS(compute_bounds(m, m.commands[0].scope), LangError);
  CHECK_NOTHROW(compute_bounds(m, m.commands[0].scope, 12));
  auto out = enumerate(m, m.commands[0], 0);
  CHECK(out.kind == OutcomeKind::Error);
  CHECK(out.message.find("exceeds") != std::string::npos);
}

TEST_CASE("three candidate atoms with monotone presence") {
  auto m = load("sig A {}\nrun {} for 3");
  auto insts = all_instances(m);
  REQUIRE(insts.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(insts[k].sigs["A"].size() == k);
  CHECK(insts[2].sigs["A"] == std::vector<std::string>{"A$0", "A$1"});
}

TEST_CASE("one sig forces exactly one atom") {
  auto m = load("one sig A {}\nrun {} for 3");
  auto insts = all_instances(m);
  REQUIRE(insts.size() == 1);
  CHECK(insts[0].sigs["A"] == std::vector<std::string>{"A$0"});
}

TEST_CASE("abstract sig is partitioned by its children") {
  auto m = load("abstract sig S {}\nsig C1, C2 extends S {}\nrun {} for 2");
  auto insts = all_instances(m);
  // Oracle: sizes 0, 1, 2 with 1, 2, 4 labelled child assignments.
  CHECK(insts.size() == brute_force_oracle(m, m.commands[0]).count);
  CHECK(insts.size() == 7);
  for (auto& inst : insts) {
    for (const auto& atom : inst.sigs["S"]) {
      auto in = [&](const char* sig) {
        const auto& v = inst.sigs[sig];
        return std::find(v.begin(), v.end(), atom) != v.end();
      };
      CHECK(in("C1") != in("C2"));
    }
  }
}

TEST_CASE("negated tautology translates to false") {
  auto m = load("sig A {}\nassert A1 { no none }\ncheck A1");
  FinderOptions opts;
  BudgetMeter meter(opts.budget);
  auto tr = translate(m, m.commands[0], compute_bounds(m, m.commands[0].scope), &meter);
  CHECK(tr.root.is_false());
  CHECK(enumerate(m, m.commands[0], 0).kind == OutcomeKind::Unsat);
}

TEST_CASE("iden intersected with a relation needs a self loop") {
  auto m = load("sig A { r: set A }\nrun { some iden & r } for 2");
  auto out = enumerate(m, m.commands[0], 0);
  REQUIRE(out.kind == OutcomeKind::Sat);
  const auto& r = out.instance->fields["r"];
  CHECK(std::any_of(r.begin(), r.end(), [](const Tuple& t) { return t[0] == t[1]; }));
}

TEST_CASE("closure finds every cyclic relation over two atoms") {
  // Independent count: a relation on {0,1} has a cycle iff it has a self loop
  // or both off-diagonal pairs.
  int cyclic = 0;
  for (unsigned mask = 0; mask < 16; ++mask) {
    bool loop00 = mask & 1U, e01 = mask & 2U, e10 = mask & 4U, loop11 = mask & 8U;
    cyclic += loop00 || loop11 || (e01 && e10);
  }
  REQUIRE(cyclic == 13);
  auto m = load("sig A { r: set A }\nrun { some a: A | a in a.^r } for exactly 2");
  CHECK(all_instances(m).size() == static_cast<std::size_t>(cyclic));
  CHECK(brute_force_oracle(m, m.commands[0]).count == static_cast<std::uint64_t>(cyclic));
}

TEST_CASE("solve: forced and trivial outcomes") {
  auto m = load("sig A {}\nrun {} for exactly 1");
  auto out = enumerate(m, m.commands[0], 0);
  REQUIRE(out.kind == OutcomeKind::Sat);
  CHECK(out.instance->sigs["A"] == std::vector<std::string>{"A$0"});
  CHECK(out.instance->fields.empty());
  CHECK(out.instance->universe == std::vector<std::string>{"A$0"});
  CHECK(enumerate(m, m.commands[0], 1).kind == OutcomeKind::Unsat);

  auto f = load("sig A { f: one A }\nrun {} for exactly 2");
  BudgetMeter meter({});
  auto tr = translate(f, f.commands[0], compute_bounds(f, f.commands[0].scope), &meter);
  CHECK(solve(tr, f).kind == OutcomeKind::Sat);
}

TEST_CASE("enumeration of a single-atom relation") {
  auto m = load("sig A { r: set A }\nrun {} for exactly 1");
  auto s0 = enumerate(m, m.commands[0], 0);
  auto s1 = enumerate(m, m.commands[0], 1);
  REQUIRE(s0.kind == OutcomeKind::Sat);
  REQUIRE(s1.kind == OutcomeKind::Sat);
  CHECK(s0.instance->fields["r"].empty());
  CHECK(s1.instance->fields["r"] == std::vector<Tuple>{{"A$0", "A$0"}});
  CHECK(enumerate(m, m.commands[0], 2).kind == OutcomeKind::Unsat);
}

TEST_CASE("total functions over two atoms") {
  auto m = load("sig A { f: one A }\nrun {} for exactly 2");
  auto insts = all_instances(m);
  CHECK(insts.size() == 4);
  for (std::size_t i = 0; i < insts.size(); ++i) {
    for (std::size_t j = i + 1; j < insts.size(); ++j) CHECK_FALSE(insts[i] == insts[j]);
  }
  CHECK(enumerate(m, m.commands[0], 4).kind == OutcomeKind::Unsat);
}

TEST_CASE("enumeration is deterministic") {
  auto m = load("sig A { r: set A }\nsig B { s: A -> lone B }\nrun { some r and some s } for 2");
  for (std::uint64_t skip : {0, 1, 5}) {
    auto a = enumerate(m, m.commands[0], skip);
    auto b = enumerate(m, m.commands[0], skip);
    REQUIRE(a.kind == b.kind);
    if (a.instance) CHECK(to_json(*a.instance).dump() == to_json(*b.instance).dump());
  }
}

TEST_CASE("ternary arrow multiplicities") {
  auto m = load("sig A { t: A -> one A }\nrun {} for exactly 2");
  // Each owner maps each middle atom to exactly one last atom: (2^2)^2.
  CHECK(all_instances(m).size() == 16);
  auto l = load("sig A { t: A lone -> A }\nrun {} for exactly 2");
  // Per owner, each last atom has at most one source: 3 * 3 per owner.
  CHECK(all_instances(l).size() == 81);
  CHECK(brute_force_oracle(l, l.commands[0]).count == 81);
}

TEST_CASE("check counterexamples falsify the assertion") {
  auto m = load("sig A { r: set A }\nassert Sym { r = ~r }\ncheck Sym for 2");
  auto out = enumerate(m, m.commands[0], 0);
  REQUIRE(out.kind == OutcomeKind::Sat);
  Evaluator ev(m, *out.instance);
  CHECK_FALSE(ev.holds(*m.commands[0].body));

  auto valid = load("sig A {}\ncheck { all a: A | a in A } for 3");
  auto oracle = brute_force_oracle(valid, valid.commands[0]);
  CHECK_FALSE(oracle.sat);
  CHECK(oracle.count == 0);
  CHECK(enumerate(valid, valid.commands[0], 0).kind == OutcomeKind::Unsat);
}

TEST_CASE("evaluator basics") {
  auto m = load("sig A { r: set A }\nrun { some ^r & iden } for 2");
  Instance inst;
  inst.universe = {"A$0", "A$1"};
  inst.sigs["A"] = {"A$0", "A$1"};
  inst.fields["r"] = {{"A$0", "A$1"}, {"A$1", "A$0"}};
  Evaluator ev(m, inst);
  auto iden = parse_expression("iden");
  Expr resolved_iden = *iden;
  resolved_iden.kind = ExprKind::Iden;
  resolved_iden.arity = 2;
  CHECK(ev.eval(resolved_iden) == TupleSet{{"A$0", "A$0"}, {"A$1", "A$1"}});
  Expr r;
  r.kind = ExprKind::FieldRef;
  r.index = 0;
  r.arity = 2;
  Expr closure;
  closure.kind = ExprKind::Closure;
  closure.arity = 2;
  closure.lhs = std::make_shared<Expr>(r);
  CHECK(ev.eval(closure).size() == 4);
  CHECK(ev.holds(*m.commands[0].body));
  CHECK(validate_instance(m, m.commands[0].scope, inst).empty());

  Instance bad = inst;
  bad.fields["r"].push_back({"A$0", "B$0"});
  CHECK_FALSE(validate_instance(m, m.commands[0].scope, bad).empty());
}

TEST_CASE("sat instances satisfy facts and are valid") {
  auto m = load(
      "abstract sig Node { next: lone Node }\n"
      "sig Red, Black extends Node {}\n"
      "fact { no n: Node | n in n.^next }\n"
      "run { some Red and some Black } for 3");
  auto insts = all_instances(m);
  CHECK(insts.size() == brute_force_oracle(m, m.commands[0]).count);
  for (const auto& inst : insts) {
    CHECK(validate_instance(m, m.commands[0].scope, inst).empty());
    CHECK(Evaluator(m, inst).facts_hold());
  }
}

TEST_CASE("instance JSON round trip") {
  auto m = load("sig A { r: set A }\nrun { some r } for 2");
  auto out = enumerate(m, m.commands[0], 3);
  REQUIRE(out.kind == OutcomeKind::Sat);
  auto doc = to_json(*out.instance);
  CHECK(doc.contains("sigs"));
  CHECK(doc.contains("fields"));
  CHECK(doc.contains("universe"));
  CHECK(instance_from_json(doc) == *out.instance);
  CHECK_THROWS_AS(instance_from_json(nlohmann::json::parse(R"({"sigs":{}})")), std::invalid_argument);
  CHECK_THROWS_AS(instance_from_json(nlohmann::json::parse(R"({"sigs":{"A":[1]},"fields":{},"universe":[]})")),
                  std::invalid_argument);
}

TEST_CASE("isomorphism filter") {
  // Independent count of relations on two atoms up to swapping them.
  std::set<unsigned> forms;
  for (unsigned m = 0; m < 16; ++m) {
    unsigned swapped = ((m & 1U) << 3) | ((m & 8U) >> 3) | ((m & 2U) << 1) | ((m & 4U) >> 1);
    forms.insert(std::min(m, swapped));
  }
  REQUIRE(forms.size() == 10);
  auto m = load("sig A { r: set A }\nrun {} for exactly 2");
  FinderOptions opts;
  opts.isomorphism_filter = true;
  CHECK(all_instances(m, opts).size() == forms.size());
  CHECK(all_instances(m).size() == 16);

  auto big = load("sig A {}\nrun {} for 5");
  CHECK(enumerate(big, big.commands[0], 0, opts).kind == OutcomeKind::Error);
}

TEST_CASE("budget exhaustion is reported as a limit") {
  auto m = load(
      "sig A { r: set A }\n"
      "run { all x, y: A | some z: A | x->z in r and z->y in ^r } for 6");
  FinderOptions opts;
  opts.budget.max_steps = 50;
  CHECK(enumerate(m, m.commands[0], 0, opts).kind == OutcomeKind::ResourceLimit);

  std::atomic<bool> cancel{true};
  FinderOptions cancelled;
  cancelled.budget.cancel = &cancel;
  CHECK(enumerate(m, m.commands[0], 0, cancelled).kind == OutcomeKind::ResourceLimit);
}

TEST_CASE("oracle refuses large searches") {
  auto m = load("sig A { r: set A }\nrun {} for 5");
  CHECK_THROWS_AS(brute_force_oracle(m, m.commands[0]), OracleTooLarge);
}
