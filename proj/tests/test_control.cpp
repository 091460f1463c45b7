#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "csm/control.hpp"
#include "gen.hpp"

using namespace csm;

namespace {

std::shared_ptr<const Ring> Z = Ring::integers();

Label at(long v) { return gen::int_label(v); }

SpacePtr line() { return ControlSpace::metric(1, ControlSpace::Metric::Max); }

}  // namespace

TEST_CASE("condition algebra, metric") {
  auto sp = line();
  auto e2 = ControlCondition::metric_bound(sp, Rational(2));
  auto e3 = ControlCondition::metric_bound(sp, Rational(3));
  CHECK(compose_conditions(e2, e3).alpha == 5);
  CHECK(union_conditions(e2, e3).alpha == 3);
  auto diag = ControlCondition::diagonal(sp);
  CHECK(compose_conditions(diag, e3).alpha == 3);

  // triangle-inequality oracle on a 10-point grid: related under the
  // composite whenever a middle point exists
  std::vector<Label> grid;
  for (long i = 0; i < 10; ++i) grid.push_back(at(i));
  auto comp = compose_conditions(e2, e3);
  for (const Label& x : grid)
    for (const Label& z : grid) {
      bool witness = false;
      for (const Label& y : grid)
        witness |= (e2.related(y, x) && e3.related(z, y));
      if (witness) CHECK(comp.related(z, x));
    }
}

TEST_CASE("condition algebra, finite") {
  auto sp = ControlSpace::finite({"p", "q", "r", "s"});
  auto e1 = ControlCondition::finite_pairs(sp, {{0, 1}});
  auto e2 = ControlCondition::finite_pairs(sp, {{1, 2}});
  CHECK_FALSE(e1.validate().has_value());
  auto comp = compose_conditions(e1, e2);
  // exact relational composition is contained in the output
  int n = 4;
  for (int z = 0; z < n; ++z)
    for (int x = 0; x < n; ++x) {
      bool rc = false;
      for (int y = 0; y < n; ++y) rc |= (e1.rel[y][x] && e2.rel[z][y]);
      if (rc) CHECK(comp.rel[z][x]);
    }
  CHECK_FALSE(comp.validate().has_value());  // stays symmetric reflexive
  CHECK(comp.rel[0][2]);                     // p ~ r through q

  auto u = union_conditions(e1, e2);
  CHECK(u.rel[0][1]);
  CHECK(u.rel[1][2]);
  CHECK_FALSE(u.rel[0][2]);
}

TEST_CASE("thickening") {
  auto sp = line();
  std::vector<Label> zpoints;
  for (long i = -5; i <= 5; ++i) zpoints.push_back(at(i));
  auto diag = ControlCondition::diagonal(sp);
  auto u = thicken({at(0)}, diag, zpoints);
  REQUIRE(u.size() == 1);
  CHECK(u[0] == at(0));

  auto e1 = ControlCondition::metric_bound(sp, Rational(1));
  auto t1 = thicken({at(0)}, e1, zpoints);
  CHECK(t1.size() == 3);  // -1, 0, 1

  // thicken(thicken(U,E),E') subseteq thicken(U, compose(E,E'))
  auto e2 = ControlCondition::metric_bound(sp, Rational(2));
  auto lhs = thicken(thicken({at(0)}, e1, zpoints), e2, zpoints);
  auto rhs = thicken({at(0)}, compose_conditions(e1, e2), zpoints);
  for (const Label& l : lhs)
    CHECK(std::find(rhs.begin(), rhs.end(), l) != rhs.end());
}

TEST_CASE("module certificates") {
  auto sp = line();
  // all labels equal -> certified at 0
  auto m = std::make_shared<CellularModule>(Z);
  m->add_cell("a", 0, {}, at(1));
  m->add_cell("b", 0, {}, at(1));
  auto c0 = check_module(*m, ControlCondition::diagonal(sp));
  CHECK(c0.ok);
  CHECK(c0.minimal == 0);

  // 1-cell labeled 0 attached to 0-cells labeled +-3 -> minimal alpha 3
  auto m2 = std::make_shared<CellularModule>(Z);
  m2->add_cell("p", 0, {}, at(-3));
  m2->add_cell("q", 0, {}, at(3));
  Element dp{0, {Term{RingValue::one(Z), 0, {}}}};
  Element dq{0, {Term{RingValue::one(Z), 1, {}}}};
  m2->add_cell("e", 1, {dq, dp}, at(0));
  CHECK(minimal_certificate_module(*m2) == 3);
  CHECK_FALSE(check_module(*m2, ControlCondition::metric_bound(sp, Rational(2))).ok);
  auto cert = check_module(*m2, ControlCondition::metric_bound(sp, Rational(3)));
  CHECK(cert.ok);

  // M[Delta^1] certified at the same bound as M
  auto d1 = std::make_shared<FinSimplicialSet>(standard_simplex(1));
  TensorModule t = tensor_sset(m2, d1);
  CHECK(check_module(*t.mod, ControlCondition::metric_bound(sp, Rational(3))).ok);
  CHECK(minimal_certificate_module(*t.mod) == minimal_certificate_module(*m2));
}

TEST_CASE("map certificates") {
  auto sp = line();
  // identity on an E-controlled module is E-controlled
  std::mt19937 rng(42);
  gen::ModuleSpec spec;
  auto m = gen::random_module(Z, spec, rng);
  Rational alpha = minimal_certificate_module(*m);
  auto e = ControlCondition::metric_bound(sp, alpha);
  CHECK(check_module(*m, e).ok);
  CHECK(check_map(identity_map(m), e).ok);

  // zero map is diagonal-controlled
  CHECK(check_map(zero_map(m, m), ControlCondition::diagonal(sp)).ok);

  // shift-by-2 on a chain of 0-cells
  auto chain = std::make_shared<CellularModule>(Z);
  for (long i = 0; i < 5; ++i) chain->add_cell("c" + std::to_string(i), 0, {}, at(i));
  std::vector<Element> im;
  for (long i = 0; i < 5; ++i) {
    int tgt = (int)std::min(4l, i + 2);
    im.push_back(Element{0, {Term{RingValue::one(Z), tgt, {}}}});
  }
  auto shift = map_from_cells(chain, chain, im);
  CHECK(minimal_certificate_map(shift) == 2);
  CHECK_FALSE(check_map(shift, ControlCondition::metric_bound(sp, Rational(1))).ok);
  CHECK(check_map(shift, ControlCondition::metric_bound(sp, Rational(2))).ok);
}

TEST_CASE("parallel kernels match the serial reference") {
  std::mt19937 rng(4242);
  auto sp = line();
  for (int trial = 0; trial < 20; ++trial) {
    gen::ModuleSpec spec;
    spec.n0 = 4;
    spec.n1 = 3;
    spec.n2 = 1;
    auto m = gen::random_module(Z, spec, rng);
    auto n = gen::random_module(Z, spec, rng);
    auto f = gen::random_map(m, n, rng);
    REQUIRE(f);
    for (long a : {0l, 1l, 3l, 7l}) {
      auto e = ControlCondition::metric_bound(sp, Rational(a));
      Certificate p = check_map(*f, e);
      Certificate s = check_map_serial(*f, e);
      CHECK(p.ok == s.ok);
      CHECK(p.minimal == s.minimal);
      if (!p.ok && !s.ok) {
        REQUIRE(p.violation.has_value());
        REQUIRE(s.violation.has_value());
        CHECK(p.violation->cell_a == s.violation->cell_a);
      }
      Certificate pm = check_module(*m, e);
      Certificate sm = check_module_serial(*m, e);
      CHECK(pm.ok == sm.ok);
      CHECK(pm.minimal == sm.minimal);
    }
  }
}

TEST_CASE("certificate compose and add re-check") {
  std::mt19937 rng(77);
  auto sp = line();
  gen::ModuleSpec spec;
  spec.n0 = 3;
  spec.n1 = 2;
  int done = 0;
  while (done < 25) {
    auto a = gen::random_module(Z, spec, rng);
    auto b = gen::random_module(Z, spec, rng);
    auto c = gen::random_module(Z, spec, rng);
    auto f = gen::random_map(a, b, rng);
    auto g = gen::random_map(b, c, rng);
    REQUIRE(f);
    REQUIRE(g);
    Rational af = minimal_certificate_map(*f);
    Rational ag = minimal_certificate_map(*g);
    Certificate cf = check_map(*f, ControlCondition::metric_bound(sp, af));
    Certificate cg = check_map(*g, ControlCondition::metric_bound(sp, ag));
    REQUIRE(cf.ok);
    REQUIRE(cg.ok);
    Certificate cc = certificate_compose(cf, cg, *f, *g);
    CHECK(cc.ok);
    CHECK(minimal_certificate_map(compose(*g, *f)) <= af + ag);

    auto f2 = gen::random_map(a, b, rng);
    REQUIRE(f2);
    Certificate cf2 =
        check_map(*f2, ControlCondition::metric_bound(sp, minimal_certificate_map(*f2)));
    Certificate ca = certificate_add(cf, cf2, *f, *f2);
    CHECK(ca.ok);
    ++done;
  }
}

TEST_CASE("monotonicity of check_map") {
  std::mt19937 rng(5);
  auto sp = line();
  gen::ModuleSpec spec;
  auto m = gen::random_module(Z, spec, rng);
  auto n = gen::random_module(Z, spec, rng);
  auto f = gen::random_map(m, n, rng);
  REQUIRE(f);
  Rational a = minimal_certificate_map(*f);
  CHECK(check_map(*f, ControlCondition::metric_bound(sp, a)).ok);
  CHECK(check_map(*f, ControlCondition::metric_bound(sp, a + 1)).ok);
  CHECK(check_map(*f, ControlCondition::metric_bound(sp, a * 2 + 5)).ok);
}

TEST_CASE("bl-finiteness") {
  std::mt19937 rng(6);
  gen::ModuleSpec spec;
  auto m = gen::random_module(Z, spec, rng);
  CHECK(bl_finite(*m).bl_finite);

  StagedTelescopeDesc drift;
  drift.infinitely_many_stages = true;
  drift.label_step = Rational(1);
  drift.cells_per_stage = 5;
  CHECK(bl_finite(drift).bl_finite);

  StagedTelescopeDesc stuck;
  stuck.infinitely_many_stages = true;
  stuck.label_step = Rational(0);
  CHECK_FALSE(bl_finite(stuck).bl_finite);

  StagedTelescopeDesc infdim;
  infdim.finite_dimensional = false;
  infdim.label_step = Rational(1);
  CHECK_FALSE(bl_finite(infdim).bl_finite);
}

TEST_CASE("euclidean-squared comparisons are exact") {
  auto sp = ControlSpace::metric(2, ControlSpace::Metric::Euclid2);
  Label a;
  a.coords = {Rational(0), Rational(0)};
  Label b;
  b.coords = {Rational(3), Rational(4)};
  CHECK(sp->gap(a, b) == 25);  // squared
  auto e5 = ControlCondition::metric_bound(sp, Rational(5));
  CHECK(e5.related(a, b));
  auto e49 = ControlCondition::metric_bound(sp, Rational(49, 10));
  CHECK_FALSE(e49.related(a, b));
}
