#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "csm/simplicial.hpp"

using namespace csm;

namespace {

// brute-force count of nondegenerate k-simplices of Delta^n: C(n+1, k+1)
long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

TEST_CASE("standard simplices") {
  FinSimplicialSet d0 = standard_simplex(0);
  CHECK(d0.count(0) == 1);
  CHECK(d0.dim() == 0);

  FinSimplicialSet d1 = standard_simplex(1);
  CHECK(d1.count(0) == 2);
  CHECK(d1.count(1) == 1);
  SimplexRef e = d1.ref("0.1");
  CHECK(d1.name(d1.face(DegSimplex{e, {}}, 0).base) == "1");
  CHECK(d1.name(d1.face(DegSimplex{e, {}}, 1).base) == "0");

  for (int n = 0; n <= 4; ++n) {
    FinSimplicialSet dn = standard_simplex(n);
    for (int k = 0; k <= n; ++k) CHECK(dn.count(k) == binom(n + 1, k + 1));
    CHECK_FALSE(dn.check_identities().has_value());
  }
}

TEST_CASE("boundary and horns") {
  FinSimplicialSet b2 = boundary(2);
  CHECK(b2.count(0) == 3);
  CHECK(b2.count(1) == 3);
  CHECK(b2.count(2) == 0);

  FinSimplicialSet h21 = horn(2, 1);
  CHECK(h21.count(1) == 2);  // boundary(2) minus the face opposite vertex 1
  CHECK_FALSE(h21.find("0.2").has_value());

  // Lambda^1_1 keeps only the face d_0, i.e. the vertex opposite 1
  FinSimplicialSet h11 = horn(1, 1);
  CHECK(h11.count(0) == 1);
  CHECK(h11.find("1").has_value());
  CHECK_FALSE(h11.find("0").has_value());

  CHECK_THROWS(horn(2, 3));

  // inclusions are simplicial maps
  FinSimplicialSet d2 = standard_simplex(2);
  CHECK_FALSE(subcomplex_inclusion(b2, d2).verify().has_value());
  CHECK_FALSE(subcomplex_inclusion(h21, d2).verify().has_value());
}

TEST_CASE("degeneracy word rewriting is confluent") {
  FinSimplicialSet d2 = standard_simplex(2);
  // evaluate d_i on every simplex of dim <= 5 twice through different routes
  for (int n = 1; n <= 5; ++n) {
    for (const DegSimplex& x : d2.simplices_of_dim(n)) {
      for (int j = 0; j <= n; ++j) {
        DegSimplex sx = FinSimplicialSet::degeneracy(x, j);
        CHECK(d2.face(sx, j) == x);
        CHECK(d2.face(sx, j + 1) == x);
      }
    }
  }
  CHECK_FALSE(d2.check_identities(5).has_value());
}

TEST_CASE("product of intervals") {
  FinSimplicialSet d1 = standard_simplex(1);
  ProductSSet p = product(d1, d1);
  CHECK(p.sset.count(0) == 4);
  CHECK(p.sset.count(1) == 5);
  CHECK(p.sset.count(2) == 2);
  CHECK_FALSE(p.sset.check_identities().has_value());
  CHECK_FALSE(p.proj1.verify().has_value());
  CHECK_FALSE(p.proj2.verify().has_value());

  // projections jointly injective on nondegenerate simplices
  std::set<std::pair<DegSimplex, DegSimplex>> seen;
  for (const SimplexRef r : p.sset.all()) {
    auto key = std::make_pair(p.proj1.image(r), p.proj2.image(r));
    CHECK(seen.insert(key).second);
  }
}

TEST_CASE("product unit and Euler characteristic") {
  FinSimplicialSet d0 = standard_simplex(0);
  FinSimplicialSet d2 = standard_simplex(2);
  ProductSSet unit = product(d0, d2);
  for (int k = 0; k <= 2; ++k) CHECK(unit.sset.count(k) == d2.count(k));

  FinSimplicialSet d1 = standard_simplex(1);
  ProductSSet p12 = product(d1, d2);
  CHECK_FALSE(p12.sset.check_identities().has_value());
  CHECK(p12.sset.euler_characteristic() ==
        d1.euler_characteristic() * d2.euler_characteristic());
}

TEST_CASE("vertex-wise map construction") {
  FinSimplicialSet d1 = standard_simplex(1);
  ProductSSet sq = product(d1, d1);
  // max: (x,y) -> max(x,y) is simplicial onto Delta^1
  std::vector<SimplexRef> img(sq.sset.count(0));
  for (int i = 0; i < sq.sset.count(0); ++i) {
    SimplexRef r{0, i};
    auto comps = sq.components(r);
    int a = sq.fac1->name(comps.first.base) == "1" ? 1 : 0;
    int b = sq.fac2->name(comps.second.base) == "1" ? 1 : 0;
    img[i] = d1.ref(std::max(a, b) ? "1" : "0");
  }
  auto m = sset_map_from_vertices(sq.sset, d1, img);
  REQUIRE(m.has_value());
  CHECK_FALSE(m->verify().has_value());
}
