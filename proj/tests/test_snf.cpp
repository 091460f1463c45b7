#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "csm/snf.hpp"

using namespace csm;

namespace {

// naive oracle: rank over Q by fraction-free elimination, and group order
// of the torsion part via |det| of a full-rank square submatrix is overkill;
// instead check U*A*V == D, unimodularity, divisibility.
bool divisibility_chain(const std::vector<Int>& d) {
  for (size_t i = 1; i < d.size(); ++i)
    if (d[i] % d[i - 1] != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("smith normal form invariants on random matrices") {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> dist(-6, 6);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 60; ++trial) {
    IntMat a(dim(rng), dim(rng));
    for (auto& v : a.a) v = dist(rng);
    SmithResult s = smith_normal_form(a);
    // U * A * V == D
    IntMat uav = mat_mul(mat_mul(s.u, a), s.v);
    CHECK(uav.a == s.d.a);
    CHECK((mat_det(s.u) == 1 || mat_det(s.u) == -1));
    CHECK((mat_det(s.v) == 1 || mat_det(s.v) == -1));
    CHECK(divisibility_chain(s.diag));
    for (const Int& v : s.diag) CHECK(v > 0);
    // off-diagonal zero
    for (int i = 0; i < s.d.rows; ++i)
      for (int j = 0; j < s.d.cols; ++j)
        if (i != j) CHECK(s.d.at(i, j) == 0);
  }
}

TEST_CASE("integer solve") {
  IntMat a(2, 3);
  a.at(0, 0) = 2; a.at(0, 1) = 4; a.at(0, 2) = 6;
  a.at(1, 0) = 0; a.at(1, 1) = 2; a.at(1, 2) = 2;
  auto x = solve_integer(a, {Int(10), Int(4)});
  REQUIRE(x.has_value());
  CHECK(2 * (*x)[0] + 4 * (*x)[1] + 6 * (*x)[2] == 10);
  CHECK(2 * (*x)[1] + 2 * (*x)[2] == 4);

  // 2x = 1 has no integer solution
  IntMat b(1, 1);
  b.at(0, 0) = 2;
  CHECK_FALSE(solve_integer(b, {Int(1)}).has_value());
}

TEST_CASE("kernel basis spans the kernel") {
  std::mt19937 rng(999);
  std::uniform_int_distribution<int> dist(-4, 4);
  for (int trial = 0; trial < 30; ++trial) {
    IntMat a(3, 5);
    for (auto& v : a.a) v = dist(rng);
    auto basis = kernel_basis(a);
    for (const auto& col : basis) {
      for (int i = 0; i < a.rows; ++i) {
        Int acc = 0;
        for (int j = 0; j < a.cols; ++j) acc += a.at(i, j) * col[j];
        CHECK(acc == 0);
      }
    }
  }
}

TEST_CASE("abelian group normal forms") {
  {
    IntMat rel(0, 1);  // one generator, no relations
    auto g = abelian_group_from_relations(rel);
    CHECK(g.rank == 1);
    CHECK(g.torsion.empty());
    CHECK(g.str() == "Z");
  }
  {
    IntMat rel(1, 2);  // Z^2 / (2, 0) = Z + Z/2
    rel.at(0, 0) = 2;
    auto g = abelian_group_from_relations(rel);
    CHECK(g.rank == 1);
    REQUIRE(g.torsion.size() == 1);
    CHECK(g.torsion[0] == 2);
  }
  {
    // Z^2 / ((2,0),(0,3)) has invariant factors 1|6? no: diag(2,3) -> 1,6
    IntMat rel(2, 2);
    rel.at(0, 0) = 2;
    rel.at(1, 1) = 3;
    auto g = abelian_group_from_relations(rel);
    CHECK(g.rank == 0);
    REQUIRE(g.torsion.size() == 1);
    CHECK(g.torsion[0] == 6);
  }
}
