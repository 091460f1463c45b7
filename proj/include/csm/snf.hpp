#pragma once

#include <optional>
#include <vector>

#include "csm/rational.hpp"

namespace csm {

// Dense integer matrix, row major.
struct IntMat {
  int rows = 0;
  int cols = 0;
  std::vector<Int> a;

  IntMat() = default;
  IntMat(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c), Int(0)) {}
  Int& at(int r, int c) { return a[size_t(r) * cols + c]; }
  const Int& at(int r, int c) const { return a[size_t(r) * cols + c]; }
};

IntMat mat_mul(const IntMat& x, const IntMat& y);
IntMat mat_identity(int n);
Int mat_det(IntMat m);  // exact, fraction-free; for unimodularity checks

// Smith normal form: U * A * V = D with U, V unimodular and D diagonal with
// d1 | d2 | ... Divisibility chain and nonnegative entries guaranteed.
struct SmithResult {
  IntMat u, d, v;
  std::vector<Int> diag;  // nonzero diagonal entries of D, in order
};
SmithResult smith_normal_form(const IntMat& a);

// Particular integer solution of A x = b, if one exists.
std::optional<std::vector<Int>> solve_integer(const IntMat& a, const std::vector<Int>& b);

// Basis of the integer kernel lattice of A (columns of the result).
std::vector<std::vector<Int>> kernel_basis(const IntMat& a);

// Normal form of a finitely generated abelian group given by a relation
// matrix (rows = relations over `generators` columns).
struct AbelianGroupNF {
  long rank = 0;
  std::vector<Int> torsion;  // d1 | d2 | ..., each > 1

  bool operator==(const AbelianGroupNF& o) const {
    return rank == o.rank && torsion == o.torsion;
  }
  std::string str() const;
};

AbelianGroupNF abelian_group_from_relations(const IntMat& relations);

}  // namespace csm
