#include "csm/snf.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace csm {

IntMat mat_mul(const IntMat& x, const IntMat& y) {
  if (x.cols != y.rows) throw std::runtime_error("mat_mul: shape mismatch");
  IntMat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const Int& xv = x.at(i, k);
      if (xv == 0) continue;
      for (int j = 0; j < y.cols; ++j) r.at(i, j) += xv * y.at(k, j);
    }
  return r;
}

IntMat mat_identity(int n) {
  IntMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

// Bareiss fraction-free determinant.
Int mat_det(IntMat m) {
  if (m.rows != m.cols) throw std::runtime_error("det: not square");
  int n = m.rows;
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m.at(k, k) == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) { p = i; break; }
      if (p < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

namespace {

void row_swap(IntMat& m, int r1, int r2) {
  for (int j = 0; j < m.cols; ++j) std::swap(m.at(r1, j), m.at(r2, j));
}
void col_swap(IntMat& m, int c1, int c2) {
  for (int i = 0; i < m.rows; ++i) std::swap(m.at(i, c1), m.at(i, c2));
}
// row[r1] += q * row[r2]
void row_add(IntMat& m, int r1, int r2, const Int& q) {
  if (q == 0) return;
  for (int j = 0; j < m.cols; ++j) m.at(r1, j) += q * m.at(r2, j);
}
void col_add(IntMat& m, int c1, int c2, const Int& q) {
  if (q == 0) return;
  for (int i = 0; i < m.rows; ++i) m.at(i, c1) += q * m.at(i, c2);
}
void row_negate(IntMat& m, int r) {
  for (int j = 0; j < m.cols; ++j) m.at(r, j) = -m.at(r, j);
}

Int abs_int(const Int& v) { return v < 0 ? Int(-v) : v; }

}  // namespace

SmithResult smith_normal_form(const IntMat& a) {
  SmithResult res;
  res.d = a;
  res.u = mat_identity(a.rows);
  res.v = mat_identity(a.cols);
  IntMat& d = res.d;
  IntMat& u = res.u;
  IntMat& v = res.v;

  int t = 0;
  int limit = std::min(a.rows, a.cols);

  // nonzero counts per row/column of the remaining block, kept incrementally
  auto nnz_row = [&](int i) {
    int c = 0;
    for (int j = t; j < d.cols; ++j) c += d.at(i, j) != 0;
    return c;
  };
  auto nnz_col = [&](int j) {
    int c = 0;
    for (int i = t; i < d.rows; ++i) c += d.at(i, j) != 0;
    return c;
  };

  // Phase 1: eliminate with unit pivots, minimal fill-in first. Unit pivots
  // never force division passes, which is what keeps entries small.
  for (; t < limit; ++t) {
    int pr = -1, pc = -1;
    long best = -1;
    for (int i = t; i < d.rows; ++i)
      for (int j = t; j < d.cols; ++j) {
        const Int& e = d.at(i, j);
        if (e != 1 && e != -1) continue;
        long cost = (long)(nnz_row(i) - 1) * (nnz_col(j) - 1);
        if (best < 0 || cost < best) {
          best = cost;
          pr = i;
          pc = j;
          if (cost == 0) goto found;
        }
      }
  found:
    if (pr < 0) break;
    if (pr != t) { row_swap(d, t, pr); row_swap(u, t, pr); }
    if (pc != t) { col_swap(d, t, pc); col_swap(v, pc, t); }
    if (d.at(t, t) < 0) { row_negate(d, t); row_negate(u, t); }
    for (int i = t + 1; i < d.rows; ++i) {
      if (d.at(i, t) == 0) continue;
      Int q = d.at(i, t);
      row_add(d, i, t, -q);
      row_add(u, i, t, -q);
    }
    for (int j = t + 1; j < d.cols; ++j) {
      if (d.at(t, j) == 0) continue;
      Int q = d.at(t, j);
      col_add(d, j, t, -q);
      col_add(v, j, t, -q);
    }
  }

  // Phase 2: general elimination on the (typically tiny) remaining block.
  while (t < limit) {
    int pr = -1, pc = -1;
    Int best = 0;
    for (int i = t; i < d.rows; ++i)
      for (int j = t; j < d.cols; ++j) {
        Int av = abs_int(d.at(i, j));
        if (av != 0 && (pr < 0 || av < best)) { best = av; pr = i; pc = j; }
      }
    if (pr < 0) break;  // all zero
    if (pr != t) { row_swap(d, t, pr); row_swap(u, t, pr); }
    if (pc != t) { col_swap(d, t, pc); col_swap(v, pc, t); }

    bool again = true;
    while (again) {
      again = false;
      // gcd cascade: keep replacing the pivot by remainders until it divides
      // its row and column
      for (int i = t + 1; i < d.rows; ++i) {
        if (d.at(i, t) == 0) continue;
        Int q = d.at(i, t) / d.at(t, t);
        row_add(d, i, t, -q);
        row_add(u, i, t, -q);
        if (d.at(i, t) != 0) {
          row_swap(d, t, i);
          row_swap(u, t, i);
          again = true;
        }
      }
      for (int j = t + 1; j < d.cols; ++j) {
        if (d.at(t, j) == 0) continue;
        Int q = d.at(t, j) / d.at(t, t);
        col_add(d, j, t, -q);
        col_add(v, j, t, -q);
        if (d.at(t, j) != 0) {
          col_swap(d, t, j);
          col_swap(v, t, j);
          again = true;
        }
      }
      if (!again) {
        for (int i = t + 1; i < d.rows && !again; ++i)
          for (int j = t + 1; j < d.cols && !again; ++j)
            if (d.at(i, j) % d.at(t, t) != 0) {
              row_add(d, t, i, 1);
              row_add(u, t, i, 1);
              again = true;
            }
      }
    }
    if (d.at(t, t) < 0) { row_negate(d, t); row_negate(u, t); }
    ++t;
  }

  // Phase 3: repair the divisibility chain across the diagonal (phase-1
  // pivots are units, but phase boundaries can still break the chain).
  int r = 0;
  while (r < limit && d.at(r, r) != 0) ++r;
  bool fixed = true;
  while (fixed) {
    fixed = false;
    for (int i = 0; i + 1 < r; ++i) {
      if (d.at(i + 1, i + 1) % d.at(i, i) == 0) continue;
      fixed = true;
      // standard 2x2 repair: gcd and lcm on the diagonal
      Int a0 = d.at(i, i), b0 = d.at(i + 1, i + 1);
      col_add(d, i, i + 1, 1);
      col_add(v, i, i + 1, 1);
      // block is now [[a0,0],[b0,b0]]; run the cascade on rows i, i+1
      for (;;) {
        if (d.at(i + 1, i) != 0) {
          Int q = d.at(i + 1, i) / d.at(i, i);
          row_add(d, i + 1, i, -q);
          row_add(u, i + 1, i, -q);
          if (d.at(i + 1, i) != 0) {
            row_swap(d, i, i + 1);
            row_swap(u, i, i + 1);
            continue;
          }
        }
        if (d.at(i, i + 1) != 0) {
          Int q = d.at(i, i + 1) / d.at(i, i);
          col_add(d, i + 1, i, -q);
          col_add(v, i + 1, i, -q);
          if (d.at(i, i + 1) != 0) {
            col_swap(d, i, i + 1);
            col_swap(v, i, i + 1);
            continue;
          }
        }
        break;
      }
      if (d.at(i, i) < 0) { row_negate(d, i); row_negate(u, i); }
      if (d.at(i + 1, i + 1) < 0) { row_negate(d, i + 1); row_negate(u, i + 1); }
      (void)a0;
      (void)b0;
    }
  }

  for (int i = 0; i < limit; ++i)
    if (d.at(i, i) != 0) res.diag.push_back(d.at(i, i));
  return res;
}

std::optional<std::vector<Int>> solve_integer(const IntMat& a, const std::vector<Int>& b) {
  if ((int)b.size() != a.rows) throw std::runtime_error("solve_integer: bad rhs");
  SmithResult s = smith_normal_form(a);
  // A = U^{-1} D V^{-1}; A x = b  <=>  D (V^{-1} x) = U b
  std::vector<Int> ub(a.rows, Int(0));
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.rows; ++j) ub[i] += s.u.at(i, j) * b[j];
  std::vector<Int> y(a.cols, Int(0));
  int r = (int)s.diag.size();
  for (int i = 0; i < a.rows; ++i) {
    if (i < r) {
      if (ub[i] % s.diag[i] != 0) return std::nullopt;
      y[i] = ub[i] / s.diag[i];
    } else if (ub[i] != 0) {
      return std::nullopt;
    }
  }
  std::vector<Int> x(a.cols, Int(0));
  for (int i = 0; i < a.cols; ++i)
    for (int j = 0; j < a.cols; ++j) x[i] += s.v.at(i, j) * y[j];
  return x;
}

std::vector<std::vector<Int>> kernel_basis(const IntMat& a) {
  SmithResult s = smith_normal_form(a);
  int r = (int)s.diag.size();
  std::vector<std::vector<Int>> basis;
  for (int k = r; k < a.cols; ++k) {
    std::vector<Int> col(a.cols);
    for (int i = 0; i < a.cols; ++i) col[i] = s.v.at(i, k);
    basis.push_back(std::move(col));
  }
  return basis;
}

std::string AbelianGroupNF::str() const {
  std::string out;
  for (long i = 0; i < rank; ++i) out += out.empty() ? "Z" : " + Z";
  for (const Int& t : torsion) out += (out.empty() ? "Z/" : " + Z/") + t.str();
  if (out.empty()) out = "0";
  return out;
}

AbelianGroupNF abelian_group_from_relations(const IntMat& relations) {
  SmithResult s = smith_normal_form(relations);
  AbelianGroupNF nf;
  nf.rank = relations.cols - (long)s.diag.size();
  for (const Int& d : s.diag)
    if (d > 1) nf.torsion.push_back(d);
  return nf;
}

}  // namespace csm
