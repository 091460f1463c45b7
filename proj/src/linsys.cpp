#include "csm/linsys.hpp"

#include <map>
#include <stdexcept>

namespace csm {

namespace {

struct Coordinatizer {
  const CellularModule* mod;
  int degree;
  std::vector<std::pair<int, DegWord>> basis;
  std::map<std::pair<int, std::vector<int>>, int> pos;
  int gorder;

  Coordinatizer(const CellularModule& m, int deg) : mod(&m), degree(deg) {
    basis = m.basis(deg);
    gorder = m.ring()->group_order();
    for (int i = 0; i < (int)basis.size(); ++i)
      pos[{basis[i].first, basis[i].second.s}] = i;
  }
  int dim() const { return (int)basis.size() * gorder; }
  void add(std::vector<Int>& vec, const Element& e, const Int& scale = Int(1)) const {
    for (const Term& t : e.terms) {
      auto it = pos.find({t.cell, t.w.s});
      if (it == pos.end()) throw std::runtime_error("coordinatizer: term outside basis");
      for (int g = 0; g < gorder; ++g) vec[it->second * gorder + g] += scale * t.coeff.c[g];
    }
  }
};

}  // namespace

std::vector<Int> element_coords(const CellularModule& m, const Element& e) {
  Coordinatizer c(m, e.degree);
  std::vector<Int> v(c.dim(), Int(0));
  c.add(v, e);
  return v;
}

Element element_from_coords(const CellularModule& m, int degree, const std::vector<Int>& x) {
  Coordinatizer c(m, degree);
  Element e = element_zero(degree);
  for (int i = 0; i < (int)c.basis.size(); ++i) {
    RingValue coeff = RingValue::zero(m.ring());
    bool nz = false;
    for (int g = 0; g < c.gorder; ++g) {
      coeff.c[g] = x[i * c.gorder + g];
      if (coeff.c[g] != 0) nz = true;
    }
    coeff.reduce();
    if (nz && !coeff.is_zero())
      e.terms.push_back(Term{coeff, c.basis[i].first, c.basis[i].second});
  }
  element_canonicalize(e);
  return e;
}

namespace {

struct Assembled {
  IntMat a;
  std::vector<Int> b;
  std::vector<std::pair<int, DegWord>> unknown_basis;  // restricted to allowed cells
  int gorder = 1;
  int unknown_cols = 0;  // columns before modulus augmentation
};

Assembled assemble(const ElementProblem& p) {
  const CellularModule& m = *p.mod;
  int gorder = m.ring()->group_order();
  std::vector<char> allowed(m.cell_count(), p.allowed_cells.empty() ? 1 : 0);
  for (int c : p.allowed_cells) allowed[c] = 1;

  std::vector<std::pair<int, DegWord>> ub;
  for (const auto& bw : m.basis(p.degree))
    if (allowed[bw.first]) ub.push_back(bw);

  // rows: per face equation, coordinates of degree-1 layer; per map equation,
  // coordinates of the target module layer
  std::vector<Coordinatizer> face_co;
  for (size_t k = 0; k < p.faces.size(); ++k) face_co.emplace_back(m, p.degree - 1);
  std::vector<Coordinatizer> map_co;
  for (const auto& [f, v] : p.mapped_to) map_co.emplace_back(*f->dst, v.degree);

  int rows = 0;
  for (const auto& c : face_co) rows += c.dim();
  for (const auto& c : map_co) rows += c.dim();

  long modulus = m.ring()->modulus();
  int ucols = (int)ub.size() * gorder;
  int cols = ucols + (modulus > 0 ? rows : 0);

  Assembled out;
  out.a = IntMat(rows, cols);
  out.b.assign(rows, Int(0));
  out.unknown_basis = ub;
  out.gorder = gorder;
  out.unknown_cols = ucols;

  // columns: action of each unknown basis element under every equation
  for (int j = 0; j < (int)ub.size(); ++j) {
    for (int g = 0; g < gorder; ++g) {
      Element gen{p.degree,
                  {Term{RingValue::basis(m.ring(), g), ub[j].first, ub[j].second}}};
      int row0 = 0;
      for (size_t k = 0; k < p.faces.size(); ++k) {
        Element fe = m.face(gen, p.faces[k].first);
        std::vector<Int> col(face_co[k].dim(), Int(0));
        face_co[k].add(col, fe);
        for (int r = 0; r < face_co[k].dim(); ++r)
          out.a.at(row0 + r, j * gorder + g) = col[r];
        row0 += face_co[k].dim();
      }
      for (size_t k = 0; k < p.mapped_to.size(); ++k) {
        Element fe = p.mapped_to[k].first->apply(gen);
        std::vector<Int> col(map_co[k].dim(), Int(0));
        map_co[k].add(col, fe);
        for (int r = 0; r < map_co[k].dim(); ++r)
          out.a.at(row0 + r, j * gorder + g) = col[r];
        row0 += map_co[k].dim();
      }
    }
  }
  if (modulus > 0)
    for (int r = 0; r < rows; ++r) out.a.at(r, ucols + r) = modulus;

  int row0 = 0;
  for (size_t k = 0; k < p.faces.size(); ++k) {
    std::vector<Int> rhs(face_co[k].dim(), Int(0));
    face_co[k].add(rhs, p.faces[k].second);
    for (int r = 0; r < face_co[k].dim(); ++r) out.b[row0 + r] = rhs[r];
    row0 += face_co[k].dim();
  }
  for (size_t k = 0; k < p.mapped_to.size(); ++k) {
    std::vector<Int> rhs(map_co[k].dim(), Int(0));
    map_co[k].add(rhs, p.mapped_to[k].second);
    for (int r = 0; r < map_co[k].dim(); ++r) out.b[row0 + r] = rhs[r];
    row0 += map_co[k].dim();
  }
  return out;
}

Element coords_to_element(const ElementProblem& p, const Assembled& as,
                          const std::vector<Int>& x) {
  Element e = element_zero(p.degree);
  for (int j = 0; j < (int)as.unknown_basis.size(); ++j) {
    RingValue coeff = RingValue::zero(p.mod->ring());
    for (int g = 0; g < as.gorder; ++g) coeff.c[g] = x[j * as.gorder + g];
    coeff.reduce();
    if (!coeff.is_zero())
      e.terms.push_back(Term{coeff, as.unknown_basis[j].first, as.unknown_basis[j].second});
  }
  element_canonicalize(e);
  return e;
}

}  // namespace

std::optional<Element> solve_element(const ElementProblem& p) {
  Assembled as = assemble(p);
  auto x = solve_integer(as.a, as.b);
  if (!x) return std::nullopt;
  return coords_to_element(p, as, *x);
}

std::optional<Element> solve_element_random(const ElementProblem& p, std::mt19937& rng,
                                            int spread) {
  Assembled as = assemble(p);
  auto x = solve_integer(as.a, as.b);
  if (!x) return std::nullopt;
  auto kern = kernel_basis(as.a);
  std::uniform_int_distribution<int> coeff(-spread, spread);
  std::uniform_int_distribution<size_t> howmany(0, kern.size());
  if (!kern.empty()) {
    size_t n = howmany(rng);
    std::uniform_int_distribution<size_t> which(0, kern.size() - 1);
    for (size_t k = 0; k < n; ++k) {
      int c = coeff(rng);
      const auto& kv = kern[which(rng)];
      for (size_t i = 0; i < x->size(); ++i) (*x)[i] += c * kv[i];
    }
  }
  return coords_to_element(p, as, *x);
}

}  // namespace csm
