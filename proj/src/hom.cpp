#include "csm/hom.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

#include "csm/linsys.hpp"

namespace csm {

namespace {

struct DegCoord {
  std::vector<std::pair<int, DegWord>> basis;
  std::map<std::pair<int, std::vector<int>>, int> pos;
  int gorder;

  DegCoord(const CellularModule& m, int deg) : gorder(m.ring()->group_order()) {
    basis = m.basis(deg);
    for (int i = 0; i < (int)basis.size(); ++i)
      pos[{basis[i].first, basis[i].second.s}] = i;
  }
  int dim() const { return (int)basis.size() * gorder; }
  void add(std::vector<Int>& v, const Element& e, const Int& scale = Int(1)) const {
    for (const Term& t : e.terms) {
      int p = pos.at({t.cell, t.w.s});
      for (int g = 0; g < gorder; ++g) v[p * gorder + g] += scale * t.coeff.c[g];
    }
  }
};

}  // namespace

HomGroup hom_maps(ModulePtr m, ModulePtr n) {
  HomGroup out;
  out.src = m;
  out.dst = n;
  int g = n->ring()->group_order();
  long modulus = n->ring()->modulus();

  // unknown layout: per source cell, coordinates of its image
  std::vector<DegCoord> cellco;
  std::vector<int> offset(m->cell_count() + 1, 0);
  for (int c = 0; c < m->cell_count(); ++c) {
    cellco.emplace_back(*n, m->cell(c).dim);
    offset[c + 1] = offset[c] + cellco[c].dim();
  }
  int ucols = offset[m->cell_count()];

  // equation layout: per (cell of dim >= 1, face index)
  std::vector<DegCoord> eqco;
  std::vector<std::pair<int, int>> eqs;
  std::vector<int> eqoffset{0};
  for (int c = 0; c < m->cell_count(); ++c) {
    int k = m->cell(c).dim;
    if (k == 0) continue;
    for (int i = 0; i <= k; ++i) {
      eqs.push_back({c, i});
      eqco.emplace_back(*n, k - 1);
      eqoffset.push_back(eqoffset.back() + eqco.back().dim());
    }
  }
  int rows = eqoffset.back();
  int cols = ucols + (modulus > 0 ? rows : 0);
  IntMat a(rows, cols);

  for (int c = 0; c < m->cell_count(); ++c) {
    int dimc = m->cell(c).dim;
    for (int j = 0; j < (int)cellco[c].basis.size(); ++j) {
      for (int gg = 0; gg < g; ++gg) {
        int col = offset[c] + j * g + gg;
        Element unit{dimc, {Term{RingValue::basis(n->ring(), gg), cellco[c].basis[j].first,
                                 cellco[c].basis[j].second}}};
        // contributions to every equation
        for (size_t q = 0; q < eqs.size(); ++q) {
          auto [cc, i] = eqs[q];
          std::vector<Int> v(eqco[q].dim(), Int(0));
          bool any = false;
          if (cc == c) {  // + d_i x_c
            eqco[q].add(v, n->face(unit, i));
            any = true;
          }
          for (const Term& t : m->cell(cc).attach[i].terms) {
            if (t.cell != c) continue;
            Element img = n->apply_mono(unit, t.w.to_sur(m->cell(c).dim));
            img = element_scale(t.coeff, img);
            eqco[q].add(v, element_negate(img));
            any = true;
          }
          if (any)
            for (int r = 0; r < eqco[q].dim(); ++r)
              if (v[r] != 0) a.at(eqoffset[q] + r, col) = v[r];
        }
      }
    }
  }
  if (modulus > 0)
    for (int r = 0; r < rows; ++r) a.at(r, ucols + r) = modulus;

  auto kern = kernel_basis(a);
  std::vector<std::vector<Int>> projected;
  for (const auto& kv : kern) {
    std::vector<Int> x(kv.begin(), kv.begin() + ucols);
    bool zero = true;
    for (const Int& t : x)
      if (t != 0) zero = false;
    if (!zero) projected.push_back(std::move(x));
  }

  auto to_map = [&](const std::vector<Int>& x) {
    ModuleMap f;
    f.src = m;
    f.dst = n;
    for (int c = 0; c < m->cell_count(); ++c) {
      Element e = element_zero(m->cell(c).dim);
      for (int j = 0; j < (int)cellco[c].basis.size(); ++j) {
        RingValue coeff = RingValue::zero(n->ring());
        for (int gg = 0; gg < g; ++gg) coeff.c[gg] = x[offset[c] + j * g + gg];
        coeff.reduce();
        if (!coeff.is_zero())
          e.terms.push_back(
              Term{coeff, cellco[c].basis[j].first, cellco[c].basis[j].second});
      }
      element_canonicalize(e);
      f.images.push_back(std::move(e));
    }
    return f;
  };

  for (const auto& x : projected) {
    ModuleMap f = to_map(x);
    bool zero = true;
    for (const Element& e : f.images) zero &= e.is_zero();
    if (!zero) out.basis.push_back(std::move(f));
  }

  if (modulus == 0) {
    out.group.rank = (long)out.basis.size();
  } else {
    // group = span{v_j mod n}: relations x with V x in n Z^u
    int J = (int)projected.size();
    IntMat vn(ucols, J + ucols);
    for (int j = 0; j < J; ++j)
      for (int r = 0; r < ucols; ++r) vn.at(r, j) = projected[j][r];
    for (int r = 0; r < ucols; ++r) vn.at(r, J + r) = modulus;
    auto rel = kernel_basis(vn);
    IntMat relrows((int)rel.size(), J);
    for (int i = 0; i < (int)rel.size(); ++i)
      for (int j = 0; j < J; ++j) relrows.at(i, j) = rel[i][j];
    out.group = abelian_group_from_relations(relrows);
  }
  return out;
}

ModuleMap random_hom(const HomGroup& h, std::mt19937& rng, int spread) {
  ModuleMap f = zero_map(h.src, h.dst);
  if (h.basis.empty()) return f;
  std::uniform_int_distribution<int> coeff(-spread, spread);
  for (const ModuleMap& b : h.basis) {
    int c = coeff(rng);
    if (c == 0) continue;
    ModuleMap scaled = b;
    for (Element& e : scaled.images)
      e = element_scale(RingValue::integer(h.src->ring(), c), e);
    f = map_add(f, scaled);
  }
  return f;
}

HomSimplices hom_simplices(ModulePtr m, ModulePtr n, int k, long enumeration_bound) {
  HomSimplices out;
  auto dk = std::make_shared<FinSimplicialSet>(standard_simplex(k));
  out.mdk = tensor_sset(m, dk);
  out.maps = hom_maps(out.mdk.mod, n);
  long modulus = n->ring()->modulus();
  if (modulus > 0) {
    long total = 1;
    for (size_t i = 0; i < out.maps.basis.size(); ++i) {
      total *= modulus;
      if (total > enumeration_bound) {
        out.complete = false;
        break;
      }
    }
    long limit = out.complete ? total : enumeration_bound;
    // enumerate combinations in mixed radix
    std::map<std::string, ModuleMap> seen;
    for (long idx = 0; idx < limit; ++idx) {
      long t = idx;
      ModuleMap f = zero_map(out.mdk.mod, n);
      for (const ModuleMap& b : out.maps.basis) {
        long c = t % modulus;
        t /= modulus;
        if (c) {
          ModuleMap scaled = b;
          for (Element& e : scaled.images)
            e = element_scale(RingValue::integer(n->ring(), c), e);
          f = map_add(f, scaled);
        }
      }
      std::ostringstream key;
      for (const Element& e : f.images) {
        for (const Term& tm : e.terms)
          key << tm.cell << ":" << tm.w.str() << ":" << tm.coeff.str() << ";";
        key << "|";
      }
      seen.emplace(key.str(), std::move(f));
    }
    for (auto& [k2, v] : seen) out.enumerated.push_back(std::move(v));
  }
  return out;
}

std::vector<TensorModule> standard_tensors(ModulePtr m, int top) {
  std::vector<TensorModule> out;
  for (int k = 0; k <= top; ++k) {
    auto dk = std::make_shared<FinSimplicialSet>(standard_simplex(k));
    out.push_back(tensor_sset(m, dk));
  }
  return out;
}

namespace {

std::vector<int> parse_vertices(const std::string& name) {
  std::vector<int> out;
  int cur = 0;
  bool has = false;
  for (char ch : name) {
    if (ch == '.') {
      out.push_back(cur);
      cur = 0;
      has = false;
    } else {
      cur = cur * 10 + (ch - '0');
      has = true;
    }
  }
  if (has) out.push_back(cur);
  return out;
}

// the map Delta^q -> A picking the simplex a
SSetMap simplex_pick_map(const FinSimplicialSet& dq, const FinSimplicialSet& a,
                         const DegSimplex& x) {
  SSetMap s;
  s.src = &dq;
  s.dst = &a;
  s.images.resize(dq.dim() + 1);
  for (int d = 0; d <= dq.dim(); ++d) s.images[d].resize(dq.count(d));
  for (const SimplexRef r : dq.all()) {
    Mono op = parse_vertices(dq.name(r));
    s.images[r.dim][r.idx] = a.apply(x, op);
  }
  return s;
}

}  // namespace

Adjoint adjoint_forward(const TensorModule& ma, const ModuleMap& f,
                        const std::vector<TensorModule>& mdeltas) {
  Adjoint adj;
  for (const SimplexRef r : ma.a->all()) {
    const TensorModule& mdq = mdeltas[r.dim];
    SSetMap pick = simplex_pick_map(*mdq.a, *ma.a, DegSimplex{r, DegWord{}});
    ModuleMap restrict = tensor_map_sset(mdq, ma, pick);
    adj.components.push_back(compose(f, restrict));
  }
  return adj;
}

ModuleMap adjoint_back(const TensorModule& ma, const Adjoint& adj,
                       const std::vector<TensorModule>& mdeltas, ModulePtr n) {
  ModuleMap f;
  f.src = ma.mod;
  f.dst = std::move(n);
  // index of each nondegenerate simplex of A in skeletal order
  std::map<std::pair<int, int>, int> simplex_pos;
  {
    int k = 0;
    for (const SimplexRef r : ma.a->all()) simplex_pos[{r.dim, r.idx}] = k++;
  }
  for (int c = 0; c < ma.mod->cell_count(); ++c) {
    const TensorCell& tc = ma.tcell(c);
    int q = tc.a.base.dim;
    const TensorModule& mdq = mdeltas[q];
    const ModuleMap& comp = adj.components[simplex_pos.at({tc.a.base.dim, tc.a.base.idx})];
    // the corresponding cell of M[Delta^q]: same m-part, top simplex, same word
    SimplexRef top{q, 0};
    for (const SimplexRef r : mdq.a->all())
      if (r.dim == q) top = r;
    TensorCell key{tc.m_cell, tc.alpha, DegSimplex{top, tc.a.w}};
    f.images.push_back(comp.images[mdq.cell_index(key)]);
  }
  return f;
}

}  // namespace csm
