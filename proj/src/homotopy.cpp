#include "csm/homotopy.hpp"

#include <mutex>
#include <sstream>
#include <stdexcept>

#include "csm/linsys.hpp"

namespace csm {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

void require_equal_maps(const ModuleMap& a, const ModuleMap& b, const std::string& msg) {
  if (!(a == b)) throw std::runtime_error("maps differ: " + msg);
}

}  // namespace

SSetPtr delta_sset(int k) {
  static std::mutex mu;
  static std::map<int, SSetPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  auto s = std::make_shared<FinSimplicialSet>(standard_simplex(k));
  cache[k] = s;
  return s;
}

SSetPtr horn_sset(int n, int i) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, SSetPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, i);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto s = std::make_shared<FinSimplicialSet>(horn(n, i));
  cache[key] = s;
  return s;
}

SSetPtr boundary_sset(int n) {
  static std::mutex mu;
  static std::map<int, SSetPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto s = std::make_shared<FinSimplicialSet>(boundary(n));
  cache[n] = s;
  return s;
}

std::shared_ptr<const ProductSSet> square_sset() {
  static std::shared_ptr<const ProductSSet> sq = [] {
    auto d1 = delta_sset(1);
    auto p = std::make_shared<ProductSSet>(product(*d1, *d1));
    // keep the factors alive: product stores raw pointers
    static SSetPtr keep = d1;
    return p;
  }();
  return sq;
}

SSetPtr square_as_sset() {
  auto sq = square_sset();
  return SSetPtr(sq, &sq->sset);
}

DegSimplex degenerate_vertex(SimplexRef v, int dim) {
  std::vector<int> w;
  for (int j = dim - 1; j >= 0; --j) w.push_back(j);
  return DegSimplex{v, DegWord{w}};
}

// ---------------------------------------------------------------------------
// cylinders and homotopies
// ---------------------------------------------------------------------------

CylKit cyl_kit(ModulePtr m) {
  CylKit kit;
  auto d1 = delta_sset(1);
  kit.cyl = tensor_sset(m, d1);
  SimplexRef v0 = d1->ref("0"), v1 = d1->ref("1");
  kit.i0.src = m;
  kit.i0.dst = kit.cyl.mod;
  kit.i1.src = m;
  kit.i1.dst = kit.cyl.mod;
  kit.p.src = kit.cyl.mod;
  kit.p.dst = m;
  for (int c = 0; c < m->cell_count(); ++c) {
    int d = m->cell(c).dim;
    kit.i0.images.push_back(kit.cyl.embed(m->generator(c), degenerate_vertex(v0, d)));
    kit.i1.images.push_back(kit.cyl.embed(m->generator(c), degenerate_vertex(v1, d)));
  }
  for (int c = 0; c < kit.cyl.mod->cell_count(); ++c) {
    auto [mpart, apart] = kit.cyl.components(c, DegWord{});
    kit.p.images.push_back(
        Element{kit.cyl.mod->cell(c).dim,
                {Term{RingValue::one(m->ring()), mpart.first, mpart.second}}});
  }
  return kit;
}

ModuleMap tensor_bimap(const TensorModule& mx, const TensorModule& mxy,
                       const TensorModule& mz, const ProductSSet& xy, const SSetMap& zmap) {
  ModuleMap r;
  r.src = mxy.mod;
  r.dst = mz.mod;
  for (int c = 0; c < mxy.mod->cell_count(); ++c) {
    const TensorCell& outer = mxy.tcell(c);
    // outer.m_cell is a cell of M[X]; decompose its alpha-degenerate copy
    auto [mpart, xpart] = mx.components(outer.m_cell, outer.alpha);
    DegSimplex z = zmap.apply(xy.classify(xpart, outer.a));
    Element img = element_zero(mxy.mod->cell(c).dim);
    auto [ci, w] = mz.classify(mpart.first, mpart.second, z);
    img.terms.push_back(Term{RingValue::one(mx.m->ring()), ci, w});
    element_canonicalize(img);
    r.images.push_back(std::move(img));
  }
  return r;
}

ModuleMap Homotopy::at(int end) const {
  auto d1 = delta_sset(1);
  SimplexRef v = d1->ref(end == 0 ? "0" : "1");
  ModuleMap r;
  r.src = cyl.m;
  r.dst = carrier.dst;
  for (int c = 0; c < cyl.m->cell_count(); ++c) {
    int d = cyl.m->cell(c).dim;
    Element e = cyl.embed(cyl.m->generator(c), degenerate_vertex(v, d));
    r.images.push_back(carrier.apply(e));
  }
  return r;
}

std::optional<std::string> Homotopy::verify_endpoints(const ModuleMap& from,
                                                      const ModuleMap& to) const {
  if (!(at(0) == from)) return "homotopy start does not match";
  if (!(at(1) == to)) return "homotopy end does not match";
  return std::nullopt;
}

Homotopy homotopy_from_carrier(const TensorModule& cyl, ModuleMap carrier) {
  Homotopy h;
  h.cyl = cyl;
  h.carrier = std::move(carrier);
  return h;
}

Homotopy trivial_homotopy(const ModuleMap& f) {
  CylKit kit = cyl_kit(f.src);
  Homotopy h;
  h.cyl = kit.cyl;
  h.carrier = compose(f, kit.p);
  return h;
}

// ---------------------------------------------------------------------------
// HOM simplices and the group filler
// ---------------------------------------------------------------------------

HomKit hom_kit(ModulePtr m, ModulePtr n, int top) {
  HomKit kit;
  kit.m = m;
  kit.n = n;
  for (int k = 0; k <= top; ++k) kit.mdk.push_back(tensor_sset(m, delta_sset(k)));
  return kit;
}

namespace {

// simplicial operator maps between standard simplices
SSetMap delta_face_map(int k, int i) {
  auto src = delta_sset(k - 1);
  auto dst = delta_sset(k);
  std::vector<SimplexRef> vimg;
  for (int v = 0; v < k; ++v) {
    int w = v < i ? v : v + 1;
    vimg.push_back(dst->ref(std::to_string(w)));
  }
  auto m = sset_map_from_vertices(*src, *dst, vimg);
  if (!m) throw std::runtime_error("delta_face_map failed");
  return *m;
}

// sigma_j : Delta^{k+1} -> Delta^k
SSetMap delta_degeneracy_map(int k, int j) {
  auto src = delta_sset(k + 1);
  auto dst = delta_sset(k);
  std::vector<SimplexRef> vimg;
  for (int v = 0; v <= k + 1; ++v) {
    int w = v <= j ? v : v - 1;
    vimg.push_back(dst->ref(std::to_string(w)));
  }
  auto m = sset_map_from_vertices(*src, *dst, vimg);
  if (!m) throw std::runtime_error("delta_degeneracy_map failed");
  return *m;
}

}  // namespace

ModuleMap hom_face(const HomKit& kit, const ModuleMap& simplex, int k, int i) {
  SSetMap sm = delta_face_map(k, i);
  return compose(simplex, tensor_map_sset(kit.level(k - 1), kit.level(k), sm));
}

ModuleMap hom_degeneracy(const HomKit& kit, const ModuleMap& simplex, int k, int j) {
  SSetMap sm = delta_degeneracy_map(k, j);
  return compose(simplex, tensor_map_sset(kit.level(k + 1), kit.level(k), sm));
}

ModuleMap fill_horn_hom(const HomKit& kit, int n, int i,
                        const std::vector<std::optional<ModuleMap>>& faces) {
  require((int)faces.size() == n + 1, "fill_horn_hom: need n+1 face slots");
  ModuleMap u = zero_map(kit.level(n).mod, kit.n);
  auto face_of = [&](const ModuleMap& s, int kk, int idx) { return hom_face(kit, s, kk, idx); };
  auto degen_of = [&](const ModuleMap& s, int kk, int idx) {
    return hom_degeneracy(kit, s, kk, idx);
  };
  for (int r = 0; r < i; ++r) {
    require(faces[r].has_value(), "fill_horn_hom: missing face");
    ModuleMap diff = map_sub(*faces[r], face_of(u, n, r));
    u = map_add(u, degen_of(diff, n - 1, r));
  }
  for (int r = n; r > i; --r) {
    require(faces[r].has_value(), "fill_horn_hom: missing face");
    ModuleMap diff = map_sub(*faces[r], face_of(u, n, r));
    u = map_add(u, degen_of(diff, n - 1, r - 1));
  }
  // sanity: all prescribed faces must now match
  for (int r = 0; r <= n; ++r) {
    if (r == i || !faces[r]) continue;
    require_equal_maps(face_of(u, n, r), *faces[r], "fill_horn_hom face " + std::to_string(r));
  }
  return u;
}

namespace {

struct FillKit {
  HomKit kit;
  ModuleMap chi;  // the filled 2-simplex
};

// concat with access to the filled 2-simplex
FillKit concat_fill(const Homotopy& h1, const Homotopy& h2) {
  require(h1.cyl.m->cell_count() == h2.cyl.m->cell_count(),
          "concat: different underlying modules");
  require(h1.at(1) == h2.at(0), "concat: endpoints do not match");
  FillKit f{hom_kit(h1.cyl.m, h1.carrier.dst, 2), ModuleMap{}};
  // re-source the carriers onto the kit's own M[Delta^1]
  ModuleMap c1 = h1.carrier;
  c1.src = f.kit.level(1).mod;
  ModuleMap c2 = h2.carrier;
  c2.src = f.kit.level(1).mod;
  std::vector<std::optional<ModuleMap>> faces(3);
  faces[0] = c2;
  faces[2] = c1;
  f.chi = fill_horn_hom(f.kit, 2, 1, faces);
  return f;
}

struct InverseKit {
  HomKit kit;
  ModuleMap chi;
  Homotopy inv;
};

InverseKit inverse_fill(const Homotopy& h) {
  InverseKit out{hom_kit(h.cyl.m, h.carrier.dst, 2), ModuleMap{}, Homotopy{}};
  ModuleMap c = h.carrier;
  c.src = out.kit.level(1).mod;
  ModuleMap tr = trivial_homotopy(h.at(0)).carrier;
  tr.src = out.kit.level(1).mod;
  std::vector<std::optional<ModuleMap>> faces(3);
  faces[1] = tr;
  faces[2] = c;
  out.chi = fill_horn_hom(out.kit, 2, 0, faces);
  ModuleMap d0 = hom_face(out.kit, out.chi, 2, 0);
  out.inv = homotopy_from_carrier(out.kit.level(1), d0);
  return out;
}

}  // namespace

Homotopy concat(const Homotopy& h1, const Homotopy& h2) {
  FillKit f = concat_fill(h1, h2);
  ModuleMap d1 = hom_face(f.kit, f.chi, 2, 1);
  return homotopy_from_carrier(f.kit.level(1), d1);
}

Homotopy inverse_homotopy(const Homotopy& h) { return inverse_fill(h).inv; }

Homotopy whisker_left(const ModuleMap& q, const Homotopy& h) {
  return homotopy_from_carrier(h.cyl, compose(q, h.carrier));
}

Homotopy whisker_right(const Homotopy& h, const ModuleMap& g) {
  CylKit gk = cyl_kit(g.src);
  ModuleMap gcyl = tensor_map_module(gk.cyl, h.cyl, g);
  return homotopy_from_carrier(gk.cyl, compose(h.carrier, gcyl));
}

Homotopy homotopy_add(const Homotopy& a, const Homotopy& b) {
  return homotopy_from_carrier(a.cyl, map_add(a.carrier, b.carrier));
}

Homotopy restrict_homotopy(const Homotopy& h, const Submodule& s) {
  return whisker_right(h, s.inclusion);
}

// ---------------------------------------------------------------------------
// kan fill
// ---------------------------------------------------------------------------

ModuleMap kan_fill(ModulePtr m, int n, int i, const ModuleMap& h,
                   const TensorModule& mhorn, ModulePtr p) {
  HomKit kit = hom_kit(m, p, n);
  std::vector<std::optional<ModuleMap>> faces(n + 1);
  for (int j = 0; j <= n; ++j) {
    if (j == i) continue;
    // Delta^{n-1} -> Lambda^n_i hitting the j-th face
    std::vector<SimplexRef> vimg;
    for (int v = 0; v < n; ++v) {
      int w = v < j ? v : v + 1;
      vimg.push_back(mhorn.a->ref(std::to_string(w)));
    }
    auto sm = sset_map_from_vertices(*kit.level(n - 1).a, *mhorn.a, vimg);
    require(sm.has_value(), "kan_fill: face map into horn failed");
    faces[j] = compose(h, tensor_map_sset(kit.level(n - 1), mhorn, *sm));
  }
  return fill_horn_hom(kit, n, i, faces);
}

// ---------------------------------------------------------------------------
// the cellwise extension engine
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<int>> closures_of(const CellularModule& m) {
  std::vector<std::vector<int>> cl(m.cell_count());
  for (int c = 0; c < m.cell_count(); ++c) {
    std::set<int> s{c};
    for (const Element& att : m.cell(c).attach)
      for (const Term& t : att.terms) s.insert(cl[t.cell].begin(), cl[t.cell].end());
    cl[c].assign(s.begin(), s.end());
  }
  return cl;
}

struct DegCoordH {
  std::vector<std::pair<int, DegWord>> basis;
  std::map<std::pair<int, std::vector<int>>, int> pos;
  int gorder;

  DegCoordH(const CellularModule& m, int deg, const std::set<int>& allowed)
      : gorder(m.ring()->group_order()) {
    for (const auto& bw : m.basis(deg))
      if (allowed.empty() || allowed.count(bw.first)) basis.push_back(bw);
    for (int i = 0; i < (int)basis.size(); ++i)
      pos[{basis[i].first, basis[i].second.s}] = i;
  }
  int dim() const { return (int)basis.size() * gorder; }
  void add(std::vector<Int>& v, int offset, const Element& e, int sign) const {
    for (const Term& t : e.terms) {
      auto it = pos.find({t.cell, t.w.s});
      if (it == pos.end())
        throw std::runtime_error("cellwise_extend: value escapes the allowed closure");
      for (int g = 0; g < gorder; ++g)
        v[offset + it->second * gorder + g] += sign * t.coeff.c[g];
    }
  }
};

// The undefined cells of one prism group are solved jointly: the per-cell
// greedy choice can paint lower cells into a corner, while the joint system
// is exactly the lifting problem of the corresponding proof and always has a
// solution.
}  // namespace

ModuleMap constrained_extend(const ExtendProblem& ctx) {
  const CellularModule& big = *ctx.big;
  for (const auto& [c, v] : ctx.prescribed)
    for (const Element& att : big.cell(c).attach)
      for (const Term& t : att.terms)
        require(ctx.prescribed.count(t.cell),
                "cellwise_extend: prescribed set not closed at " + big.cell(t.cell).name);
  require((int)ctx.group.size() == big.cell_count(), "cellwise_extend: missing groups");

  auto big_cl = closures_of(big);
  auto tgt_cl = closures_of(*ctx.target);
  std::vector<std::vector<int>> q_cl;
  if (ctx.lift_over) q_cl = closures_of(*ctx.lift_over->dst);

  ModuleMap f;
  f.src = ctx.big;
  f.dst = ctx.target;
  f.images.resize(big.cell_count());
  std::vector<char> done(big.cell_count(), 0);
  for (const auto& [c, v] : ctx.prescribed) {
    f.images[c] = v;
    done[c] = 1;
  }

  // groups in increasing order; a group's attach data references only lower
  // groups or the group itself
  std::map<int, std::vector<int>> groups;
  for (int c = 0; c < big.cell_count(); ++c)
    if (!done[c]) groups[ctx.group[c]].push_back(c);

  long modulus = big.ring()->modulus();

  for (auto& [gid, cells] : groups) {
    // allowed support for the whole group
    std::set<int> allowed;
    for (int c : cells)
      for (int s : big_cl[c]) {
        if (!ctx.prescribed.count(s)) continue;
        for (const Term& t : f.images[s].terms)
          allowed.insert(tgt_cl[t.cell].begin(), tgt_cl[t.cell].end());
      }
    if (ctx.lift_over) {
      std::set<int> qcells;
      for (int c : cells)
        for (int s : big_cl[c])
          for (const Term& t : ctx.bottom->images[s].terms)
            qcells.insert(q_cl[t.cell].begin(), q_cl[t.cell].end());
      for (int q : qcells) {
        int pc = ctx.theta[q];
        allowed.insert(tgt_cl[pc].begin(), tgt_cl[pc].end());
      }
    }

    // unknown layout
    std::map<int, int> upos;  // big-cell -> offset
    std::vector<DegCoordH> uco;
    int ucols = 0;
    for (int c : cells) {
      upos[c] = ucols;
      uco.emplace_back(*ctx.target, big.cell(c).dim, allowed);
      ucols += uco.back().dim();
    }

    // equations: faces of each group cell, plus lift equations
    // every face equation's content lives inside the allowed closure (it is
    // attach-closed), so rows are restricted to those coordinates
    std::set<int> eq_support = allowed;
    for (int c : cells)
      for (const Element& att : big.cell(c).attach)
        for (const Term& t : att.terms)
          if (done[t.cell])
            for (const Term& v : f.images[t.cell].terms)
              eq_support.insert(tgt_cl[v.cell].begin(), tgt_cl[v.cell].end());

    struct EqBlock {
      int cell;
      int face;  // -1 for a lift equation
      DegCoordH co;
    };
    std::vector<EqBlock> eqs;
    for (int c : cells) {
      int k = big.cell(c).dim;
      for (int i = 0; i <= k && k >= 1; ++i)
        eqs.push_back(EqBlock{c, i, DegCoordH(*ctx.target, k - 1, eq_support)});
      if (ctx.lift_over)
        eqs.push_back(EqBlock{c, -1, DegCoordH(*ctx.lift_over->dst, k, {})});
    }
    int rows = 0;
    std::vector<int> eqoffset;
    for (auto& e : eqs) {
      eqoffset.push_back(rows);
      rows += e.co.dim();
    }
    int cols = ucols + (modulus > 0 ? rows : 0);
    IntMat A(rows, cols);
    std::vector<Int> rhs(rows, Int(0));

    // columns: unit unknowns
    for (size_t ui = 0; ui < cells.size(); ++ui) {
      int c = cells[ui];
      const DegCoordH& co = uco[ui];
      for (int j = 0; j < (int)co.basis.size(); ++j)
        for (int g = 0; g < co.gorder; ++g) {
          int col = upos[c] + j * co.gorder + g;
          Element unit{big.cell(c).dim,
                       {Term{RingValue::basis(ctx.target->ring(), g), co.basis[j].first,
                             co.basis[j].second}}};
          for (size_t q = 0; q < eqs.size(); ++q) {
            const EqBlock& eq = eqs[q];
            std::vector<Int> v(eq.co.dim(), Int(0));
            bool any = false;
            if (eq.face >= 0) {
              if (eq.cell == c) {
                eq.co.add(v, 0, ctx.target->face(unit, eq.face), +1);
                any = true;
              }
              for (const Term& t : big.cell(eq.cell).attach[eq.face].terms) {
                if (t.cell != c) continue;
                Element img = ctx.target->apply_mono(unit, t.w.to_sur(big.cell(c).dim));
                img = element_scale(t.coeff, img);
                eq.co.add(v, 0, img, -1);
                any = true;
              }
            } else if (eq.cell == c) {
              eq.co.add(v, 0, ctx.lift_over->apply(unit), +1);
              any = true;
            }
            if (any)
              for (int r = 0; r < eq.co.dim(); ++r)
                if (v[r] != 0) A.at(eqoffset[q] + r, col) = v[r];
          }
        }
    }
    // right-hand sides from the defined part
    for (size_t q = 0; q < eqs.size(); ++q) {
      const EqBlock& eq = eqs[q];
      std::vector<Int> v(eq.co.dim(), Int(0));
      if (eq.face >= 0) {
        for (const Term& t : big.cell(eq.cell).attach[eq.face].terms) {
          if (!done[t.cell]) continue;
          Element img =
              ctx.target->apply_mono(f.images[t.cell], t.w.to_sur(big.cell(t.cell).dim));
          img = element_scale(t.coeff, img);
          eq.co.add(v, 0, img, +1);
        }
      } else {
        eq.co.add(v, 0, ctx.bottom->images[eq.cell], +1);
      }
      for (int r = 0; r < eq.co.dim(); ++r) rhs[eqoffset[q] + r] = v[r];
    }
    if (modulus > 0)
      for (int r = 0; r < rows; ++r) A.at(r, ucols + r) = modulus;

    auto x = solve_integer(A, rhs);
    require(x.has_value(), "cellwise_extend: no filler for prism group of cell " +
                               big.cell(cells[0]).name +
                               " (this is an internal soundness bug)");
    for (size_t ui = 0; ui < cells.size(); ++ui) {
      int c = cells[ui];
      const DegCoordH& co = uco[ui];
      Element e = element_zero(big.cell(c).dim);
      for (int j = 0; j < (int)co.basis.size(); ++j) {
        RingValue coeff = RingValue::zero(ctx.target->ring());
        for (int g = 0; g < co.gorder; ++g)
          coeff.c[g] = (*x)[upos[c] + j * co.gorder + g];
        coeff.reduce();
        if (!coeff.is_zero())
          e.terms.push_back(Term{coeff, co.basis[j].first, co.basis[j].second});
      }
      element_canonicalize(e);
      f.images[c] = e;
      done[c] = 1;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// relative fills and lifts
// ---------------------------------------------------------------------------

namespace {

// prescription of h on the horn part and g on the A part, with overlap check
std::map<int, Element> fill_prescription(const TensorModule& mdn, ModulePtr m,
                                         const Submodule& a, const ModuleMap& g,
                                         const TensorModule& adn, const ModuleMap& h,
                                         const TensorModule& mhorn) {
  std::map<int, Element> pres;
  // horn part
  for (int c = 0; c < mhorn.mod->cell_count(); ++c) {
    const TensorCell& tc = mhorn.tcell(c);
    SimplexRef y_dn = mdn.a->ref(mhorn.a->name(tc.a.base));
    TensorCell key{tc.m_cell, tc.alpha, DegSimplex{y_dn, tc.a.w}};
    pres[mdn.cell_index(key)] = h.images[c];
  }
  // A part
  for (int c = 0; c < adn.mod->cell_count(); ++c) {
    const TensorCell& tc = adn.tcell(c);
    int big_mcell = a.parent_cell[tc.m_cell];
    TensorCell key{big_mcell, tc.alpha, tc.a};
    int idx = mdn.cell_index(key);
    auto it = pres.find(idx);
    if (it != pres.end()) {
      require(it->second == g.images[c],
              "relative fill: inputs disagree on overlap cell " + mdn.mod->cell(idx).name);
    } else {
      pres[idx] = g.images[c];
    }
  }
  return pres;
}

}  // namespace

RelativeFill relative_horn_fill(ModulePtr m, const Submodule& a, int n, int i,
                                const ModuleMap& g, const TensorModule& adn,
                                const ModuleMap& h, const TensorModule& mhorn,
                                ModulePtr p) {
  (void)i;
  RelativeFill out;
  out.mdn = tensor_sset(m, delta_sset(n));
  ExtendProblem ctx;
  ctx.big = out.mdn.mod;
  ctx.target = p;
  ctx.prescribed = fill_prescription(out.mdn, m, a, g, adn, h, mhorn);
  ctx.group.resize(out.mdn.mod->cell_count());
  for (int c = 0; c < out.mdn.mod->cell_count(); ++c)
    ctx.group[c] = out.mdn.tcell(c).m_cell;
  out.extension = constrained_extend(ctx);
  return out;
}

RelativeLift relative_lift(ModulePtr m, const Submodule& a, int n, int i,
                           const ModuleMap& top, const TensorModule& mhorn,
                           const ModuleMap& g_on_a, const TensorModule& adn,
                           const ModuleMap& bottom, const TensorModule& mdn_in,
                           const ModuleMap& proj, const std::vector<int>& theta) {
  (void)i;
  RelativeLift out;
  out.mdn = mdn_in;
  ExtendProblem ctx;
  ctx.big = out.mdn.mod;
  ctx.target = proj.src;
  ctx.prescribed = fill_prescription(out.mdn, m, a, g_on_a, adn, top, mhorn);
  ctx.group.resize(out.mdn.mod->cell_count());
  for (int c = 0; c < out.mdn.mod->cell_count(); ++c)
    ctx.group[c] = out.mdn.tcell(c).m_cell;
  // the square must commute on the prescribed part
  for (const auto& [c, v] : ctx.prescribed)
    require(proj.apply(v) == bottom.images[c],
            "relative_lift: square does not commute at cell " + out.mdn.mod->cell(c).name);
  ctx.lift_over = &proj;
  ctx.bottom = &bottom;
  ctx.theta = theta;
  out.lift = constrained_extend(ctx);
  return out;
}

// ---------------------------------------------------------------------------
// mapping cylinders
// ---------------------------------------------------------------------------

MappingCylinder mapping_cylinder(const ModuleMap& f) {
  MappingCylinder tc;
  tc.f = f;
  tc.akit = cyl_kit(f.src);
  tc.po = pushout(tc.akit.i1, f);
  tc.tf = tc.po.mod;
  tc.back = tc.po.from_c;
  tc.front = compose(tc.po.from_b, tc.akit.i0);
  tc.proj = pushout_induced(tc.po, tc.akit.i1, f, compose(f, tc.akit.p), identity_map(f.dst));
  return tc;
}

ModuleMap mapping_cylinder_map(const MappingCylinder& tf, const MappingCylinder& tf2,
                               const ModuleMap& a, const ModuleMap& b) {
  require_equal_maps(compose(tf2.f, a), compose(b, tf.f),
                     "mapping_cylinder_map: square does not commute");
  ModuleMap acyl = tensor_map_module(tf.akit.cyl, tf2.akit.cyl, a);
  ModuleMap u = compose(tf2.po.from_b, acyl);
  ModuleMap v = compose(tf2.back, b);
  return pushout_induced(tf.po, tf.akit.i1, tf.f, u, v);
}

namespace {

// map on D[X] for the pushout D of (i : A >-> B_, f : A -> C_), assembled
// from maps on B_[X] and C_[X]
ModuleMap glue_over_pushout(const TensorModule& dx, const PushoutResult& po,
                            const ModuleMap& i, const ModuleMap& f,
                            const TensorModule& bx, const ModuleMap& on_b,
                            const TensorModule& cx, const ModuleMap& on_c) {
  auto icells = cellular_inclusion_cells(i);
  require(icells.has_value(), "glue_over_pushout: corrupt inclusion");
  std::vector<int> a_of_b(i.dst->cell_count(), -1);
  for (int c = 0; c < i.src->cell_count(); ++c) a_of_b[(*icells)[c]] = c;
  auto ccells = cellular_inclusion_cells(po.from_c);
  require(ccells.has_value(), "glue_over_pushout: corrupt pushout");
  std::vector<int> origin_c(po.mod->cell_count(), -1);
  for (int c = 0; c < (int)ccells->size(); ++c) origin_c[(*ccells)[c]] = c;
  std::vector<int> origin_b(po.mod->cell_count(), -1);
  for (int b = 0; b < i.dst->cell_count(); ++b) {
    if (a_of_b[b] >= 0) continue;
    origin_b[po.from_b.images[b].terms[0].cell] = b;
  }

  ModuleMap r;
  r.src = dx.mod;
  r.dst = on_c.dst;
  for (int c = 0; c < dx.mod->cell_count(); ++c) {
    const TensorCell& tc = dx.tcell(c);
    if (origin_c[tc.m_cell] >= 0) {
      TensorCell key{origin_c[tc.m_cell], tc.alpha, tc.a};
      r.images.push_back(on_c.images[cx.cell_index(key)]);
    } else {
      TensorCell key{origin_b[tc.m_cell], tc.alpha, tc.a};
      r.images.push_back(on_b.images[bx.cell_index(key)]);
    }
  }
  return r;
}

SSetMap slide_map(bool toward_one) {
  // max(x, t): from the identity (t = 0) to the collapse onto 1 (t = 1);
  // min(x, t): from the collapse onto 0 (t = 0) to the identity (t = 1)
  auto sq = square_sset();
  auto d1 = delta_sset(1);
  std::vector<SimplexRef> vimg(sq->sset.count(0));
  for (int i = 0; i < sq->sset.count(0); ++i) {
    auto comps = sq->components(SimplexRef{0, i});
    int x = sq->fac1->name(comps.first.base) == "1" ? 1 : 0;
    int t = sq->fac2->name(comps.second.base) == "1" ? 1 : 0;
    int v = toward_one ? std::max(x, t) : std::min(x, t);
    vimg[i] = d1->ref(v ? "1" : "0");
  }
  auto m = sset_map_from_vertices(sq->sset, *d1, vimg);
  if (!m) throw std::runtime_error("slide_map failed");
  return *m;
}

}  // namespace

DeformationRetract cylinder_retraction(const MappingCylinder& tc) {
  // homotopy id_{T(f)} ~ back o proj, rel B, by sliding the cylinder to 1
  auto d1 = delta_sset(1);
  TensorModule tfcyl = tensor_sset(tc.tf, d1);
  TensorModule bcyl = tensor_sset(tc.f.dst, d1);
  TensorModule acyl2 = tensor_sset(tc.akit.cyl.mod, d1);  // (A[D1])[D1]

  CylKit bkit = cyl_kit(tc.f.dst);
  ModuleMap on_b = compose(tc.back, bkit.p);  // trivial on the B part

  SSetMap slide = slide_map(true);
  ModuleMap bimap = tensor_bimap(tc.akit.cyl, acyl2, tc.akit.cyl, *square_sset(), slide);
  ModuleMap on_cyl = compose(tc.po.from_b, bimap);

  ModuleMap carrier = glue_over_pushout(tfcyl, tc.po, tc.akit.i1, tc.f, acyl2, on_cyl,
                                        bcyl, on_b);
  DeformationRetract dr;
  dr.retraction = tc.proj;
  dr.homotopy = homotopy_from_carrier(tfcyl, carrier);
  return dr;
}

// ---------------------------------------------------------------------------
// witnesses
// ---------------------------------------------------------------------------

std::optional<std::string> verify_witness(const EquivalenceWitness& w) {
  if (auto e = w.fwd.verify()) return "fwd: " + *e;
  if (auto e = w.inv.verify()) return "inv: " + *e;
  if (auto e = w.inv_fwd.carrier.verify()) return "inv_fwd carrier: " + *e;
  if (auto e = w.fwd_inv.carrier.verify()) return "fwd_inv carrier: " + *e;
  if (auto e = w.inv_fwd.verify_endpoints(compose(w.inv, w.fwd), identity_map(w.fwd.src)))
    return "inv_fwd: " + *e;
  if (auto e = w.fwd_inv.verify_endpoints(compose(w.fwd, w.inv), identity_map(w.fwd.dst)))
    return "fwd_inv: " + *e;
  return std::nullopt;
}

EquivalenceWitness witness_identity(ModulePtr m) {
  EquivalenceWitness w;
  w.fwd = identity_map(m);
  w.inv = w.fwd;
  w.inv_fwd = trivial_homotopy(w.fwd);
  w.fwd_inv = w.inv_fwd;
  return w;
}

EquivalenceWitness witness_from_iso(const ModuleMap& f, const ModuleMap& finv) {
  require_equal_maps(compose(finv, f), identity_map(f.src), "witness_from_iso: not inverse");
  require_equal_maps(compose(f, finv), identity_map(f.dst), "witness_from_iso: not inverse");
  EquivalenceWitness w;
  w.fwd = f;
  w.inv = finv;
  w.inv_fwd = trivial_homotopy(identity_map(f.src));
  w.fwd_inv = trivial_homotopy(identity_map(f.dst));
  return w;
}

EquivalenceWitness witness_from_retract(const DeformationRetract& d, const ModuleMap& incl) {
  EquivalenceWitness w;
  w.fwd = incl;
  w.inv = d.retraction;
  w.inv_fwd = trivial_homotopy(identity_map(incl.src));
  w.fwd_inv = inverse_homotopy(d.homotopy);
  return w;
}

EquivalenceWitness compose_witness(const EquivalenceWitness& wf, const EquivalenceWitness& wg) {
  EquivalenceWitness w;
  w.fwd = compose(wg.fwd, wf.fwd);
  w.inv = compose(wf.inv, wg.inv);
  // f- g- g f ~ f- f ~ id
  Homotopy h1 = whisker_left(wf.inv, whisker_right(wg.inv_fwd, wf.fwd));
  w.inv_fwd = concat(h1, wf.inv_fwd);
  Homotopy h2 = whisker_left(wg.fwd, whisker_right(wf.fwd_inv, wg.inv));
  w.fwd_inv = concat(h2, wg.fwd_inv);
  return w;
}

EquivalenceWitness right_cancel_witness(const ModuleMap& f, const EquivalenceWitness& wf,
                                        const ModuleMap& g, const EquivalenceWitness& wgf) {
  EquivalenceWitness w;
  w.fwd = g;
  w.inv = compose(f, wgf.inv);
  w.fwd_inv = wgf.fwd_inv;  // g o (f o (gf)-) = (gf)(gf)- exactly
  // inv o g = f (gf)- g ~ id via f f- insertion
  ModuleMap X = compose(w.inv, g);
  Homotopy p1 = inverse_homotopy(whisker_left(X, wf.fwd_inv));      // X ~ X f f-
  Homotopy p2 = whisker_left(f, whisker_right(wgf.inv_fwd, wf.inv));  // X f f- ~ f f-
  w.inv_fwd = concat(concat(p1, p2), wf.fwd_inv);
  return w;
}

EquivalenceWitness left_cancel_witness(const ModuleMap& f, const ModuleMap& g,
                                       const EquivalenceWitness& wg,
                                       const EquivalenceWitness& wgf) {
  EquivalenceWitness w;
  w.fwd = f;
  w.inv = compose(wgf.inv, g);
  w.inv_fwd = wgf.inv_fwd;  // (gf)- g f = (gf)-(gf) exactly
  ModuleMap Y = compose(f, w.inv);
  Homotopy p1 = inverse_homotopy(whisker_right(wg.inv_fwd, Y));        // Y ~ g- g Y
  Homotopy p2 = whisker_left(wg.inv, whisker_right(wgf.fwd_inv, g));   // g- (gf)(gf)- g ~ g- g
  w.fwd_inv = concat(concat(p1, p2), wg.inv_fwd);
  return w;
}

// ---------------------------------------------------------------------------
// deformation data for acyclic inclusions
// ---------------------------------------------------------------------------

SSetMap edge_into_square(int which) {
  // 0: bottom (t=0), 1: top (t=1), 2: left (x=0), 3: right (x=1)
  auto sq = square_sset();
  auto d1 = delta_sset(1);
  auto corner_ref = [&](int x, int t) -> SimplexRef {
    for (int i = 0; i < sq->sset.count(0); ++i) {
      auto comps = sq->components(SimplexRef{0, i});
      int cx = sq->fac1->name(comps.first.base) == "1" ? 1 : 0;
      int ct = sq->fac2->name(comps.second.base) == "1" ? 1 : 0;
      if (cx == x && ct == t) return SimplexRef{0, i};
    }
    throw std::runtime_error("corner not found");
  };
  std::vector<SimplexRef> vimg(2);
  switch (which) {
    case 0: vimg = {corner_ref(0, 0), corner_ref(1, 0)}; break;
    case 1: vimg = {corner_ref(0, 1), corner_ref(1, 1)}; break;
    case 2: vimg = {corner_ref(0, 0), corner_ref(0, 1)}; break;
    default: vimg = {corner_ref(1, 0), corner_ref(1, 1)}; break;
  }
  auto m = sset_map_from_vertices(*d1, sq->sset, vimg);
  if (!m) throw std::runtime_error("edge_into_square failed");
  return *m;
}

DeformationRetract retract_of_acyclic_inclusion(const ModuleMap& i,
                                                const EquivalenceWitness& w) {
  auto icells = cellular_inclusion_cells(i);
  require(icells.has_value(), "retract_of_acyclic_inclusion: not a cellular inclusion");
  ModulePtr X = i.src;
  ModulePtr Y = i.dst;

  // K : Y[D1] -> X from q (at the 1-end) extending (id ~ q o i) on X
  Submodule xs = submodule(Y, std::set<int>((*icells).begin(), (*icells).end()));
  ModuleMap to_sub = xs.corestrict_map(i);  // X -> xs.mod, an iso on cells
  ModuleMap sub_to_x;                       // xs.mod -> X (cell bijection)
  {
    sub_to_x.src = xs.mod;
    sub_to_x.dst = X;
    sub_to_x.images.resize(xs.mod->cell_count());
    for (int c = 0; c < X->cell_count(); ++c)
      sub_to_x.images[to_sub.images[c].terms[0].cell] = X->generator(c);
  }

  Homotopy start = inverse_homotopy(w.inv_fwd);  // id_X ~ q o i
  // carrier on xs.mod[D1] -> X
  TensorModule xscyl = tensor_sset(xs.mod, delta_sset(1));
  ModuleMap g_carrier = compose(start.carrier, tensor_map_module(xscyl, start.cyl, sub_to_x));

  TensorModule yhorn = tensor_sset(Y, horn_sset(1, 1));
  ModuleMap h_on_end;  // Y[{1}] -> X, the map q
  {
    h_on_end.src = yhorn.mod;
    h_on_end.dst = X;
    for (int c = 0; c < yhorn.mod->cell_count(); ++c) {
      const TensorCell& tc = yhorn.tcell(c);
      h_on_end.images.push_back(
          X->apply_mono(w.inv.images[tc.m_cell],
                        tc.alpha.to_sur(Y->cell(tc.m_cell).dim)));
    }
  }
  RelativeFill K = relative_horn_fill(Y, xs, 1, 1, g_carrier, xscyl, h_on_end, yhorn, X);
  Homotopy Kh = homotopy_from_carrier(K.mdn, K.extension);
  ModuleMap r = Kh.at(0);
  require_equal_maps(compose(r, i), identity_map(X), "retract: r o i != id");

  ModuleMap s = compose(i, r);
  // H : id_Y ~ s
  Homotopy H = inverse_homotopy(concat(whisker_left(i, Kh), w.fwd_inv));
  // Hbar together with its filling 2-simplex
  InverseKit ik = inverse_fill(H);
  Homotopy Hbar = ik.inv;  // s ~ id
  // chi_l: all faces trivial
  ModuleMap tr1 = trivial_homotopy(identity_map(Y)).carrier;
  tr1.src = ik.kit.level(1).mod;
  ModuleMap chi_l = hom_degeneracy(ik.kit, tr1, 1, 0);

  // The square (t vertical, x horizontal) with left edge H, bottom Tr(id),
  // top Hbar o s, and the X-part given by the chi-triangles is extended in
  // the horizontal direction by one relative horn fill over Y[D1_t]; the
  // right edge is the homotopy id ~ s rel X.
  Homotopy HbarS = whisker_right(Hbar, s);
  TensorModule ycyl = tensor_sset(Y, delta_sset(1));  // Y[D1_t]
  ModulePtr Mv = ycyl.mod;
  auto d1 = delta_sset(1);
  SimplexRef v0 = d1->ref("0"), v1 = d1->ref("1");

  // submodule S' of Y[D1_t]: both t-ends plus the X-cylinder
  std::set<int> xset((*icells).begin(), (*icells).end());
  std::set<int> spcells;
  for (int c = 0; c < Mv->cell_count(); ++c) {
    const TensorCell& tc = ycyl.tcell(c);
    if (xset.count(tc.m_cell) || tc.a.base.dim == 0) spcells.insert(c);
  }
  Submodule sp = submodule(Mv, spcells);

  // X part of the square evaluated through the two triangles: for an
  // S'[D1_x]-cell over X, classify the (x-coordinate, t-coordinate) pair in
  // the square and read off the corresponding chi value
  auto sq = square_sset();
  TensorModule spcylx = tensor_sset(sp.mod, delta_sset(1));
  ModuleMap g_on_sp;
  g_on_sp.src = spcylx.mod;
  g_on_sp.dst = Y;
  {
    for (int c = 0; c < spcylx.mod->cell_count(); ++c) {
      const TensorCell& oc = spcylx.tcell(c);          // (S'-cell, ax, xsim)
      int pc = sp.parent_cell[oc.m_cell];              // Y[D1_t]-cell
      auto [ypart, tsim] = ycyl.components(pc, oc.alpha);
      DegSimplex xsim = oc.a;
      if (xset.count(ypart.first)) {
        // through the triangles: pair (x, t) classified in the square
        DegSimplex prod = sq->classify(xsim, tsim);
        // find the Delta^2 simplex with the same vertex pattern
        std::vector<SimplexRef> verts = sq->sset.vertex_sequence(prod);
        auto corner = [&](SimplexRef v) {
          auto comps = sq->components(v);
          int cx = sq->fac1->name(comps.first.base) == "1" ? 1 : 0;
          int ct = sq->fac2->name(comps.second.base) == "1" ? 1 : 0;
          return std::make_pair(cx, ct);
        };
        auto upper_vertex = [&](std::pair<int, int> cc) -> int {
          if (cc == std::make_pair(0, 0)) return 0;
          if (cc == std::make_pair(0, 1)) return 1;
          if (cc == std::make_pair(1, 1)) return 2;
          return -1;
        };
        auto lower_vertex = [&](std::pair<int, int> cc) -> int {
          if (cc == std::make_pair(0, 0)) return 0;
          if (cc == std::make_pair(1, 0)) return 1;
          if (cc == std::make_pair(1, 1)) return 2;
          return -1;
        };
        bool use_upper = true;
        std::vector<int> img;
        for (const SimplexRef v : verts) {
          int u = upper_vertex(corner(v));
          if (u < 0) { use_upper = false; break; }
          img.push_back(u);
        }
        if (!use_upper) {
          img.clear();
          for (const SimplexRef v : verts) {
            int u = lower_vertex(corner(v));
            require(u >= 0, "retract: square simplex in neither triangle");
            img.push_back(u);
          }
        }
        // image simplex of Delta^2 (possibly degenerate)
        std::vector<int> uniq;
        for (int v : img)
          if (uniq.empty() || uniq.back() != v) uniq.push_back(v);
        std::string nm;
        for (size_t k = 0; k < uniq.size(); ++k) {
          if (k) nm += ".";
          nm += std::to_string(uniq[k]);
        }
        SimplexRef face = ik.kit.level(2).a->ref(nm);
        // the full vertex sequence already carries prod's degeneracies, so
        // the repeat positions are the complete word
        std::vector<int> wrd;
        for (int k = (int)img.size() - 2; k >= 0; --k)
          if (img[k] == img[k + 1]) wrd.push_back(k);
        DegWord total{wrd};
        const ModuleMap& chi = use_upper ? ik.chi : chi_l;
        g_on_sp.images.push_back(chi.apply(ik.kit.level(2).embed(
            Element{spcylx.mod->cell(c).dim,
                    {Term{RingValue::one(Y->ring()), ypart.first, ypart.second}}},
            DegSimplex{face, total})));
      } else {
        // a t-end: bottom Tr(id), top Hbar o s, in the x direction
        require(tsim.base.dim == 0, "retract: unexpected S' cell");
        const Homotopy* hh;
        Homotopy trh = trivial_homotopy(identity_map(Y));
        bool is_top = ycyl.a->name(tsim.base) == "1";
        hh = is_top ? &HbarS : &trh;
        g_on_sp.images.push_back(hh->carrier.apply(hh->cyl.embed(
            Element{spcylx.mod->cell(c).dim,
                    {Term{RingValue::one(Y->ring()), ypart.first, ypart.second}}},
            xsim)));
      }
    }
  }

  // horn data at x = 0: the homotopy H read vertically
  TensorModule mvhorn = tensor_sset(Mv, horn_sset(1, 0));
  ModuleMap h_on_left;
  h_on_left.src = mvhorn.mod;
  h_on_left.dst = Y;
  for (int c = 0; c < mvhorn.mod->cell_count(); ++c) {
    const TensorCell& tc = mvhorn.tcell(c);
    h_on_left.images.push_back(
        Y->apply_mono(H.carrier.images[tc.m_cell], tc.alpha.to_sur(Mv->cell(tc.m_cell).dim)));
  }

  RelativeFill filled =
      relative_horn_fill(Mv, sp, 1, 0, g_on_sp, spcylx, h_on_left, mvhorn, Y);

  // right edge: restrict the filled square to x = 1
  ModuleMap relcarrier;
  relcarrier.src = Mv;
  relcarrier.dst = Y;
  for (int c = 0; c < Mv->cell_count(); ++c) {
    TensorCell key{c, DegWord{}, degenerate_vertex(v1, Mv->cell(c).dim)};
    relcarrier.images.push_back(filled.extension.images[filled.mdn.cell_index(key)]);
  }
  (void)v0;
  Homotopy relh = homotopy_from_carrier(ycyl, relcarrier);

  DeformationRetract out;
  out.retraction = r;
  out.homotopy = relh;  // id_Y ~ i o r, rel X
  if (auto e = relh.verify_endpoints(identity_map(Y), s))
    throw std::runtime_error("retract_of_acyclic_inclusion: " + *e);
  return out;
}

namespace {

EquivalenceWitness projection_witness(const MappingCylinder& tc) {
  DeformationRetract dr = cylinder_retraction(tc);
  EquivalenceWitness w;
  w.fwd = tc.proj;
  w.inv = tc.back;
  w.inv_fwd = inverse_homotopy(dr.homotopy);  // back o proj ~ id
  w.fwd_inv = trivial_homotopy(identity_map(tc.f.dst));  // proj o back = id
  return w;
}

EquivalenceWitness front_witness(const MappingCylinder& tc, const EquivalenceWitness& wf) {
  // front : A >-> T(f) with proj o front = f
  EquivalenceWitness wproj = projection_witness(tc);
  return left_cancel_witness(tc.front, tc.proj, wproj, wf);
}

}  // namespace

DeformationRetract deformation_coretraction(const MappingCylinder& tc,
                                            const EquivalenceWitness& wf) {
  EquivalenceWitness wfront = front_witness(tc, wf);
  return retract_of_acyclic_inclusion(tc.front, wfront);
}

// ---------------------------------------------------------------------------
// pushout of weak equivalences
// ---------------------------------------------------------------------------

PushoutEquivalence pushout_equivalence(const ModuleMap& i, const EquivalenceWitness& wi,
                                       const ModuleMap& f) {
  PushoutEquivalence out;
  auto icells = cellular_inclusion_cells(i);
  require(icells.has_value(), "pushout_equivalence: first map must be a cellular inclusion");
  ModulePtr A = i.src;
  ModulePtr C = i.dst;
  ModulePtr B = f.dst;

  out.po = pushout(i, f);  // D: cells B u (C minus A); from_c : B -> D

  // W = A[D1] u_{A[1]} C realized as the mapping cylinder of i
  out.w_cyl = mapping_cylinder(i);
  ModulePtr W = out.w_cyl.tf;

  // R : C[D1] -> W rel A, prescribed: cylinder part identically, C at the 1 end
  CylKit ckit = cyl_kit(C);
  Submodule asub = submodule(C, std::set<int>((*icells).begin(), (*icells).end()));
  TensorModule asubcyl = tensor_sset(asub.mod, delta_sset(1));
  // A[D1] -> W through the cylinder part
  ModuleMap sub_to_a;
  {
    sub_to_a.src = asub.mod;
    sub_to_a.dst = A;
    sub_to_a.images.resize(asub.mod->cell_count());
    ModuleMap to_sub = asub.corestrict_map(i);
    for (int c = 0; c < A->cell_count(); ++c)
      sub_to_a.images[to_sub.images[c].terms[0].cell] = A->generator(c);
  }
  ModuleMap acyl_map = tensor_map_module(asubcyl, out.w_cyl.akit.cyl, sub_to_a);
  ModuleMap g_part = compose(out.w_cyl.po.from_b, acyl_map);  // asub[D1] -> W
  TensorModule chorn = tensor_sset(C, horn_sset(1, 1));
  ModuleMap h_part;  // C[{1}] -> W via the back inclusion
  {
    h_part.src = chorn.mod;
    h_part.dst = W;
    for (int c = 0; c < chorn.mod->cell_count(); ++c) {
      const TensorCell& tc = chorn.tcell(c);
      h_part.images.push_back(W->apply_mono(out.w_cyl.back.images[tc.m_cell],
                                            tc.alpha.to_sur(C->cell(tc.m_cell).dim)));
    }
  }
  RelativeFill Rf = relative_horn_fill(C, asub, 1, 1, g_part, asubcyl, h_part, chorn, W);
  const ModuleMap& R = Rf.extension;  // C[D1] -> W
  TensorModule ccyl = Rf.mdn;

  // e : W -> C, g : C -> W and the homotopies
  out.e = out.w_cyl.proj;
  CylKit ckit2 = cyl_kit(C);
  // g = R o iota_0^C
  ModuleMap i0c = ckit2.i0;
  i0c.dst = ccyl.mod;  // same canonical construction
  out.g = compose(R, i0c);
  out.h_eg = homotopy_from_carrier(ccyl, compose(out.e, R));  // e g ~ id_C

  // G = R o C[min] o j[D1]
  TensorModule wcyl = tensor_sset(W, delta_sset(1));
  // j : W -> C[D1]: cylinder part by inclusion, C at the 1-end
  ModuleMap j;
  {
    j.src = W;
    j.dst = ccyl.mod;
    j.images.resize(W->cell_count());
    // W cells: C-origin (back) and cylinder-origin
    auto bcells = cellular_inclusion_cells(out.w_cyl.back);
    require(bcells.has_value(), "pushout_equivalence: corrupt cylinder");
    std::vector<int> c_origin(W->cell_count(), -1);
    for (int c = 0; c < C->cell_count(); ++c) c_origin[(*bcells)[c]] = c;
    auto d1 = delta_sset(1);
    SimplexRef v1 = d1->ref("1");
    for (int wcell = 0; wcell < W->cell_count(); ++wcell) {
      if (c_origin[wcell] >= 0) {
        int c = c_origin[wcell];
        j.images[wcell] =
            ccyl.embed(C->generator(c), degenerate_vertex(v1, C->cell(c).dim));
      }
    }
    // cylinder-origin cells: through i[D1] : A[D1] -> C[D1]
    ModuleMap aicyl = tensor_map_module(out.w_cyl.akit.cyl, ccyl, i);
    for (int acell = 0; acell < out.w_cyl.akit.cyl.mod->cell_count(); ++acell) {
      const Element& img = out.w_cyl.po.from_b.images[acell];
      if (img.terms.size() == 1 && img.terms[0].w.empty() &&
          c_origin[img.terms[0].cell] < 0)
        j.images[img.terms[0].cell] = aicyl.images[acell];
    }
  }
  TensorModule ccyl2 = tensor_sset(ccyl.mod, delta_sset(1));
  ModuleMap jcyl = tensor_map_module(wcyl, ccyl2, j);
  SSetMap slide = slide_map(false);  // min: from collapse-to-0 to id
  ModuleMap bim = tensor_bimap(ccyl, ccyl2, ccyl, *square_sset(), slide);
  out.g_ge = homotopy_from_carrier(wcyl, compose(R, compose(bim, jcyl)));  // g e ~ id_W

  // Q = B u_A W along the front inclusion
  out.q_po = pushout(out.w_cyl.front, f);  // cells B u (W minus A)

  // part 1: B is a deformation retract of Q
  EquivalenceWitness wfront = front_witness(out.w_cyl, wi);
  DeformationRetract drA = retract_of_acyclic_inclusion(out.w_cyl.front, wfront);
  ModuleMap rQ = pushout_induced(out.q_po, out.w_cyl.front, f,
                                 compose(f, drA.retraction), identity_map(B));
  TensorModule qcyl = tensor_sset(out.q_po.mod, delta_sset(1));
  TensorModule bcyl = tensor_sset(B, delta_sset(1));
  TensorModule wcyl2 = tensor_sset(W, delta_sset(1));
  CylKit bkit = cyl_kit(B);
  ModuleMap hq = glue_over_pushout(qcyl, out.q_po, out.w_cyl.front, f, wcyl2,
                                   compose(out.q_po.from_b, drA.homotopy.carrier), bcyl,
                                   compose(out.q_po.from_c, bkit.p));
  out.b_to_q = witness_from_retract(
      DeformationRetract{rQ, homotopy_from_carrier(qcyl, hq)}, out.q_po.from_c);

  // part 2: Q -> D via the pushed collapse
  ModuleMap theta = pushout_induced(out.q_po, out.w_cyl.front, f,
                                    compose(out.po.from_b, out.e), out.po.from_c);
  ModuleMap sigma = pushout_induced(out.po, i, f, compose(out.q_po.from_b, out.g),
                                    out.q_po.from_c);
  // fwd_inv: theta sigma ~ id_D, glued from h_eg
  TensorModule dcyl = tensor_sset(out.po.mod, delta_sset(1));
  ModuleMap fwdinv_carrier = glue_over_pushout(
      dcyl, out.po, i, f, ccyl /* C[D1] */,
      compose(out.po.from_b, out.h_eg.carrier), bcyl,
      compose(out.po.from_c, bkit.p));
  Homotopy theta_sigma = homotopy_from_carrier(dcyl, fwdinv_carrier);  // eg-part ~ id
  // inv_fwd: sigma theta ~ id_Q, glued from g_ge
  ModuleMap invfwd_carrier = glue_over_pushout(
      qcyl, out.q_po, out.w_cyl.front, f, wcyl2,
      compose(out.q_po.from_b, out.g_ge.carrier), bcyl,
      compose(out.q_po.from_c, bkit.p));
  Homotopy sigma_theta = homotopy_from_carrier(qcyl, invfwd_carrier);

  out.q_to_d.fwd = theta;
  out.q_to_d.inv = sigma;
  out.q_to_d.fwd_inv = theta_sigma;
  out.q_to_d.inv_fwd = sigma_theta;

  out.corner = compose_witness(out.b_to_q, out.q_to_d);
  require_equal_maps(out.corner.fwd, out.po.from_c, "pushout_equivalence: corner mismatch");
  return out;
}

// ---------------------------------------------------------------------------
// pushout of an acyclic map along a cellular inclusion (the remark variant)
// ---------------------------------------------------------------------------

namespace {

struct PushoutMapEquivalence {
  PushoutResult po;           // D = pushout(i : A >-> B, f : A -> C)
  EquivalenceWitness corner;  // witness for from_b : B -> D
};

PushoutMapEquivalence pushout_map_equivalence(const ModuleMap& i,
                                              const ModuleMap& f,
                                              const EquivalenceWitness& wf) {
  PushoutMapEquivalence out;
  auto icells = cellular_inclusion_cells(i);
  require(icells.has_value(), "pushout_map_equivalence: need a cellular inclusion");
  ModulePtr A = i.src;
  ModulePtr B = i.dst;
  ModulePtr C = f.dst;
  out.po = pushout(i, f);

  // Q = B u_A T(f) along the front of T(f)
  MappingCylinder tcf = mapping_cylinder(f);
  PushoutResult q_po = pushout(i, tcf.front);  // cells T(f) u (B minus A)
  // part 1: B -> Q is an equivalence (glued coretraction of A in T(f))
  EquivalenceWitness wfront = front_witness(tcf, wf);
  DeformationRetract drcor = retract_of_acyclic_inclusion(tcf.front, wfront);
  ModuleMap rQ = pushout_induced(q_po, i, tcf.front, identity_map(B),
                                 compose(i, drcor.retraction));
  TensorModule qcyl = tensor_sset(q_po.mod, delta_sset(1));
  TensorModule tfcyl = tensor_sset(tcf.tf, delta_sset(1));
  TensorModule bcyl = tensor_sset(B, delta_sset(1));
  CylKit bkit = cyl_kit(B);
  ModuleMap hq = glue_over_pushout(qcyl, q_po, i, tcf.front, bcyl,
                                   compose(q_po.from_b, bkit.p), tfcyl,
                                   compose(q_po.from_c, drcor.homotopy.carrier));
  EquivalenceWitness w_b_to_q = witness_from_retract(
      DeformationRetract{rQ, homotopy_from_carrier(qcyl, hq)}, q_po.from_b);

  // theta : Q -> D
  ModuleMap theta = pushout_induced(q_po, i, tcf.front, out.po.from_b,
                                    compose(out.po.from_c, tcf.proj));

  // part 2 data on W' = B[{0}] u A[D1] inside B[D1]
  CylKit bk = cyl_kit(B);
  std::set<int> wcells;
  {
    auto d1 = delta_sset(1);
    SimplexRef v0 = d1->ref("0");
    for (int c = 0; c < bk.cyl.mod->cell_count(); ++c) {
      const TensorCell& tc = bk.cyl.tcell(c);
      bool in_acyl = false;
      // A[D1]-part: m_cell in the image of i
      for (int ac = 0; ac < A->cell_count(); ++ac)
        if ((*icells)[ac] == tc.m_cell) in_acyl = true;
      bool at0 = tc.a.base == v0;
      if (in_acyl || at0) wcells.insert(c);
    }
  }
  Submodule wsub = submodule(bk.cyl.mod, wcells);
  // free end: A -> W'
  ModuleMap freeend;
  {
    auto d1 = delta_sset(1);
    SimplexRef v1 = d1->ref("1");
    freeend.src = A;
    freeend.dst = wsub.mod;
    for (int c = 0; c < A->cell_count(); ++c) {
      Element e = bk.cyl.embed(B->generator((*icells)[c]),
                               degenerate_vertex(v1, A->cell(c).dim));
      auto ce = wsub.corestrict(e);
      require(ce.has_value(), "pushout_map_equivalence: free end escapes W'");
      freeend.images.push_back(*ce);
    }
  }
  ModuleMap estar = compose(bk.p, wsub.inclusion);  // W' -> B

  // R* : B[D1] -> W' rel A, prescribed at the 0 end
  Submodule asubB = submodule(B, std::set<int>((*icells).begin(), (*icells).end()));
  TensorModule asubcyl = tensor_sset(asubB.mod, delta_sset(1));
  ModuleMap sub_to_a;
  {
    sub_to_a.src = asubB.mod;
    sub_to_a.dst = A;
    sub_to_a.images.resize(asubB.mod->cell_count());
    ModuleMap to_sub = asubB.corestrict_map(i);
    for (int c = 0; c < A->cell_count(); ++c)
      sub_to_a.images[to_sub.images[c].terms[0].cell] = A->generator(c);
  }
  // asub[D1] -> W': through i[D1] then corestrict
  ModuleMap aicyl = tensor_map_module(asubcyl, bk.cyl, compose(i, sub_to_a));
  ModuleMap g_part = wsub.corestrict_map(aicyl);
  TensorModule bhorn = tensor_sset(B, horn_sset(1, 0));  // vertex "0"
  ModuleMap h_part;
  {
    auto d1 = delta_sset(1);
    SimplexRef v0 = d1->ref("0");
    h_part.src = bhorn.mod;
    h_part.dst = wsub.mod;
    for (int c = 0; c < bhorn.mod->cell_count(); ++c) {
      const TensorCell& tc = bhorn.tcell(c);
      Element e = bk.cyl.embed(
          B->apply_mono(B->generator(tc.m_cell), tc.alpha.to_sur(B->cell(tc.m_cell).dim)),
          degenerate_vertex(v0, B->cell(tc.m_cell).dim + tc.alpha.length()));
      auto ce = wsub.corestrict(e);
      require(ce.has_value(), "pushout_map_equivalence: horn data escapes W'");
      h_part.images.push_back(*ce);
    }
  }
  RelativeFill Rstar =
      relative_horn_fill(B, asubB, 1, 0, g_part, asubcyl, h_part, bhorn, wsub.mod);
  TensorModule bcyl2 = Rstar.mdn;
  const ModuleMap& Rs = Rstar.extension;  // B[D1] -> W'

  // g* = R* o iota_1^B
  CylKit bk2 = cyl_kit(B);
  ModuleMap i1b = bk2.i1;
  i1b.dst = bcyl2.mod;
  ModuleMap gstar = compose(Rs, i1b);
  require_equal_maps(compose(gstar, i), freeend, "pushout_map_equivalence: g* o i != free end");

  // H* : id_B ~ e* g*
  Homotopy Hstar = homotopy_from_carrier(bcyl2, compose(estar, Rs));
  // G* : id_W' ~ g* e*
  TensorModule wpcyl = tensor_sset(wsub.mod, delta_sset(1));
  TensorModule bcyl2cyl = tensor_sset(bcyl2.mod, delta_sset(1));
  ModuleMap jw = wsub.inclusion;
  jw.dst = bcyl2.mod;
  ModuleMap jcyl = tensor_map_module(wpcyl, bcyl2cyl, jw);
  SSetMap slide = slide_map(true);  // max: from id to collapse-onto-1
  ModuleMap bim = tensor_bimap(bcyl2, bcyl2cyl, bcyl2, *square_sset(), slide);
  Homotopy Gstar = homotopy_from_carrier(wpcyl, compose(Rs, compose(bim, jcyl)));

  // Q2 = pushout(free end : A >-> W', f) and the comparisons
  PushoutResult q2_po = pushout(freeend, f);
  ModuleMap theta2 = pushout_induced(q2_po, freeend, f, compose(out.po.from_b, estar),
                                     out.po.from_c);
  ModuleMap sigma2 = pushout_induced(out.po, i, f, compose(q2_po.from_b, gstar),
                                     q2_po.from_c);
  TensorModule dcyl = tensor_sset(out.po.mod, delta_sset(1));
  TensorModule ccyl = tensor_sset(C, delta_sset(1));
  CylKit ckit = cyl_kit(C);
  ModuleMap fwdinv_carrier = glue_over_pushout(
      dcyl, out.po, i, f, bcyl2 /* B[D1] */,
      compose(out.po.from_b, inverse_homotopy(Hstar).carrier), ccyl,
      compose(out.po.from_c, ckit.p));
  TensorModule q2cyl = tensor_sset(q2_po.mod, delta_sset(1));
  ModuleMap invfwd_carrier = glue_over_pushout(
      q2cyl, q2_po, freeend, f, wpcyl,
      compose(q2_po.from_b, inverse_homotopy(Gstar).carrier), ccyl,
      compose(q2_po.from_c, ckit.p));
  EquivalenceWitness w_theta2;
  w_theta2.fwd = theta2;
  w_theta2.inv = sigma2;
  w_theta2.fwd_inv = homotopy_from_carrier(dcyl, fwdinv_carrier);
  w_theta2.inv_fwd = homotopy_from_carrier(q2cyl, invfwd_carrier);

  // identify Q and Q2
  ModuleMap u_w_to_q;  // W' -> Q
  {
    // cylinder part through T(f)'s cylinder; B part through from_b
    u_w_to_q.src = wsub.mod;
    u_w_to_q.dst = q_po.mod;
    u_w_to_q.images.resize(wsub.mod->cell_count());
    auto d1 = delta_sset(1);
    SimplexRef v0 = d1->ref("0");
    for (int c = 0; c < wsub.mod->cell_count(); ++c) {
      int pc = wsub.parent_cell[c];
      const TensorCell& tc = bk.cyl.tcell(pc);
      int acell = -1;
      for (int ac = 0; ac < A->cell_count(); ++ac)
        if ((*icells)[ac] == tc.m_cell) acell = ac;
      if (acell >= 0) {
        // through A[D1] -> T(f) -> Q
        TensorCell key{acell, tc.alpha, tc.a};
        Element e = tcf.akit.cyl.mod->generator(tcf.akit.cyl.cell_index(key));
        u_w_to_q.images[c] = compose(q_po.from_c, tcf.po.from_b).apply(e);
      } else {
        require(tc.a.base == v0, "pushout_map_equivalence: unexpected W' cell");
        Element e = B->apply_mono(B->generator(tc.m_cell),
                                  tc.alpha.to_sur(B->cell(tc.m_cell).dim));
        u_w_to_q.images[c] = q_po.from_b.apply(e);
      }
    }
  }
  ModuleMap q2_to_q = pushout_induced(q2_po, freeend, f, u_w_to_q,
                                      compose(q_po.from_c, tcf.back));
  // inverse direction
  ModuleMap u_tf_to_q2;  // T(f) -> Q2
  {
    // A[D1] part into W', C part through from_c
    ModuleMap acyl_to_w;  // A[D1] -> W'
    acyl_to_w.src = tcf.akit.cyl.mod;
    acyl_to_w.dst = wsub.mod;
    for (int c = 0; c < tcf.akit.cyl.mod->cell_count(); ++c) {
      const TensorCell& tc = tcf.akit.cyl.tcell(c);
      Element e = bk.cyl.embed(
          B->apply_mono(i.images[tc.m_cell], tc.alpha.to_sur(A->cell(tc.m_cell).dim)),
          tc.a);
      auto ce = wsub.corestrict(e);
      require(ce.has_value(), "pushout_map_equivalence: cylinder escapes W'");
      acyl_to_w.images.push_back(*ce);
    }
    u_tf_to_q2 = pushout_induced(tcf.po, tcf.akit.i1, f,
                                 compose(q2_po.from_b, acyl_to_w), q2_po.from_c);
  }
  // B -> Q2 through W' at the 0 end
  ModuleMap b_to_w;
  {
    auto d1 = delta_sset(1);
    SimplexRef v0 = d1->ref("0");
    b_to_w.src = B;
    b_to_w.dst = wsub.mod;
    for (int c = 0; c < B->cell_count(); ++c) {
      Element e = bk.cyl.embed(B->generator(c), degenerate_vertex(v0, B->cell(c).dim));
      auto ce = wsub.corestrict(e);
      require(ce.has_value(), "pushout_map_equivalence: B does not embed in W'");
      b_to_w.images.push_back(*ce);
    }
  }
  ModuleMap q_to_q2 = pushout_induced(q_po, i, tcf.front, compose(q2_po.from_b, b_to_w),
                                      u_tf_to_q2);
  require_equal_maps(compose(q2_to_q, q_to_q2), identity_map(q_po.mod),
                     "pushout_map_equivalence: Q != Q2");
  require_equal_maps(compose(q_to_q2, q2_to_q), identity_map(q2_po.mod),
                     "pushout_map_equivalence: Q2 != Q");
  require_equal_maps(compose(theta2, q_to_q2), theta, "pushout_map_equivalence: theta");

  EquivalenceWitness w_qq2 = witness_from_iso(q_to_q2, q2_to_q);
  EquivalenceWitness w_theta = compose_witness(w_qq2, w_theta2);
  out.corner = compose_witness(w_b_to_q, w_theta);
  require_equal_maps(out.corner.fwd, out.po.from_b, "pushout_map_equivalence: corner");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// gluing
// ---------------------------------------------------------------------------

GluingResult gluing(const GluingInput& in) {
  GluingResult out;
  require_equal_maps(compose(in.vb, in.i), compose(in.i2, in.va), "gluing: B square");
  require_equal_maps(compose(in.vc, in.f), compose(in.f2, in.va), "gluing: C square");

  out.d = pushout(in.i, in.f);
  out.d2 = pushout(in.i2, in.f2);
  out.induced = pushout_induced(out.d, in.i, in.f, compose(out.d2.from_b, in.vb),
                                compose(out.d2.from_c, in.vc));

  // Step A: replace C by C' along vc: D -> E1 where E1 = pushout(i, vc o f)
  ModuleMap g1 = compose(in.vc, in.f);
  PushoutResult e1 = pushout(in.i, g1);
  ModuleMap mu1 = pushout_induced(out.d, in.i, in.f, e1.from_b,
                                  compose(e1.from_c, in.vc));
  // mu1 is the corner of pushout(from_c^D : C >-> D, vc)
  PushoutResult pA = pushout(out.d.from_c, in.vc);
  PushoutMapEquivalence gA = pushout_map_equivalence(out.d.from_c, in.vc, in.wc);
  // identify gA's pushout with E1
  ModuleMap pA_to_e1 = pushout_induced(gA.po, out.d.from_c, in.vc, mu1, e1.from_c);
  ModuleMap e1_to_pA = pushout_induced(e1, in.i, g1,
                                       compose(gA.po.from_b, out.d.from_b),
                                       gA.po.from_c);
  require_equal_maps(compose(pA_to_e1, e1_to_pA), identity_map(e1.mod), "gluing: E1 iso");
  require_equal_maps(compose(e1_to_pA, pA_to_e1), identity_map(gA.po.mod), "gluing: E1 iso2");
  require_equal_maps(compose(pA_to_e1, gA.po.from_b), mu1, "gluing: mu1 route");
  EquivalenceWitness w_mu1 =
      compose_witness(gA.corner, witness_from_iso(pA_to_e1, e1_to_pA));

  // Step B: replace (A >-> B) by (T_A >-> T_B) over C'
  MappingCylinder tca = mapping_cylinder(in.va);
  MappingCylinder tcb = mapping_cylinder(in.vb);
  ModuleMap itil = mapping_cylinder_map(tca, tcb, in.i, in.i2);
  require(cellular_inclusion_cells(itil).has_value(), "gluing: T_A -> T_B not cellular");
  // gtil : T_A -> C' extending g1 on A and f2 on A'
  ModuleMap gtil = pushout_induced(tca.po, tca.akit.i1, in.va,
                                   compose(g1, tca.akit.p), in.f2);
  PushoutResult fpo = pushout(itil, gtil);

  ModuleMap e1_to_f = pushout_induced(e1, in.i, g1, compose(fpo.from_b, tcb.front),
                                      fpo.from_c);
  ModuleMap d2_to_f = pushout_induced(out.d2, in.i2, in.f2, compose(fpo.from_b, tcb.back),
                                      fpo.from_c);
  ModuleMap p_f = pushout_induced(fpo, itil, gtil, compose(out.d2.from_b, tcb.proj),
                                  out.d2.from_c);
  require_equal_maps(compose(p_f, d2_to_f), identity_map(out.d2.mod), "gluing: p_f section");
  ModuleMap nu = compose(p_f, e1_to_f);
  require_equal_maps(compose(nu, mu1), out.induced, "gluing: decomposition");

  // witness for d2_to_f: glued cylinder retractions (natural in the ladder)
  DeformationRetract drb = cylinder_retraction(tcb);
  DeformationRetract drc_triv{identity_map(in.f2.dst),
                              trivial_homotopy(identity_map(in.f2.dst))};
  TensorModule fcyl = tensor_sset(fpo.mod, delta_sset(1));
  TensorModule tbcyl = tensor_sset(tcb.tf, delta_sset(1));
  TensorModule cpcyl = tensor_sset(in.f2.dst, delta_sset(1));
  CylKit cpkit = cyl_kit(in.f2.dst);
  ModuleMap hf = glue_over_pushout(
      fcyl, fpo, itil, gtil, tbcyl, compose(fpo.from_b, drb.homotopy.carrier), cpcyl,
      compose(fpo.from_c, cpkit.p));
  EquivalenceWitness w_d2f = witness_from_retract(
      DeformationRetract{p_f, homotopy_from_carrier(fcyl, hf)}, d2_to_f);

  // witness for e1_to_f: pushout of the acyclic inclusion T_B0 >-> T_B
  // where T_B0 = B[0-end] u itil(T_A) inside T_B
  std::set<int> tb0cells;
  {
    auto bcells = cellular_inclusion_cells(compose(tcb.po.from_b, tcb.akit.i0));
    require(bcells.has_value(), "gluing: B front not cellular");
    for (int c : *bcells) tb0cells.insert(c);
    auto itcells = cellular_inclusion_cells(itil);
    for (int c : *itcells) tb0cells.insert(c);
  }
  Submodule tb0 = submodule(tcb.tf, tb0cells);
  // b -> T_B0 and its witness: corner of pushout(front_A : A >-> T_A, i)
  ModuleMap b_into_tb0 = tb0.corestrict_map(tcb.front);
  EquivalenceWitness w_front_a = front_witness(tca, in.wa);
  PushoutMapEquivalence unused{};  // silence
  (void)unused;
  PushoutEquivalence gB = pushout_equivalence(tca.front, w_front_a, in.i);
  // identify gB.po with tb0.mod
  ModuleMap gb_to_tb0 = pushout_induced(gB.po, tca.front, in.i,
                                        tb0.corestrict_map(itil), b_into_tb0);
  ModuleMap tb0_to_gb;
  {
    // build by cells: B-origin cells to gB from_c, T_A-origin to from_b
    tb0_to_gb.src = tb0.mod;
    tb0_to_gb.dst = gB.po.mod;
    tb0_to_gb.images.resize(tb0.mod->cell_count());
    auto itcells = cellular_inclusion_cells(tb0.corestrict_map(itil));
    require(itcells.has_value(), "gluing: itil corestrict");
    std::vector<int> ta_origin(tb0.mod->cell_count(), -1);
    for (int c = 0; c < tca.tf->cell_count(); ++c) ta_origin[(*itcells)[c]] = c;
    auto bcells0 = cellular_inclusion_cells(b_into_tb0);
    require(bcells0.has_value(), "gluing: b_into_tb0");
    std::vector<int> b_origin(tb0.mod->cell_count(), -1);
    for (int c = 0; c < in.i.dst->cell_count(); ++c) b_origin[(*bcells0)[c]] = c;
    for (int c = 0; c < tb0.mod->cell_count(); ++c) {
      if (ta_origin[c] >= 0)
        tb0_to_gb.images[c] = gB.po.from_b.images[ta_origin[c]];
      else if (b_origin[c] >= 0)
        tb0_to_gb.images[c] = gB.po.from_c.images[b_origin[c]];
      else
        throw std::runtime_error("gluing: unreachable T_B0 cell");
    }
  }
  require_equal_maps(compose(gb_to_tb0, tb0_to_gb), identity_map(tb0.mod), "gluing: tb0 iso");
  require_equal_maps(compose(tb0_to_gb, gb_to_tb0), identity_map(gB.po.mod),
                     "gluing: tb0 iso2");
  EquivalenceWitness w_b_tb0 =
      compose_witness(gB.corner, witness_from_iso(gb_to_tb0, tb0_to_gb));
  // w(T_B0 >-> T_B) by cancellation against phi_B = front_B
  EquivalenceWitness w_front_b = front_witness(tcb, in.wb);
  EquivalenceWitness w_tb0_tb =
      right_cancel_witness(b_into_tb0, w_b_tb0, tb0.inclusion, w_front_b);
  // E1 = pushout(tb0.inclusion-ish...) : e1_to_f is the pushout of
  // tb0.inclusion along tb0 -> E1
  ModuleMap tb0_to_e1;
  {
    // T_B0 = T_A u_A B -> E1: T_A through gtil then from_c, B through from_b
    ModuleMap ta_to_e1 = compose(e1.from_c, gtil);
    tb0_to_e1.src = tb0.mod;
    tb0_to_e1.dst = e1.mod;
    tb0_to_e1.images.resize(tb0.mod->cell_count());
    auto itcells = cellular_inclusion_cells(tb0.corestrict_map(itil));
    std::vector<int> ta_origin(tb0.mod->cell_count(), -1);
    for (int c = 0; c < tca.tf->cell_count(); ++c) ta_origin[(*itcells)[c]] = c;
    auto bcells0 = cellular_inclusion_cells(b_into_tb0);
    std::vector<int> b_origin(tb0.mod->cell_count(), -1);
    for (int c = 0; c < in.i.dst->cell_count(); ++c) b_origin[(*bcells0)[c]] = c;
    for (int c = 0; c < tb0.mod->cell_count(); ++c) {
      if (ta_origin[c] >= 0)
        tb0_to_e1.images[c] = ta_to_e1.images[ta_origin[c]];
      else
        tb0_to_e1.images[c] = e1.from_b.images[b_origin[c]];
    }
  }
  PushoutResult fpo2 = pushout(tb0.inclusion, tb0_to_e1);
  PushoutEquivalence gC = pushout_equivalence(tb0.inclusion, w_tb0_tb, tb0_to_e1);
  // identify fpo2 = gC.po with F and transport; e1_to_f corresponds to from_c
  ModuleMap f_to_fpo2 = pushout_induced(fpo, itil, gtil,
                                        compose(gC.po.from_b, [&] {
                                          // T_B -> fpo2 via from_b
                                          return identity_map(tcb.tf);
                                        }()),
                                        compose(gC.po.from_c, e1.from_c));
  ModuleMap fpo2_to_f = pushout_induced(gC.po, tb0.inclusion, tb0_to_e1, [&] {
    // T_B -> F via from_b of fpo
    return fpo.from_b;
  }(), e1_to_f);
  require_equal_maps(compose(fpo2_to_f, f_to_fpo2), identity_map(fpo.mod), "gluing: F iso");
  require_equal_maps(compose(f_to_fpo2, fpo2_to_f), identity_map(gC.po.mod), "gluing: F iso2");
  require_equal_maps(compose(fpo2_to_f, gC.po.from_c), e1_to_f, "gluing: e1_to_f route");
  EquivalenceWitness w_e1f =
      compose_witness(gC.corner, witness_from_iso(fpo2_to_f, f_to_fpo2));

  // nu = p_f o e1_to_f; w(p_f) by cancellation from w(d2_to_f)
  EquivalenceWitness w_pf =
      right_cancel_witness(d2_to_f, w_d2f, p_f, witness_identity(out.d2.mod));
  EquivalenceWitness w_nu = compose_witness(w_e1f, w_pf);
  out.witness = compose_witness(w_mu1, w_nu);
  require_equal_maps(out.witness.fwd, out.induced, "gluing: witness target mismatch");
  return out;
}

// ---------------------------------------------------------------------------
// extension axiom
// ---------------------------------------------------------------------------

ExtensionImproved extension_improve(const ExtensionData& data, const ModuleMap& alpha,
                                    const Submodule& d0) {
  ModulePtr D = alpha.src;
  ModulePtr TB = alpha.dst;

  // alpha-bar and its improvement in T_Bbar
  ModuleMap abar = compose(data.tb_to_tbbar, alpha);
  Homotopy hbar = whisker_right(data.rbbar.homotopy, abar);  // abar ~ incl o r o abar

  // lift H of hbar along T_B ->> T_Bbar, rel (alpha at 0, trivial on D0)
  TensorModule dhorn = tensor_sset(D, horn_sset(1, 0));  // vertex "0"
  ModuleMap top;
  {
    top.src = dhorn.mod;
    top.dst = TB;
    for (int c = 0; c < dhorn.mod->cell_count(); ++c) {
      const TensorCell& tc = dhorn.tcell(c);
      top.images.push_back(TB->apply_mono(alpha.images[tc.m_cell],
                                          tc.alpha.to_sur(D->cell(tc.m_cell).dim)));
    }
  }
  TensorModule d0cyl = tensor_sset(d0.mod, delta_sset(1));
  ModuleMap g_on_d0 = trivial_homotopy(compose(alpha, d0.inclusion)).carrier;
  g_on_d0.src = d0cyl.mod;

  // theta: section of tb_to_tbbar by cell names
  std::vector<int> theta(data.tb_to_tbbar.dst->cell_count(), -1);
  for (int q = 0; q < data.tb_to_tbbar.dst->cell_count(); ++q) {
    auto pc = TB->find_cell(data.tb_to_tbbar.dst->cell(q).name);
    require(pc.has_value(), "extension_improve: no theta section for cell " +
                                data.tb_to_tbbar.dst->cell(q).name);
    theta[q] = *pc;
  }
  RelativeLift lifted = relative_lift(D, d0, 1, 0, top, dhorn, g_on_d0, d0cyl,
                                      hbar.carrier, hbar.cyl, data.tb_to_tbbar, theta);
  Homotopy H = homotopy_from_carrier(lifted.mdn, lifted.lift);
  ModuleMap beta = H.at(1);

  // gamma: retract beta into B through B u_A T_A
  auto bcells = cellular_inclusion_cells(data.incl_b);
  auto tacells = cellular_inclusion_cells(data.ta_to_tb);
  require(bcells && tacells, "extension_improve: cofiber data not cellular");
  std::set<int> vcells(bcells->begin(), bcells->end());
  vcells.insert(tacells->begin(), tacells->end());
  Submodule v = submodule(TB, vcells);
  ModuleMap beta_v = v.corestrict_map(beta);
  ModuleMap ret;  // V -> B
  {
    ret.src = v.mod;
    ret.dst = data.incl_b.src;
    ret.images.resize(v.mod->cell_count());
    std::vector<int> b_origin(v.mod->cell_count(), -1), ta_origin(v.mod->cell_count(), -1);
    auto bv = cellular_inclusion_cells(v.corestrict_map(data.incl_b));
    auto tav = cellular_inclusion_cells(v.corestrict_map(data.ta_to_tb));
    require(bv && tav, "extension_improve: V structure");
    for (int c = 0; c < data.incl_b.src->cell_count(); ++c) b_origin[(*bv)[c]] = c;
    for (int c = 0; c < data.ta_to_tb.src->cell_count(); ++c) ta_origin[(*tav)[c]] = c;
    for (int c = 0; c < v.mod->cell_count(); ++c) {
      if (b_origin[c] >= 0) {
        ret.images[c] = data.incl_b.src->generator(b_origin[c]);
      } else {
        require(ta_origin[c] >= 0, "extension_improve: unreachable V cell");
        Element ra = data.ra.retraction.images[ta_origin[c]];  // in A
        ret.images[c] = data.a_to_b.apply(ra);
      }
    }
  }
  ModuleMap gamma = compose(ret, beta_v);  // D -> B
  // p o gamma = beta-bar: both sides composed into T_Bbar agree because the
  // difference factors through T_A, which the quotient kills
  require_equal_maps(compose(data.tb_to_tbbar, compose(data.incl_b, gamma)),
                     compose(data.tb_to_tbbar, beta), "extension_improve: gamma projection");

  // delta = r_A o (beta - gamma), G through T_A
  ModuleMap beta_minus_gamma = map_sub(beta, compose(data.incl_b, gamma));
  Submodule tasub = submodule(TB, std::set<int>(tacells->begin(), tacells->end()));
  ModuleMap bmg_ta = tasub.corestrict_map(beta_minus_gamma);
  // translate to T_A through the cell bijection
  ModuleMap tasub_to_ta;
  {
    tasub_to_ta.src = tasub.mod;
    tasub_to_ta.dst = data.ta_to_tb.src;
    tasub_to_ta.images.resize(tasub.mod->cell_count());
    ModuleMap to_sub = tasub.corestrict_map(data.ta_to_tb);
    for (int c = 0; c < data.ta_to_tb.src->cell_count(); ++c)
      tasub_to_ta.images[to_sub.images[c].terms[0].cell] =
          data.ta_to_tb.src->generator(c);
  }
  ModuleMap bmg_in_ta = compose(tasub_to_ta, bmg_ta);  // D -> T_A
  Homotopy G = whisker_left(data.ta_to_tb, whisker_right(data.ra.homotopy, bmg_in_ta));
  // G: ta_to_tb o (beta-gamma) ~ ta_to_tb o incl_a o r_A o (beta-gamma)
  ModuleMap delta = compose(data.ra.retraction, bmg_in_ta);  // D -> A

  Homotopy second = homotopy_add(G, trivial_homotopy(compose(data.incl_b, gamma)));
  ExtensionImproved out;
  out.homotopy = concat(H, second);
  ModuleMap endpoint = map_add(compose(data.a_to_b, delta), gamma);  // D -> B
  out.into_b = endpoint;
  require_equal_maps(out.homotopy.at(1), compose(data.incl_b, endpoint),
                     "extension_improve: endpoint does not factor");
  return out;
}

EquivalenceWitness extension_axiom_witness(const CofiberLadder& lad) {
  MappingCylinder tca = mapping_cylinder(lad.fa);
  MappingCylinder tcb = mapping_cylinder(lad.fb);
  MappingCylinder tcc = mapping_cylinder(lad.fc);
  ModuleMap tab = mapping_cylinder_map(tca, tcb, lad.ia, lad.ia2);
  ModuleMap tbc = mapping_cylinder_map(tcb, tcc, lad.pa, lad.pa2);
  require(cellular_inclusion_cells(tab).has_value(), "extension axiom: T_A -> T_B");

  DeformationRetract ra = deformation_coretraction(tca, lad.wa);
  DeformationRetract rc = deformation_coretraction(tcc, lad.wc);

  ExtensionData data;
  data.incl_a = tca.front;
  data.incl_b = tcb.front;
  data.incl_bbar = tcc.front;
  data.ta_to_tb = tab;
  data.tb_to_tbbar = tbc;
  data.b_to_bbar = lad.pa;
  data.a_to_b = lad.ia;
  data.ra = ra;
  data.rbbar = rc;

  auto bcells = cellular_inclusion_cells(tcb.front);
  require(bcells.has_value(), "extension axiom: front of T_B");
  Submodule d0 = submodule(tcb.tf, std::set<int>(bcells->begin(), bcells->end()));
  ExtensionImproved imp = extension_improve(data, identity_map(tcb.tf), d0);

  // deformation retraction of T_B onto B
  ModuleMap r = imp.into_b;  // T_B -> B
  DeformationRetract drb{r, imp.homotopy};
  EquivalenceWitness w_front_b = witness_from_retract(drb, tcb.front);
  EquivalenceWitness w_proj_b = projection_witness(tcb);
  return compose_witness(w_front_b, w_proj_b);
}

}  // namespace csm
