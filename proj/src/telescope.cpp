#include "csm/telescope.hpp"

#include <sstream>
#include <stdexcept>

namespace csm {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

void require_equal_maps(const ModuleMap& a, const ModuleMap& b, const std::string& msg) {
  if (!(a == b)) throw std::runtime_error("maps differ: " + msg);
}

}  // namespace

std::string Interval::word() const {
  std::string out;
  for (size_t i = 0; i < fwd.size(); ++i) {
    if (i) out += ",";
    out += fwd[i] ? "fwd" : "bwd";
  }
  return out;
}

Interval interval_from_word(const std::string& word) {
  Interval iv;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    if (cur == "fwd")
      iv.fwd.push_back(true);
    else if (cur == "bwd")
      iv.fwd.push_back(false);
    else
      throw std::runtime_error("bad interval word letter: " + cur);
    cur.clear();
  };
  for (char ch : word) {
    if (ch == ',') {
      flush();
    } else if (!isspace(ch)) {
      cur += ch;
    }
  }
  flush();
  return iv;
}

Interval concat_interval(const Interval& a, const Interval& b) {
  Interval r = a;
  r.fwd.insert(r.fwd.end(), b.fwd.begin(), b.fwd.end());
  return r;
}

Interval reverse_interval(const Interval& a) {
  Interval r;
  for (auto it = a.fwd.rbegin(); it != a.fwd.rend(); ++it) r.fwd.push_back(!*it);
  return r;
}

Interval ordered_interval(int n) {
  Interval r;
  r.fwd.assign(n, true);
  return r;
}

SimplexRef IntervalSSet::vertex(int k) const { return ss->ref("v" + std::to_string(k)); }
SimplexRef IntervalSSet::edge(int k) const { return ss->ref("e" + std::to_string(k)); }

IntervalSSet realize_interval(const Interval& iv) {
  auto s = std::make_shared<FinSimplicialSet>();
  int n = iv.length();
  for (int k = 0; k <= n; ++k) s->add_simplex(0, "v" + std::to_string(k));
  for (int k = 0; k < n; ++k) {
    SimplexRef lo = s->ref("v" + std::to_string(k));
    SimplexRef hi = s->ref("v" + std::to_string(k + 1));
    // d1 is the source vertex, d0 the target vertex
    DegSimplex d0{iv.fwd[k] ? hi : lo, DegWord{}};
    DegSimplex d1{iv.fwd[k] ? lo : hi, DegWord{}};
    s->add_simplex(1, "e" + std::to_string(k), {d0, d1});
  }
  return IntervalSSet{iv, s};
}

// --- long homotopies ----------------------------------------------------------

ModuleMap LongHomotopy::at_label(int k) const {
  ModuleMap r;
  r.src = ai.m;
  r.dst = carrier.dst;
  SimplexRef v = is.vertex(k);
  for (int c = 0; c < ai.m->cell_count(); ++c) {
    Element e = ai.embed(ai.m->generator(c), degenerate_vertex(v, ai.m->cell(c).dim));
    r.images.push_back(carrier.apply(e));
  }
  return r;
}

LongHomotopy long_from_carrier(const IntervalSSet& is, const TensorModule& ai,
                               ModuleMap carrier) {
  LongHomotopy h;
  h.is = is;
  h.ai = ai;
  h.carrier = std::move(carrier);
  return h;
}

LongHomotopy trivial_long(const ModuleMap& f, const Interval& iv) {
  IntervalSSet is = realize_interval(iv);
  TensorModule ai = tensor_sset(f.src, is.ss);
  ModuleMap carrier;
  carrier.src = ai.mod;
  carrier.dst = f.dst;
  for (int c = 0; c < ai.mod->cell_count(); ++c) {
    const TensorCell& tc = ai.tcell(c);
    carrier.images.push_back(
        f.dst->apply_mono(f.images[tc.m_cell], tc.alpha.to_sur(f.src->cell(tc.m_cell).dim)));
  }
  return long_from_carrier(is, ai, std::move(carrier));
}

LongHomotopy long_from_ordinary(const Homotopy& h) {
  Interval iv = ordered_interval(1);
  IntervalSSet is = realize_interval(iv);
  TensorModule ai = tensor_sset(h.cyl.m, is.ss);
  // translate cells: the interval sset names v0,v1,e0 vs Delta^1 names 0,1,0.1
  auto d1 = delta_sset(1);
  ModuleMap carrier;
  carrier.src = ai.mod;
  carrier.dst = h.carrier.dst;
  for (int c = 0; c < ai.mod->cell_count(); ++c) {
    const TensorCell& tc = ai.tcell(c);
    std::string nm = is.ss->name(tc.a.base);
    SimplexRef tr = d1->ref(nm == "v0" ? "0" : (nm == "v1" ? "1" : "0.1"));
    TensorCell key{tc.m_cell, tc.alpha, DegSimplex{tr, tc.a.w}};
    carrier.images.push_back(h.carrier.images[h.cyl.cell_index(key)]);
  }
  return long_from_carrier(is, ai, std::move(carrier));
}

LongHomotopy concat_long(const LongHomotopy& h1, const LongHomotopy& h2) {
  int n1 = h1.is.iv.length();
  require(h1.at_label(n1) == h2.at_label(0), "concat_long: endpoints do not match");
  Interval iv = concat_interval(h1.is.iv, h2.is.iv);
  IntervalSSet is = realize_interval(iv);
  TensorModule ai = tensor_sset(h1.ai.m, is.ss);
  ModuleMap carrier;
  carrier.src = ai.mod;
  carrier.dst = h1.carrier.dst;
  for (int c = 0; c < ai.mod->cell_count(); ++c) {
    const TensorCell& tc = ai.tcell(c);
    std::string nm = is.ss->name(tc.a.base);
    bool isv = nm[0] == 'v';
    int idx = std::stoi(nm.substr(1));
    const LongHomotopy* hh;
    std::string tname;
    if (isv) {
      hh = idx <= n1 ? &h1 : &h2;
      tname = "v" + std::to_string(idx <= n1 ? idx : idx - n1);
    } else {
      hh = idx < n1 ? &h1 : &h2;
      tname = "e" + std::to_string(idx < n1 ? idx : idx - n1);
    }
    TensorCell key{tc.m_cell, tc.alpha, DegSimplex{hh->is.ss->ref(tname), tc.a.w}};
    carrier.images.push_back(hh->carrier.images[hh->ai.cell_index(key)]);
  }
  return long_from_carrier(is, ai, std::move(carrier));
}

LongHomotopy reverse_long(const LongHomotopy& h) {
  int n = h.is.iv.length();
  Interval iv = reverse_interval(h.is.iv);
  IntervalSSet is = realize_interval(iv);
  TensorModule ai = tensor_sset(h.ai.m, is.ss);
  ModuleMap carrier;
  carrier.src = ai.mod;
  carrier.dst = h.carrier.dst;
  for (int c = 0; c < ai.mod->cell_count(); ++c) {
    const TensorCell& tc = ai.tcell(c);
    std::string nm = is.ss->name(tc.a.base);
    bool isv = nm[0] == 'v';
    int idx = std::stoi(nm.substr(1));
    std::string tname =
        isv ? "v" + std::to_string(n - idx) : "e" + std::to_string(n - 1 - idx);
    TensorCell key{tc.m_cell, tc.alpha, DegSimplex{h.is.ss->ref(tname), tc.a.w}};
    carrier.images.push_back(h.carrier.images[h.ai.cell_index(key)]);
  }
  return long_from_carrier(is, ai, std::move(carrier));
}

LongHomotopy long_whisker_left(const ModuleMap& q, const LongHomotopy& h) {
  return long_from_carrier(h.is, h.ai, compose(q, h.carrier));
}

LongHomotopy long_whisker_right(const LongHomotopy& h, const ModuleMap& g) {
  TensorModule ai = tensor_sset(g.src, h.is.ss);
  return long_from_carrier(h.is, ai,
                           compose(h.carrier, tensor_map_module(ai, h.ai, g)));
}

// --- concat with the inverse is null ------------------------------------------

Homotopy nullhomotopy_concat_inverse(const LongHomotopy& h) {
  int n = h.is.iv.length();
  LongHomotopy conc = concat_long(h, reverse_long(h));
  auto d1 = delta_sset(1);
  auto pr = std::make_shared<ProductSSet>(product(*conc.is.ss, *d1));
  TensorModule acyl = tensor_sset(conc.ai.mod, d1);

  auto fold = [&](int k) { return std::min(k, 2 * n - k); };
  std::vector<Homotopy> layers;
  for (int j = 1; j <= n; ++j) {
    std::vector<SimplexRef> vimg(pr->sset.count(0));
    for (int i = 0; i < pr->sset.count(0); ++i) {
      auto comps = pr->components(SimplexRef{0, i});
      int k = std::stoi(conc.is.ss->name(comps.first.base).substr(1));
      int t = d1->name(comps.second.base) == "1" ? 1 : 0;
      int lvl = std::min(fold(k), t == 1 ? j : j - 1);
      vimg[i] = h.is.vertex(lvl);
    }
    auto psi = sset_map_from_vertices(pr->sset, *h.is.ss, vimg);
    require(psi.has_value(), "nullhomotopy_concat_inverse: layer map missing");
    ModuleMap bim = tensor_bimap(conc.ai, acyl, h.ai, *pr, *psi);
    layers.push_back(homotopy_from_carrier(acyl, compose(h.carrier, bim)));
  }
  Homotopy total = layers[0];
  for (size_t j = 1; j < layers.size(); ++j) total = concat(total, layers[j]);
  // orientation: from the concatenation H # Hbar to the trivial homotopy
  return inverse_homotopy(total);
}

// --- witness helpers ------------------------------------------------------------

EquivalenceWitness invert_witness(const EquivalenceWitness& w) {
  EquivalenceWitness r;
  r.fwd = w.inv;
  r.inv = w.fwd;
  r.inv_fwd = w.fwd_inv;
  r.fwd_inv = w.inv_fwd;
  return r;
}

EquivalenceWitness transport_witness(const EquivalenceWitness& w, const Homotopy& h) {
  // h : w.fwd ~ g; the witness transports along it
  EquivalenceWitness r;
  r.fwd = h.at(1);
  r.inv = w.inv;
  // inv o g ~ inv o fwd ~ id
  r.inv_fwd = concat(inverse_homotopy(whisker_left(w.inv, h)), w.inv_fwd);
  // g o inv ~ fwd o inv ~ id
  r.fwd_inv = concat(inverse_homotopy(whisker_right(h, w.inv)), w.fwd_inv);
  return r;
}

// --- contractible pairs ---------------------------------------------------------

DeformationRetract retract_of_contractible_pair(const Submodule& s,
                                                const std::vector<int>& group) {
  ModulePtr parent = s.parent;

  // strict retraction: extend the identity of S over the parent into S
  ExtendProblem rp;
  rp.big = parent;
  rp.target = s.mod;
  for (int c = 0; c < (int)s.parent_cell.size(); ++c)
    rp.prescribed[s.parent_cell[c]] = s.mod->generator(c);
  rp.group = group;
  ModuleMap r = constrained_extend(rp);
  require_equal_maps(compose(r, s.inclusion), identity_map(s.mod),
                     "retract_of_contractible_pair: not a retraction");

  // delta = id - incl o r factors through the quotient, which carries an
  // explicit nullhomotopy (both ends prescribed)
  ModuleMap incl_r = compose(s.inclusion, r);
  ModuleMap delta = map_sub(identity_map(parent), incl_r);
  std::set<int> subcells(s.parent_cell.begin(), s.parent_cell.end());
  QuotientResult q = quotient(parent, subcells);
  ModuleMap delta_q;  // Q -> parent
  {
    std::vector<Element> images;
    for (int c = 0; c < q.mod->cell_count(); ++c) {
      int pc = (int)*parent->find_cell(q.mod->cell(c).name);
      images.push_back(delta.images[pc]);
    }
    delta_q = map_from_cells(q.mod, parent, std::move(images));
  }

  auto d1 = delta_sset(1);
  TensorModule qcyl = tensor_sset(q.mod, d1);
  SimplexRef v0 = d1->ref("0"), v1 = d1->ref("1");
  ExtendProblem np;
  np.big = qcyl.mod;
  np.target = q.mod;
  np.group.resize(qcyl.mod->cell_count());
  for (int c = 0; c < qcyl.mod->cell_count(); ++c) {
    const TensorCell& tc = qcyl.tcell(c);
    np.group[c] = tc.m_cell;
    if (tc.a.base == v0 && tc.alpha.empty() && tc.a.w.length() == q.mod->cell(tc.m_cell).dim)
      np.prescribed[c] = q.mod->generator(tc.m_cell);
    else if (tc.a.base == v1)
      np.prescribed[c] = element_zero(qcyl.mod->cell(c).dim);
    else if (tc.a.base.dim == 0 && tc.a.base == v0)
      np.prescribed[c] = element_zero(0);
  }
  // all v0-cells, including alpha-degenerate ones, carry the identity values
  for (int c = 0; c < qcyl.mod->cell_count(); ++c) {
    const TensorCell& tc = qcyl.tcell(c);
    if (tc.a.base == v0 && !np.prescribed.count(c)) {
      Element gen{q.mod->cell(tc.m_cell).dim + tc.alpha.length(),
                  {Term{RingValue::one(q.mod->ring()), tc.m_cell, tc.alpha}}};
      np.prescribed[c] = gen;
    }
  }
  ModuleMap ncarrier = constrained_extend(np);
  Homotopy nullh = homotopy_from_carrier(qcyl, ncarrier);  // id_Q ~ 0

  // homotopy id_parent ~ incl o r, trivial on S
  CylKit pk = cyl_kit(parent);
  ModuleMap pi_cyl = tensor_map_module(pk.cyl, qcyl, q.projection);
  ModuleMap main = map_add(compose(incl_r, pk.p), compose(delta_q, compose(ncarrier, pi_cyl)));
  DeformationRetract out;
  out.retraction = r;
  out.homotopy = homotopy_from_carrier(pk.cyl, main);
  if (auto e = out.homotopy.verify_endpoints(identity_map(parent), incl_r))
    throw std::runtime_error("retract_of_contractible_pair: " + *e);
  return out;
}

// --- convergent homotopies -------------------------------------------------------

Homotopy convergent_limit(const ConvergentData& cd) {
  const LongHomotopy& h = cd.h;
  int len = h.is.iv.length();
  for (bool f : h.is.iv.fwd) require(f, "convergent_limit: interval must be ordered");
  require(cd.filtration.size() == cd.stab.size(), "convergent_limit: bad stabilization");
  // re-check the stabilization hypothesis: H restricted to A_i[n_i..] trivial
  for (size_t i = 0; i < cd.filtration.size(); ++i) {
    int ni = cd.stab[i];
    ModuleMap base = h.at_label(ni);
    for (int c = 0; c < h.ai.mod->cell_count(); ++c) {
      const TensorCell& tc = h.ai.tcell(c);
      if (!cd.filtration[i].count(tc.m_cell)) continue;
      std::string nm = h.is.ss->name(tc.a.base);
      int idx = std::stoi(nm.substr(1));
      bool beyond = nm[0] == 'v' ? idx >= ni : idx >= ni;
      if (!beyond) continue;
      // value must equal the collapsed one through the label-n_i map
      Element expect = h.ai.m->apply_mono(
          base.images[tc.m_cell], tc.alpha.to_sur(h.ai.m->cell(tc.m_cell).dim));
      if (nm[0] == 'e') {
        // edges beyond n_i must be degenerate on the stabilized value
        Element got = h.carrier.images[c];
        Element want = h.carrier.dst->degeneracy(
            h.carrier.dst->apply_mono(expect, mono_identity(expect.degree)), 0);
        // the cell has an extra dimension; compare through the vertex value
        (void)got;
        (void)want;
      }
    }
    // spot-check through restrictions: at every label >= n_i the restriction
    // on the stratum agrees with the one at n_i
    for (int k = ni; k <= len; ++k) {
      ModuleMap at = h.at_label(k);
      for (int c : cd.filtration[i])
        require(at.images[c] == base.images[c],
                "convergent_limit: stabilization hypothesis fails on stage " +
                    std::to_string(i));
    }
  }

  // diagonal fills: d_k : H_0 ~ H_k, with the group filler preserving the
  // stabilized strata exactly
  auto edge_homotopy = [&](int k) {
    auto d1 = delta_sset(1);
    TensorModule cyl = tensor_sset(h.ai.m, d1);
    ModuleMap carrier;
    carrier.src = cyl.mod;
    carrier.dst = h.carrier.dst;
    for (int c = 0; c < cyl.mod->cell_count(); ++c) {
      const TensorCell& tc = cyl.tcell(c);
      std::string nm = d1->name(tc.a.base);
      std::string tname = nm == "0" ? "v" + std::to_string(k)
                          : nm == "1" ? "v" + std::to_string(k + 1)
                                      : "e" + std::to_string(k);
      TensorCell key{tc.m_cell, tc.alpha, DegSimplex{h.is.ss->ref(tname), tc.a.w}};
      carrier.images.push_back(h.carrier.images[h.ai.cell_index(key)]);
    }
    return homotopy_from_carrier(cyl, carrier);
  };

  Homotopy diag = edge_homotopy(0);
  for (int k = 1; k < len; ++k) diag = concat(diag, edge_homotopy(k));

  // contract checks
  if (auto e = diag.verify_endpoints(h.at_label(0), h.at_label(len)))
    throw std::runtime_error(std::string("convergent_limit: ") + *e);
  for (size_t i = 0; i < cd.filtration.size(); ++i) {
    ModuleMap base = h.at_label(cd.stab[i]);
    ModuleMap end = diag.at(1);
    for (int c : cd.filtration[i])
      require(end.images[c] == base.images[c],
              "convergent_limit: limit does not restrict to the stabilized value");
  }
  return diag;
}

// --- long mapping cylinders ------------------------------------------------------

LongCylinder long_cylinder(const ModuleMap& f, const Interval& iv) {
  LongCylinder lc;
  lc.f = f;
  lc.is = realize_interval(iv);
  lc.ai = tensor_sset(f.src, lc.is.ss);
  int n = iv.length();
  ModuleMap end;
  end.src = f.src;
  end.dst = lc.ai.mod;
  for (int c = 0; c < f.src->cell_count(); ++c)
    end.images.push_back(lc.ai.embed(f.src->generator(c),
                                     degenerate_vertex(lc.is.vertex(n), f.src->cell(c).dim)));
  lc.po = pushout(end, f);
  lc.mod = lc.po.mod;
  lc.from_ai = lc.po.from_b;
  lc.back = lc.po.from_c;
  ModuleMap front;
  front.src = f.src;
  front.dst = lc.mod;
  for (int c = 0; c < f.src->cell_count(); ++c) {
    Element e = lc.ai.embed(f.src->generator(c),
                            degenerate_vertex(lc.is.vertex(0), f.src->cell(c).dim));
    front.images.push_back(lc.from_ai.apply(e));
  }
  lc.front = front;
  // projection: collapse the interval, then f
  ModuleMap collapse;
  collapse.src = lc.ai.mod;
  collapse.dst = f.src;
  for (int c = 0; c < lc.ai.mod->cell_count(); ++c) {
    auto [mpart, apart] = lc.ai.components(c, DegWord{});
    collapse.images.push_back(Element{
        lc.ai.mod->cell(c).dim,
        {Term{RingValue::one(f.src->ring()), mpart.first, mpart.second}}});
  }
  lc.proj = pushout_induced(lc.po, end, f, compose(f, collapse), identity_map(f.dst));
  return lc;
}

namespace {

// u-part of the induced map: A[J # I] -> M^J(g)
ModuleMap induced_u_part(const LongCylinder& mjif, const LongCylinder& mjg,
                         const ModuleMap& a, const LongHomotopy& h) {
  int jlen = mjg.is.iv.length();
  ModuleMap u;
  u.src = mjif.ai.mod;
  u.dst = mjg.mod;
  for (int c = 0; c < mjif.ai.mod->cell_count(); ++c) {
    const TensorCell& tc = mjif.ai.tcell(c);
    std::string nm = mjif.is.ss->name(tc.a.base);
    bool isv = nm[0] == 'v';
    int idx = std::stoi(nm.substr(1));
    bool jpart = isv ? idx <= jlen : idx < jlen;
    if (jpart) {
      // through a[J] and the cylinder part of M^J(g)
      Element img = mjg.f.src->apply_mono(
          a.images[tc.m_cell], tc.alpha.to_sur(a.src->cell(tc.m_cell).dim));
      DegSimplex tr{mjg.is.ss->ref(nm), tc.a.w};
      u.images.push_back(mjg.from_ai.apply(mjg.ai.embed(img, tr)));
    } else {
      // through the homotopy into the back copy
      std::string tname = isv ? "v" + std::to_string(idx - jlen)
                              : "e" + std::to_string(idx - jlen);
      TensorCell key{tc.m_cell, tc.alpha, DegSimplex{h.is.ss->ref(tname), tc.a.w}};
      u.images.push_back(mjg.back.apply(h.carrier.images[h.ai.cell_index(key)]));
    }
  }
  return u;
}

}  // namespace

ModuleMap cylinder_induced_to_base(const LongCylinder& mf, const ModuleMap& a,
                                   const LongHomotopy& h) {
  // (H, a)_* : M^I(f) -> B; requires H from g o a to a o f -- here just the
  // pushout cocone (H on the cylinder, a on the back copy)
  require(h.at_label(h.is.iv.length()) == compose(a, mf.f),
          "cylinder_induced_to_base: homotopy endpoint mismatch");
  ModuleMap end;
  end.src = mf.f.src;
  end.dst = mf.ai.mod;
  int n = mf.is.iv.length();
  for (int c = 0; c < mf.f.src->cell_count(); ++c)
    end.images.push_back(mf.ai.embed(mf.f.src->generator(c),
                                     degenerate_vertex(mf.is.vertex(n), mf.f.src->cell(c).dim)));
  return pushout_induced(mf.po, end, mf.f, h.carrier, a);
}

ModuleMap cylinder_induced(const LongCylinder& mjif, const LongCylinder& mjg,
                           const ModuleMap& a, const LongHomotopy& h) {
  int jlen = mjg.is.iv.length();
  int total = mjif.is.iv.length();
  require(total == jlen + h.is.iv.length(), "cylinder_induced: interval mismatch");
  require(h.at_label(0) == compose(mjg.f, a), "cylinder_induced: H_0 != g a");
  require(h.at_label(h.is.iv.length()) == compose(a, mjif.f),
          "cylinder_induced: H_end != a f");
  ModuleMap u = induced_u_part(mjif, mjg, a, h);
  ModuleMap end;
  end.src = mjif.f.src;
  end.dst = mjif.ai.mod;
  for (int c = 0; c < mjif.f.src->cell_count(); ++c)
    end.images.push_back(
        mjif.ai.embed(mjif.f.src->generator(c),
                      degenerate_vertex(mjif.is.vertex(total), mjif.f.src->cell(c).dim)));
  return pushout_induced(mjif.po, end, mjif.f, u, compose(mjg.back, a));
}

LongHomotopy extract_homotopy(const LongCylinder& mjif, const LongCylinder& mjg,
                              const ModuleMap& induced, int j_len) {
  // restrict the induced map to the I-part of the cylinder and read it off
  // the back copy of M^J(g)
  Interval iv;
  for (int k = j_len; k < mjif.is.iv.length(); ++k) iv.fwd.push_back(mjif.is.iv.fwd[k]);
  IntervalSSet is = realize_interval(iv);
  TensorModule ai = tensor_sset(mjif.f.src, is.ss);
  auto bcells = cellular_inclusion_cells(mjg.back);
  require(bcells.has_value(), "extract_homotopy: corrupt cylinder");
  std::vector<int> borigin(mjg.mod->cell_count(), -1);
  for (int c = 0; c < mjg.f.dst->cell_count(); ++c) borigin[(*bcells)[c]] = c;
  ModuleMap carrier;
  carrier.src = ai.mod;
  carrier.dst = mjg.f.dst;
  for (int c = 0; c < ai.mod->cell_count(); ++c) {
    const TensorCell& tc = ai.tcell(c);
    std::string nm = is.ss->name(tc.a.base);
    bool isv = nm[0] == 'v';
    int idx = std::stoi(nm.substr(1));
    std::string tname =
        isv ? "v" + std::to_string(idx + j_len) : "e" + std::to_string(idx + j_len);
    TensorCell key{tc.m_cell, tc.alpha, DegSimplex{mjif.is.ss->ref(tname), tc.a.w}};
    Element big = compose(induced, mjif.from_ai)
                      .images[mjif.ai.cell_index(key)];
    // rewrite through the back copy
    Element out = element_zero(big.degree);
    for (const Term& t : big.terms) {
      require(borigin[t.cell] >= 0, "extract_homotopy: value not in the back copy");
      out.terms.push_back(Term{t.coeff, borigin[t.cell], t.w});
    }
    element_canonicalize(out);
    carrier.images.push_back(out);
  }
  return long_from_carrier(is, ai, carrier);
}

// --- truncated telescopes ----------------------------------------------------------

TruncTel telescope(const ModuleMap& f, const Interval& iv, int stages) {
  require(stages >= 1, "telescope: need at least one stage");
  TruncTel t;
  t.f = f;
  t.iv = iv;
  t.stages = stages;
  t.cyl = long_cylinder(f, iv);

  ModulePtr cur = t.cyl.mod;
  std::vector<ModuleMap> stage_in{identity_map(cur)};
  for (int k = 1; k < stages; ++k) {
    // glue a new cylinder: its front attaches to the back of stage k-1
    ModuleMap back_prev = compose(stage_in.back(), t.cyl.back);
    PushoutResult po = pushout(t.cyl.front, back_prev);
    cur = po.mod;
    for (auto& m : stage_in) m = compose(po.from_c, m);
    stage_in.push_back(po.from_b);
  }
  t.tel = cur;
  t.stage_in = stage_in;
  t.front = compose(t.stage_in[0], t.cyl.front);
  for (int k = 0; k < stages; ++k)
    t.back_at.push_back(compose(t.stage_in[k], t.cyl.back));
  return t;
}

ModuleMap telescope_incl(const TruncTel& a, const TruncTel& b) {
  require(a.stages <= b.stages, "telescope_incl: wrong order");
  ModuleMap r;
  r.src = a.tel;
  r.dst = b.tel;
  r.images.resize(a.tel->cell_count());
  std::vector<char> done(a.tel->cell_count(), 0);
  for (int k = 0; k < a.stages; ++k) {
    auto cells = cellular_inclusion_cells(a.stage_in[k]);
    require(cells.has_value(), "telescope_incl: corrupt telescope");
    for (int c = 0; c < a.cyl.mod->cell_count(); ++c) {
      int tc = (*cells)[c];
      if (done[tc]) continue;
      r.images[tc] = b.stage_in[k].images[c];
      done[tc] = 1;
    }
  }
  return r;
}

ModuleMap telescope_shift(const TruncTel& a, const TruncTel& b) {
  require(a.stages + 1 <= b.stages, "telescope_shift: target too short");
  ModuleMap r;
  r.src = a.tel;
  r.dst = b.tel;
  r.images.resize(a.tel->cell_count());
  std::vector<char> done(a.tel->cell_count(), 0);
  for (int k = 0; k < a.stages; ++k) {
    auto cells = cellular_inclusion_cells(a.stage_in[k]);
    require(cells.has_value(), "telescope_shift: corrupt telescope");
    for (int c = 0; c < a.cyl.mod->cell_count(); ++c) {
      int tc = (*cells)[c];
      if (done[tc]) continue;
      r.images[tc] = b.stage_in[k + 1].images[c];
      done[tc] = 1;
    }
  }
  return r;
}

ModuleMap telescope_induced(const TruncTel& src, const TruncTel& dst, const ModuleMap& a,
                            const LongHomotopy& h) {
  require(src.stages == dst.stages, "telescope_induced: stage mismatch");
  ModuleMap u = cylinder_induced(src.cyl, dst.cyl, a, h);
  ModuleMap r;
  r.src = src.tel;
  r.dst = dst.tel;
  r.images.resize(src.tel->cell_count());
  std::vector<char> done(src.tel->cell_count(), 0);
  for (int k = 0; k < src.stages; ++k) {
    auto cells = cellular_inclusion_cells(src.stage_in[k]);
    require(cells.has_value(), "telescope_induced: corrupt telescope");
    for (int c = 0; c < src.cyl.mod->cell_count(); ++c) {
      int tc = (*cells)[c];
      if (done[tc]) continue;
      r.images[tc] = dst.stage_in[k].apply(u.images[c]);
      done[tc] = 1;
    }
  }
  return r;
}

// --- interval compression ----------------------------------------------------------

namespace {

// one merge of the last adjacent pair; returns the witness A[cur] ~ A[next]
struct MergeStep {
  Interval next;
  EquivalenceWitness w;  // fwd : A[cur] -> A[next]
};

// J-sset: cur plus the merged edge "m" and the filling triangle "T"
struct MergeGeometry {
  SSetPtr j;
  bool merged_fwd;
  int b_to;  // image label of the middle vertex under the collapse (L-2 or L)
};

MergeGeometry merge_geometry(const IntervalSSet& cur, bool want_fwd) {
  int L = cur.iv.length();
  bool p = cur.iv.fwd[L - 2], q = cur.iv.fwd[L - 1];
  require((p != q) || (want_fwd == p),
          "merge_geometry: this pattern forces the merge orientation");
  auto s = std::make_shared<FinSimplicialSet>();
  for (int k = 0; k <= L; ++k) s->add_simplex(0, "v" + std::to_string(k));
  for (int k = 0; k < L; ++k) {
    SimplexRef lo = s->ref("v" + std::to_string(k));
    SimplexRef hi = s->ref("v" + std::to_string(k + 1));
    DegSimplex d0{cur.iv.fwd[k] ? hi : lo, DegWord{}};
    DegSimplex d1{cur.iv.fwd[k] ? lo : hi, DegWord{}};
    s->add_simplex(1, "e" + std::to_string(k), {d0, d1});
  }
  SimplexRef a = s->ref("v" + std::to_string(L - 2));
  SimplexRef c = s->ref("v" + std::to_string(L));
  MergeGeometry g;
  g.merged_fwd = want_fwd;
  DegSimplex d0m{want_fwd ? c : a, DegWord{}};
  DegSimplex d1m{want_fwd ? a : c, DegWord{}};
  s->add_simplex(1, "m", {d0m, d1m});
  SimplexRef e1 = s->ref("e" + std::to_string(L - 2));
  SimplexRef e2 = s->ref("e" + std::to_string(L - 1));
  SimplexRef m = s->ref("m");
  auto E = [&](SimplexRef r) { return DegSimplex{r, DegWord{}}; };
  std::vector<DegSimplex> faces(3);
  if (p && q) {
    faces = {E(e2), E(m), E(e1)};  // x0=a, x1=b, x2=c
    g.b_to = L;
  } else if (!p && !q) {
    faces = {E(e1), E(m), E(e2)};  // x0=c, x1=b, x2=a
    g.b_to = L - 2;
  } else if (p && !q) {
    if (want_fwd) {
      faces = {E(e2), E(e1), E(m)};  // x0=a, x1=c, x2=b
      g.b_to = L;
    } else {
      faces = {E(e1), E(e2), E(m)};  // x0=c, x1=a, x2=b
      g.b_to = L - 2;
    }
  } else {  // !p && q
    if (want_fwd) {
      faces = {E(m), E(e2), E(e1)};  // x0=b, x1=a, x2=c
      g.b_to = L;
    } else {
      faces = {E(m), E(e1), E(e2)};  // x0=b, x1=c, x2=a
      g.b_to = L - 2;
    }
  }
  s->add_simplex(2, "T", std::move(faces));
  g.j = s;
  return g;
}

MergeStep merge_last_pair(ModulePtr amod, const IntervalSSet& cur, bool want_fwd) {
  int L = cur.iv.length();
  MergeGeometry geo = merge_geometry(cur, want_fwd);
  Interval next;
  next.fwd.assign(cur.iv.fwd.begin(), cur.iv.fwd.end() - 2);
  next.fwd.push_back(geo.merged_fwd);
  IntervalSSet nis = realize_interval(next);

  TensorModule aj = tensor_sset(amod, geo.j);
  TensorModule acur = tensor_sset(amod, cur.ss);
  TensorModule anext = tensor_sset(amod, nis.ss);

  // cur-part submodule of A[J]: contractible pair (the triangle fills a horn)
  std::set<int> icells;
  std::vector<int> group(aj.mod->cell_count());
  for (int c = 0; c < aj.mod->cell_count(); ++c) {
    const TensorCell& tc = aj.tcell(c);
    group[c] = tc.m_cell;
    std::string nm = geo.j->name(tc.a.base);
    if (nm != "m" && nm != "T") icells.insert(c);
  }
  Submodule isub = submodule(aj.mod, icells);
  DeformationRetract dr1 = retract_of_contractible_pair(isub, group);
  // iso A[cur] ~ the submodule
  ModuleMap cur_to_sub;
  {
    cur_to_sub.src = acur.mod;
    cur_to_sub.dst = isub.mod;
    for (int c = 0; c < acur.mod->cell_count(); ++c) {
      const TensorCell& tc = acur.tcell(c);
      TensorCell key{tc.m_cell, tc.alpha,
                     DegSimplex{geo.j->ref(cur.ss->name(tc.a.base)), tc.a.w}};
      cur_to_sub.images.push_back(
          isub.mod->generator(isub.sub_cell_of_parent[aj.cell_index(key)]));
    }
  }
  ModuleMap sub_to_cur;
  {
    sub_to_cur.src = isub.mod;
    sub_to_cur.dst = acur.mod;
    sub_to_cur.images.resize(isub.mod->cell_count());
    for (int c = 0; c < acur.mod->cell_count(); ++c)
      sub_to_cur.images[cur_to_sub.images[c].terms[0].cell] = acur.mod->generator(c);
  }
  EquivalenceWitness w1 =
      compose_witness(witness_from_iso(cur_to_sub, sub_to_cur),
                      witness_from_retract(dr1, isub.inclusion));  // A[cur] ~ A[J]

  // next-part: the strict simplicial collapse kappa : J -> next
  std::vector<SimplexRef> vimg(geo.j->count(0));
  for (int k = 0; k <= L; ++k) {
    int lbl = k == L - 1 ? geo.b_to : k;
    if (lbl == L) lbl = L - 1;  // relabel after dropping one edge
    vimg[geo.j->ref("v" + std::to_string(k)).idx] = nis.vertex(lbl);
  }
  auto kappa = sset_map_from_vertices(*geo.j, *nis.ss, vimg);
  require(kappa.has_value(), "merge_last_pair: collapse map missing");
  ModuleMap r2 = tensor_map_sset(aj, anext, *kappa);
  // next includes into J via the merged edge
  SSetMap incl_next;
  {
    incl_next.src = nis.ss.get();
    incl_next.dst = geo.j.get();
    incl_next.images.resize(2);
    incl_next.images[0].resize(nis.ss->count(0));
    incl_next.images[1].resize(nis.ss->count(1));
    for (int k = 0; k <= L - 1; ++k) {
      int jl = k <= L - 2 ? k : L;
      incl_next.images[0][nis.vertex(k).idx] =
          DegSimplex{geo.j->ref("v" + std::to_string(jl)), DegWord{}};
    }
    for (int k = 0; k < L - 1; ++k) {
      std::string tn = k < L - 2 ? "e" + std::to_string(k) : "m";
      incl_next.images[1][nis.edge(k).idx] = DegSimplex{geo.j->ref(tn), DegWord{}};
    }
    require(!incl_next.verify().has_value(), "merge_last_pair: next inclusion");
  }
  ModuleMap i2 = tensor_map_sset(anext, aj, incl_next);
  require_equal_maps(compose(r2, i2), identity_map(anext.mod),
                     "merge_last_pair: collapse retraction");
  // homotopy id_{A[J]} ~ i2 r2 from the simplicial square
  std::vector<SimplexRef> vend(geo.j->count(0));
  for (int k = 0; k <= L; ++k) {
    int lbl = k == L - 1 ? geo.b_to : k;
    vend[geo.j->ref("v" + std::to_string(k)).idx] = geo.j->ref("v" + std::to_string(lbl));
  }
  auto prj = std::make_shared<ProductSSet>(product(*geo.j, *delta_sset(1)));
  for (int rep = 0; rep < 2; ++rep) {
    bool id_at_zero = rep == 0;
    std::vector<SimplexRef> himg(prj->sset.count(0));
    for (int i = 0; i < prj->sset.count(0); ++i) {
      auto comps = prj->components(SimplexRef{0, i});
      SimplexRef jv = comps.first.base;
      int t = delta_sset(1)->name(comps.second.base) == "1" ? 1 : 0;
      bool use_id = id_at_zero ? (t == 0) : (t == 1);
      himg[i] = use_id ? jv : vend[jv.idx];
    }
    auto hh = sset_map_from_vertices(prj->sset, *geo.j, himg);
    if (!hh) continue;
    TensorModule ajcyl = tensor_sset(aj.mod, delta_sset(1));
    ModuleMap bim = tensor_bimap(aj, ajcyl, aj, *prj, *hh);
    Homotopy slide = homotopy_from_carrier(ajcyl, bim);
    if (!id_at_zero) slide = inverse_homotopy(slide);
    ModuleMap endo = slide.at(1);
    require_equal_maps(endo, compose(i2, r2), "merge_last_pair: endomap mismatch");
    DeformationRetract dr2{r2, slide};
    EquivalenceWitness w2 = witness_from_retract(dr2, i2);  // A[next] ~ A[J]
    MergeStep out;
    out.next = next;
    out.w = compose_witness(w1, invert_witness(w2));
    return out;
  }
  throw std::runtime_error("merge_last_pair: no simplicial slide");
}

}  // namespace

EquivalenceWitness compress_interval(ModulePtr a, const Interval& iv) {
  require(iv.length() >= 1, "compress_interval: need length >= 1");
  IntervalSSet cur = realize_interval(iv);
  std::optional<EquivalenceWitness> w;  // A[iv] ~ A[cur]
  while (cur.iv.length() > 1) {
    bool p = cur.iv.fwd[cur.iv.length() - 2], q = cur.iv.fwd[cur.iv.length() - 1];
    bool want = (p == q) ? p : true;
    MergeStep step = merge_last_pair(a, cur, want);
    w = w ? compose_witness(*w, step.w) : step.w;
    cur = realize_interval(step.next);
  }
  if (!cur.iv.fwd[0]) {
    // flip the final backward letter: A[(bwd)] ~ A[(fwd,bwd)] ~ A[(fwd)]
    Interval mixed;
    mixed.fwd = {true, false};
    IntervalSSet mis = realize_interval(mixed);
    MergeStep to_fwd = merge_last_pair(a, mis, true);    // A[(fwd,bwd)] ~ A[(fwd)]
    MergeStep to_bwd = merge_last_pair(a, mis, false);   // A[(fwd,bwd)] ~ A[(bwd)]
    EquivalenceWitness flip =
        compose_witness(invert_witness(to_bwd.w), to_fwd.w);  // A[(bwd)] ~ A[(fwd)]
    w = w ? compose_witness(*w, flip) : flip;
  }
  if (!w) {
    TensorModule t = tensor_sset(a, cur.ss);
    return witness_identity(t.mod);
  }
  return *w;
}

// functorial map of telescopes for a strictly commuting square a f = g a
ModuleMap telescope_functorial(const TruncTel& src, const TruncTel& dst,
                               const ModuleMap& a) {
  LongHomotopy tr = trivial_long(compose(dst.f, a), Interval{});
  // zero-length homotopy: handle directly as a stagewise map
  require_equal_maps(compose(dst.f, a), compose(a, src.f), "telescope_functorial: square");
  ModuleMap acyl = tensor_map_module(src.cyl.ai, dst.cyl.ai, a);
  ModuleMap end;
  end.src = src.f.src;
  end.dst = src.cyl.ai.mod;
  int n = src.iv.length();
  for (int c = 0; c < src.f.src->cell_count(); ++c)
    end.images.push_back(src.cyl.ai.embed(
        src.f.src->generator(c), degenerate_vertex(src.cyl.is.vertex(n),
                                                   src.f.src->cell(c).dim)));
  ModuleMap u = pushout_induced(src.cyl.po, end, src.f, compose(dst.cyl.from_ai, acyl),
                                compose(dst.cyl.back, a));
  (void)tr;
  ModuleMap r;
  r.src = src.tel;
  r.dst = dst.tel;
  r.images.resize(src.tel->cell_count());
  std::vector<char> done(src.tel->cell_count(), 0);
  for (int k = 0; k < src.stages; ++k) {
    auto cells = cellular_inclusion_cells(src.stage_in[k]);
    require(cells.has_value(), "telescope_functorial: corrupt telescope");
    for (int c = 0; c < src.cyl.mod->cell_count(); ++c) {
      int tc = (*cells)[c];
      if (done[tc]) continue;
      r.images[tc] = dst.stage_in[k].apply(u.images[c]);
      done[tc] = 1;
    }
  }
  return r;
}


// --- identity telescope -----------------------------------------------------------

TelIdRetract telescope_id_retract(ModulePtr a, const Interval& iv, int stages) {
  for (bool f : iv.fwd) require(f, "telescope_id_retract: interval must be ordered");
  TelIdRetract out;
  out.tel = telescope(identity_map(a), iv, stages);

  // projection: stagewise cylinder collapse
  ModuleMap proj;
  proj.src = out.tel.tel;
  proj.dst = a;
  proj.images.resize(out.tel.tel->cell_count());
  {
    std::vector<char> done(out.tel.tel->cell_count(), 0);
    for (int k = 0; k < stages; ++k) {
      auto cells = cellular_inclusion_cells(out.tel.stage_in[k]);
      require(cells.has_value(), "telescope_id_retract: corrupt telescope");
      for (int c = 0; c < out.tel.cyl.mod->cell_count(); ++c) {
        int tc = (*cells)[c];
        if (done[tc]) continue;
        proj.images[tc] = out.tel.cyl.proj.images[c];
        done[tc] = 1;
      }
    }
  }
  out.proj = proj;
  require_equal_maps(compose(proj, out.tel.front), identity_map(a),
                     "telescope_id_retract: projection section");

  // iso Tel_N(id) ~ A[chain interval of length N*|iv|]
  int L = stages * iv.length();
  IntervalSSet chain = realize_interval(ordered_interval(L));
  TensorModule achain = tensor_sset(a, chain.ss);
  ModuleMap tel_to_chain;
  tel_to_chain.src = out.tel.tel;
  tel_to_chain.dst = achain.mod;
  tel_to_chain.images.resize(out.tel.tel->cell_count());
  {
    auto back_cells = cellular_inclusion_cells(out.tel.cyl.back);
    require(back_cells.has_value(), "telescope_id_retract: cylinder back");
    std::vector<int> borigin(out.tel.cyl.mod->cell_count(), -1);
    for (int c = 0; c < a->cell_count(); ++c) borigin[(*back_cells)[c]] = c;
    std::vector<char> done(out.tel.tel->cell_count(), 0);
    for (int k = 0; k < stages; ++k) {
      auto cells = cellular_inclusion_cells(out.tel.stage_in[k]);
      for (int c = 0; c < out.tel.cyl.mod->cell_count(); ++c) {
        int tc = (*cells)[c];
        if (done[tc]) continue;
        Element img;
        if (borigin[c] >= 0) {
          int e = borigin[c];
          img = achain.embed(a->generator(e),
                             degenerate_vertex(chain.vertex((k + 1) * iv.length()),
                                               a->cell(e).dim));
        } else {
          // a cylinder cell: shift its interval position by k*|iv|
          const Element& src_img = out.tel.cyl.from_ai.images[0];
          (void)src_img;
          // invert from_ai on cells: the cylinder cells not in the back copy
          // correspond to A[I]-cells except the far end
          img = element_zero(out.tel.cyl.mod->cell(c).dim);
        }
        tel_to_chain.images[tc] = img;
        done[tc] = 1;
      }
    }
    // fill the cylinder-part values via from_ai's cell map
    for (int ac = 0; ac < out.tel.cyl.ai.mod->cell_count(); ++ac) {
      const Element& im = out.tel.cyl.from_ai.images[ac];
      if (im.terms.size() != 1 || !im.terms[0].w.empty()) continue;
      int cylcell = im.terms[0].cell;
      const TensorCell& tcell = out.tel.cyl.ai.tcell(ac);
      for (int k = 0; k < stages; ++k) {
        auto cells = cellular_inclusion_cells(out.tel.stage_in[k]);
        int tc = (*cells)[cylcell];
        std::string nm = out.tel.cyl.is.ss->name(tcell.a.base);
        int idx = std::stoi(nm.substr(1));
        std::string tname = (nm[0] == 'v' ? "v" : "e") +
                            std::to_string(idx + k * iv.length());
        TensorCell key{tcell.m_cell, tcell.alpha,
                       DegSimplex{chain.ss->ref(tname), tcell.a.w}};
        Element img = achain.mod->generator(achain.cell_index(key));
        tel_to_chain.images[tc] = img;
      }
    }
  }
  require(!tel_to_chain.verify().has_value(), "telescope_id_retract: chain iso");
  ModuleMap chain_to_tel;
  {
    chain_to_tel.src = achain.mod;
    chain_to_tel.dst = out.tel.tel;
    chain_to_tel.images.resize(achain.mod->cell_count());
    for (int tc = 0; tc < out.tel.tel->cell_count(); ++tc)
      chain_to_tel.images[tel_to_chain.images[tc].terms[0].cell] =
          out.tel.tel->generator(tc);
  }
  require_equal_maps(compose(chain_to_tel, tel_to_chain), identity_map(out.tel.tel),
                     "telescope_id_retract: iso");

  // min-map convergent homotopy on the chain
  auto prc = std::make_shared<ProductSSet>(product(*chain.ss, *chain.ss));
  std::vector<SimplexRef> vimg(prc->sset.count(0));
  for (int i = 0; i < prc->sset.count(0); ++i) {
    auto comps = prc->components(SimplexRef{0, i});
    int x = std::stoi(chain.ss->name(comps.first.base).substr(1));
    int t = std::stoi(chain.ss->name(comps.second.base).substr(1));
    vimg[i] = chain.vertex(std::min(x, t));
  }
  auto minmap = sset_map_from_vertices(prc->sset, *chain.ss, vimg);
  require(minmap.has_value(), "telescope_id_retract: min map");
  TensorModule achain2 = tensor_sset(achain.mod, chain.ss);
  ModuleMap bim = tensor_bimap(achain, achain2, achain, *prc, *minmap);

  ConvergentData cd;
  cd.h = long_from_carrier(chain, achain2, bim);
  for (int i = 0; i <= L; ++i) {
    std::set<int> cells;
    for (int c = 0; c < achain.mod->cell_count(); ++c) {
      const TensorCell& tc = achain.tcell(c);
      std::string nm = chain.ss->name(tc.a.base);
      int idx = std::stoi(nm.substr(1));
      int top = nm[0] == 'v' ? idx : idx + 1;
      if (top <= i) cells.insert(c);
    }
    cd.filtration.push_back(cells);
    cd.stab.push_back(i);
  }
  Homotopy g = convergent_limit(cd);  // front o proj ~ id on the chain
  // transport to the telescope
  Homotopy gh = homotopy_from_carrier(
      tensor_sset(out.tel.tel, delta_sset(1)),
      compose(chain_to_tel,
              compose(g.carrier, tensor_map_module(tensor_sset(out.tel.tel, delta_sset(1)),
                                                   g.cyl, tel_to_chain))));
  // orientation: min at t=0 is the collapse, at t=L... the convergent limit
  // goes from H at 0 (= collapse to position 0) to the stabilized identity
  DeformationRetract dr;
  dr.retraction = proj;
  dr.homotopy = inverse_homotopy(gh);
  if (auto e = dr.homotopy.verify_endpoints(identity_map(out.tel.tel),
                                            compose(out.tel.front, proj)))
    throw std::runtime_error("telescope_id_retract: " + *e);
  out.dr = dr;
  return out;
}

// --- shift slide -----------------------------------------------------------------

Homotopy telescope_shift_slide(const TruncTel& tn, const TruncTel& tn1) {
  require(tn.iv.length() == 1 && tn.iv.fwd[0], "telescope_shift_slide: standard interval only");
  require(tn1.stages == tn.stages + 1, "telescope_shift_slide: need one deeper stage");
  ModuleMap incl = telescope_incl(tn, tn1);
  ModuleMap fstar = telescope_functorial(tn1, tn1, tn.f);
  ModuleMap sh = telescope_shift(tn, tn1);
  ModuleMap target = compose(fstar, sh);

  // prescribed square: t=0 the inclusion, t=1 f_* o sh, junction copies slide
  // along the stage cylinder edge
  auto d1 = delta_sset(1);
  TensorModule telcyl = tensor_sset(tn.tel, d1);
  SimplexRef v0 = d1->ref("0"), v1 = d1->ref("1");
  ExtendProblem p;
  p.big = telcyl.mod;
  p.target = tn1.tel;
  p.group.resize(telcyl.mod->cell_count());
  // groups: by underlying telescope cell
  for (int c = 0; c < telcyl.mod->cell_count(); ++c)
    p.group[c] = telcyl.tcell(c).m_cell;
  // ends
  for (int c = 0; c < telcyl.mod->cell_count(); ++c) {
    const TensorCell& tc = telcyl.tcell(c);
    if (tc.a.base == v0)
      p.prescribed[c] = tn1.tel->apply_mono(
          incl.images[tc.m_cell], tc.alpha.to_sur(tn.tel->cell(tc.m_cell).dim));
    else if (tc.a.base == v1)
      p.prescribed[c] = tn1.tel->apply_mono(
          target.images[tc.m_cell], tc.alpha.to_sur(tn.tel->cell(tc.m_cell).dim));
  }
  // junction columns: each stage-k front copy slides along stage k's edge in
  // the deeper telescope
  {
    auto fcells = cellular_inclusion_cells(tn.front);
    require(fcells.has_value(), "telescope_shift_slide: front");
    // the A-copies: stage-k front = back of stage k-1; enumerate all of them
    for (int k = 0; k <= tn.stages; ++k) {
      ModuleMap copy = k == 0 ? tn.front : tn.back_at[k - 1];
      auto ccells = cellular_inclusion_cells(copy);
      require(ccells.has_value(), "telescope_shift_slide: junction copy");
      // column homotopy: the edge of stage k in tn1 (from front_k to back_k)
      for (int ac = 0; ac < tn.f.src->cell_count(); ++ac) {
        int telc = (*ccells)[ac];
        // cells over (telc, edge) in telcyl
        for (int c = 0; c < telcyl.mod->cell_count(); ++c) {
          const TensorCell& tc = telcyl.tcell(c);
          if (tc.m_cell != telc || tc.a.base.dim != 1) continue;
          // value: the stage-k cylinder edge at matching degeneracies
          // build the A[D1]-element and push through stage k of tn1
          const TensorModule& cai = tn1.cyl.ai;
          std::string ename = "e0";
          TensorCell key{ac, tc.alpha,
                         DegSimplex{tn1.cyl.is.ss->ref(ename), tc.a.w}};
          Element e = cai.mod->generator(cai.cell_index(key));
          p.prescribed[c] =
              compose(tn1.stage_in[k], tn1.cyl.from_ai).apply(e);
        }
      }
    }
  }
  ModuleMap carrier = constrained_extend(p);
  Homotopy h = homotopy_from_carrier(telcyl, carrier);
  if (auto e = h.verify_endpoints(incl, target))
    throw std::runtime_error(std::string("telescope_shift_slide: ") + *e);
  return h;
}

// --- product / iterated conversions -------------------------------------------------

ModuleMap product_to_iterated(const TensorModule& msq, const TensorModule& mcyl,
                              const TensorModule& mcylcyl) {
  auto sq = square_sset();
  ModuleMap r;
  r.src = msq.mod;
  r.dst = mcylcyl.mod;
  for (int c = 0; c < msq.mod->cell_count(); ++c) {
    const TensorCell& tc = msq.tcell(c);
    auto [s1, s2] = sq->components(tc.a.base);
    // reassemble the degeneracies: tc.a.w is shared between both factors
    Mono ws = tc.a.w.to_sur(tc.a.base.dim);
    DegSimplex x{s1.base, DegWord::from_sur(mono_compose(s1.w.to_sur(s1.base.dim), ws))};
    DegSimplex t{s2.base, DegWord::from_sur(mono_compose(s2.w.to_sur(s2.base.dim), ws))};
    auto [ic, iw] = mcyl.classify(tc.m_cell, tc.alpha, x);
    auto [oc, ow] = mcylcyl.classify(ic, iw, t);
    Element e{msq.mod->cell(c).dim, {Term{RingValue::one(msq.m->ring()), oc, ow}}};
    r.images.push_back(e);
  }
  return r;
}

ModuleMap iterated_to_product(const TensorModule& mcyl, const TensorModule& mcylcyl,
                              const TensorModule& msq) {
  auto sq = square_sset();
  ModuleMap r;
  r.src = mcylcyl.mod;
  r.dst = msq.mod;
  for (int c = 0; c < mcylcyl.mod->cell_count(); ++c) {
    const TensorCell& oc = mcylcyl.tcell(c);
    auto [mpart, xsim] = mcyl.components(oc.m_cell, oc.alpha);
    DegSimplex prod = sq->classify(xsim, oc.a);
    auto [pc, pw] = msq.classify(mpart.first, mpart.second, prod);
    Element e{mcylcyl.mod->cell(c).dim,
              {Term{RingValue::one(msq.m->ring()), pc, pw}}};
    r.images.push_back(e);
  }
  return r;
}

// --- coherence ---------------------------------------------------------------------

std::optional<std::string> coherence_check(const CoherentIdempotent& c) {
  ModulePtr K = c.eta.src;
  TensorModule kcyl = tensor_sset(K, delta_sset(1));
  auto restrict_edge = [&](int which) {
    return compose(c.g, tensor_map_sset(kcyl, c.ksq, edge_into_square(which)));
  };
  ModuleMap bottom = restrict_edge(0), top = restrict_edge(1), left = restrict_edge(2),
            right = restrict_edge(3);
  ModuleMap hcar = c.h.carrier;
  hcar.src = kcyl.mod;
  if (!(bottom == hcar)) return "bottom edge is not H";
  if (!(right == hcar)) return "right edge is not H";
  ModuleMap etaH = compose(c.eta, hcar);
  if (!(top == etaH)) return "top edge is not eta o H";
  ModuleMap Heta = compose(hcar, tensor_map_module(kcyl, kcyl, c.eta));
  if (!(left == Heta)) return "left edge is not H o eta[D1]";
  return std::nullopt;
}

CoherentIdempotent coherent_from_domination(const ModuleMap& incl, const ModuleMap& proj,
                                            const Homotopy& hprime) {
  // eta = incl o proj with H = incl o H' o proj[D1], G through two cylinders
  CoherentIdempotent out;
  ModulePtr K = proj.src;
  ModulePtr L = proj.dst;
  out.eta = compose(incl, proj);
  out.h = whisker_left(incl, whisker_right(hprime, proj));

  TensorModule kcyl = tensor_sset(K, delta_sset(1));
  TensorModule kcylcyl = tensor_sset(kcyl.mod, delta_sset(1));
  out.ksq = tensor_sset(K, square_as_sset());
  TensorModule lcyl = tensor_sset(L, delta_sset(1));
  TensorModule lcylcyl = tensor_sset(lcyl.mod, delta_sset(1));

  ModuleMap p2i = product_to_iterated(out.ksq, kcyl, kcylcyl);
  ModuleMap pcyl = tensor_map_module(kcyl, lcyl, proj);
  ModuleMap pcylcyl = tensor_map_module(kcylcyl, lcylcyl, pcyl);
  ModuleMap hcyl = tensor_map_module(lcylcyl, lcyl, hprime.carrier);
  out.g = compose(incl, compose(hprime.carrier, compose(hcyl, compose(pcylcyl, p2i))));
  if (auto e = coherence_check(out))
    throw std::runtime_error("coherent_from_domination: " + *e);
  return out;
}

// --- splitting -------------------------------------------------------------------

SplitResult split_idempotent(const CoherentIdempotent& ci, int stages,
                             const std::optional<EquivalenceWitness>& eta_witness) {
  SplitResult out;
  ModulePtr K = ci.eta.src;
  Interval iv = ordered_interval(1);
  out.tel = telescope(ci.eta, iv, stages);
  out.tel_next = telescope(ci.eta, iv, stages + 1);

  // c : Tel_N -> K via (Hbar, eta)_* into Tel(id) followed by the projection,
  // preceded by the interval expansion; built stagewise so that c o front = eta
  LongHomotopy h_long = long_from_ordinary(ci.h);          // eta^2 ~ eta over (fwd)
  LongHomotopy hbar = reverse_long(h_long);                // over (bwd)
  // the square (id_K, eta) with homotopy Hbar from id o eta to eta o id:
  // Hbar goes from eta to eta^2; the required homotopy for the square
  // f := eta (source), g := id (target), a := eta: from g a = eta to a f =
  // eta^2: that is exactly Hbar reversed? Hbar: eta -> eta^2. Good.
  TruncTel tel_idK = telescope(identity_map(K), iv, stages);
  // source telescope over (fwd) # (bwd) with f = eta
  Interval ext = concat_interval(iv, hbar.is.iv);
  TruncTel tel_ext = telescope(ci.eta, ext, stages);
  ModuleMap induced = telescope_induced(tel_ext, tel_idK, ci.eta, hbar);
  // expansion Tel^{fwd}(eta) -> Tel^{fwd,bwd}(eta): stagewise from the
  // compress witness (inverse direction), rel endpoints
  EquivalenceWitness cw = compress_interval(K, ext);  // A[ext] ~ A[fwd]
  // the witness's inv : A[fwd] -> A[ext] is rel endpoints; build the stage map
  ModuleMap expand_cyl;
  {
    // M^{fwd}(eta) -> M^{ext}(eta): cylinder part via cw.inv, back by identity
    ModuleMap end;
    end.src = K;
    end.dst = out.tel.cyl.ai.mod;
    for (int c = 0; c < K->cell_count(); ++c)
      end.images.push_back(out.tel.cyl.ai.embed(
          K->generator(c), degenerate_vertex(out.tel.cyl.is.vertex(1), K->cell(c).dim)));
    ModuleMap inv = cw.inv;  // A[fwd-tensor] -> A[ext-tensor]
    inv.src = out.tel.cyl.ai.mod;
    inv.dst = tel_ext.cyl.ai.mod;
    expand_cyl = pushout_induced(out.tel.cyl.po, end, ci.eta,
                                 compose(tel_ext.cyl.from_ai, inv), tel_ext.cyl.back);
  }
  ModuleMap expand;
  {
    expand.src = out.tel.tel;
    expand.dst = tel_ext.tel;
    expand.images.resize(out.tel.tel->cell_count());
    std::vector<char> done(out.tel.tel->cell_count(), 0);
    for (int k = 0; k < stages; ++k) {
      auto cells = cellular_inclusion_cells(out.tel.stage_in[k]);
      require(cells.has_value(), "split: telescope cells");
      for (int c = 0; c < out.tel.cyl.mod->cell_count(); ++c) {
        int tc = (*cells)[c];
        if (done[tc]) continue;
        expand.images[tc] = tel_ext.stage_in[k].apply(expand_cyl.images[c]);
        done[tc] = 1;
      }
    }
  }
  TelIdRetract idr = telescope_id_retract(K, iv, stages);
  require(idr.tel.tel->cell_count() == tel_idK.tel->cell_count(), "split: tel(id)");
  out.c = compose(idr.proj, compose(induced, expand));
  require_equal_maps(compose(out.c, out.tel.front), ci.eta, "split: c o front != eta");

  // re-verified homotopies
  out.slide = telescope_shift_slide(out.tel, out.tel_next);
  {
    // eta_* o eta_* ~ eta_* through the coherence square, packaged as the
    // criterion homotopy on truncations: verified on the materialization
    ModuleMap es = telescope_functorial(out.tel_next, out.tel_next, ci.eta);
    ModuleMap es2 = compose(es, es);
    // the homotopy between them: stage-local whisker of H through the
    // telescope: construct by the same constrained square as the slide
    auto d1 = delta_sset(1);
    TensorModule telcyl = tensor_sset(out.tel_next.tel, d1);
    SimplexRef v0 = d1->ref("0"), v1 = d1->ref("1");
    ExtendProblem p;
    p.big = telcyl.mod;
    p.target = out.tel_next.tel;
    p.group.resize(telcyl.mod->cell_count());
    for (int c = 0; c < telcyl.mod->cell_count(); ++c)
      p.group[c] = telcyl.tcell(c).m_cell;
    for (int c = 0; c < telcyl.mod->cell_count(); ++c) {
      const TensorCell& tc = telcyl.tcell(c);
      if (tc.a.base == v0)
        p.prescribed[c] = out.tel_next.tel->apply_mono(
            es2.images[tc.m_cell], tc.alpha.to_sur(out.tel_next.tel->cell(tc.m_cell).dim));
      else if (tc.a.base == v1)
        p.prescribed[c] = out.tel_next.tel->apply_mono(
            es.images[tc.m_cell], tc.alpha.to_sur(out.tel_next.tel->cell(tc.m_cell).dim));
    }
    // junction copies carry the homotopy H: eta^2 ~ eta pushed into the stage
    for (int k = 0; k <= out.tel_next.stages; ++k) {
      ModuleMap copy = k == 0 ? out.tel_next.front : out.tel_next.back_at[k - 1];
      auto ccells = cellular_inclusion_cells(copy);
      require(ccells.has_value(), "split: junction");
      for (int ac = 0; ac < K->cell_count(); ++ac) {
        int telc = (*ccells)[ac];
        for (int c = 0; c < telcyl.mod->cell_count(); ++c) {
          const TensorCell& tc = telcyl.tcell(c);
          if (tc.m_cell != telc || tc.a.base.dim != 1) continue;
          // H-columns: value = copy o H at the matching cylinder cell
          TensorCell key{ac, tc.alpha,
                         DegSimplex{delta_sset(1)->ref("0.1"), tc.a.w}};
          Element e = ci.h.cyl.mod->generator(ci.h.cyl.cell_index(key));
          p.prescribed[c] = copy.apply(ci.h.carrier.apply(e));
        }
      }
    }
    ModuleMap carrier = constrained_extend(p);
    out.eta_star_idem = homotopy_from_carrier(telcyl, carrier);
    if (auto e = out.eta_star_idem.verify_endpoints(es2, es))
      throw std::runtime_error(std::string("split: eta_* idempotence: ") + *e);
  }

  // mapping cylinder of c, cofiber, stable retraction
  out.tc = mapping_cylinder(out.c);
  auto inc_cells = cellular_inclusion_cells(out.tc.front);
  require(inc_cells.has_value(), "split: T(c) front");
  QuotientResult q = quotient(out.tc.tf,
                              std::set<int>(inc_cells->begin(), inc_cells->end()));
  out.b = q.mod;
  out.quotient_map = q.projection;

  // r_stable : T(c) -> Tel_{N+1} with r o front = incl strictly: glue the
  // homotopy incl ~ (eta_* o sh) continued by front_{N+1} o c-route
  {
    // on the cylinder part Tel_N[D1]: the slide; on the K part: front_{N+1}
    ModuleMap u;  // Tel_N[D1] -> Tel_{N+1}
    u = out.slide.carrier;
    // the slide ends at f_* o sh; continue to front o c? r o back = front'?
    // take r := glue(slide-carrier, front_{N+1}) along the cylinder end:
    // slide at 1 = eta_* o sh; required match with front' o c on the glued K:
    // back of T(c) is K; front' o c restricted along the gluing equals
    // eta_* o sh o ... -- instead prescribe the canonical cocone:
    ModuleMap v = compose(telescope_incl(out.tel, out.tel_next), ModuleMap(out.tel.front));
    (void)v;
    // cocone: u on Tel_N[D1] with u|1-end = eta_* o sh; the K-copy receives
    // front_{N+1} o eta-route; gluing needs u|1-end = (K-map) o c, which does
    // not hold strictly. Use the incl-route instead: T(c) -> Tel_{N+1} by
    // collapsing the cylinder to its 0 end.
    ModuleMap end;
    end.src = out.tel.tel;
    end.dst = out.tc.akit.cyl.mod;
    for (int c2 = 0; c2 < out.tel.tel->cell_count(); ++c2)
      end.images.push_back(out.tc.akit.i1.images[c2]);
    ModuleMap collapse = compose(telescope_incl(out.tel, out.tel_next), out.tc.akit.p);
    out.r_stable = pushout_induced(out.tc.po, out.tc.akit.i1, out.c, collapse,
                                   compose(out.tel_next.front, identity_map(K)));
  }
  require_equal_maps(compose(out.r_stable, out.tc.front),
                     telescope_incl(out.tel, out.tel_next), "split: r o inc != incl");

  out.telvb = coproduct(out.tel_next.tel, out.b);
  out.s = map_add(compose(out.telvb.in_left, out.r_stable),
                  compose(out.telvb.in_right, out.quotient_map));
  out.split_map = compose(out.s, out.tc.back);

  // the Corollary square: split_map o eta ~ (pr-route) o split_map, with pr
  // the projection onto the telescope summand followed by the inclusion
  {
    ModuleMap pr = coproduct_induced(
        out.telvb, out.telvb.in_left,
        zero_map(out.b, out.telvb.mod));
    // f o eta vs pr o f: the cylinder slide front ~ back o c of T(c),
    // whiskered by iota and s
    // slide in T(c): front ~ back o c
    CylKit telk = cyl_kit(out.tel.tel);
    ModuleMap slide_carrier = compose(out.tc.po.from_b,
                                      tensor_map_module(telk.cyl, out.tc.akit.cyl,
                                                        identity_map(out.tel.tel)));
    Homotopy tslide = homotopy_from_carrier(telk.cyl, slide_carrier);
    // tslide: front (at 0) ~ back o c (at 1)
    Homotopy wh = whisker_right(tslide, out.tel.front);  // front iota ~ back c iota
    // back o c o iota = back o eta
    Homotopy sq = whisker_left(out.s, wh);
    // s o front o iota vs s o back o eta: the left side is in_left o incl o iota
    out.square = sq;
    ModuleMap lhs = sq.at(0);
    ModuleMap rhs = sq.at(1);
    require_equal_maps(rhs, compose(out.split_map, ci.eta), "split: square rhs");
    require_equal_maps(
        lhs, compose(pr, compose(out.telvb.in_left,
                                 compose(telescope_incl(out.tel, out.tel_next),
                                         out.tel.front))),
        "split: square lhs");
  }

  if (eta_witness) {
    // eta an equivalence: c is an equivalence (stagewise collapse against the
    // id-telescope), so the finite witness exists; assemble it from the
    // cylinder machinery
    EquivalenceWitness wback = witness_from_retract(cylinder_retraction(out.tc), out.tc.back);
    // front : Tel >-> T(c) is acyclic by 2-of-3 once c is; derive c's witness
    // from eta's through the strict identities c o front = eta-route is not
    // enough in general; only the eta = id case is needed and there c = proj
    // of the id-telescope composed with strict isos.
    out.finite_witness = compose_witness(wback, witness_identity(out.tc.tf));
    out.finite_witness = std::nullopt;
    if (ci.eta == identity_map(K)) {
      TelIdRetract tir = telescope_id_retract(K, iv, stages + 1);
      // s is an equivalence by the extension axiom applied to the strict
      // ladder; here both ends carry witnesses: Tel incl (via tir) and id_B
      // -- deliver the composite witness for split_map directly:
      // split_map = s o back with back an equivalence; s's witness from the
      // cofiber ladder with f_A = incl (an equivalence for eta = id)
      EquivalenceWitness w_incl = [&] {
        // incl_{N,N+1} for the identity telescope: both retract onto K
        ModuleMap inc = telescope_incl(out.tel, out.tel_next);
        TelIdRetract tn = telescope_id_retract(K, iv, stages);
        EquivalenceWitness wN = witness_from_retract(tn.dr, tn.tel.front);
        EquivalenceWitness wN1 = witness_from_retract(tir.dr, tir.tel.front);
        // inc o front_N = front_{N+1}
        require_equal_maps(compose(inc, tn.tel.front), tir.tel.front, "split: id fronts");
        return right_cancel_witness(tn.tel.front, wN, inc,
                                    transport_witness(wN1, trivial_homotopy(tir.tel.front)));
      }();
      CofiberLadder lad;
      lad.ia = out.tc.front;
      lad.pa = out.quotient_map;
      lad.ia2 = out.telvb.in_left;
      lad.pa2 = coproduct_induced(out.telvb, zero_map(out.tel_next.tel, out.b),
                                  identity_map(out.b));
      lad.fa = telescope_incl(out.tel, out.tel_next);
      lad.fb = out.s;
      lad.fc = identity_map(out.b);
      lad.wa = w_incl;
      lad.wc = witness_identity(out.b);
      EquivalenceWitness ws = extension_axiom_witness(lad);
      out.finite_witness = compose_witness(wback, ws);
    }
  }
  return out;
}


// --- the homotopy criterion --------------------------------------------------------

Homotopy criterion_homotopy(const TruncTel& src, const TruncTel& dst, const ModuleMap& a,
                            const LongHomotopy& ha, const ModuleMap& atil,
                            const LongHomotopy& hatil, const Homotopy& h,
                            const ModuleMap& g2, const TensorModule& ajI) {
  require(ha.is.iv == hatil.is.iv, "criterion: the homotopies must share the interval");
  require(h.at(0) == a && h.at(1) == atil, "criterion: H must go from a to a-tilde");
  int jlen = dst.iv.length();
  int ilen = ha.is.iv.length();
  require(src.iv.length() == jlen + ilen, "criterion: interval bookkeeping");
  // G restrictions: at J-end 0 it is H^a, at 1 it is H^a~ (checked through
  // the ends of the [D1]-direction); the I-end conditions are implied by the
  // endpoint checks below and re-verified on the assembled carrier
  ModuleMap m1 = telescope_induced(src, dst, a, ha);
  ModuleMap m2 = telescope_induced(src, dst, atil, hatil);

  auto d1 = delta_sset(1);
  TensorModule telcyl = tensor_sset(src.tel, d1);
  TensorModule kcyl = h.cyl;  // A[D1]
  auto bcells = cellular_inclusion_cells(src.cyl.back);
  require(bcells.has_value(), "criterion: cylinder back");
  std::vector<int> borigin(src.cyl.mod->cell_count(), -1);
  for (int c = 0; c < src.f.src->cell_count(); ++c) borigin[(*bcells)[c]] = c;

  ModuleMap carrier;
  carrier.src = telcyl.mod;
  carrier.dst = dst.tel;
  carrier.images.resize(telcyl.mod->cell_count());

  // per-stage origin of telescope cells
  std::vector<std::pair<int, int>> origin(src.tel->cell_count(), {-1, -1});
  for (int k = src.stages - 1; k >= 0; --k) {
    auto cells = cellular_inclusion_cells(src.stage_in[k]);
    require(cells.has_value(), "criterion: stage cells");
    for (int c = 0; c < src.cyl.mod->cell_count(); ++c) origin[(*cells)[c]] = {k, c};
  }

  for (int cc = 0; cc < telcyl.mod->cell_count(); ++cc) {
    const TensorCell& oc = telcyl.tcell(cc);
    auto [k, cylcell] = origin[oc.m_cell];
    // decompose: ((cyl-basis), ydir)
    DegSimplex ydir = oc.a;
    if (borigin[cylcell] >= 0) {
      // back copy of K: the H-column
      int e = borigin[cylcell];
      Element base{src.tel->cell(oc.m_cell).dim + oc.alpha.length(),
                   {Term{RingValue::one(src.f.src->ring()), e, oc.alpha}}};
      Element val = h.carrier.apply(kcyl.embed(base, ydir));
      carrier.images[cc] = dst.back_at[k].apply(val);
      continue;
    }
    // cylinder cell: split into ((e, u), z)
    auto [mpart, z] = src.cyl.ai.components(cylcell, oc.alpha);
    Element base{src.tel->cell(oc.m_cell).dim + oc.alpha.length(),
                 {Term{RingValue::one(src.f.src->ring()), mpart.first, mpart.second}}};
    std::string nm = src.cyl.is.ss->name(z.base);
    bool isv = nm[0] == 'v';
    int idx = std::stoi(nm.substr(1));
    bool jpart = isv ? idx <= jlen : idx < jlen;
    Element kval = h.carrier.apply(kcyl.embed(base, ydir));  // in B, degree n
    if (jpart) {
      DegSimplex tr{dst.cyl.is.ss->ref(nm), z.w};
      carrier.images[cc] =
          compose(dst.stage_in[k], dst.cyl.from_ai).apply(dst.cyl.ai.embed(kval, tr));
    } else {
      // through the 2-homotopy G on (A[D1])[I]
      std::string tname = isv ? "v" + std::to_string(idx - jlen)
                              : "e" + std::to_string(idx - jlen);
      Element inner = kcyl.embed(base, ydir);  // in A[D1]
      Element outer = ajI.embed(inner, DegSimplex{ha.is.ss->ref(tname), z.w});
      carrier.images[cc] = dst.back_at[k].apply(g2.apply(outer));
    }
  }
  Homotopy out = homotopy_from_carrier(telcyl, carrier);
  if (auto e = out.carrier.verify())
    throw std::runtime_error("criterion: carrier invalid (a 2-homotopy restriction "
                             "condition fails): " + *e);
  if (auto e = out.verify_endpoints(m1, m2))
    throw std::runtime_error(std::string("criterion: ") + *e);
  return out;
}

}  // namespace csm
