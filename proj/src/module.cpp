#include "csm/module.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace csm {

std::string Label::str() const {
  if (!point.empty()) return point;
  if (coords.empty()) return "*";
  std::string s = "(";
  for (size_t i = 0; i < coords.size(); ++i) {
    if (i) s += ",";
    s += to_string(coords[i]);
  }
  return s + ")";
}

bool Element::operator==(const Element& o) const {
  if (degree != o.degree || terms.size() != o.terms.size()) return false;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].cell != o.terms[i].cell || !(terms[i].w == o.terms[i].w) ||
        !(terms[i].coeff == o.terms[i].coeff))
      return false;
  }
  return true;
}

Element element_zero(int degree) { return Element{degree, {}}; }

void element_canonicalize(Element& e) {
  std::sort(e.terms.begin(), e.terms.end(), [](const Term& a, const Term& b) {
    return a.cell != b.cell ? a.cell < b.cell : a.w < b.w;
  });
  std::vector<Term> out;
  for (auto& t : e.terms) {
    if (!out.empty() && out.back().cell == t.cell && out.back().w == t.w) {
      out.back().coeff = out.back().coeff + t.coeff;
    } else {
      out.push_back(std::move(t));
    }
  }
  e.terms.clear();
  for (auto& t : out)
    if (!t.coeff.is_zero()) e.terms.push_back(std::move(t));
}

Element element_add(const Element& a, const Element& b) {
  if (a.degree != b.degree) throw std::runtime_error("element_add: degree mismatch");
  Element r = a;
  r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
  element_canonicalize(r);
  return r;
}

Element element_negate(const Element& a) {
  Element r = a;
  for (auto& t : r.terms) t.coeff = -t.coeff;
  return r;
}

Element element_scale(const RingValue& c, const Element& a) {
  Element r = a;
  for (auto& t : r.terms) t.coeff = c * t.coeff;
  element_canonicalize(r);
  return r;
}

int CellularModule::add_cell(const std::string& name, int dim, std::vector<Element> attach,
                             Label label) {
  if (index_.count(name)) throw std::runtime_error("duplicate cell name: " + name);
  if (dim < 0) throw std::runtime_error("cell dimension must be >= 0");
  if (!cells_.empty() && cells_.back().dim > dim)
    throw std::runtime_error("cells must be added in nondecreasing dimension order");
  if (dim == 0) {
    attach.clear();
  } else {
    if ((int)attach.size() != dim + 1)
      throw std::runtime_error("cell " + name + ": expected " + std::to_string(dim + 1) +
                               " attaching faces");
    for (auto& e : attach) {
      if (e.degree != dim - 1)
        throw std::runtime_error("cell " + name + ": attaching degree mismatch");
      for (const Term& t : e.terms) {
        if (t.cell < 0 || t.cell >= (int)cells_.size())
          throw std::runtime_error("cell " + name + ": attaching references missing cell");
        if (cells_[t.cell].dim + t.w.length() != dim - 1)
          throw std::runtime_error("cell " + name + ": attaching word length mismatch");
      }
      element_canonicalize(e);
    }
    // simplicial compatibility of attaching data: d_i a_j = d_{j-1} a_i, i<j
    for (int j = 1; j <= dim; ++j)
      for (int i = 0; i < j; ++i) {
        if (dim == 1) continue;  // degree-0 faces have no further faces
        Element lhs = face(attach[j], i);
        Element rhs = face(attach[i], j - 1);
        if (!(lhs == rhs)) {
          std::ostringstream os;
          os << "cell " << name << ": attaching data incompatible at faces (" << i << ","
             << j << ")";
          throw std::runtime_error(os.str());
        }
      }
  }
  cells_.push_back(Cell{name, dim, std::move(attach), std::move(label)});
  index_[name] = (int)cells_.size() - 1;
  return (int)cells_.size() - 1;
}

std::optional<int> CellularModule::find_cell(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int CellularModule::top_dim() const {
  int d = -1;
  for (const auto& c : cells_) d = std::max(d, c.dim);
  return d;
}

Element CellularModule::generator(int cell) const {
  Element e{cells_[cell].dim, {Term{RingValue::one(ring_), cell, DegWord{}}}};
  return e;
}

void CellularModule::strip(const RingValue& c, int cell, const Mono& g, Element& out) const {
  int target = cells_[cell].dim;
  std::vector<char> hit(target + 1, 0);
  for (int v : g) hit[v] = 1;
  int t = -1;
  for (int v = target; v >= 0; --v)
    if (!hit[v]) { t = v; break; }
  if (t < 0) {
    out.terms.push_back(Term{c, cell, DegWord::from_sur(g)});
    return;
  }
  // g = delta_t o g'
  Mono g2(g.size());
  for (size_t i = 0; i < g.size(); ++i) g2[i] = g[i] > t ? g[i] - 1 : g[i];
  const Element& att = cells_[cell].attach[t];
  for (const Term& tm : att.terms) {
    Mono g3 = mono_compose(tm.w.to_sur(cells_[tm.cell].dim), g2);
    strip(c * tm.coeff, tm.cell, g3, out);
  }
}

Element CellularModule::apply_mono(const Element& x, const Mono& op) const {
  if (op.empty() || !is_monotone(op) || op.back() > x.degree)
    throw std::runtime_error("apply_mono: bad operator");
  Element out = element_zero((int)op.size() - 1);
  for (const Term& t : x.terms) {
    Mono g = mono_compose(t.w.to_sur(cells_[t.cell].dim), op);
    strip(t.coeff, t.cell, g, out);
  }
  element_canonicalize(out);
  return out;
}

Element CellularModule::face(const Element& x, int i) const {
  if (x.degree < 1) throw std::runtime_error("face: degree must be >= 1");
  return apply_mono(x, delta_inj(i, x.degree));
}

Element CellularModule::degeneracy(const Element& x, int j) const {
  return apply_mono(x, sigma_sur(j, x.degree));
}

std::vector<std::pair<int, DegWord>> CellularModule::basis(int degree) const {
  std::vector<std::pair<int, DegWord>> out;
  for (int ci = 0; ci < (int)cells_.size(); ++ci) {
    int d = cells_[ci].dim;
    if (d > degree) continue;
    // all strictly decreasing words of length degree-d over {0..degree-1}
    std::vector<int> pick;
    std::function<void(int, int)> rec = [&](int start, int need) {
      if (need == 0) {
        std::vector<int> w = pick;
        out.push_back({ci, DegWord{w}});
        return;
      }
      for (int v = start; v >= need - 1; --v) {
        pick.push_back(v);
        rec(v - 1, need - 1);
        pick.pop_back();
      }
    };
    rec(degree - 1, degree - d);
  }
  return out;
}

long CellularModule::rank(int degree) const { return (long)basis(degree).size(); }

std::set<int> CellularModule::support_cells(const Element& x) const {
  std::set<int> s;
  for (const Term& t : x.terms) s.insert(t.cell);
  return s;
}

std::optional<std::string> CellularModule::check_identities(int up_to_degree) const {
  int top = up_to_degree < 0 ? top_dim() + 3 : up_to_degree;
  for (int n = 2; n <= top; ++n) {
    for (const auto& [ci, w] : basis(n)) {
      Element x{n, {Term{RingValue::one(ring_), ci, w}}};
      for (int j = 1; j <= n; ++j)
        for (int i = 0; i < j; ++i) {
          Element a = face(face(x, j), i);
          Element b = face(face(x, i), j - 1);
          if (!(a == b)) {
            std::ostringstream os;
            os << "d_" << i << " d_" << j << " mismatch on basis (" << cells_[ci].name
               << ", " << w.str() << ")";
            return os.str();
          }
        }
    }
  }
  return std::nullopt;
}

ModulePtr zero_module(std::shared_ptr<const Ring> ring) {
  return std::make_shared<CellularModule>(std::move(ring));
}

ModulePtr attach_cell(ModulePtr m, const std::string& name, int dim,
                      std::vector<Element> attach, Label label) {
  // insertion point: after the last cell of dimension <= dim
  int cut = 0;
  for (int c = 0; c < m->cell_count(); ++c)
    if (m->cell(c).dim <= dim) cut = c + 1;
  auto shift = [&](int old) { return old < cut ? old : old + 1; };
  auto out = std::make_shared<CellularModule>(m->ring());
  for (int c = 0; c < cut; ++c) {
    const auto& cell = m->cell(c);
    std::vector<Element> att = cell.attach;  // indices < cut are unchanged
    out->add_cell(cell.name, cell.dim, std::move(att), cell.label);
  }
  for (Element& e : attach)
    for (Term& t : e.terms)
      if (t.cell >= cut)
        throw std::runtime_error("attach_cell: attaching data references higher skeleton");
  out->add_cell(name, dim, std::move(attach), std::move(label));
  for (int c = cut; c < m->cell_count(); ++c) {
    const auto& cell = m->cell(c);
    std::vector<Element> att;
    for (const Element& e : cell.attach) {
      Element x = e;
      for (Term& t : x.terms) t.cell = shift(t.cell);
      att.push_back(std::move(x));
    }
    out->add_cell(cell.name, cell.dim, std::move(att), cell.label);
  }
  return out;
}

std::set<int> cellular_closure(const CellularModule& m, const std::set<int>& cells) {
  std::set<int> out = cells;
  std::vector<int> stack(cells.begin(), cells.end());
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    for (const Element& att : m.cell(c).attach)
      for (const Term& t : att.terms)
        if (out.insert(t.cell).second) stack.push_back(t.cell);
  }
  return out;
}

std::set<int> cellular_closure_elements(const CellularModule& m,
                                        const std::vector<Element>& q) {
  std::set<int> seed;
  for (const Element& e : q)
    for (const Term& t : e.terms) seed.insert(t.cell);
  return cellular_closure(m, seed);
}

Element ModuleMap::apply(const Element& x) const {
  Element out = element_zero(x.degree);
  for (const Term& t : x.terms) {
    Element img = dst->apply_mono(images[t.cell], t.w.to_sur(src->cell(t.cell).dim));
    img = element_scale(t.coeff, img);
    out = element_add(out, img);
  }
  return out;
}

std::optional<std::string> ModuleMap::verify() const {
  if ((int)images.size() != src->cell_count()) return "image list length mismatch";
  for (int c = 0; c < src->cell_count(); ++c) {
    if (images[c].degree != src->cell(c).dim)
      return "image of cell " + src->cell(c).name + " has wrong degree";
    for (const Term& t : images[c].terms)
      if (t.cell < 0 || t.cell >= dst->cell_count()) return "image references missing cell";
    int k = src->cell(c).dim;
    for (int i = 0; i <= k && k >= 1; ++i) {
      Element lhs = dst->face(images[c], i);
      Element rhs = apply(src->cell(c).attach[i]);
      if (!(lhs == rhs))
        return "not a module map: face " + std::to_string(i) + " of cell " +
               src->cell(c).name;
    }
  }
  return std::nullopt;
}

bool ModuleMap::operator==(const ModuleMap& o) const {
  if (src->cell_count() != o.src->cell_count()) return false;
  for (int c = 0; c < src->cell_count(); ++c)
    if (!(images[c] == o.images[c])) return false;
  return true;
}

ModuleMap identity_map(ModulePtr m) {
  ModuleMap f;
  f.src = m;
  f.dst = m;
  for (int c = 0; c < m->cell_count(); ++c) f.images.push_back(m->generator(c));
  return f;
}

ModuleMap zero_map(ModulePtr src, ModulePtr dst) {
  ModuleMap f;
  f.src = std::move(src);
  f.dst = std::move(dst);
  for (int c = 0; c < f.src->cell_count(); ++c)
    f.images.push_back(element_zero(f.src->cell(c).dim));
  return f;
}

ModuleMap map_from_cells(ModulePtr src, ModulePtr dst, std::vector<Element> images) {
  ModuleMap f;
  f.src = std::move(src);
  f.dst = std::move(dst);
  f.images = std::move(images);
  for (auto& e : f.images) element_canonicalize(e);
  if (auto err = f.verify()) throw std::runtime_error("map_from_cells: " + *err);
  return f;
}

ModuleMap compose(const ModuleMap& g, const ModuleMap& f) {
  if (f.dst.get() != g.src.get() && f.dst->cell_count() != g.src->cell_count())
    throw std::runtime_error("compose: middle modules disagree");
  ModuleMap r;
  r.src = f.src;
  r.dst = g.dst;
  for (const Element& e : f.images) r.images.push_back(g.apply(e));
  return r;
}

ModuleMap map_add(const ModuleMap& f, const ModuleMap& g) {
  ModuleMap r;
  r.src = f.src;
  r.dst = f.dst;
  for (int c = 0; c < f.src->cell_count(); ++c)
    r.images.push_back(element_add(f.images[c], g.images[c]));
  return r;
}

ModuleMap map_negate(const ModuleMap& f) {
  ModuleMap r;
  r.src = f.src;
  r.dst = f.dst;
  for (const Element& e : f.images) r.images.push_back(element_negate(e));
  return r;
}

ModuleMap map_sub(const ModuleMap& f, const ModuleMap& g) {
  return map_add(f, map_negate(g));
}

std::optional<std::vector<int>> cellular_inclusion_cells(const ModuleMap& f) {
  std::vector<int> cell_map(f.src->cell_count(), -1);
  std::set<int> used;
  for (int c = 0; c < f.src->cell_count(); ++c) {
    const Element& img = f.images[c];
    if (img.terms.size() != 1) return std::nullopt;
    const Term& t = img.terms[0];
    if (!t.w.empty()) return std::nullopt;
    if (!(t.coeff == RingValue::one(f.src->ring()))) return std::nullopt;
    if (f.dst->cell(t.cell).dim != f.src->cell(c).dim) return std::nullopt;
    if (!(f.dst->cell(t.cell).label == f.src->cell(c).label)) return std::nullopt;
    if (!used.insert(t.cell).second) return std::nullopt;
    cell_map[c] = t.cell;
  }
  return cell_map;
}

Submodule submodule(ModulePtr m, const std::set<int>& cells) {
  // closedness
  for (int c : cells)
    for (const Element& att : m->cell(c).attach)
      for (const Term& t : att.terms)
        if (!cells.count(t.cell))
          throw std::runtime_error("submodule: cell set not closed under attaching data");
  Submodule s;
  s.parent = m;
  s.sub_cell_of_parent.assign(m->cell_count(), -1);
  auto sub = std::make_shared<CellularModule>(m->ring());
  for (int c = 0; c < m->cell_count(); ++c) {
    if (!cells.count(c)) continue;
    const auto& cell = m->cell(c);
    std::vector<Element> attach;
    for (const Element& att : cell.attach) {
      Element e = att;
      for (Term& t : e.terms) t.cell = s.sub_cell_of_parent[t.cell];
      attach.push_back(std::move(e));
    }
    int idx = sub->add_cell(cell.name, cell.dim, std::move(attach), cell.label);
    s.sub_cell_of_parent[c] = idx;
    s.parent_cell.push_back(c);
  }
  s.mod = sub;
  ModuleMap inc;
  inc.src = s.mod;
  inc.dst = m;
  for (int c : s.parent_cell) inc.images.push_back(m->generator(c));
  s.inclusion = std::move(inc);
  return s;
}

std::optional<Element> Submodule::corestrict(const Element& x) const {
  Element out = element_zero(x.degree);
  for (const Term& t : x.terms) {
    int sc = sub_cell_of_parent[t.cell];
    if (sc < 0) return std::nullopt;
    out.terms.push_back(Term{t.coeff, sc, t.w});
  }
  element_canonicalize(out);
  return out;
}

ModuleMap Submodule::corestrict_map(const ModuleMap& f) const {
  ModuleMap r;
  r.src = f.src;
  r.dst = mod;
  for (const Element& e : f.images) {
    auto ce = corestrict(e);
    if (!ce) throw std::runtime_error("corestrict_map: map does not land in submodule");
    r.images.push_back(*ce);
  }
  return r;
}

// --- tensor ------------------------------------------------------------------

bool TensorCell::operator<(const TensorCell& o) const {
  if (m_cell != o.m_cell) return m_cell < o.m_cell;
  if (!(alpha == o.alpha)) return alpha < o.alpha;
  return a < o.a;
}

int TensorModule::cell_index(const TensorCell& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) throw std::runtime_error("tensor: unknown cell");
  return it->second;
}

std::pair<int, DegWord> TensorModule::classify(int m_cell, const DegWord& mw,
                                               const DegSimplex& as) const {
  int n = m->cell(m_cell).dim + mw.length();
  if (as.dim() != n)
    throw std::runtime_error("tensor classify: dimension mismatch (cell " +
                             m->cell(m_cell).name + " word " + mw.str() + " deg " +
                             std::to_string(n) + " vs simplex dim " +
                             std::to_string(as.dim()) + ")");
  SharedSplit sp = split_shared_degeneracies(mw, as.w, n);
  TensorCell tc{m_cell, sp.a, DegSimplex{as.base, sp.b}};
  return {cell_index(tc), sp.t};
}

Element TensorModule::embed(const Element& x, const DegSimplex& as) const {
  Element out = element_zero(x.degree);
  for (const Term& t : x.terms) {
    auto [ci, w] = classify(t.cell, t.w, as);
    out.terms.push_back(Term{t.coeff, ci, w});
  }
  element_canonicalize(out);
  return out;
}

std::pair<std::pair<int, DegWord>, DegSimplex> TensorModule::components(
    int tcell, const DegWord& u) const {
  const TensorCell& tc = tcells_[tcell];
  int n = mod->cell(tcell).dim;
  Mono us = u.to_sur(n);
  Mono asur = tc.alpha.to_sur(m->cell(tc.m_cell).dim);
  Mono bsur = tc.a.w.to_sur(tc.a.base.dim);
  DegWord mw = DegWord::from_sur(mono_compose(asur, us));
  DegWord aw = DegWord::from_sur(mono_compose(bsur, us));
  return {{tc.m_cell, mw}, DegSimplex{tc.a.base, aw}};
}

TensorModule tensor_sset(ModulePtr m, SSetPtr a) {
  TensorModule t;
  t.m = m;
  t.a = a;

  struct Pending {
    TensorCell tc;
    int n;
  };
  std::vector<Pending> pend;
  for (int ci = 0; ci < m->cell_count(); ++ci) {
    int p = m->cell(ci).dim;
    for (const SimplexRef ry : a->all()) {
      int q = ry.dim;
      for (int n = std::max(p, q); n <= p + q; ++n) {
        // disjoint strictly-decreasing words alpha (len n-p), b (len n-q)
        std::vector<int> apick;
        std::function<void(int)> recA = [&](int start) {
          if ((int)apick.size() == n - p) {
            std::vector<int> rest;
            for (int v = n - 1; v >= 0; --v)
              if (!std::count(apick.begin(), apick.end(), v)) rest.push_back(v);
            std::vector<int> bpick;
            std::function<void(size_t)> recB = [&](size_t s2) {
              if ((int)bpick.size() == n - q) {
                TensorCell tc{ci, DegWord{apick}, DegSimplex{ry, DegWord{bpick}}};
                pend.push_back(Pending{tc, n});
                return;
              }
              for (size_t k = s2; k < rest.size(); ++k) {
                bpick.push_back(rest[k]);
                recB(k + 1);
                bpick.pop_back();
              }
            };
            recB(0);
            return;
          }
          for (int v = start; v >= 0; --v) {
            apick.push_back(v);
            recA(v - 1);
            apick.pop_back();
          }
        };
        recA(n - 1);
      }
    }
  }
  std::stable_sort(pend.begin(), pend.end(), [](const Pending& x, const Pending& y) {
    return x.n != y.n ? x.n < y.n : x.tc < y.tc;
  });

  auto mod = std::make_shared<CellularModule>(m->ring());
  // need classify during construction; fill index as we add
  t.mod = mod;  // mod is mutated below before anyone sees it
  for (const Pending& pd : pend) {
    const TensorCell& tc = pd.tc;
    std::string nm = m->cell(tc.m_cell).name + tc.alpha.str() + "*" + a->name(tc.a.base) +
                     tc.a.w.str();
    std::vector<Element> attach;
    if (pd.n > 0) {
      for (int i = 0; i <= pd.n; ++i) {
        Mono d = delta_inj(i, pd.n);
        // face of the m-part basis element
        Element mface = m->apply_mono(
            Element{pd.n, {Term{RingValue::one(m->ring()), tc.m_cell, tc.alpha}}}, d);
        DegSimplex aface = a->apply(tc.a, d);
        Element e = element_zero(pd.n - 1);
        for (const Term& mt : mface.terms) {
          SharedSplit sp = split_shared_degeneracies(mt.w, aface.w, pd.n - 1);
          TensorCell sub{mt.cell, sp.a, DegSimplex{aface.base, sp.b}};
          auto it = t.index_.find(sub);
          if (it == t.index_.end()) throw std::runtime_error("tensor: face cell missing");
          e.terms.push_back(Term{mt.coeff, it->second, sp.t});
        }
        element_canonicalize(e);
        attach.push_back(std::move(e));
      }
    }
    int idx = mod->add_cell(nm, pd.n, std::move(attach), m->cell(tc.m_cell).label);
    t.index_[tc] = idx;
    t.tcells_.push_back(tc);
  }
  return t;
}

ModuleMap tensor_map_sset(const TensorModule& ma, const TensorModule& mb,
                          const SSetMap& smap) {
  ModuleMap f;
  f.src = ma.mod;
  f.dst = mb.mod;
  for (int c = 0; c < ma.mod->cell_count(); ++c) {
    const TensorCell& tc = ma.tcell(c);
    DegSimplex img = smap.apply(tc.a);
    Element e = element_zero(ma.mod->cell(c).dim);
    // m-part stays (tc.m_cell, tc.alpha)
    auto [ci, w] = mb.classify(tc.m_cell, tc.alpha, img);
    e.terms.push_back(Term{RingValue::one(ma.m->ring()), ci, w});
    element_canonicalize(e);
    f.images.push_back(std::move(e));
  }
  return f;
}

ModuleMap tensor_map_module(const TensorModule& ma, const TensorModule& na,
                            const ModuleMap& f) {
  ModuleMap r;
  r.src = ma.mod;
  r.dst = na.mod;
  for (int c = 0; c < ma.mod->cell_count(); ++c) {
    const TensorCell& tc = ma.tcell(c);
    // alpha-degenerate image of the m-generator
    Element img = f.images[tc.m_cell];
    if (!tc.alpha.empty())
      img = na.m->apply_mono(img, tc.alpha.to_sur(ma.m->cell(tc.m_cell).dim));
    r.images.push_back(na.embed(img, tc.a));
  }
  return r;
}

ModuleMap tensor_map_both(const TensorModule& ma, const TensorModule& nb,
                          const ModuleMap& f, const SSetMap& smap) {
  ModuleMap r;
  r.src = ma.mod;
  r.dst = nb.mod;
  for (int c = 0; c < ma.mod->cell_count(); ++c) {
    const TensorCell& tc = ma.tcell(c);
    Element img = f.images[tc.m_cell];
    if (!tc.alpha.empty())
      img = nb.m->apply_mono(img, tc.alpha.to_sur(ma.m->cell(tc.m_cell).dim));
    r.images.push_back(nb.embed(img, smap.apply(tc.a)));
  }
  return r;
}

// --- colimits ---------------------------------------------------------------

namespace {

std::string unique_name(const CellularModule& m, const std::string& base) {
  if (!m.find_cell(base)) return base;
  int k = 2;
  for (;;) {
    std::string cand = base + "#" + std::to_string(k++);
    if (!m.find_cell(cand)) return cand;
  }
}

Element remap_element(const Element& e, const std::vector<int>& cell_map) {
  Element r = e;
  for (Term& t : r.terms) t.cell = cell_map[t.cell];
  element_canonicalize(r);
  return r;
}

}  // namespace

PushoutResult pushout(const ModuleMap& i, const ModuleMap& f) {
  auto icells = cellular_inclusion_cells(i);
  if (!icells) throw std::runtime_error("pushout: the first leg is not a cellular inclusion");
  if (i.src->cell_count() != f.src->cell_count())
    throw std::runtime_error("pushout: legs have different sources");
  const CellularModule& A = *i.src;
  const CellularModule& B = *i.dst;
  const CellularModule& C = *f.dst;

  std::vector<int> a_cell_of_b(B.cell_count(), -1);
  for (int c = 0; c < A.cell_count(); ++c) a_cell_of_b[(*icells)[c]] = c;

  auto D = std::make_shared<CellularModule>(C.ring());
  std::vector<int> d_of_c(C.cell_count(), -1);
  std::vector<int> d_of_b(B.cell_count(), -1);

  int maxdim = std::max(B.top_dim(), C.top_dim());
  for (int dim = 0; dim <= maxdim; ++dim) {
    for (int c = 0; c < C.cell_count(); ++c) {
      if (C.cell(c).dim != dim) continue;
      std::vector<Element> attach;
      for (const Element& att : C.cell(c).attach) attach.push_back(remap_element(att, d_of_c));
      d_of_c[c] = D->add_cell(unique_name(*D, C.cell(c).name), dim, std::move(attach),
                              C.cell(c).label);
    }
    for (int b = 0; b < B.cell_count(); ++b) {
      if (B.cell(b).dim != dim || a_cell_of_b[b] >= 0) continue;
      std::vector<Element> attach;
      for (const Element& att : B.cell(b).attach) {
        // push through: A-cells travel through f into C then into D
        Element e = element_zero(att.degree);
        for (const Term& t : att.terms) {
          int a = a_cell_of_b[t.cell];
          if (a >= 0) {
            Element img = remap_element(f.images[a], d_of_c);
            img = D->apply_mono(img, t.w.to_sur(A.cell(a).dim));
            img = element_scale(t.coeff, img);
            e = element_add(e, img);
          } else {
            e = element_add(e, Element{att.degree, {Term{t.coeff, d_of_b[t.cell], t.w}}});
          }
        }
        attach.push_back(std::move(e));
      }
      d_of_b[b] = D->add_cell(unique_name(*D, B.cell(b).name), dim, std::move(attach),
                              B.cell(b).label);
    }
  }

  PushoutResult r;
  r.mod = D;
  r.from_c.src = f.dst;
  r.from_c.dst = D;
  for (int c = 0; c < C.cell_count(); ++c) r.from_c.images.push_back(D->generator(d_of_c[c]));
  r.from_b.src = i.dst;
  r.from_b.dst = D;
  for (int b = 0; b < B.cell_count(); ++b) {
    if (d_of_b[b] >= 0) {
      r.from_b.images.push_back(D->generator(d_of_b[b]));
    } else {
      int a = a_cell_of_b[b];
      r.from_b.images.push_back(remap_element(f.images[a], d_of_c));
    }
  }
  return r;
}

ModuleMap pushout_induced(const PushoutResult& p, const ModuleMap& i, const ModuleMap& f,
                          const ModuleMap& u, const ModuleMap& v) {
  auto icells = cellular_inclusion_cells(i);
  if (!icells) throw std::runtime_error("pushout_induced: bad inclusion");
  if ((int)u.images.size() != i.dst->cell_count())
    throw std::runtime_error("pushout_induced: u is not a map on the inclusion target");
  if ((int)v.images.size() != f.dst->cell_count())
    throw std::runtime_error("pushout_induced: v is not a map on the pushed-leg target");
  std::vector<int> a_cell_of_b(i.dst->cell_count(), -1);
  for (int c = 0; c < i.src->cell_count(); ++c) a_cell_of_b[(*icells)[c]] = c;

  ModuleMap r;
  r.src = p.mod;
  r.dst = u.dst;
  r.images.resize(p.mod->cell_count());
  // D-cells are C-cells and B-minus-A cells; recover the origin through the
  // structure maps
  auto ccells = cellular_inclusion_cells(p.from_c);
  if (!ccells) throw std::runtime_error("pushout_induced: corrupt pushout");
  std::vector<int> origin_c(p.mod->cell_count(), -1);
  for (int c = 0; c < (int)ccells->size(); ++c) origin_c[(*ccells)[c]] = c;
  std::vector<int> origin_b(p.mod->cell_count(), -1);
  for (int b = 0; b < i.dst->cell_count(); ++b) {
    if (a_cell_of_b[b] >= 0) continue;
    const Element& img = p.from_b.images[b];
    origin_b[img.terms[0].cell] = b;
  }
  for (int d = 0; d < p.mod->cell_count(); ++d) {
    if (origin_c[d] >= 0) r.images[d] = v.images[origin_c[d]];
    else if (origin_b[d] >= 0) r.images[d] = u.images[origin_b[d]];
    else throw std::runtime_error("pushout_induced: unreachable cell");
  }
  return r;
}

QuotientResult quotient(ModulePtr m, const std::set<int>& subcells) {
  // submodule-ness
  for (int c : subcells)
    for (const Element& att : m->cell(c).attach)
      for (const Term& t : att.terms)
        if (!subcells.count(t.cell))
          throw std::runtime_error("quotient: cell set is not a cellular submodule");
  auto Q = std::make_shared<CellularModule>(m->ring());
  std::vector<int> q_of(m->cell_count(), -1);
  for (int dim = 0; dim <= m->top_dim(); ++dim)
    for (int c = 0; c < m->cell_count(); ++c) {
      if (m->cell(c).dim != dim || subcells.count(c)) continue;
      std::vector<Element> attach;
      for (const Element& att : m->cell(c).attach) {
        Element e = element_zero(att.degree);
        for (const Term& t : att.terms)
          if (!subcells.count(t.cell)) e.terms.push_back(Term{t.coeff, q_of[t.cell], t.w});
        element_canonicalize(e);
        attach.push_back(std::move(e));
      }
      q_of[c] = Q->add_cell(m->cell(c).name, dim, std::move(attach), m->cell(c).label);
    }
  QuotientResult r;
  r.mod = Q;
  r.projection.src = m;
  r.projection.dst = Q;
  for (int c = 0; c < m->cell_count(); ++c) {
    if (q_of[c] >= 0) r.projection.images.push_back(Q->generator(q_of[c]));
    else r.projection.images.push_back(element_zero(m->cell(c).dim));
  }
  return r;
}

CoproductResult coproduct(ModulePtr a, ModulePtr b) {
  auto M = std::make_shared<CellularModule>(a->ring());
  std::vector<int> of_a(a->cell_count(), -1), of_b(b->cell_count(), -1);
  int maxdim = std::max(a->top_dim(), b->top_dim());
  for (int dim = 0; dim <= maxdim; ++dim) {
    for (int c = 0; c < a->cell_count(); ++c) {
      if (a->cell(c).dim != dim) continue;
      std::vector<Element> att;
      for (const Element& e : a->cell(c).attach) att.push_back(remap_element(e, of_a));
      of_a[c] = M->add_cell(unique_name(*M, a->cell(c).name), dim, std::move(att),
                            a->cell(c).label);
    }
    for (int c = 0; c < b->cell_count(); ++c) {
      if (b->cell(c).dim != dim) continue;
      std::vector<Element> att;
      for (const Element& e : b->cell(c).attach) att.push_back(remap_element(e, of_b));
      of_b[c] = M->add_cell(unique_name(*M, b->cell(c).name), dim, std::move(att),
                            b->cell(c).label);
    }
  }
  CoproductResult r;
  r.mod = M;
  r.in_left.src = a;
  r.in_left.dst = M;
  for (int c = 0; c < a->cell_count(); ++c) r.in_left.images.push_back(M->generator(of_a[c]));
  r.in_right.src = b;
  r.in_right.dst = M;
  for (int c = 0; c < b->cell_count(); ++c) r.in_right.images.push_back(M->generator(of_b[c]));
  return r;
}

ModuleMap coproduct_induced(const CoproductResult& c, const ModuleMap& f,
                            const ModuleMap& g) {
  ModuleMap r;
  r.src = c.mod;
  r.dst = f.dst;
  r.images.resize(c.mod->cell_count());
  for (int i = 0; i < f.src->cell_count(); ++i)
    r.images[c.in_left.images[i].terms[0].cell] = f.images[i];
  for (int i = 0; i < g.src->cell_count(); ++i)
    r.images[c.in_right.images[i].terms[0].cell] = g.images[i];
  return r;
}

ModulePtr base_change(const RingHom& h, ModulePtr m) {
  auto S = std::make_shared<CellularModule>(h.dst);
  for (int c = 0; c < m->cell_count(); ++c) {
    const auto& cell = m->cell(c);
    std::vector<Element> attach;
    for (const Element& att : cell.attach) {
      Element e = att;
      for (Term& t : e.terms) t.coeff = h.apply(t.coeff);
      element_canonicalize(e);
      attach.push_back(std::move(e));
    }
    S->add_cell(cell.name, cell.dim, std::move(attach), cell.label);
  }
  return S;
}

ModuleMap base_change_map(const RingHom& h, const ModuleMap& f, ModulePtr new_src,
                          ModulePtr new_dst) {
  ModuleMap r;
  r.src = std::move(new_src);
  r.dst = std::move(new_dst);
  for (const Element& e : f.images) {
    Element x = e;
    for (Term& t : x.terms) t.coeff = h.apply(t.coeff);
    element_canonicalize(x);
    r.images.push_back(std::move(x));
  }
  return r;
}

}  // namespace csm
