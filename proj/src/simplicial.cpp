#include "csm/simplicial.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace csm {

bool is_monotone(const Mono& f) {
  for (size_t i = 1; i < f.size(); ++i)
    if (f[i] < f[i - 1]) return false;
  return !f.empty() && f.front() >= 0;
}

bool is_surjection(const Mono& f, int target_dim) {
  if (!is_monotone(f)) return false;
  if (f.front() != 0 || f.back() != target_dim) return false;
  for (size_t i = 1; i < f.size(); ++i)
    if (f[i] - f[i - 1] > 1) return false;
  return true;
}

Mono mono_compose(const Mono& outer, const Mono& inner) {
  Mono r(inner.size());
  for (size_t i = 0; i < inner.size(); ++i) {
    if (inner[i] < 0 || inner[i] >= (int)outer.size())
      throw std::runtime_error("mono_compose: range mismatch");
    r[i] = outer[inner[i]];
  }
  return r;
}

Mono mono_identity(int dim) {
  Mono r(dim + 1);
  for (int i = 0; i <= dim; ++i) r[i] = i;
  return r;
}

Mono delta_inj(int i, int dim) {
  Mono r(dim);
  for (int k = 0; k < dim; ++k) r[k] = k < i ? k : k + 1;
  return r;
}

Mono sigma_sur(int j, int dim) {
  Mono r(dim + 2);
  for (int k = 0; k <= dim + 1; ++k) r[k] = k <= j ? k : k - 1;
  return r;
}

bool DegWord::valid() const {
  for (size_t i = 1; i < s.size(); ++i)
    if (s[i] >= s[i - 1]) return false;
  return s.empty() || s.back() >= 0;
}

Mono DegWord::to_sur(int target_dim) const {
  // s = [j1 > j2 > ... > jp]; the encoded surjection is
  // sigma_{j1} o ... o sigma_{jp} : [target_dim + p] ->> [target_dim].
  Mono f = mono_identity(target_dim);
  for (auto it = s.rbegin(); it != s.rend(); ++it) {
    // precompose with sigma_{*it}: f o sigma
    Mono sig = sigma_sur(*it, (int)f.size() - 1);
    f = mono_compose(f, sig);
  }
  return f;
}

DegWord DegWord::from_sur(const Mono& f) {
  DegWord w;
  for (int i = (int)f.size() - 2; i >= 0; --i)
    if (f[i] == f[i + 1]) w.s.push_back(i);
  std::sort(w.s.begin(), w.s.end(), std::greater<int>());
  return w;
}

std::string DegWord::str() const {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

int FinSimplicialSet::add_simplex(int dim, const std::string& name,
                                  std::vector<DegSimplex> faces) {
  if (dim < 0) throw std::runtime_error("add_simplex: negative dimension");
  if (index_.count(name)) throw std::runtime_error("duplicate simplex name: " + name);
  if (dim > 0 && (int)faces.size() != dim + 1)
    throw std::runtime_error("simplex " + name + ": expected " + std::to_string(dim + 1) + " faces");
  for (const auto& f : faces) {
    if (f.dim() != dim - 1) throw std::runtime_error("simplex " + name + ": face dimension mismatch");
    if (f.base.dim < 0 || f.base.dim >= (int)by_dim_.size() ||
        f.base.idx < 0 || f.base.idx >= (int)by_dim_[f.base.dim].size())
      throw std::runtime_error("simplex " + name + ": face references missing simplex");
  }
  int id = (int)names_.size();
  names_.push_back(name);
  faces_.push_back(dim == 0 ? std::vector<DegSimplex>{} : std::move(faces));
  while ((int)by_dim_.size() <= dim) by_dim_.emplace_back();
  by_dim_[dim].push_back(id);
  index_[name] = id;
  ref_of_id_.push_back(SimplexRef{dim, (int)by_dim_[dim].size() - 1});
  return (int)by_dim_[dim].size() - 1;
}

int FinSimplicialSet::total_count() const {
  int n = 0;
  for (const auto& v : by_dim_) n += (int)v.size();
  return n;
}

std::optional<SimplexRef> FinSimplicialSet::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return ref_of_id_[it->second];
}

SimplexRef FinSimplicialSet::ref(const std::string& name) const {
  auto r = find(name);
  if (!r) throw std::runtime_error("no simplex named " + name);
  return *r;
}

const DegSimplex& FinSimplicialSet::face_entry(SimplexRef r, int i) const {
  return faces_[global_id(r)][i];
}

DegSimplex FinSimplicialSet::apply(const DegSimplex& x, const Mono& op) const {
  if ((int)op.size() == 0 || op.back() > x.dim() || !is_monotone(op))
    throw std::runtime_error("apply: bad operator");
  Mono g = mono_compose(x.w.to_sur(x.base.dim), op);  // [k] -> [base.dim]
  // strip the injective part, highest missing value first
  SimplexRef base = x.base;
  for (;;) {
    int target = base.dim;
    // check surjectivity onto [target]
    std::vector<char> hit(target + 1, 0);
    for (int v : g) hit[v] = 1;
    int t = -1;
    for (int v = target; v >= 0; --v)
      if (!hit[v]) { t = v; break; }
    if (t < 0) return DegSimplex{base, DegWord::from_sur(g)};
    if (target == 0) throw std::runtime_error("apply: vertex with missing value");
    const DegSimplex& f = face_entry(base, t);  // d_t(base), dim target-1
    // g = delta_t o g'; push g' into f
    Mono g2(g.size());
    for (size_t i = 0; i < g.size(); ++i) g2[i] = g[i] > t ? g[i] - 1 : g[i];
    g = mono_compose(f.w.to_sur(f.base.dim), g2);
    base = f.base;
  }
}

DegSimplex FinSimplicialSet::face(const DegSimplex& x, int i) const {
  if (x.dim() < 1 || i < 0 || i > x.dim()) throw std::runtime_error("face: bad index");
  return apply(x, delta_inj(i, x.dim()));
}

DegSimplex FinSimplicialSet::degeneracy(const DegSimplex& x, int j) {
  if (j < 0 || j > x.dim()) throw std::runtime_error("degeneracy: bad index");
  Mono g = mono_compose(x.w.to_sur(x.base.dim), sigma_sur(j, x.dim()));
  return DegSimplex{x.base, DegWord::from_sur(g)};
}

std::vector<SimplexRef> FinSimplicialSet::all() const {
  std::vector<SimplexRef> out;
  for (int d = 0; d < (int)by_dim_.size(); ++d)
    for (int i = 0; i < (int)by_dim_[d].size(); ++i) out.push_back(SimplexRef{d, i});
  return out;
}

std::vector<DegSimplex> FinSimplicialSet::simplices_of_dim(int n) const {
  std::vector<DegSimplex> out;
  for (int d = 0; d <= std::min(n, dim()); ++d) {
    // all surjections [n] ->> [d] as words
    std::vector<std::vector<int>> words;
    std::vector<int> cur;
    // choose n-d indices from {0..n-1}, strictly decreasing
    std::vector<int> pick;
    std::function<void(int, int)> rec = [&](int start, int need) {
      if (need == 0) {
        words.push_back(pick);
        return;
      }
      for (int v = start; v >= need - 1; --v) {
        pick.push_back(v);
        rec(v - 1, need - 1);
        pick.pop_back();
      }
    };
    rec(n - 1, n - d);
    for (int i = 0; i < count(d); ++i)
      for (auto& w : words) out.push_back(DegSimplex{SimplexRef{d, i}, DegWord{w}});
  }
  return out;
}

std::vector<SimplexRef> FinSimplicialSet::vertex_sequence(const DegSimplex& x) const {
  std::vector<SimplexRef> seq;
  for (int v = 0; v <= x.dim(); ++v) {
    // vertex v as the operator [0] -> [dim], 0 |-> v
    DegSimplex vx = apply(x, Mono{v});
    seq.push_back(vx.base);
  }
  return seq;
}

std::optional<std::string> FinSimplicialSet::check_identities(int up_to_dim) const {
  int top = up_to_dim < 0 ? dim() + 2 : up_to_dim;
  for (int n = 2; n <= top; ++n) {
    for (const DegSimplex& x : simplices_of_dim(n)) {
      for (int j = 1; j <= n; ++j)
        for (int i = 0; i < j; ++i) {
          DegSimplex a = face(face(x, j), i);
          DegSimplex b = face(face(x, i), j - 1);
          if (!(a == b)) {
            std::ostringstream os;
            os << "d_" << i << " d_" << j << " != d_" << j - 1 << " d_" << i
               << " on " << name(x.base) << x.w.str();
            return os.str();
          }
        }
    }
  }
  return std::nullopt;
}

long FinSimplicialSet::euler_characteristic() const {
  long chi = 0;
  for (int d = 0; d <= dim(); ++d) chi += (d % 2 == 0 ? 1 : -1) * (long)count(d);
  return chi;
}

DegSimplex SSetMap::apply(const DegSimplex& x) const {
  DegSimplex img = images[x.base.dim][x.base.idx];  // dim == x.base.dim
  if (x.w.empty()) return img;
  Mono xs = x.w.to_sur(x.base.dim);        // [x.dim()] ->> [x.base.dim]
  Mono gs = img.w.to_sur(img.base.dim);    // [x.base.dim] ->> [img.base.dim]
  return DegSimplex{img.base, DegWord::from_sur(mono_compose(gs, xs))};
}

std::optional<std::string> SSetMap::verify() const {
  for (const SimplexRef r : src->all()) {
    if (images[r.dim][r.idx].dim() != r.dim)
      return "image of " + src->name(r) + " has wrong dimension";
    if (r.dim == 0) continue;
    for (int i = 0; i <= r.dim; ++i) {
      DegSimplex lhs = dst->apply(image(r), delta_inj(i, r.dim));
      DegSimplex rhs = apply(src->face_entry(r, i));
      if (!(lhs == rhs))
        return "face " + std::to_string(i) + " of " + src->name(r) + " does not commute";
    }
  }
  return std::nullopt;
}

namespace {

std::string subset_name(const std::vector<int>& verts) {
  std::string s;
  for (size_t i = 0; i < verts.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(verts[i]);
  }
  return s;
}

// Adds all subsets of {0..n} with size <= max_card as simplices of a
// simplicial-complex-style simplicial set; skip_set lets horn/boundary drop
// specific top faces.
void build_subsets(FinSimplicialSet& s, int n, int max_dim,
                   const std::set<std::vector<int>>& skip) {
  for (int d = 0; d <= max_dim; ++d) {
    std::vector<int> pick;
    std::function<void(int)> rec = [&](int start) {
      if ((int)pick.size() == d + 1) {
        if (skip.count(pick)) return;
        std::vector<DegSimplex> faces;
        if (d > 0) {
          for (int i = 0; i <= d; ++i) {
            std::vector<int> sub = pick;
            sub.erase(sub.begin() + i);
            auto r = s.find(subset_name(sub));
            if (!r) throw std::runtime_error("missing face in subset complex");
            faces.push_back(DegSimplex{*r, DegWord{}});
          }
        }
        s.add_simplex(d, subset_name(pick), std::move(faces));
        return;
      }
      for (int v = start; v <= n; ++v) {
        pick.push_back(v);
        rec(v + 1);
        pick.pop_back();
      }
    };
    rec(0);
  }
}

}  // namespace

FinSimplicialSet standard_simplex(int n) {
  if (n < 0) throw std::runtime_error("standard_simplex: n >= 0 required");
  FinSimplicialSet s;
  build_subsets(s, n, n, {});
  return s;
}

FinSimplicialSet boundary(int n) {
  if (n < 1) throw std::runtime_error("boundary: n >= 1 required");
  FinSimplicialSet s;
  build_subsets(s, n, n - 1, {});
  return s;
}

FinSimplicialSet horn(int n, int i) {
  if (n < 1 || i < 0 || i > n) throw std::runtime_error("horn: need n >= 1, 0 <= i <= n");
  FinSimplicialSet s;
  std::vector<int> opposite;
  for (int v = 0; v <= n; ++v)
    if (v != i) opposite.push_back(v);
  std::set<std::vector<int>> skip{opposite};
  build_subsets(s, n, n - 1, skip);
  return s;
}

SSetMap subcomplex_inclusion(const FinSimplicialSet& sub, const FinSimplicialSet& amb) {
  SSetMap m;
  m.src = &sub;
  m.dst = &amb;
  m.images.resize(sub.dim() + 1);
  for (const SimplexRef r : sub.all()) {
    m.images[r.dim].resize(sub.count(r.dim));
    m.images[r.dim][r.idx] = DegSimplex{amb.ref(sub.name(r)), DegWord{}};
  }
  return m;
}

SharedSplit split_shared_degeneracies(const DegWord& a, const DegWord& b, int n) {
  std::set<int> ca(a.s.begin(), a.s.end());
  std::vector<int> common;
  for (int v : b.s)
    if (ca.count(v)) common.push_back(v);
  std::sort(common.begin(), common.end(), std::greater<int>());
  DegWord t{common};
  if (common.empty()) return SharedSplit{a, b, t};
  Mono tsur = t.to_sur(n - t.length());
  // section of tsur: least preimage of each value
  Mono sec(n - t.length() + 1);
  for (int v = 0; v <= n - t.length(); ++v)
    for (int i = 0; i <= n; ++i)
      if (tsur[i] == v) { sec[v] = i; break; }
  auto quot = [&](const DegWord& w) {
    Mono ws = w.to_sur(n - w.length());
    return DegWord::from_sur(mono_compose(ws, sec));
  };
  return SharedSplit{quot(a), quot(b), t};
}

namespace {

// joint normalization of a pair of equal-dimension simplices: extract the
// common degeneracy t so that (x, y) = t . (x', y') with disjoint words
struct JointNF {
  DegSimplex x, y;  // disjoint words
  DegWord t;        // shared word
};

JointNF joint_normalize(const DegSimplex& x, const DegSimplex& y) {
  SharedSplit sp = split_shared_degeneracies(x.w, y.w, x.dim());
  return JointNF{DegSimplex{x.base, sp.a}, DegSimplex{y.base, sp.b}, sp.t};
}

}  // namespace

ProductSSet product(const FinSimplicialSet& x, const FinSimplicialSet& y) {
  ProductSSet p;
  p.fac1 = &x;
  p.fac2 = &y;

  // enumerate nondegenerate product simplices: pairs of simplices of equal
  // dimension n whose degeneracy words are disjoint
  struct Entry {
    DegSimplex a, b;
    int n;
  };
  std::vector<Entry> entries;
  for (const SimplexRef rx : x.all())
    for (const SimplexRef ry : y.all()) {
      int pdim = rx.dim, qdim = ry.dim;
      for (int n = std::max(pdim, qdim); n <= pdim + qdim; ++n) {
        // choose disjoint word index sets A (|A| = n-pdim), B (|B| = n-qdim)
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        // iterate subsets A of {0..n-1} of size n-pdim, then B of complement
        std::vector<int> a_pick;
        std::function<void(int)> recA = [&](int start) {
          if ((int)a_pick.size() == n - pdim) {
            std::vector<int> rest;
            for (int v = 0; v < n; ++v)
              if (!std::binary_search(a_pick.begin(), a_pick.end(), v)) rest.push_back(v);
            std::vector<int> b_pick;
            std::function<void(size_t)> recB = [&](size_t start2) {
              if ((int)b_pick.size() == n - qdim) {
                DegWord wa, wb;
                wa.s.assign(a_pick.rbegin(), a_pick.rend());
                wb.s.assign(b_pick.rbegin(), b_pick.rend());
                entries.push_back(Entry{DegSimplex{rx, wa}, DegSimplex{ry, wb}, n});
                return;
              }
              for (size_t k = start2; k < rest.size(); ++k) {
                b_pick.push_back(rest[k]);
                recB(k + 1);
                b_pick.pop_back();
              }
            };
            recB(0);
            return;
          }
          for (int v = start; v < n; ++v) {
            a_pick.push_back(v);
            recA(v + 1);
            a_pick.pop_back();
          }
        };
        recA(0);
      }
    }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& e1, const Entry& e2) { return e1.n < e2.n; });

  // first pass: create simplices; second pass handled inline because faces
  // only reference lower dimensions, which are already present
  for (const Entry& e : entries) {
    std::string nm = x.name(e.a.base) + e.a.w.str() + "*" + y.name(e.b.base) + e.b.w.str();
    std::vector<DegSimplex> faces;
    if (e.n > 0) {
      for (int i = 0; i <= e.n; ++i) {
        DegSimplex fa = x.apply(e.a, delta_inj(i, e.n));
        DegSimplex fb = y.apply(e.b, delta_inj(i, e.n));
        JointNF nf = joint_normalize(fa, fb);
        auto it = p.cls_.find({nf.x, nf.y});
        if (it == p.cls_.end()) throw std::runtime_error("product: face class missing");
        faces.push_back(DegSimplex{it->second, nf.t});
      }
    }
    int idx = p.sset.add_simplex(e.n, nm, std::move(faces));
    p.cls_[{e.a, e.b}] = SimplexRef{e.n, idx};
    p.pair_of_.push_back({e.a, e.b});
  }

  // projections
  p.proj1.src = &p.sset;
  p.proj1.dst = &x;
  p.proj2.src = &p.sset;
  p.proj2.dst = &y;
  p.proj1.images.resize(p.sset.dim() + 1);
  p.proj2.images.resize(p.sset.dim() + 1);
  for (int d = 0; d <= p.sset.dim(); ++d) {
    p.proj1.images[d].resize(p.sset.count(d));
    p.proj2.images[d].resize(p.sset.count(d));
  }
  {
    int k = 0;
    for (const SimplexRef r : p.sset.all()) {
      p.proj1.images[r.dim][r.idx] = p.pair_of_[k].first;
      p.proj2.images[r.dim][r.idx] = p.pair_of_[k].second;
      ++k;
    }
  }
  return p;
}

DegSimplex ProductSSet::classify(const DegSimplex& x, const DegSimplex& y) const {
  if (x.dim() != y.dim()) throw std::runtime_error("classify: dimension mismatch");
  JointNF nf = joint_normalize(x, y);
  auto it = cls_.find({nf.x, nf.y});
  if (it == cls_.end()) throw std::runtime_error("classify: unknown pair");
  return DegSimplex{it->second, nf.t};
}

std::pair<DegSimplex, DegSimplex> ProductSSet::components(SimplexRef r) const {
  int k = r.idx;
  for (int d = 0; d < r.dim; ++d) k += sset.count(d);
  return pair_of_[k];
}

std::optional<SSetMap> sset_map_from_vertices(const FinSimplicialSet& x,
                                              const FinSimplicialSet& y,
                                              const std::vector<SimplexRef>& vertex_images) {
  if ((int)vertex_images.size() != x.count(0)) return std::nullopt;
  SSetMap m;
  m.src = &x;
  m.dst = &y;
  m.images.resize(x.dim() + 1);
  for (int d = 0; d <= x.dim(); ++d) m.images[d].resize(x.count(d));

  // precompute vertex sequences of all simplices of y per dimension
  for (const SimplexRef r : x.all()) {
    std::vector<SimplexRef> want;
    for (const SimplexRef v : x.vertex_sequence(DegSimplex{r, DegWord{}}))
      want.push_back(vertex_images[v.idx]);
    bool found = false;
    for (const DegSimplex& cand : y.simplices_of_dim(r.dim)) {
      if (y.vertex_sequence(cand) == want) {
        m.images[r.dim][r.idx] = cand;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  if (m.verify()) return std::nullopt;
  return m;
}

}  // namespace csm
