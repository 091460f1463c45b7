#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace csm {

// Monotone map [n] -> [m] stored by its value vector (size n+1).
using Mono = std::vector<int>;

bool is_monotone(const Mono& f);
bool is_surjection(const Mono& f, int target_dim);
Mono mono_compose(const Mono& outer, const Mono& inner);  // outer o inner
Mono mono_identity(int dim);
Mono delta_inj(int i, int dim);  // [dim-1] -> [dim] skipping i
Mono sigma_sur(int j, int dim);  // [dim+1] ->> [dim] repeating j

// Degeneracy word in Eilenberg-Zilber normal form: strictly decreasing
// indices s_{j1} s_{j2} ... with j1 > j2 > ... >= 0.
struct DegWord {
  std::vector<int> s;

  int length() const { return (int)s.size(); }
  bool empty() const { return s.empty(); }
  bool valid() const;
  bool operator==(const DegWord& o) const { return s == o.s; }
  bool operator<(const DegWord& o) const { return s < o.s; }

  // The surjection [target_dim + |s|] ->> [target_dim] the word encodes.
  Mono to_sur(int target_dim) const;
  // Inverse: word of a monotone surjection (indices i with f(i) = f(i+1)).
  static DegWord from_sur(const Mono& f);
  std::string str() const;
};

struct SimplexRef {
  int dim = -1;
  int idx = -1;
  bool operator==(const SimplexRef& o) const { return dim == o.dim && idx == o.idx; }
  bool operator!=(const SimplexRef& o) const { return !(*this == o); }
  bool operator<(const SimplexRef& o) const {
    return dim != o.dim ? dim < o.dim : idx < o.idx;
  }
};

// A possibly degenerate simplex: base nondegenerate simplex plus word.
struct DegSimplex {
  SimplexRef base;
  DegWord w;
  int dim() const { return base.dim + w.length(); }
  bool operator==(const DegSimplex& o) const { return base == o.base && w == o.w; }
  bool operator<(const DegSimplex& o) const {
    return base != o.base ? base < o.base : w < o.w;
  }
};

// Finite simplicial set presented by nondegenerate simplices and face tables.
class FinSimplicialSet {
 public:
  FinSimplicialSet() = default;

  // Simplices must be added in nondecreasing dimension order; faces refer to
  // already-present simplices. Faces are indexed 0..dim.
  int add_simplex(int dim, const std::string& name, std::vector<DegSimplex> faces = {});

  int dim() const { return (int)by_dim_.size() - 1; }
  int count(int d) const {
    return (d < 0 || d > dim()) ? 0 : (int)by_dim_[d].size();
  }
  int total_count() const;
  const std::string& name(SimplexRef r) const { return names_[by_dim_[r.dim][r.idx]]; }
  std::optional<SimplexRef> find(const std::string& name) const;
  SimplexRef ref(const std::string& name) const;

  const DegSimplex& face_entry(SimplexRef r, int i) const;

  // d_i on a possibly degenerate simplex.
  DegSimplex face(const DegSimplex& x, int i) const;
  // s_j on a possibly degenerate simplex.
  static DegSimplex degeneracy(const DegSimplex& x, int j);
  // x acted on by an arbitrary monotone operator op: [k] -> [dim x].
  DegSimplex apply(const DegSimplex& x, const Mono& op) const;

  // All nondegenerate simplices, skeletal order.
  std::vector<SimplexRef> all() const;
  // Degenerate & nondegenerate simplices of dimension n.
  std::vector<DegSimplex> simplices_of_dim(int n) const;
  // Vertex sequence of a (possibly degenerate) simplex.
  std::vector<SimplexRef> vertex_sequence(const DegSimplex& x) const;

  // Exhaustive d_i d_j identity check; returns a diagnostic on failure.
  std::optional<std::string> check_identities(int up_to_dim = -1) const;

  long euler_characteristic() const;

 private:
  std::vector<std::string> names_;                 // by global id
  std::vector<std::vector<int>> by_dim_;           // dim -> global ids
  std::vector<std::vector<DegSimplex>> faces_;     // by global id
  std::vector<SimplexRef> ref_of_id_;
  std::map<std::string, int> index_;
  int global_id(SimplexRef r) const { return by_dim_[r.dim][r.idx]; }
};

// Map of simplicial sets given on nondegenerate simplices of the source.
struct SSetMap {
  const FinSimplicialSet* src = nullptr;
  const FinSimplicialSet* dst = nullptr;
  std::vector<std::vector<DegSimplex>> images;  // [dim][idx]

  DegSimplex image(SimplexRef r) const { return images[r.dim][r.idx]; }
  DegSimplex apply(const DegSimplex& x) const;
  std::optional<std::string> verify() const;  // commutes with faces?
};

FinSimplicialSet standard_simplex(int n);
FinSimplicialSet boundary(int n);
FinSimplicialSet horn(int n, int i);
SSetMap subcomplex_inclusion(const FinSimplicialSet& sub, const FinSimplicialSet& amb);

struct ProductSSet {
  FinSimplicialSet sset;
  SSetMap proj1;
  SSetMap proj2;
  // index into sset of the class of a joint pair, plus shared degeneracy
  DegSimplex classify(const DegSimplex& x, const DegSimplex& y) const;
  std::pair<DegSimplex, DegSimplex> components(SimplexRef r) const;

  const FinSimplicialSet* fac1 = nullptr;
  const FinSimplicialSet* fac2 = nullptr;
  std::map<std::pair<DegSimplex, DegSimplex>, SimplexRef> cls_;
  std::vector<std::pair<DegSimplex, DegSimplex>> pair_of_;  // by "all()" order
};

ProductSSet product(const FinSimplicialSet& x, const FinSimplicialSet& y);

// Splits two degeneracy words on the same degree n into (a', b', t) with
// a = a' o t, b = b' o t and a', b' index-disjoint; t is the shared part.
struct SharedSplit {
  DegWord a, b, t;
};
SharedSplit split_shared_degeneracies(const DegWord& a, const DegWord& b, int n);

// Builds the map X -> Y determined by vertex images, if every nondegenerate
// simplex of X maps onto an actual simplex of Y with that vertex sequence.
std::optional<SSetMap> sset_map_from_vertices(const FinSimplicialSet& x,
                                              const FinSimplicialSet& y,
                                              const std::vector<SimplexRef>& vertex_images);

}  // namespace csm
