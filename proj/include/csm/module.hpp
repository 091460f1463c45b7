#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csm/ring.hpp"
#include "csm/simplicial.hpp"

namespace csm {

class CellularModule;
using ModulePtr = std::shared_ptr<const CellularModule>;
using SSetPtr = std::shared_ptr<const FinSimplicialSet>;

// Control label of a cell: either a named point of a finite control space or
// exact rational coordinates in a metric one. Both empty = the one-point
// space.
struct Label {
  std::string point;
  std::vector<Rational> coords;

  bool operator==(const Label& o) const { return point == o.point && coords == o.coords; }
  bool operator<(const Label& o) const {
    return point != o.point ? point < o.point : coords < o.coords;
  }
  std::string str() const;
};

struct Term {
  RingValue coeff;
  int cell;
  DegWord w;
};

// Homogeneous element in the (cell, degeneracy word) basis.
struct Element {
  int degree = 0;
  std::vector<Term> terms;  // sorted by (cell, word), no zero coefficients

  bool is_zero() const { return terms.empty(); }
  bool operator==(const Element& o) const;
};

Element element_zero(int degree);
Element element_add(const Element& a, const Element& b);
Element element_negate(const Element& a);
Element element_scale(const RingValue& c, const Element& a);
void element_canonicalize(Element& e);

class CellularModule {
 public:
  struct Cell {
    std::string name;
    int dim = 0;
    std::vector<Element> attach;  // per face index 0..dim, degree dim-1
    Label label;
  };

  explicit CellularModule(std::shared_ptr<const Ring> ring) : ring_(std::move(ring)) {}

  // Cells must be added in nondecreasing dimension order; attaching data may
  // reference only cells already present. Throws on face-incompatible data,
  // naming the offending face pair.
  int add_cell(const std::string& name, int dim, std::vector<Element> attach,
               Label label = {});

  const std::shared_ptr<const Ring>& ring() const { return ring_; }
  int cell_count() const { return (int)cells_.size(); }
  const Cell& cell(int i) const { return cells_[i]; }
  std::optional<int> find_cell(const std::string& name) const;
  int top_dim() const;

  Element generator(int cell) const;

  // x acted on by a monotone operator op: [m] -> [x.degree].
  Element apply_mono(const Element& x, const Mono& op) const;
  Element face(const Element& x, int i) const;
  Element degeneracy(const Element& x, int j) const;

  // degreewise basis: all (cell, word) pairs in canonical order
  std::vector<std::pair<int, DegWord>> basis(int degree) const;
  long rank(int degree) const;

  // cells appearing in x, not closed
  std::set<int> support_cells(const Element& x) const;

  std::optional<std::string> check_identities(int up_to_degree = -1) const;

 private:
  std::shared_ptr<const Ring> ring_;
  std::vector<Cell> cells_;
  std::map<std::string, int> index_;

  void strip(const RingValue& c, int cell, const Mono& g, Element& out) const;
};

ModulePtr zero_module(std::shared_ptr<const Ring> ring);

// new module with one more cell (kept in skeletal order); attach data is
// given in m's cell indices
ModulePtr attach_cell(ModulePtr m, const std::string& name, int dim,
                      std::vector<Element> attach, Label label = {});

// smallest attach-closed cell set containing the given cells
std::set<int> cellular_closure(const CellularModule& m, const std::set<int>& cells);
std::set<int> cellular_closure_elements(const CellularModule& m,
                                        const std::vector<Element>& q);

struct ModuleMap {
  ModulePtr src;
  ModulePtr dst;
  std::vector<Element> images;  // per src cell, degree = cell dim

  Element apply(const Element& x) const;
  std::optional<std::string> verify() const;
  bool operator==(const ModuleMap& o) const;  // equality on cells
};

ModuleMap identity_map(ModulePtr m);
ModuleMap zero_map(ModulePtr src, ModulePtr dst);
ModuleMap map_from_cells(ModulePtr src, ModulePtr dst, std::vector<Element> images);
ModuleMap compose(const ModuleMap& g, const ModuleMap& f);  // g o f
ModuleMap map_add(const ModuleMap& f, const ModuleMap& g);
ModuleMap map_negate(const ModuleMap& f);
ModuleMap map_sub(const ModuleMap& f, const ModuleMap& g);

// cellular inclusion predicate: cells map to unit multiples of distinct
// cells, words empty, labels preserved; returns the cell map
std::optional<std::vector<int>> cellular_inclusion_cells(const ModuleMap& f);

struct Submodule {
  ModulePtr mod;
  ModulePtr parent;
  std::vector<int> parent_cell;         // sub index -> parent index
  std::vector<int> sub_cell_of_parent;  // parent index -> sub index or -1
  ModuleMap inclusion;

  std::optional<Element> corestrict(const Element& x) const;
  ModuleMap corestrict_map(const ModuleMap& f) const;  // f must land in *this
};
Submodule submodule(ModulePtr m, const std::set<int>& cells);

// --- tensor with a finite simplicial set ------------------------------------

struct TensorCell {
  int m_cell;
  DegWord alpha;  // surjection word onto the cell dimension
  DegSimplex a;   // word disjoint from alpha
  bool operator<(const TensorCell& o) const;
};

class TensorModule {
 public:
  ModulePtr mod;
  ModulePtr m;
  SSetPtr a;

  int cell_index(const TensorCell& t) const;
  const TensorCell& tcell(int i) const { return tcells_[i]; }

  // (basis element of M_n, simplex of A_n) -> basis element of M[A]_n
  std::pair<int, DegWord> classify(int m_cell, const DegWord& mw, const DegSimplex& as) const;
  // element of M_n tensor a single simplex of A_n
  Element embed(const Element& x, const DegSimplex& as) const;
  // decompose a basis element of M[A]
  std::pair<std::pair<int, DegWord>, DegSimplex> components(int tcell, const DegWord& u) const;

  std::vector<TensorCell> tcells_;
  std::map<TensorCell, int> index_;
};

TensorModule tensor_sset(ModulePtr m, SSetPtr a);

// functoriality in the simplicial set: induced by smap : A -> B
ModuleMap tensor_map_sset(const TensorModule& ma, const TensorModule& mb, const SSetMap& smap);
// functoriality in the module: f[A] : M[A] -> N[A]
ModuleMap tensor_map_module(const TensorModule& ma, const TensorModule& na, const ModuleMap& f);
// f tensor smap in one step (src = M[A], dst = N[B])
ModuleMap tensor_map_both(const TensorModule& ma, const TensorModule& nb, const ModuleMap& f,
                          const SSetMap& smap);

// --- colimits ---------------------------------------------------------------

struct PushoutResult {
  ModulePtr mod;  // D
  ModuleMap from_c;  // cellular inclusion C -> D
  ModuleMap from_b;  // B -> D
};

// pushout of  C <-f- A >-i-> B  along the cellular inclusion i
PushoutResult pushout(const ModuleMap& i, const ModuleMap& f);

// universal property: cocone (u : B -> T, v : C -> T) with u o i = v o f
ModuleMap pushout_induced(const PushoutResult& p, const ModuleMap& i, const ModuleMap& f,
                          const ModuleMap& u, const ModuleMap& v);

struct QuotientResult {
  ModulePtr mod;
  ModuleMap projection;
};
QuotientResult quotient(ModulePtr m, const std::set<int>& subcells);

struct CoproductResult {
  ModulePtr mod;
  ModuleMap in_left;
  ModuleMap in_right;
};
CoproductResult coproduct(ModulePtr a, ModulePtr b);

// induced map a_coprod_b -> t from components
ModuleMap coproduct_induced(const CoproductResult& c, const ModuleMap& f, const ModuleMap& g);

// --- base change ------------------------------------------------------------

ModulePtr base_change(const RingHom& h, ModulePtr m);
ModuleMap base_change_map(const RingHom& h, const ModuleMap& f, ModulePtr new_src,
                          ModulePtr new_dst);

}  // namespace csm
