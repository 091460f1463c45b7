#pragma once

#include <map>
#include <optional>

#include "csm/control.hpp"
#include "csm/hom.hpp"
#include "csm/module.hpp"

namespace csm {

// shared standard simplicial sets
SSetPtr delta_sset(int k);
SSetPtr horn_sset(int n, int i);
SSetPtr boundary_sset(int n);

// the square Delta^1 x Delta^1 with its product bookkeeping, shared
std::shared_ptr<const ProductSSet> square_sset();
SSetPtr square_as_sset();

// edge inclusions into the square: 0 bottom (t=0), 1 top, 2 left (x=0), 3 right
SSetMap edge_into_square(int which);

// vertex DegSimplex of dimension `dim` (fully degenerate)
DegSimplex degenerate_vertex(SimplexRef v, int dim);

// --- cylinders ---------------------------------------------------------------

struct CylKit {
  TensorModule cyl;  // M[Delta^1]
  ModuleMap i0, i1;  // M -> M[Delta^1], the two ends
  ModuleMap p;       // M[Delta^1] -> M
};
CylKit cyl_kit(ModulePtr m);

// the map (M[X])[Y] -> M[Z] induced by a simplicial map X x Y -> Z
ModuleMap tensor_bimap(const TensorModule& mx, const TensorModule& mxy,
                       const TensorModule& mz, const ProductSSet& xy, const SSetMap& zmap);

// --- homotopies ---------------------------------------------------------------

struct Homotopy {
  TensorModule cyl;   // source bookkeeping: M[Delta^1]
  ModuleMap carrier;  // M[Delta^1] -> N

  ModuleMap at(int end) const;  // end 0 or 1
  ModuleMap at0() const { return at(0); }
  ModuleMap at1() const { return at(1); }
  std::optional<std::string> verify_endpoints(const ModuleMap& from,
                                              const ModuleMap& to) const;
};

Homotopy trivial_homotopy(const ModuleMap& f);
Homotopy homotopy_from_carrier(const TensorModule& cyl, ModuleMap carrier);
Homotopy concat(const Homotopy& h1, const Homotopy& h2);     // via Lambda^2_1 fill
Homotopy inverse_homotopy(const Homotopy& h);                // via Lambda^2_0 fill
Homotopy whisker_left(const ModuleMap& q, const Homotopy& h);
Homotopy whisker_right(const Homotopy& h, const ModuleMap& g);
Homotopy homotopy_add(const Homotopy& a, const Homotopy& b);
// restriction of a homotopy to a submodule of its underlying module
Homotopy restrict_homotopy(const Homotopy& h, const Submodule& s);

// --- HOM-space simplices and the group filler --------------------------------

struct HomKit {
  ModulePtr m, n;
  std::vector<TensorModule> mdk;  // M[Delta^k], k = 0..top

  const TensorModule& level(int k) const { return mdk[k]; }
};
HomKit hom_kit(ModulePtr m, ModulePtr n, int top);

ModuleMap hom_face(const HomKit& kit, const ModuleMap& simplex, int k, int i);
ModuleMap hom_degeneracy(const HomKit& kit, const ModuleMap& simplex, int k, int j);
// group filler: faces[j] given for all j != i; returns an n-simplex with
// those faces (deterministic iterated degeneracy correction)
ModuleMap fill_horn_hom(const HomKit& kit, int n, int i,
                        const std::vector<std::optional<ModuleMap>>& faces);

// kan fill on the module level: extend h : M[Lambda^n_i] -> P over M[Delta^n]
ModuleMap kan_fill(ModulePtr m, int n, int i, const ModuleMap& h,
                   const TensorModule& mhorn, ModulePtr p);

// The constrained extension engine behind the relative fills: prescribed
// values on a closed cell set are extended over `big` into `target`, one
// prism group at a time, with each group's support confined to the closure
// of the values its closure already carries. Optionally a lift against
// `lift_over` (with `bottom` prescribed downstairs and the section `theta`).
struct ExtendProblem {
  ModulePtr big;
  ModulePtr target;
  std::map<int, Element> prescribed;
  std::vector<int> group;
  const ModuleMap* lift_over = nullptr;
  const ModuleMap* bottom = nullptr;
  std::vector<int> theta;
};
ModuleMap constrained_extend(const ExtendProblem& p);

// --- relative fills and lifts --------------------------------------------------

// extension of (g on A[Delta^n], h on M[Lambda^n_i], agreeing on the overlap)
// to M[Delta^n] -> P; support of each cell's image stays inside the closure
// of the already-prescribed values of its cell's closure, which realizes the
// composed control bound
struct RelativeFill {
  TensorModule mdn;  // M[Delta^n]
  ModuleMap extension;
};
RelativeFill relative_horn_fill(ModulePtr m, const Submodule& a, int n, int i,
                                const ModuleMap& g, const TensorModule& adn,
                                const ModuleMap& h, const TensorModule& mhorn,
                                ModulePtr p);

// diagonal lift against the quotient p : P ->> P/U, relative to
// M[Lambda^n_i] u A[Delta^n]
struct RelativeLift {
  TensorModule mdn;
  ModuleMap lift;  // M[Delta^n] -> P
};
RelativeLift relative_lift(ModulePtr m, const Submodule& a, int n, int i,
                           const ModuleMap& top, const TensorModule& mhorn,
                           const ModuleMap& g_on_a, const TensorModule& adn,
                           const ModuleMap& bottom, const TensorModule& mdn_in,
                           const ModuleMap& proj, const std::vector<int>& theta);

// --- mapping cylinder & Waldhausen axioms ------------------------------------

struct MappingCylinder {
  ModuleMap f;
  CylKit akit;        // A[Delta^1]
  PushoutResult po;   // T(f) = A[Delta^1] u_{A[1]} B
  ModulePtr tf;
  ModuleMap front;    // A -> T(f), cellular
  ModuleMap back;     // B -> T(f), cellular
  ModuleMap proj;     // T(f) -> B
};
MappingCylinder mapping_cylinder(const ModuleMap& f);

// functoriality: a strictly commuting square (a, b) : f -> f' induces
// T(f) -> T(f') commuting with front/back/proj
ModuleMap mapping_cylinder_map(const MappingCylinder& tf, const MappingCylinder& tf2,
                               const ModuleMap& a, const ModuleMap& b);

struct DeformationRetract {
  ModuleMap retraction;  // r : Y -> X, r o i = id
  Homotopy homotopy;     // id_Y ~ i o r, trivial on X
};

// cylinder axiom: B is a deformation retract of T(f) via the back inclusion
DeformationRetract cylinder_retraction(const MappingCylinder& tc);

struct EquivalenceWitness {
  ModuleMap fwd;
  ModuleMap inv;
  Homotopy inv_fwd;  // inv o fwd ~ id_src   (at0 = composite, at1 = id)
  Homotopy fwd_inv;  // fwd o inv ~ id_dst
};

std::optional<std::string> verify_witness(const EquivalenceWitness& w);
EquivalenceWitness witness_identity(ModulePtr m);
EquivalenceWitness witness_from_iso(const ModuleMap& f, const ModuleMap& finv);
EquivalenceWitness witness_from_retract(const DeformationRetract& d, const ModuleMap& incl);

// saturation: witnesses compose and cancel (2-out-of-3)
EquivalenceWitness compose_witness(const EquivalenceWitness& wf, const EquivalenceWitness& wg);
// given f and witnesses for f and g o f, derive one for g
EquivalenceWitness right_cancel_witness(const ModuleMap& f, const EquivalenceWitness& wf,
                                        const ModuleMap& g, const EquivalenceWitness& wgf);
// given g and witnesses for g and g o f, derive one for f
EquivalenceWitness left_cancel_witness(const ModuleMap& f, const ModuleMap& g,
                                       const EquivalenceWitness& wg,
                                       const EquivalenceWitness& wgf);

// deformation data for an acyclic cellular inclusion (the idempotent
// correction argument, with the homotopy made relative to the submodule)
DeformationRetract retract_of_acyclic_inclusion(const ModuleMap& i,
                                                const EquivalenceWitness& w);

// A is a deformation retract of T(f) via the front inclusion, for f a
// homotopy equivalence
DeformationRetract deformation_coretraction(const MappingCylinder& tc,
                                            const EquivalenceWitness& wf);

// pushout of an acyclic cellular inclusion i : A >-> C along any f : A -> B;
// returns the pushout, the witness for the pushed corner B -> D, and the
// explicit (e, g, H, G) data of the cylinder-collapse equivalence
struct PushoutEquivalence {
  PushoutResult po;              // D = B u_A C, from_c : B -> D the corner
  EquivalenceWitness corner;     // witness for B -> D
  // the collapse data on W = T(i) -> C
  MappingCylinder w_cyl;
  ModuleMap e, g;
  Homotopy h_eg;  // e o g ~ id_C
  Homotopy g_ge;  // g o e ~ id_W
  // the factored route B -> Q -> D
  PushoutResult q_po;
  EquivalenceWitness b_to_q;
  EquivalenceWitness q_to_d;
};
PushoutEquivalence pushout_equivalence(const ModuleMap& i, const EquivalenceWitness& wi,
                                       const ModuleMap& f);

// gluing: equivalences on A, B, C with strict ladder squares induce an
// equivalence of pushouts, with an assembled witness
struct GluingInput {
  ModuleMap i;   // A >-> B cellular
  ModuleMap f;   // A -> C
  ModuleMap i2;  // A' >-> B' cellular
  ModuleMap f2;  // A' -> C'
  ModuleMap va, vb, vc;  // verticals with witnesses
  EquivalenceWitness wa, wb, wc;
};
struct GluingResult {
  PushoutResult d, d2;
  ModuleMap induced;  // D -> D'
  EquivalenceWitness witness;
};
GluingResult gluing(const GluingInput& in);

// extension axiom machinery: improve a map of pairs (D, D0) -> (T_B, B) to a
// map into B, by a homotopy relative D0
struct ExtensionData {
  // cofiber ladder A >-> B ->> Bbar into T_A >-> T_B ->> T_Bbar
  ModuleMap incl_a;     // A >-> T_A
  ModuleMap incl_b;     // B >-> T_B
  ModuleMap incl_bbar;  // Bbar >-> T_Bbar
  ModuleMap ta_to_tb;   // T_A >-> T_B cellular
  ModuleMap tb_to_tbbar;   // T_B ->> T_Bbar quotient-style
  ModuleMap b_to_bbar;  // B ->> Bbar
  ModuleMap a_to_b;     // A >-> B cellular
  DeformationRetract ra;     // for (A, T_A)
  DeformationRetract rbbar;  // for (Bbar, T_Bbar)
};
struct ExtensionImproved {
  Homotopy homotopy;   // from alpha to a map into B, rel D0
  ModuleMap into_b;    // the improved endpoint (factors through B)
};
ExtensionImproved extension_improve(const ExtensionData& data, const ModuleMap& alpha,
                                    const Submodule& d0);

// full extension axiom: witnesses on the ends of a cofiber-sequence map give
// one for the middle
struct CofiberLadder {
  ModuleMap ia;   // A >-> B
  ModuleMap pa;   // B ->> B/A
  ModuleMap ia2;  // A' >-> B'
  ModuleMap pa2;  // B' ->> B'/A'
  ModuleMap fa, fb, fc;  // verticals (fc induced on quotients)
  EquivalenceWitness wa, wc;
};
EquivalenceWitness extension_axiom_witness(const CofiberLadder& lad);

}  // namespace csm
