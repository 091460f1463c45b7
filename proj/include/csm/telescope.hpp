#pragma once

#include "csm/homotopy.hpp"

namespace csm {

// --- simplicial intervals -----------------------------------------------------

// orientation word: fwd[k] true means the k-th edge runs from label k to k+1
struct Interval {
  std::vector<bool> fwd;
  int length() const { return (int)fwd.size(); }
  bool operator==(const Interval& o) const { return fwd == o.fwd; }
  std::string word() const;  // "fwd,bwd,..."
};

Interval interval_from_word(const std::string& word);
Interval concat_interval(const Interval& a, const Interval& b);
Interval reverse_interval(const Interval& a);
Interval ordered_interval(int n);  // all forward

struct IntervalSSet {
  Interval iv;
  SSetPtr ss;
  SimplexRef vertex(int k) const;
  SimplexRef edge(int k) const;
};
IntervalSSet realize_interval(const Interval& iv);

// --- long homotopies ----------------------------------------------------------

struct LongHomotopy {
  IntervalSSet is;
  TensorModule ai;    // A[I]
  ModuleMap carrier;  // A[I] -> B

  ModuleMap at_label(int k) const;
};

LongHomotopy long_from_carrier(const IntervalSSet& is, const TensorModule& ai,
                               ModuleMap carrier);
LongHomotopy trivial_long(const ModuleMap& f, const Interval& iv);
// ordinary homotopy as a long homotopy over the standard length-1 interval
LongHomotopy long_from_ordinary(const Homotopy& h);
LongHomotopy concat_long(const LongHomotopy& h1, const LongHomotopy& h2);
LongHomotopy reverse_long(const LongHomotopy& h);
// post/precomposition
LongHomotopy long_whisker_left(const ModuleMap& q, const LongHomotopy& h);
LongHomotopy long_whisker_right(const LongHomotopy& h, const ModuleMap& g);

// H # Hbar is homotopic, relative boundary, to the trivial homotopy: an
// ordinary homotopy between the two carriers on A[I # Ibar], built from the
// middle-out layer maps
Homotopy nullhomotopy_concat_inverse(const LongHomotopy& h);

// A[I] ~ A[standard interval of length 1], relative endpoints; fwd is the
// collapse direction
EquivalenceWitness compress_interval(ModulePtr a, const Interval& iv);

// deformation data for an inclusion S >-> parent whose quotient is
// contractible (strict retraction + quotient nullhomotopy); `group` assigns
// prism groups for the constrained fills
DeformationRetract retract_of_contractible_pair(const Submodule& s,
                                                const std::vector<int>& group);

EquivalenceWitness invert_witness(const EquivalenceWitness& w);
// transport a witness along a homotopy fwd ~ g
EquivalenceWitness transport_witness(const EquivalenceWitness& w, const Homotopy& h);

// --- convergent homotopies ------------------------------------------------------

struct ConvergentData {
  LongHomotopy h;                        // over an ordered interval I(0, N)
  std::vector<std::set<int>> filtration;  // cell sets of A, increasing, closed
  std::vector<int> stab;                  // n_i per stage
};

// the limit homotopy G with G|A[0] = H at 0 and G|A_i[1] = H at n_i
Homotopy convergent_limit(const ConvergentData& cd);

// --- long mapping cylinders and telescopes --------------------------------------

struct LongCylinder {
  ModuleMap f;  // A -> A
  IntervalSSet is;
  TensorModule ai;     // A[I]
  PushoutResult po;    // M^I(f) = A[I] u_{f at the far end} A
  ModulePtr mod;
  ModuleMap from_ai;   // A[I] -> M^I(f)
  ModuleMap back;      // A -> M^I(f), the glued target copy (cellular)
  ModuleMap front;     // A -> M^I(f) at label 0 (cellular)
  ModuleMap proj;      // M^I(f) -> A, collapse then nothing (ends at back copy)
};
LongCylinder long_cylinder(const ModuleMap& f, const Interval& iv);

// (H, a)_* : M^I(f) -> B for a homotopy-commutative square with homotopy H
// from g o a to a o f over I
ModuleMap cylinder_induced_to_base(const LongCylinder& mf, const ModuleMap& a,
                                   const LongHomotopy& h);
// the cylinder map with respect to J: M^{J # I}(f) -> M^J(g)
ModuleMap cylinder_induced(const LongCylinder& mjif, const LongCylinder& mjg,
                           const ModuleMap& a, const LongHomotopy& h);

struct TruncTel {
  ModuleMap f;
  Interval iv;
  int stages = 0;
  LongCylinder cyl;  // the stage template
  ModulePtr tel;
  ModuleMap front;                     // A -> Tel, stage 0 front
  std::vector<ModuleMap> stage_in;     // M^I(f) -> Tel per stage
  std::vector<ModuleMap> back_at;      // A -> Tel, the back copy of stage k
};

TruncTel telescope(const ModuleMap& f, const Interval& iv, int stages);
// Tel_N -> Tel_{N'} for N <= N' (truncation-consistent cells)
ModuleMap telescope_incl(const TruncTel& a, const TruncTel& b);
// shift: stage k to stage k+1
ModuleMap telescope_shift(const TruncTel& a, const TruncTel& b);
// functorial map for a strictly commuting square a f = g a
ModuleMap telescope_functorial(const TruncTel& src, const TruncTel& dst, const ModuleMap& a);
// stagewise induced map Tel^{J#I}(f) -> Tel^J(g)
ModuleMap telescope_induced(const TruncTel& src, const TruncTel& dst, const ModuleMap& a,
                            const LongHomotopy& h);
// recover the homotopy from an induced cylinder map (round-trip oracle)
LongHomotopy extract_homotopy(const LongCylinder& mjif, const LongCylinder& mjg,
                              const ModuleMap& induced, int j_len);

// Tel(id_A) at truncation N: deformation retraction onto A via the min map
struct TelIdRetract {
  TruncTel tel;
  ModuleMap proj;  // Tel -> A
  DeformationRetract dr;  // for front : A >-> Tel
};
TelIdRetract telescope_id_retract(ModulePtr a, const Interval& iv, int stages);

// sliding: incl_{N,N+1} ~ f_* o sh as maps Tel_N -> Tel_{N+1}
Homotopy telescope_shift_slide(const TruncTel& tn, const TruncTel& tn1);

// the homotopy criterion: two squares (a, H^a), (a~, H^a~) over the same I,
// with H : a ~ a~ and a 2-homotopy G on A[I][J]; returns the homotopy between
// the induced maps Tel^{D1#I}(f) -> Tel^{D1}(g)
Homotopy criterion_homotopy(const TruncTel& src, const TruncTel& dst, const ModuleMap& a,
                            const LongHomotopy& ha, const ModuleMap& atil,
                            const LongHomotopy& hatil, const Homotopy& h,
                            const ModuleMap& g2 /* (A[J])[I]-carrier */,
                            const TensorModule& ajI /* (A[D1])[I] */);

// --- coherent idempotents --------------------------------------------------------

struct CoherentIdempotent {
  ModuleMap eta;
  Homotopy h;     // eta^2 ~ eta
  ModuleMap g;    // K[D1 x D1] -> K
  TensorModule ksq;
};

// boundary restrictions of G match (top eta o H, left H o eta[D1], bottom H,
// right H); returns the offending edge name on failure
std::optional<std::string> coherence_check(const CoherentIdempotent& c);

CoherentIdempotent coherent_from_domination(const ModuleMap& incl, const ModuleMap& proj,
                                            const Homotopy& hprime);

// product <-> iterated tensor conversions over the square
ModuleMap product_to_iterated(const TensorModule& msq, const TensorModule& mcyl,
                              const TensorModule& mcylcyl);
ModuleMap iterated_to_product(const TensorModule& mcyl, const TensorModule& mcylcyl,
                              const TensorModule& msq);

// --- splitting -------------------------------------------------------------------

struct SplitResult {
  TruncTel tel;        // at N
  TruncTel tel_next;   // at N+1
  ModuleMap c;         // Tel_N -> K with c o front = eta exactly
  Homotopy slide;      // incl_{N,N+1} ~ eta_* o sh (re-verified)
  Homotopy eta_star_idem;  // eta_* o eta_* ~ eta_* on truncations (re-verified)
  MappingCylinder tc;  // T(c)
  ModulePtr b;         // cofiber of Tel_N >-> T(c)
  ModuleMap quotient_map;  // T(c) ->> B
  ModuleMap r_stable;      // T(c) -> Tel_{N+1}, r o inc = incl strictly
  ModuleMap s;             // T(c) -> Tel_{N+1} v B (sum of retraction and quotient)
  CoproductResult telvb;
  ModuleMap split_map;     // f : K -> Tel_{N+1} v B
  Homotopy square;         // f o eta ~ (pr-route) o f, the Corollary square
  // when eta itself carries an equivalence witness, the genuine finite
  // witness for f (empty optional otherwise: the infinite-telescope statement
  // has no finite-module witness, see the reports)
  std::optional<EquivalenceWitness> finite_witness;
};

SplitResult split_idempotent(const CoherentIdempotent& c, int stages,
                             const std::optional<EquivalenceWitness>& eta_witness = {});

}  // namespace csm
