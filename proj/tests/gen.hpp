#pragma once

// Randomized fixture generators shared by the test and acceptance suites.

#include <random>
#include <string>
#include <vector>

#include "csm/hom.hpp"
#include "csm/homotopy.hpp"
#include "csm/linsys.hpp"
#include "csm/module.hpp"

namespace csm::gen {

inline Label int_label(long v) {
  Label l;
  l.coords = {Rational(v)};
  return l;
}

struct ModuleSpec {
  int n0 = 3;       // number of 0-cells
  int n1 = 2;       // 1-cells
  int n2 = 0;       // 2-cells
  int coeff_spread = 2;
  long label_range = 3;  // labels drawn from [-range, range] on the line
};

// Random cellular module with exact, face-compatible attaching data. 1-cell
// boundaries are random degree-0 elements; 2-cell boundaries are produced by
// solving the simplicial compatibility system with a random kernel offset.
inline ModulePtr random_module(std::shared_ptr<const Ring> ring, const ModuleSpec& spec,
                               std::mt19937& rng) {
  std::uniform_int_distribution<long> lab(-spec.label_range, spec.label_range);
  std::uniform_int_distribution<int> coeff(-spec.coeff_spread, spec.coeff_spread);
  auto m0 = std::make_shared<CellularModule>(ring);
  for (int i = 0; i < spec.n0; ++i)
    m0->add_cell("v" + std::to_string(i), 0, {}, int_label(lab(rng)));
  ModulePtr m = m0;
  auto random_elem = [&](int degree) {
    Element e = element_zero(degree);
    for (const auto& [c, w] : m->basis(degree)) {
      RingValue rv = RingValue::zero(ring);
      for (int g = 0; g < ring->group_order(); ++g) rv.c[g] = coeff(rng);
      rv.reduce();
      if (!rv.is_zero()) e.terms.push_back(Term{rv, c, w});
    }
    element_canonicalize(e);
    return e;
  };
  for (int i = 0; i < spec.n1; ++i) {
    std::vector<Element> att{random_elem(0), random_elem(0)};
    m = attach_cell(m, "e" + std::to_string(i), 1, std::move(att), int_label(lab(rng)));
  }
  for (int i = 0; i < spec.n2; ++i) {
    // faces a0, a1, a2 of degree 1 with d_0 a_1 = d_0 a_0? compatibility:
    // d_i a_j = d_{j-1} a_i for i<j. Pick a2 and a1 at random, solve for a0.
    for (int tries = 0; tries < 20; ++tries) {
      Element a2 = random_elem(1);
      Element a1 = random_elem(1);
      // need d1 a1 = d1 a2 (from (i,j)=(1,2)); recompute a1 by solving
      ElementProblem p1;
      p1.mod = m.get();
      p1.degree = 1;
      p1.faces = {{1, m->face(a2, 1)}};
      auto a1s = solve_element_random(p1, rng, spec.coeff_spread);
      if (!a1s) continue;
      a1 = *a1s;
      // a0: d0 a0 = d0 a1? identities: (0,1): d0 a1 = d0 a0; (0,2): d0 a2 = d1 a0
      ElementProblem p0;
      p0.mod = m.get();
      p0.degree = 1;
      p0.faces = {{0, m->face(a1, 0)}, {1, m->face(a2, 0)}};
      auto a0 = solve_element_random(p0, rng, spec.coeff_spread);
      if (!a0) continue;
      m = attach_cell(m, "t" + std::to_string(i), 2, {*a0, a1, a2}, int_label(lab(rng)));
      break;
    }
  }
  return m;
}

// Random module map src -> dst: a random point of the exact lattice of all
// module maps, so generation never fails (zero map included).
inline std::optional<ModuleMap> random_map(ModulePtr src, ModulePtr dst, std::mt19937& rng,
                                           int spread = 2) {
  HomGroup h = hom_maps(src, dst);
  return random_hom(h, rng, spread);
}

// Random homotopy equivalence with a verified witness, built from cylinder
// back-inclusions and projections composed with a random seed module.
struct RandomEquivalence {
  ModuleMap map;
  EquivalenceWitness w;
};

inline RandomEquivalence random_equivalence(std::shared_ptr<const Ring> ring,
                                            std::mt19937& rng, int steps = 2,
                                            const ModuleSpec& spec = {}) {
  auto a = random_module(ring, spec, rng);
  RandomEquivalence out;
  out.map = identity_map(a);
  out.w = witness_identity(a);
  std::uniform_int_distribution<int> kind(0, 1);
  gen::ModuleSpec small;
  small.n0 = 2;
  small.n1 = 1;
  for (int s = 0; s < steps; ++s) {
    if (kind(rng) == 0) {
      // postcompose with a back inclusion Y >-> T(h), h : Z -> Y
      auto z = random_module(ring, small, rng);
      auto h = random_map(z, out.map.dst, rng);
      if (!h) continue;
      MappingCylinder tc = mapping_cylinder(*h);
      EquivalenceWitness wb =
          witness_from_retract(cylinder_retraction(tc), tc.back);
      out.map = compose(tc.back, out.map);
      out.w = compose_witness(out.w, wb);
    } else {
      // precompose with a projection T(h) -> X, h : Z -> X
      auto z = random_module(ring, small, rng);
      auto h = random_map(z, out.map.src, rng);
      if (!h) continue;
      MappingCylinder tc = mapping_cylinder(*h);
      DeformationRetract dr = cylinder_retraction(tc);
      EquivalenceWitness wp;
      wp.fwd = tc.proj;
      wp.inv = tc.back;
      wp.inv_fwd = inverse_homotopy(dr.homotopy);
      wp.fwd_inv = trivial_homotopy(identity_map(tc.f.dst));
      out.map = compose(out.map, tc.proj);
      out.w = compose_witness(wp, out.w);
    }
  }
  return out;
}

// random acyclic cellular inclusion with witness: a cylinder back-inclusion
inline RandomEquivalence random_acyclic_inclusion(std::shared_ptr<const Ring> ring,
                                                  std::mt19937& rng,
                                                  const ModuleSpec& spec = {}) {
  auto y = random_module(ring, spec, rng);
  gen::ModuleSpec small;
  small.n0 = 2;
  small.n1 = 1;
  auto z = random_module(ring, small, rng);
  auto h = random_map(z, y, rng);
  while (!h) h = random_map(z, y, rng);
  MappingCylinder tc = mapping_cylinder(*h);
  RandomEquivalence out;
  out.map = tc.back;
  out.w = witness_from_retract(cylinder_retraction(tc), tc.back);
  return out;
}

// random map homotopic flavor: random map whose 0-cells go near sources
// (labels shifted by at most `shift`) — used for control tests
inline Element random_element(const CellularModule& m, int degree, std::mt19937& rng,
                              int spread = 2) {
  std::uniform_int_distribution<int> coeff(-spread, spread);
  Element e = element_zero(degree);
  for (const auto& [c, w] : m.basis(degree)) {
    RingValue rv = RingValue::zero(m.ring());
    for (int g = 0; g < m.ring()->group_order(); ++g) rv.c[g] = coeff(rng);
    rv.reduce();
    if (!rv.is_zero()) e.terms.push_back(Term{rv, c, w});
  }
  element_canonicalize(e);
  return e;
}

}  // namespace csm::gen
