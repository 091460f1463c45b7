#pragma once

#include <random>

#include "csm/module.hpp"
#include "csm/simplicial.hpp"
#include "csm/snf.hpp"

namespace csm {

// The abelian group of module maps M -> N, computed exactly: a lattice basis
// of the joint face-compatibility kernel (over Z; the modulus is handled by
// column augmentation) plus the isomorphism type of the group.
struct HomGroup {
  ModulePtr src, dst;
  std::vector<ModuleMap> basis;  // generators of the group of maps
  AbelianGroupNF group;
};

HomGroup hom_maps(ModulePtr m, ModulePtr n);

// uniform-ish random element of the map lattice; never fails (zero map is
// always present)
ModuleMap random_hom(const HomGroup& h, std::mt19937& rng, int spread = 2);

// hom simplices of degree k: maps M[Delta^k] -> N, together with the tensor
// bookkeeping needed to restrict them
struct HomSimplices {
  TensorModule mdk;  // M[Delta^k]
  HomGroup maps;
  // explicit enumeration for finite coefficient rings (empty over Z)
  std::vector<ModuleMap> enumerated;
  bool complete = true;  // false when the enumeration bound was exceeded
};

HomSimplices hom_simplices(ModulePtr m, ModulePtr n, int k, long enumeration_bound = 4096);

// the Hom-bijection: restriction of f : M[A] -> N along a simplex of A gives
// a map M[Delta^q] -> N; adjoint_forward computes all of them, adjoint_back
// reassembles f from them.
struct Adjoint {
  // per nondegenerate simplex of A (skeletal order): the restricted map
  std::vector<ModuleMap> components;
};
Adjoint adjoint_forward(const TensorModule& ma, const ModuleMap& f,
                        const std::vector<TensorModule>& mdeltas);
ModuleMap adjoint_back(const TensorModule& ma, const Adjoint& adj,
                       const std::vector<TensorModule>& mdeltas, ModulePtr n);

// M[Delta^k] for k = 0..top, shared across adjoint computations
std::vector<TensorModule> standard_tensors(ModulePtr m, int top);

}  // namespace csm
