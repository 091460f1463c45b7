#pragma once

#include <optional>
#include <random>
#include <vector>

#include "csm/module.hpp"
#include "csm/snf.hpp"

namespace csm {

// Exact linear problem for one homogeneous element x of the given degree:
//   support(x) is restricted to `allowed_cells` (empty = all cells),
//   d_i x = v for each (i, v) in `faces`,
//   f(x) = v for each (f, v) in `mapped_to`.
// Solved over Z, or Z/n via column augmentation.
struct ElementProblem {
  const CellularModule* mod = nullptr;
  int degree = 0;
  std::vector<int> allowed_cells;
  std::vector<std::pair<int, Element>> faces;
  std::vector<std::pair<const ModuleMap*, Element>> mapped_to;
};

std::optional<Element> solve_element(const ElementProblem& p);
// particular solution perturbed by a random kernel vector (still a solution)
std::optional<Element> solve_element_random(const ElementProblem& p, std::mt19937& rng,
                                            int spread);

// Integer coordinates of an element over the (basis x group) coordinates of
// its degree; used by hom computations.
std::vector<Int> element_coords(const CellularModule& m, const Element& e);
Element element_from_coords(const CellularModule& m, int degree, const std::vector<Int>& x);

}  // namespace csm
