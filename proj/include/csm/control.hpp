#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "csm/module.hpp"

namespace csm {

// Control spaces: exact-rational metric spaces (max or squared-euclidean
// comparison) and explicit finite spaces with named points.
class ControlSpace {
 public:
  enum class Kind { Metric, Finite };
  enum class Metric { Max, Euclid2 };

  static std::shared_ptr<const ControlSpace> metric(int dim, Metric m);
  static std::shared_ptr<const ControlSpace> finite(std::vector<std::string> points);

  Kind kind() const { return kind_; }
  Metric metric_kind() const { return metric_; }
  int dim() const { return dim_; }
  const std::vector<std::string>& points() const { return points_; }
  int point_index(const std::string& name) const;

  std::optional<std::string> validate_label(const Label& l) const;
  // max metric: the distance; euclid2: the squared distance
  Rational gap(const Label& x, const Label& y) const;

 private:
  Kind kind_ = Kind::Metric;
  Metric metric_ = Metric::Max;
  int dim_ = 1;
  std::vector<std::string> points_;
};

using SpacePtr = std::shared_ptr<const ControlSpace>;

struct ControlCondition {
  SpacePtr space;
  Rational alpha;                         // metric bound (>= 0)
  std::vector<std::vector<bool>> rel;     // finite: symmetric reflexive matrix

  static ControlCondition metric_bound(SpacePtr s, Rational alpha);
  static ControlCondition diagonal(SpacePtr s);
  static ControlCondition finite_pairs(SpacePtr s, const std::vector<std::pair<int, int>>& pairs);

  bool related(const Label& x, const Label& y) const;
  bool contains(const ControlCondition& other) const;  // other subseteq this
  std::optional<std::string> validate() const;
};

ControlCondition compose_conditions(const ControlCondition& e, const ControlCondition& e2);
ControlCondition union_conditions(const ControlCondition& e, const ControlCondition& e2);

// E-thickening of the labels `u` within the candidate set
std::vector<Label> thicken(const std::vector<Label>& u, const ControlCondition& e,
                           const std::vector<Label>& candidates);

// support conditions: finite unions of balls (metric) or point sets (finite)
struct SupportCondition {
  SpacePtr space;
  std::vector<std::pair<Label, Rational>> balls;
  std::vector<int> point_set;

  bool contains(const Label& l) const;
};

struct Violation {
  std::string cell_a, cell_b;
  Rational gap;
};

struct Certificate {
  std::string subject;
  ControlCondition condition;
  std::optional<SupportCondition> support;
  bool ok = false;
  std::optional<Violation> violation;
  Rational minimal;  // largest gap seen (metric spaces; alpha-scale of the space)
};

// Certificate checks over all (cell, closure-cell) pairs. The parallel kernel
// is the default; the serial one is the reference used to validate it.
Certificate check_module(const CellularModule& m, const ControlCondition& e,
                         const std::optional<SupportCondition>& f = std::nullopt);
Certificate check_module_serial(const CellularModule& m, const ControlCondition& e,
                                const std::optional<SupportCondition>& f = std::nullopt);
Certificate check_map(const ModuleMap& f, const ControlCondition& e);
Certificate check_map_serial(const ModuleMap& f, const ControlCondition& e);

// minimal metric bound (max metric: alpha; euclid2: alpha^2)
Rational minimal_certificate_module(const CellularModule& m);
Rational minimal_certificate_map(const ModuleMap& f);

// batch interface for many maps over the same condition (parallel + serial)
std::vector<Certificate> check_maps_batch(const std::vector<const ModuleMap*>& maps,
                                          const ControlCondition& e);
std::vector<Certificate> check_maps_batch_serial(const std::vector<const ModuleMap*>& maps,
                                                 const ControlCondition& e);

// predicted certificates re-checked on the composite/sum; a re-check failure
// is a soundness bug and throws
Certificate certificate_compose(const Certificate& cf, const Certificate& cg,
                                const ModuleMap& f, const ModuleMap& g);
Certificate certificate_add(const Certificate& c1, const Certificate& c2,
                            const ModuleMap& f1, const ModuleMap& f2);

// bounded local finiteness
struct StagedTelescopeDesc {
  bool finite_dimensional = true;
  bool infinitely_many_stages = true;
  Rational label_step;  // label drift per stage
  long cells_per_stage = 1;
};

struct BlFiniteReport {
  bool bl_finite = false;
  std::string witness;
};

BlFiniteReport bl_finite(const CellularModule& m);
BlFiniteReport bl_finite(const StagedTelescopeDesc& d);

}  // namespace csm
