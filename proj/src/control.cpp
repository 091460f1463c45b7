#include "csm/control.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>

namespace csm {

std::shared_ptr<const ControlSpace> ControlSpace::metric(int dim, Metric m) {
  auto s = std::make_shared<ControlSpace>();
  s->kind_ = Kind::Metric;
  s->dim_ = dim;
  s->metric_ = m;
  return s;
}

std::shared_ptr<const ControlSpace> ControlSpace::finite(std::vector<std::string> points) {
  auto s = std::make_shared<ControlSpace>();
  s->kind_ = Kind::Finite;
  s->points_ = std::move(points);
  return s;
}

int ControlSpace::point_index(const std::string& name) const {
  for (int i = 0; i < (int)points_.size(); ++i)
    if (points_[i] == name) return i;
  throw std::runtime_error("control space has no point named " + name);
}

std::optional<std::string> ControlSpace::validate_label(const Label& l) const {
  if (kind_ == Kind::Metric) {
    if (!l.point.empty()) return "metric space label must be coordinates";
    if ((int)l.coords.size() != dim_) return "label dimension mismatch";
  } else {
    if (l.point.empty()) return "finite space label must be a point name";
    for (const auto& p : points_)
      if (p == l.point) return std::nullopt;
    return "unknown point " + l.point;
  }
  return std::nullopt;
}

Rational ControlSpace::gap(const Label& x, const Label& y) const {
  if (kind_ != Kind::Metric) throw std::runtime_error("gap: metric spaces only");
  if (metric_ == Metric::Max) {
    Rational m(0);
    for (int i = 0; i < dim_; ++i) {
      Rational d = x.coords[i] - y.coords[i];
      if (d < 0) d = -d;
      if (d > m) m = d;
    }
    return m;
  }
  Rational s(0);
  for (int i = 0; i < dim_; ++i) {
    Rational d = x.coords[i] - y.coords[i];
    s += d * d;
  }
  return s;  // squared distance
}

ControlCondition ControlCondition::metric_bound(SpacePtr s, Rational alpha) {
  if (s->kind() != ControlSpace::Kind::Metric)
    throw std::runtime_error("metric_bound needs a metric space");
  if (alpha < 0) throw std::runtime_error("metric bound must be >= 0");
  ControlCondition c;
  c.space = std::move(s);
  c.alpha = std::move(alpha);
  return c;
}

ControlCondition ControlCondition::diagonal(SpacePtr s) {
  ControlCondition c;
  c.space = s;
  if (s->kind() == ControlSpace::Kind::Metric) {
    c.alpha = Rational(0);
  } else {
    int n = (int)s->points().size();
    c.rel.assign(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) c.rel[i][i] = true;
  }
  return c;
}

ControlCondition ControlCondition::finite_pairs(SpacePtr s,
                                                const std::vector<std::pair<int, int>>& pairs) {
  if (s->kind() != ControlSpace::Kind::Finite)
    throw std::runtime_error("finite_pairs needs a finite space");
  ControlCondition c = diagonal(s);
  for (auto [a, b] : pairs) {
    c.rel[a][b] = true;
    c.rel[b][a] = true;  // stored symmetric
  }
  return c;
}

bool ControlCondition::related(const Label& x, const Label& y) const {
  if (space->kind() == ControlSpace::Kind::Metric) {
    if (space->metric_kind() == ControlSpace::Metric::Max)
      return space->gap(x, y) <= alpha;
    return space->gap(x, y) <= alpha * alpha;  // compare d^2 with alpha^2
  }
  return rel[space->point_index(x.point)][space->point_index(y.point)];
}

bool ControlCondition::contains(const ControlCondition& other) const {
  if (space->kind() == ControlSpace::Kind::Metric) return other.alpha <= alpha;
  for (size_t i = 0; i < rel.size(); ++i)
    for (size_t j = 0; j < rel.size(); ++j)
      if (other.rel[i][j] && !rel[i][j]) return false;
  return true;
}

std::optional<std::string> ControlCondition::validate() const {
  if (space->kind() == ControlSpace::Kind::Metric) {
    if (alpha < 0) return "negative bound";
    return std::nullopt;
  }
  int n = (int)space->points().size();
  if ((int)rel.size() != n) return "relation size mismatch";
  for (int i = 0; i < n; ++i) {
    if (!rel[i][i]) return "relation not reflexive";
    for (int j = 0; j < n; ++j)
      if (rel[i][j] != rel[j][i]) return "relation not symmetric";
  }
  return std::nullopt;
}

ControlCondition compose_conditions(const ControlCondition& e, const ControlCondition& e2) {
  if (e.space.get() != e2.space.get())
    throw std::runtime_error("compose_conditions: conditions live on different spaces");
  ControlCondition c;
  c.space = e.space;
  if (e.space->kind() == ControlSpace::Kind::Metric) {
    c.alpha = e.alpha + e2.alpha;
    return c;
  }
  int n = (int)e.space->points().size();
  c.rel.assign(n, std::vector<bool>(n, false));
  // symmetrized relational composition e2 o e (their transpose composite is
  // e o e2, so taking both keeps the condition symmetric)
  for (int z = 0; z < n; ++z)
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (e.rel[y][x] && e2.rel[z][y]) {
          c.rel[z][x] = true;
          c.rel[x][z] = true;
        }
  return c;
}

ControlCondition union_conditions(const ControlCondition& e, const ControlCondition& e2) {
  if (e.space.get() != e2.space.get())
    throw std::runtime_error("union_conditions: conditions live on different spaces");
  ControlCondition c;
  c.space = e.space;
  if (e.space->kind() == ControlSpace::Kind::Metric) {
    c.alpha = std::max(e.alpha, e2.alpha);
    return c;
  }
  int n = (int)e.space->points().size();
  c.rel.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.rel[i][j] = e.rel[i][j] || e2.rel[i][j];
  return c;
}

std::vector<Label> thicken(const std::vector<Label>& u, const ControlCondition& e,
                           const std::vector<Label>& candidates) {
  std::vector<Label> out;
  for (const Label& x : candidates) {
    for (const Label& y : u) {
      if (e.related(x, y)) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

bool SupportCondition::contains(const Label& l) const {
  if (space->kind() == ControlSpace::Kind::Finite) {
    int p = space->point_index(l.point);
    return std::find(point_set.begin(), point_set.end(), p) != point_set.end();
  }
  for (const auto& [center, r] : balls) {
    Rational g = space->gap(center, l);
    Rational bound = space->metric_kind() == ControlSpace::Metric::Max ? r : r * r;
    if (g <= bound) return true;
  }
  return false;
}

namespace {

// closure cell sets, one per cell; cells are in skeletal order so a single
// pass suffices
std::vector<std::vector<int>> all_closures(const CellularModule& m) {
  std::vector<std::vector<int>> cl(m.cell_count());
  for (int c = 0; c < m.cell_count(); ++c) {
    std::set<int> s{c};
    for (const Element& att : m.cell(c).attach)
      for (const Term& t : att.terms) s.insert(cl[t.cell].begin(), cl[t.cell].end());
    cl[c].assign(s.begin(), s.end());
  }
  return cl;
}

struct PairScanResult {
  bool ok = true;
  std::optional<Violation> violation;
  Rational max_gap = Rational(0);
};

// one certificate scan: for cell c, every cell in `targets(c)` must be
// E-related to label(c)
template <typename TargetsFn>
PairScanResult scan_serial(const CellularModule& labels_of, int count, TargetsFn&& targets,
                           const CellularModule& target_mod, const ControlCondition& e) {
  PairScanResult r;
  bool metric = e.space->kind() == ControlSpace::Kind::Metric;
  for (int c = 0; c < count; ++c) {
    const Label& la = labels_of.cell(c).label;
    for (int t : targets(c)) {
      const Label& lb = target_mod.cell(t).label;
      if (metric) {
        Rational g = e.space->gap(la, lb);
        if (g > r.max_gap) r.max_gap = g;
      }
      if (r.ok && !e.related(la, lb)) {
        r.ok = false;
        r.violation = Violation{labels_of.cell(c).name, target_mod.cell(t).name,
                                metric ? e.space->gap(la, lb) : Rational(0)};
      }
    }
  }
  return r;
}

template <typename TargetsFn>
PairScanResult scan_parallel(const CellularModule& labels_of, int count, TargetsFn&& targets,
                             const CellularModule& target_mod, const ControlCondition& e) {
  bool metric = e.space->kind() == ControlSpace::Kind::Metric;
  int nthreads = std::max(1, omp_get_max_threads());
  std::vector<PairScanResult> parts(nthreads);
  std::vector<int> first_bad(nthreads, count);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < count; ++c) {
    int tid = omp_get_thread_num();
    PairScanResult& r = parts[tid];
    const Label& la = labels_of.cell(c).label;
    bool bad_here = false;
    for (int t : targets(c)) {
      const Label& lb = target_mod.cell(t).label;
      if (metric) {
        Rational g = e.space->gap(la, lb);
        if (g > r.max_gap) r.max_gap = g;
      }
      if (!bad_here && !e.related(la, lb) && c < first_bad[tid]) {
        bad_here = true;
        first_bad[tid] = c;
        r.ok = false;
        r.violation = Violation{labels_of.cell(c).name, target_mod.cell(t).name,
                                metric ? e.space->gap(la, lb) : Rational(0)};
      }
    }
  }
  // reduce: earliest violation wins, gaps are maxed
  PairScanResult out;
  int best = count;
  for (int t = 0; t < nthreads; ++t) {
    if (parts[t].max_gap > out.max_gap) out.max_gap = parts[t].max_gap;
    if (!parts[t].ok && first_bad[t] < best) {
      best = first_bad[t];
      out.ok = false;
      out.violation = parts[t].violation;
    }
  }
  return out;
}

Certificate finish_cert(std::string subject, const ControlCondition& e,
                        const std::optional<SupportCondition>& f, const CellularModule& m,
                        PairScanResult scan) {
  Certificate c;
  c.subject = std::move(subject);
  c.condition = e;
  c.support = f;
  c.ok = scan.ok;
  c.violation = scan.violation;
  c.minimal = scan.max_gap;
  if (c.ok && f) {
    for (int i = 0; i < m.cell_count(); ++i)
      if (!f->contains(m.cell(i).label)) {
        c.ok = false;
        c.violation = Violation{m.cell(i).name, "<support>", Rational(0)};
        break;
      }
  }
  return c;
}

void check_labels(const CellularModule& m, const ControlCondition& e) {
  for (int c = 0; c < m.cell_count(); ++c)
    if (auto err = e.space->validate_label(m.cell(c).label))
      throw std::runtime_error("cell " + m.cell(c).name + ": " + *err);
}

}  // namespace

Certificate check_module_serial(const CellularModule& m, const ControlCondition& e,
                                const std::optional<SupportCondition>& f) {
  check_labels(m, e);
  auto cl = all_closures(m);
  auto scan = scan_serial(m, m.cell_count(), [&](int c) -> const std::vector<int>& {
    return cl[c];
  }, m, e);
  return finish_cert("module", e, f, m, scan);
}

Certificate check_module(const CellularModule& m, const ControlCondition& e,
                         const std::optional<SupportCondition>& f) {
  check_labels(m, e);
  auto cl = all_closures(m);
  auto scan = scan_parallel(m, m.cell_count(), [&](int c) -> const std::vector<int>& {
    return cl[c];
  }, m, e);
  return finish_cert("module", e, f, m, scan);
}

namespace {

std::vector<std::vector<int>> map_targets(const ModuleMap& f) {
  auto cl = all_closures(*f.dst);
  std::vector<std::vector<int>> t(f.src->cell_count());
  for (int c = 0; c < f.src->cell_count(); ++c) {
    std::set<int> s;
    for (const Term& tm : f.images[c].terms)
      s.insert(cl[tm.cell].begin(), cl[tm.cell].end());
    t[c].assign(s.begin(), s.end());
  }
  return t;
}

}  // namespace

Certificate check_map_serial(const ModuleMap& f, const ControlCondition& e) {
  check_labels(*f.src, e);
  check_labels(*f.dst, e);
  auto targets = map_targets(f);
  auto scan = scan_serial(*f.src, f.src->cell_count(),
                          [&](int c) -> const std::vector<int>& { return targets[c]; },
                          *f.dst, e);
  return finish_cert("map", e, std::nullopt, *f.src, scan);
}

Certificate check_map(const ModuleMap& f, const ControlCondition& e) {
  check_labels(*f.src, e);
  check_labels(*f.dst, e);
  auto targets = map_targets(f);
  auto scan = scan_parallel(*f.src, f.src->cell_count(),
                            [&](int c) -> const std::vector<int>& { return targets[c]; },
                            *f.dst, e);
  return finish_cert("map", e, std::nullopt, *f.src, scan);
}

Rational minimal_certificate_module(const CellularModule& m) {
  auto cl = all_closures(m);
  Rational best(0);
  SpacePtr sp;  // labels must be metric coordinates; construct a scratch space
  int d = 0;
  for (int c = 0; c < m.cell_count(); ++c) d = std::max(d, (int)m.cell(c).label.coords.size());
  auto space = ControlSpace::metric(std::max(d, 1), ControlSpace::Metric::Max);
  for (int c = 0; c < m.cell_count(); ++c)
    for (int t : cl[c]) {
      Rational g = space->gap(m.cell(c).label, m.cell(t).label);
      if (g > best) best = g;
    }
  return best;
}

Rational minimal_certificate_map(const ModuleMap& f) {
  auto targets = map_targets(f);
  int d = 0;
  for (int c = 0; c < f.src->cell_count(); ++c)
    d = std::max(d, (int)f.src->cell(c).label.coords.size());
  auto space = ControlSpace::metric(std::max(d, 1), ControlSpace::Metric::Max);
  Rational best(0);
  for (int c = 0; c < f.src->cell_count(); ++c)
    for (int t : targets[c]) {
      Rational g = space->gap(f.src->cell(c).label, f.dst->cell(t).label);
      if (g > best) best = g;
    }
  return best;
}

std::vector<Certificate> check_maps_batch(const std::vector<const ModuleMap*>& maps,
                                          const ControlCondition& e) {
  std::vector<Certificate> out(maps.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < (int)maps.size(); ++i) out[i] = check_map_serial(*maps[i], e);
  return out;
}

std::vector<Certificate> check_maps_batch_serial(const std::vector<const ModuleMap*>& maps,
                                                 const ControlCondition& e) {
  std::vector<Certificate> out(maps.size());
  for (size_t i = 0; i < maps.size(); ++i) out[i] = check_map_serial(*maps[i], e);
  return out;
}

Certificate certificate_compose(const Certificate& cf, const Certificate& cg,
                                const ModuleMap& f, const ModuleMap& g) {
  if (!cf.ok || !cg.ok) throw std::runtime_error("certificate_compose: inputs not certified");
  ControlCondition predicted = compose_conditions(cf.condition, cg.condition);
  Certificate out = check_map(compose(g, f), predicted);
  out.subject = "compose(" + cf.subject + "," + cg.subject + ")";
  if (!out.ok)
    throw std::runtime_error("certificate_compose: re-check failed (soundness bug)");
  return out;
}

Certificate certificate_add(const Certificate& c1, const Certificate& c2,
                            const ModuleMap& f1, const ModuleMap& f2) {
  if (!c1.ok || !c2.ok) throw std::runtime_error("certificate_add: inputs not certified");
  ControlCondition predicted = union_conditions(c1.condition, c2.condition);
  Certificate out = check_map(map_add(f1, f2), predicted);
  out.subject = "add(" + c1.subject + "," + c2.subject + ")";
  if (!out.ok) throw std::runtime_error("certificate_add: re-check failed (soundness bug)");
  return out;
}

BlFiniteReport bl_finite(const CellularModule& m) {
  BlFiniteReport r;
  r.bl_finite = true;
  r.witness = "finite module: " + std::to_string(m.cell_count()) +
              " cells, top dimension " + std::to_string(m.top_dim());
  return r;
}

BlFiniteReport bl_finite(const StagedTelescopeDesc& d) {
  BlFiniteReport r;
  if (!d.finite_dimensional) {
    r.bl_finite = false;
    r.witness = "not finite-dimensional";
    return r;
  }
  if (!d.infinitely_many_stages) {
    r.bl_finite = true;
    r.witness = "finitely many stages";
    return r;
  }
  if (d.label_step > 0) {
    r.bl_finite = true;
    r.witness = "per-ball cell count bounded: a ball of radius r meets at most " +
                std::string("2r/step + 1 stages of ") + std::to_string(d.cells_per_stage) +
                " cells";
  } else {
    r.bl_finite = false;
    r.witness = "infinitely many cells share every neighborhood of the base label";
  }
  return r;
}

}  // namespace csm
