#include "csm/ring.hpp"

#include <stdexcept>

namespace csm {

std::shared_ptr<const Ring> Ring::integers() {
  static auto z = std::make_shared<Ring>();
  return z;
}

std::shared_ptr<const Ring> Ring::integers_mod(long n) {
  if (n < 2) throw std::runtime_error("integers_mod: n >= 2 required");
  auto r = std::make_shared<Ring>();
  r->modulus_ = n;
  r->label_ = "Z/" + std::to_string(n);
  return r;
}

std::shared_ptr<const Ring> Ring::group_ring(std::shared_ptr<const Ring> base,
                                             std::vector<std::vector<int>> table) {
  if (!base->is_plain()) throw std::runtime_error("group_ring: base must be Z or Z/n");
  auto r = std::make_shared<Ring>();
  r->modulus_ = base->modulus();
  r->table_ = std::move(table);
  r->label_ = base->label() + "[G" + std::to_string(r->table_.size()) + "]";
  if (auto err = r->validate()) throw std::runtime_error("group_ring: " + *err);
  return r;
}

std::optional<std::string> Ring::validate() const {
  int n = group_order();
  for (int g = 0; g < n; ++g) {
    if ((int)table_[g].size() != n) return "multiplication table not square";
    if (table_[0][g] != g || table_[g][0] != g) return "index 0 is not the identity";
  }
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) {
      if (table_[g][h] < 0 || table_[g][h] >= n) return "table entry out of range";
      for (int k = 0; k < n; ++k)
        if (table_[table_[g][h]][k] != table_[g][table_[h][k]])
          return "multiplication not associative";
    }
  for (int g = 0; g < n; ++g) {
    bool inv = false;
    for (int h = 0; h < n; ++h)
      if (table_[g][h] == 0) inv = true;
    if (!inv) return "group element without inverse";
  }
  return std::nullopt;
}

RingValue RingValue::zero(std::shared_ptr<const Ring> r) {
  return RingValue{r, std::vector<Int>(r->group_order(), Int(0))};
}

RingValue RingValue::one(std::shared_ptr<const Ring> r) { return basis(r, 0); }

RingValue RingValue::integer(std::shared_ptr<const Ring> r, Int v) {
  return basis(r, 0, std::move(v));
}

RingValue RingValue::basis(std::shared_ptr<const Ring> r, int g, Int coeff) {
  RingValue v = zero(r);
  v.c[g] = std::move(coeff);
  v.reduce();
  return v;
}

void RingValue::reduce() {
  long m = ring->modulus();
  if (m == 0) return;
  for (Int& v : c) {
    v %= m;
    if (v < 0) v += m;
  }
}

bool RingValue::is_zero() const {
  for (const Int& v : c)
    if (v != 0) return false;
  return true;
}

RingValue RingValue::operator+(const RingValue& o) const {
  if (!same_ring(*ring, *o.ring)) throw std::runtime_error("ring mismatch in +");
  RingValue r = *this;
  for (size_t i = 0; i < c.size(); ++i) r.c[i] += o.c[i];
  r.reduce();
  return r;
}

RingValue RingValue::operator-() const {
  RingValue r = *this;
  for (Int& v : r.c) v = -v;
  r.reduce();
  return r;
}

RingValue RingValue::operator*(const RingValue& o) const {
  if (!same_ring(*ring, *o.ring)) throw std::runtime_error("ring mismatch in *");
  RingValue r = zero(ring);
  int n = ring->group_order();
  for (int g = 0; g < n; ++g) {
    if (c[g] == 0) continue;
    for (int h = 0; h < n; ++h) {
      if (o.c[h] == 0) continue;
      r.c[ring->mul_index(g, h)] += c[g] * o.c[h];
    }
  }
  r.reduce();
  return r;
}

bool RingValue::operator==(const RingValue& o) const {
  return same_ring(*ring, *o.ring) && c == o.c;
}

std::string RingValue::str() const {
  if (ring->is_plain()) return c[0].str();
  std::string out = "(";
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) out += ",";
    out += c[i].str();
  }
  return out + ")";
}

bool same_ring(const Ring& a, const Ring& b) {
  if (&a == &b) return true;
  if (a.modulus() != b.modulus() || a.group_order() != b.group_order()) return false;
  for (int g = 0; g < a.group_order(); ++g)
    for (int h = 0; h < a.group_order(); ++h)
      if (a.mul_index(g, h) != b.mul_index(g, h)) return false;
  return true;
}

RingValue RingHom::apply(const RingValue& v) const {
  if (!same_ring(*v.ring, *src)) throw std::runtime_error("RingHom: wrong source ring");
  RingValue out = RingValue::zero(dst);
  for (size_t g = 0; g < v.c.size(); ++g) out.c[group_map[g]] += v.c[g];
  out.reduce();
  return out;
}

std::optional<std::string> RingHom::validate() const {
  if ((int)group_map.size() != src->group_order()) return "group_map size mismatch";
  long ms = src->modulus(), md = dst->modulus();
  // Z -> anything ok; Z/n -> Z/m needs m | n
  if (ms != 0 && (md == 0 || ms % md != 0)) return "modulus " + std::to_string(md) +
      " does not divide " + std::to_string(ms);
  if (group_map[0] != 0) return "unit not preserved";
  for (int g = 0; g < src->group_order(); ++g) {
    if (group_map[g] < 0 || group_map[g] >= dst->group_order()) return "group_map out of range";
    for (int h = 0; h < src->group_order(); ++h)
      if (group_map[src->mul_index(g, h)] != dst->mul_index(group_map[g], group_map[h]))
        return "group_map not multiplicative";
  }
  return std::nullopt;
}

RingHom RingHom::identity(std::shared_ptr<const Ring> r) {
  RingHom h;
  h.src = r;
  h.dst = r;
  h.group_map.resize(r->group_order());
  for (int g = 0; g < r->group_order(); ++g) h.group_map[g] = g;
  return h;
}

}  // namespace csm
