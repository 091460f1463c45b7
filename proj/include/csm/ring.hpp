#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "csm/rational.hpp"

namespace csm {

// Coefficient rings: Z, Z/n, and group rings of finite groups over them.
// A group ring element is a dense coefficient vector over the group basis;
// plain rings are the group ring of the trivial group.
class Ring {
 public:
  static std::shared_ptr<const Ring> integers();
  static std::shared_ptr<const Ring> integers_mod(long n);
  // table[g][h] = index of g*h; identity element must be index 0.
  static std::shared_ptr<const Ring> group_ring(std::shared_ptr<const Ring> base,
                                                std::vector<std::vector<int>> table);

  long modulus() const { return modulus_; }      // 0 for Z
  int group_order() const { return (int)table_.size(); }
  bool is_plain() const { return group_order() == 1; }
  int mul_index(int g, int h) const { return table_[g][h]; }
  const std::string& label() const { return label_; }

  // checks associativity/identity/inverses-existence on the stored table
  std::optional<std::string> validate() const;

 private:
  long modulus_ = 0;
  std::vector<std::vector<int>> table_{{0}};
  std::string label_ = "Z";
};

struct RingValue {
  std::shared_ptr<const Ring> ring;
  std::vector<Int> c;  // dense over group basis

  static RingValue zero(std::shared_ptr<const Ring> r);
  static RingValue one(std::shared_ptr<const Ring> r);
  static RingValue integer(std::shared_ptr<const Ring> r, Int v);
  static RingValue basis(std::shared_ptr<const Ring> r, int g, Int coeff = Int(1));

  bool is_zero() const;
  RingValue operator+(const RingValue& o) const;
  RingValue operator-() const;
  RingValue operator-(const RingValue& o) const { return *this + (-o); }
  RingValue operator*(const RingValue& o) const;
  bool operator==(const RingValue& o) const;
  bool operator<(const RingValue& o) const { return c < o.c; }
  std::string str() const;

  void reduce();  // apply the modulus
};

bool same_ring(const Ring& a, const Ring& b);

// Ring homomorphism determined by the coefficient map (canonical Z -> Z/n or
// identity) and a map of group basis elements.
struct RingHom {
  std::shared_ptr<const Ring> src;
  std::shared_ptr<const Ring> dst;
  std::vector<int> group_map;  // src basis index -> dst basis index

  RingValue apply(const RingValue& v) const;
  // verifies multiplicativity/unit on all pairs of basis elements and
  // modulus compatibility
  std::optional<std::string> validate() const;

  static RingHom identity(std::shared_ptr<const Ring> r);
};

}  // namespace csm
