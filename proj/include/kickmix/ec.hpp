#pragma once

// Short-Weierstrass curve arithmetic over prime fields.
//
// This is the classical reference the circuit harness checks against. It is
// written for clarity, not speed: affine coordinates, arbitrary-precision
// integers, no constant-time guarantees.

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace kickmix {

using BigInt = boost::multiprecision::cpp_int;

}  // namespace kickmix

namespace kickmix::ec {

class CurveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Canonical residue modulo a prime. Both operands of a binary operation must
/// share the modulus.
class FieldElement {
 public:
  FieldElement(BigInt value, BigInt modulus);

  const BigInt& value() const { return value_; }
  const BigInt& modulus() const { return modulus_; }
  bool is_zero() const { return value_ == 0; }

  FieldElement operator+(const FieldElement& rhs) const;
  FieldElement operator-(const FieldElement& rhs) const;
  FieldElement operator*(const FieldElement& rhs) const;
  FieldElement operator-() const;
  /// Multiplicative inverse via extended Euclid. Throws CurveError on zero.
  FieldElement inverse() const;

  bool operator==(const FieldElement& rhs) const = default;

 private:
  BigInt value_;
  BigInt modulus_;
};

/// Extended-Euclid inverse of `a` modulo `m`; requires gcd(a, m) == 1.
BigInt mod_inverse(const BigInt& a, const BigInt& m);

class CurvePoint {
 public:
  static CurvePoint infinity() { return CurvePoint{}; }
  CurvePoint(BigInt x, BigInt y) : x_(std::move(x)), y_(std::move(y)), infinity_(false) {}

  bool is_infinity() const { return infinity_; }
  // Coordinates of the point at infinity are reported as zero.
  const BigInt& x() const { return x_; }
  const BigInt& y() const { return y_; }

  bool operator==(const CurvePoint& rhs) const;
  // Infinity sorts first, then lexicographic (x, y).
  std::strong_ordering operator<=>(const CurvePoint& rhs) const;

  std::string to_string() const;

 private:
  CurvePoint() = default;
  BigInt x_ = 0;
  BigInt y_ = 0;
  bool infinity_ = true;
};

/// y^2 = x^3 + a x + b over F_p with a distinguished generator.
struct CurveParams {
  std::string name;
  BigInt p;
  BigInt a;
  BigInt b;
  CurvePoint generator = CurvePoint::infinity();
  BigInt order;  // order of the generator

  unsigned coordinate_bits() const;  // ceil(log2 p)
  unsigned order_bits() const;
};

/// Validates and assembles curve parameters: p prime (Miller-Rabin), non-singular
/// discriminant, generator on the curve and order * generator == infinity.
CurveParams make_curve(std::string name, BigInt p, BigInt a, BigInt b, CurvePoint generator,
                       BigInt order);

bool on_curve(const CurvePoint& point, const CurveParams& curve);
CurvePoint negate(const CurvePoint& point, const CurveParams& curve);

CurvePoint point_add(const CurvePoint& lhs, const CurvePoint& rhs, const CurveParams& curve);
CurvePoint scalar_mul(const BigInt& k, const CurvePoint& point, const CurveParams& curve);

/// True when the chord-tangent law hits a special case for lhs + rhs
/// (an identity operand, doubling, or an inverse pair).
bool is_exceptional_sum(const CurvePoint& lhs, const CurvePoint& rhs, const CurveParams& curve);

inline constexpr std::uint64_t kDefaultEnumerationLimit = std::uint64_t{1} << 16;

/// All curve points, infinity first, then sorted by (x, y). Refuses primes
/// above `prime_limit`.
std::vector<CurvePoint> enumerate_points(const CurveParams& curve,
                                         std::uint64_t prime_limit = kDefaultEnumerationLimit);

/// Smallest k >= 1 with k * point == infinity, by repeated addition. Bounded by
/// the enumeration limit.
BigInt brute_force_order(const CurvePoint& point, const CurveParams& curve,
                         std::uint64_t prime_limit = kDefaultEnumerationLimit);

/// Built-in registry: "secp256k1", "toy-p11-b7", "toy-p61-b7", "toy-p1009-b7",
/// plus any curves in the JSON file named by $KICKMIX_CURVES.
const CurveParams& named_curve(std::string_view name);
std::vector<std::string> curve_names();

/// Parses "G", "inf", "<k>G" / "<k>*G", or "x,y" (decimal) into a point on `curve`.
CurvePoint parse_point(std::string_view text, const CurveParams& curve);
std::string format_point(const CurvePoint& point);  // "inf" or "x,y"

}  // namespace kickmix::ec
