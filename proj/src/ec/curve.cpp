#include "kickmix/ec.hpp"

#include <algorithm>
#include <sstream>

#include <boost/multiprecision/miller_rabin.hpp>

namespace kickmix::ec {

namespace {

BigInt reduce(const BigInt& v, const BigInt& m) {
  BigInt r = v % m;
  if (r < 0) r += m;
  return r;
}

}  // namespace

BigInt mod_inverse(const BigInt& a, const BigInt& m) {
  BigInt old_r = reduce(a, m), r = m;
  BigInt old_s = 1, s = 0;
  while (r != 0) {
    BigInt q = old_r / r;
    BigInt t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) throw CurveError("value has no inverse modulo " + m.str());
  return reduce(old_s, m);
}

FieldElement::FieldElement(BigInt value, BigInt modulus)
    : value_(reduce(value, modulus)), modulus_(std::move(modulus)) {}

FieldElement FieldElement::operator+(const FieldElement& rhs) const {
  BigInt v = value_ + rhs.value_;
  if (v >= modulus_) v -= modulus_;
  return {std::move(v), modulus_};
}

FieldElement FieldElement::operator-(const FieldElement& rhs) const {
  BigInt v = value_ - rhs.value_;
  if (v < 0) v += modulus_;
  return {std::move(v), modulus_};
}

FieldElement FieldElement::operator*(const FieldElement& rhs) const {
  return {value_ * rhs.value_, modulus_};
}

FieldElement FieldElement::operator-() const { return {modulus_ - value_, modulus_}; }

FieldElement FieldElement::inverse() const {
  if (is_zero()) throw CurveError("inverse of zero");
  return {mod_inverse(value_, modulus_), modulus_};
}

bool CurvePoint::operator==(const CurvePoint& rhs) const {
  if (infinity_ || rhs.infinity_) return infinity_ == rhs.infinity_;
  return x_ == rhs.x_ && y_ == rhs.y_;
}

std::strong_ordering CurvePoint::operator<=>(const CurvePoint& rhs) const {
  if (infinity_ || rhs.infinity_) return rhs.infinity_ <=> infinity_;
  if (x_ != rhs.x_) return x_ < rhs.x_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (y_ != rhs.y_) return y_ < rhs.y_ ? std::strong_ordering::less : std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string CurvePoint::to_string() const { return format_point(*this); }

unsigned CurveParams::coordinate_bits() const {
  return static_cast<unsigned>(boost::multiprecision::msb(p - 1)) + 1;
}

unsigned CurveParams::order_bits() const {
  return static_cast<unsigned>(boost::multiprecision::msb(order)) + 1;
}

bool on_curve(const CurvePoint& point, const CurveParams& curve) {
  if (point.is_infinity()) return true;
  if (point.x() < 0 || point.x() >= curve.p || point.y() < 0 || point.y() >= curve.p) return false;
  FieldElement x{point.x(), curve.p}, y{point.y(), curve.p};
  FieldElement rhs = x * x * x + FieldElement{curve.a, curve.p} * x + FieldElement{curve.b, curve.p};
  return y * y == rhs;
}

CurvePoint negate(const CurvePoint& point, const CurveParams& curve) {
  if (point.is_infinity()) return point;
  return {point.x(), reduce(-point.y(), curve.p)};
}

bool is_exceptional_sum(const CurvePoint& lhs, const CurvePoint& rhs, const CurveParams& curve) {
  if (lhs.is_infinity() || rhs.is_infinity()) return true;
  return lhs.x() == rhs.x() && (lhs.y() == rhs.y() || reduce(lhs.y() + rhs.y(), curve.p) == 0);
}

CurvePoint point_add(const CurvePoint& lhs, const CurvePoint& rhs, const CurveParams& curve) {
  if (!on_curve(lhs, curve) || !on_curve(rhs, curve)) {
    throw CurveError("point_add: operand not on curve " + curve.name);
  }
  if (lhs.is_infinity()) return rhs;
  if (rhs.is_infinity()) return lhs;

  const BigInt& p = curve.p;
  FieldElement x1{lhs.x(), p}, y1{lhs.y(), p}, x2{rhs.x(), p}, y2{rhs.y(), p};

  if (x1 == x2) {
    // Either P + (-P) or a doubling; y = 0 covers the 2-torsion case of both.
    if ((y1 + y2).is_zero()) return CurvePoint::infinity();
    FieldElement three{3, p}, two{2, p};
    FieldElement slope = (three * x1 * x1 + FieldElement{curve.a, p}) * (two * y1).inverse();
    FieldElement x3 = slope * slope - x1 - x1;
    FieldElement y3 = slope * (x1 - x3) - y1;
    return {x3.value(), y3.value()};
  }
  FieldElement slope = (y2 - y1) * (x2 - x1).inverse();
  FieldElement x3 = slope * slope - x1 - x2;
  FieldElement y3 = slope * (x1 - x3) - y1;
  return {x3.value(), y3.value()};
}

CurvePoint scalar_mul(const BigInt& k, const CurvePoint& point, const CurveParams& curve) {
  if (k < 0) return scalar_mul(-k, negate(point, curve), curve);
  if (!on_curve(point, curve)) throw CurveError("scalar_mul: point not on curve " + curve.name);
  CurvePoint acc = CurvePoint::infinity();
  if (k == 0) return acc;
  for (auto bit = static_cast<int>(boost::multiprecision::msb(k)); bit >= 0; --bit) {
    acc = point_add(acc, acc, curve);
    if (boost::multiprecision::bit_test(k, static_cast<unsigned>(bit))) acc = point_add(acc, point, curve);
  }
  return acc;
}

std::vector<CurvePoint> enumerate_points(const CurveParams& curve, std::uint64_t prime_limit) {
  if (curve.p > prime_limit) {
    throw CurveError("prime too large for enumeration: " + curve.name + " exceeds limit " +
                     std::to_string(prime_limit));
  }
  const auto p = curve.p.convert_to<std::uint64_t>();
  const auto a = curve.a.convert_to<std::uint64_t>() % p;
  const auto b = curve.b.convert_to<std::uint64_t>() % p;

  // roots[v] lists every y with y^2 == v.
  std::vector<std::vector<std::uint64_t>> roots(p);
  for (std::uint64_t y = 0; y < p; ++y) roots[(y * y) % p].push_back(y);

  std::vector<CurvePoint> points{CurvePoint::infinity()};
  for (std::uint64_t x = 0; x < p; ++x) {
    const std::uint64_t rhs = ((x * x % p) * x % p + a * x % p + b) % p;
    for (std::uint64_t y : roots[rhs]) points.emplace_back(BigInt{x}, BigInt{y});
  }
  return points;
}

BigInt brute_force_order(const CurvePoint& point, const CurveParams& curve, std::uint64_t prime_limit) {
  if (curve.p > prime_limit) throw CurveError("prime too large for brute-force order: " + curve.name);
  if (!on_curve(point, curve)) throw CurveError("brute_force_order: point not on curve");
  BigInt k = 1;
  CurvePoint acc = point;
  while (!acc.is_infinity()) {
    acc = point_add(acc, point, curve);
    ++k;
  }
  return k;
}

CurveParams make_curve(std::string name, BigInt p, BigInt a, BigInt b, CurvePoint generator,
                       BigInt order) {
  if (p < 3) throw CurveError(name + ": modulus must be an odd prime");
  if (!boost::multiprecision::miller_rabin_test(p, 25)) throw CurveError(name + ": modulus is not prime");
  CurveParams curve{std::move(name), p, reduce(a, p), reduce(b, p), std::move(generator), std::move(order)};
  FieldElement fa{curve.a, p}, fb{curve.b, p};
  FieldElement disc = FieldElement{4, p} * fa * fa * fa + FieldElement{27, p} * fb * fb;
  if (disc.is_zero()) throw CurveError(curve.name + ": singular curve (4a^3 + 27b^2 == 0)");
  if (!on_curve(curve.generator, curve)) throw CurveError(curve.name + ": generator not on curve");
  if (curve.order <= 0) throw CurveError(curve.name + ": order must be positive");
  if (!scalar_mul(curve.order, curve.generator, curve).is_infinity()) {
    throw CurveError(curve.name + ": order * generator != infinity");
  }
  return curve;
}

std::string format_point(const CurvePoint& point) {
  if (point.is_infinity()) return "inf";
  return point.x().str() + "," + point.y().str();
}

CurvePoint parse_point(std::string_view text, const CurveParams& curve) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }), s.end());
  if (s == "inf" || s == "infinity" || s == "O") return CurvePoint::infinity();
  if (s == "G") return curve.generator;
  try {
    if (!s.empty() && s.back() == 'G') {
      std::string k = s.substr(0, s.size() - 1);
      if (!k.empty() && k.back() == '*') k.pop_back();
      if (k.empty() || !std::all_of(k.begin(), k.end(), ::isdigit)) throw CurveError("bad scalar");
      return scalar_mul(BigInt{k}, curve.generator, curve);
    }
    auto comma = s.find(',');
    if (comma == std::string::npos) throw CurveError("expected x,y");
    std::string xs = s.substr(0, comma), ys = s.substr(comma + 1);
    auto digits = [](const std::string& v) { return !v.empty() && std::all_of(v.begin(), v.end(), ::isdigit); };
    if (!digits(xs) || !digits(ys)) throw CurveError("coordinates must be decimal");
    CurvePoint point{BigInt{xs}, BigInt{ys}};
    if (!on_curve(point, curve)) throw CurveError("point not on curve " + curve.name);
    return point;
  } catch (const CurveError& e) {
    throw CurveError("cannot parse point '" + std::string(text) + "': " + e.what());
  }
}

}  // namespace kickmix::ec
