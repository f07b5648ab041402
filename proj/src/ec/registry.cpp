#include <cstdlib>
#include <fstream>
#include <map>

#include <json.hpp>

#include "kickmix/ec.hpp"

namespace kickmix::ec {

namespace {

// Toy generators are the lexicographically smallest point of maximal order
// found by enumeration (tests re-derive them).
std::map<std::string, CurveParams, std::less<>> builtin_curves() {
  std::map<std::string, CurveParams, std::less<>> curves;
  auto add = [&](CurveParams c) {
    std::string key = c.name;
    curves.emplace(std::move(key), std::move(c));
  };
  add(make_curve("secp256k1",
                 BigInt{"0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F"}, 0, 7,
                 CurvePoint{BigInt{"0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798"},
                            BigInt{"0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8"}},
                 BigInt{"0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141"}));
  add(make_curve("toy-p11-b7", 11, 0, 7, CurvePoint{4, 4}, 12));
  add(make_curve("toy-p61-b7", 61, 0, 7, CurvePoint{2, 25}, 61));
  add(make_curve("toy-p1009-b7", 1009, 0, 7, CurvePoint{1, 131}, 147));
  return curves;
}

BigInt json_int(const nlohmann::json& v) {
  if (v.is_string()) return BigInt{v.get<std::string>()};
  if (v.is_number_unsigned()) return BigInt{v.get<std::uint64_t>()};
  if (v.is_number_integer()) return BigInt{v.get<std::int64_t>()};
  throw CurveError("curve registry: expected integer or decimal/hex string");
}

void load_registry_file(const std::string& path, std::map<std::string, CurveParams, std::less<>>& curves) {
  std::ifstream in(path);
  if (!in) throw CurveError("cannot open curve registry " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CurveError("curve registry " + path + ": " + e.what());
  }
  if (!doc.is_array()) throw CurveError("curve registry " + path + ": expected a JSON array");
  for (const auto& entry : doc) {
    try {
      auto curve = make_curve(entry.at("name").get<std::string>(), json_int(entry.at("p")),
                              json_int(entry.at("a")), json_int(entry.at("b")),
                              CurvePoint{json_int(entry.at("gx")), json_int(entry.at("gy"))},
                              json_int(entry.at("order")));
      std::string key = curve.name;
      curves.insert_or_assign(std::move(key), std::move(curve));
    } catch (const nlohmann::json::exception& e) {
      throw CurveError("curve registry " + path + ": " + e.what());
    }
  }
}

const std::map<std::string, CurveParams, std::less<>>& registry() {
  static const auto curves = [] {
    auto c = builtin_curves();
    if (const char* path = std::getenv("KICKMIX_CURVES"); path != nullptr && *path != '\0') {
      load_registry_file(path, c);
    }
    return c;
  }();
  return curves;
}

}  // namespace

const CurveParams& named_curve(std::string_view name) {
  const auto& curves = registry();
  auto it = curves.find(name);
  if (it == curves.end()) throw CurveError("unknown curve '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> curve_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

}  // namespace kickmix::ec
