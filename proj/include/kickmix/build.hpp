#pragma once

// Circuit synthesis for desk-scale test subjects.
//
// Every builder returns its circuit together with the resource counts it
// predicts from its construction plan; tests hold the two equal. All
// temporary ANDs are uncomputed by X-basis measurement followed by a
// classically conditioned CZ, so the builders exercise the kickmix pattern
// at depth.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kickmix/ec.hpp"
#include "kickmix/ir.hpp"

namespace kickmix::build {

class BuildError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Construction { TempAnd, Adder, ModAddConst, Lookup, PermutationPointAdd, WindowedPointAdd };

std::string_view construction_name(Construction c);

struct BuildReport {
  ir::Circuit circuit;
  ir::StaticResources predicted;
  Construction construction = Construction::TempAnd;
  /// Named sub-totals of the predicted non-Clifford count (for example the
  /// unary-iteration lookup cost of a windowed addition).
  std::map<std::string, std::uint64_t> terms;
};

/// CCX into a fresh ancilla, then MX + conditioned CZ. Registers a, b.
BuildReport build_temp_and();

/// In-place b += a mod 2^width with temporary-AND carries. Registers a, b.
BuildReport build_adder(unsigned width);

/// x -> (x + c) mod p on x < p. Register x; inputs x >= p are exceptional.
BuildReport build_mod_add_const(unsigned width, std::uint64_t constant, std::uint64_t modulus);

/// x -> x + table[address] (XOR) via unary iteration. Registers addr, target.
/// Entries must fit in `entry_width` bits; table.size() == 2^address_width.
BuildReport build_lookup(const std::vector<std::uint64_t>& table, unsigned address_width, unsigned entry_width);

/// Q -> Q + P for every on-curve Q with a classical P, as a permutation of
/// the (x, y) register pair. Infinity is encoded as all-ones coordinates.
/// Registers qx, qy.
BuildReport build_pointadd_permutation(const ec::CurveParams& curve, const ec::CurvePoint& point);

/// |k>|Q> -> |k>|Q + k*base> for a window of `window_bits`. Registers k, qx, qy.
BuildReport build_windowed_pointadd(const ec::CurveParams& curve, const ec::CurvePoint& base, unsigned window_bits);

enum class MutationKind { RetargetOperand, DropGate, ToggleCondition };

struct Mutant {
  ir::Circuit circuit;
  MutationKind kind = MutationKind::RetargetOperand;
  std::size_t gate_index = 0;
  std::string description;
};

/// One seeded structural edit; the result always validates. The edit kind is
/// drawn from the seed as well, falling back when the circuit has no
/// candidate for it.
Mutant mutate_detailed(const ir::Circuit& circuit, std::uint64_t seed);
ir::Circuit mutate(const ir::Circuit& circuit, std::uint64_t seed);

/// Encoding used by the point-addition builders and the harness.
BigInt infinity_coordinate(unsigned coordinate_bits);

}  // namespace kickmix::build
