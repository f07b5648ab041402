#pragma once

// Kickmix circuit intermediate representation and the `.kmx` text format.
//
// A kickmix circuit uses only permutation gates (X, CX, CCX), diagonal gates
// (Z, CZ, CCZ) and X-basis measurements (MX). Unitary gates may carry a
// single-bit classical condition on a previously measured bit. See
// docs/kmx-format.md for the canonical byte layout.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kickmix::ir {

using Qubit = std::uint32_t;
using CBit = std::uint32_t;

enum class GateKind : std::uint8_t { X, CX, CCX, Z, CZ, CCZ, MX };

constexpr unsigned arity(GateKind kind) {
  switch (kind) {
    case GateKind::X:
    case GateKind::Z:
    case GateKind::MX:
      return 1;
    case GateKind::CX:
    case GateKind::CZ:
      return 2;
    case GateKind::CCX:
    case GateKind::CCZ:
      return 3;
  }
  return 0;
}

constexpr bool is_diagonal(GateKind kind) {
  return kind == GateKind::Z || kind == GateKind::CZ || kind == GateKind::CCZ;
}
constexpr bool is_permutation(GateKind kind) {
  return kind == GateKind::X || kind == GateKind::CX || kind == GateKind::CCX;
}
constexpr bool is_non_clifford(GateKind kind) { return kind == GateKind::CCX || kind == GateKind::CCZ; }

std::string_view opcode(GateKind kind);
std::optional<GateKind> parse_opcode(std::string_view text);

struct Condition {
  CBit cbit = 0;
  bool value = true;
  bool operator==(const Condition&) const = default;
};

struct Gate {
  GateKind kind = GateKind::X;
  // Controls first, target last. Only the first arity(kind) entries are used.
  std::array<Qubit, 3> operands{};
  CBit dest = 0;  // MX only
  std::optional<Condition> condition;

  std::span<const Qubit> qubits() const { return {operands.data(), arity(kind)}; }
  Qubit target() const { return operands[arity(kind) - 1]; }

  bool operator==(const Gate& rhs) const;

  static Gate x(Qubit t) { return {GateKind::X, {t, 0, 0}, 0, std::nullopt}; }
  static Gate cx(Qubit c, Qubit t) { return {GateKind::CX, {c, t, 0}, 0, std::nullopt}; }
  static Gate ccx(Qubit a, Qubit b, Qubit t) { return {GateKind::CCX, {a, b, t}, 0, std::nullopt}; }
  static Gate z(Qubit t) { return {GateKind::Z, {t, 0, 0}, 0, std::nullopt}; }
  static Gate cz(Qubit a, Qubit b) { return {GateKind::CZ, {a, b, 0}, 0, std::nullopt}; }
  static Gate ccz(Qubit a, Qubit b, Qubit c) { return {GateKind::CCZ, {a, b, c}, 0, std::nullopt}; }
  static Gate mx(Qubit q, CBit dest) { return {GateKind::MX, {q, 0, 0}, dest, std::nullopt}; }

  Gate when(CBit cbit, bool value = true) const {
    Gate g = *this;
    g.condition = Condition{cbit, value};
    return g;
  }
};

/// Inclusive qubit range [lo, hi]; lo is the least significant bit.
struct Register {
  std::string name;
  Qubit lo = 0;
  Qubit hi = 0;
  unsigned width() const { return hi - lo + 1; }
  bool operator==(const Register&) const = default;
};

struct Circuit {
  std::uint32_t qubit_count = 1;
  std::uint32_t cbit_count = 0;
  std::vector<Register> inputs;
  std::vector<Register> outputs;
  std::vector<Gate> gates;
  std::map<std::string, std::string> metadata;

  const Register* find_input(std::string_view name) const;
  const Register* find_output(std::string_view name) const;
  std::optional<std::string> meta(const std::string& key) const;

  bool operator==(const Circuit&) const = default;
};

struct StaticResources {
  std::uint64_t qubit_count = 0;
  std::uint64_t total_gate_count = 0;
  std::uint64_t non_clifford_gate_count = 0;
  std::uint64_t measurement_count = 0;
  bool operator==(const StaticResources&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ValidationError describing the first violated invariant.
void validate(const Circuit& circuit);

/// Parses `.kmx` text; the result is validated. Errors carry 1-based line and
/// column numbers.
Circuit parse(std::string_view text);

/// Canonical text form; parse(serialize(c)) == c for every valid c.
std::string serialize(const Circuit& circuit);

StaticResources static_resources(const Circuit& circuit);

/// Reverses the gate list of a measurement-free, condition-free circuit; every
/// kickmix unitary is self-inverse, so this is the inverse circuit.
Circuit inverse(const Circuit& circuit);

}  // namespace kickmix::ir
