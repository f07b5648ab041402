#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "check.hpp"
#include "kickmix/ir.hpp"

namespace kickmix::ir {

namespace {

constexpr std::array<std::pair<std::string_view, GateKind>, 7> kOpcodes{{
    {"X", GateKind::X},
    {"CX", GateKind::CX},
    {"CCX", GateKind::CCX},
    {"Z", GateKind::Z},
    {"CZ", GateKind::CZ},
    {"CCZ", GateKind::CCZ},
    {"MX", GateKind::MX},
}};

bool valid_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
  });
}

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); });
}

std::optional<Failure> check_registers(const std::vector<Register>& regs, std::uint32_t qubit_count,
                                       Failure::Where where) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < regs.size(); ++i) {
    const Register& r = regs[i];
    auto fail = [&](std::string msg) { return Failure{where, i, Failure::Token::Whole, std::move(msg)}; };
    if (!valid_identifier(r.name)) return fail("invalid register name '" + r.name + "'");
    if (!names.insert(r.name).second) return fail("duplicate register name '" + r.name + "'");
    if (r.lo > r.hi) return fail("register '" + r.name + "' has lo > hi");
    if (r.hi >= qubit_count) {
      return fail("register '" + r.name + "' exceeds qubit count " + std::to_string(qubit_count));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (regs[j].lo <= r.hi && r.lo <= regs[j].hi) {
        return fail("register '" + r.name + "' overlaps register '" + regs[j].name + "'");
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view opcode(GateKind kind) {
  for (const auto& [name, k] : kOpcodes) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<GateKind> parse_opcode(std::string_view text) {
  for (const auto& [name, k] : kOpcodes) {
    if (name == text) return k;
  }
  return std::nullopt;
}

bool Gate::operator==(const Gate& rhs) const {
  if (kind != rhs.kind || condition != rhs.condition) return false;
  if (!std::equal(operands.begin(), operands.begin() + arity(kind), rhs.operands.begin())) return false;
  return kind != GateKind::MX || dest == rhs.dest;
}

const Register* Circuit::find_input(std::string_view name) const {
  auto it = std::find_if(inputs.begin(), inputs.end(), [&](const Register& r) { return r.name == name; });
  return it == inputs.end() ? nullptr : &*it;
}

const Register* Circuit::find_output(std::string_view name) const {
  auto it = std::find_if(outputs.begin(), outputs.end(), [&](const Register& r) { return r.name == name; });
  return it == outputs.end() ? nullptr : &*it;
}

std::optional<std::string> Circuit::meta(const std::string& key) const {
  auto it = metadata.find(key);
  if (it == metadata.end()) return std::nullopt;
  return it->second;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

std::optional<Failure> check(const Circuit& c) {
  if (c.qubit_count == 0) return Failure{Failure::Where::Header, 0, Failure::Token::Whole, "qubit count must be positive"};
  for (const auto& [key, value] : c.metadata) {
    if (!valid_identifier(key) || value.empty() || has_space(value)) {
      return Failure{Failure::Where::Metadata, 0, Failure::Token::Whole,
                     "metadata '" + key + "' must be an identifier with a non-empty whitespace-free value"};
    }
  }
  if (auto f = check_registers(c.inputs, c.qubit_count, Failure::Where::Input)) return f;
  if (auto f = check_registers(c.outputs, c.qubit_count, Failure::Where::Output)) return f;

  std::vector<bool> written(c.cbit_count, false);
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    auto fail = [&](Failure::Token tok, std::string msg) { return Failure{Failure::Where::Gate, i, tok, std::move(msg)}; };
    const unsigned n = arity(g.kind);
    for (unsigned k = 0; k < n; ++k) {
      auto slot = static_cast<Failure::Token>(static_cast<int>(Failure::Token::Operand0) + static_cast<int>(k));
      if (g.operands[k] >= c.qubit_count) {
        return fail(slot, "qubit index " + std::to_string(g.operands[k]) + " out of range (qubits " +
                              std::to_string(c.qubit_count) + ")");
      }
      for (unsigned j = 0; j < k; ++j) {
        if (g.operands[j] == g.operands[k]) return fail(slot, "duplicate operand " + std::to_string(g.operands[k]));
      }
    }
    if (g.kind == GateKind::MX) {
      if (g.condition) return fail(Failure::Token::Condition, "measurements cannot be conditioned");
      if (g.dest >= c.cbit_count) {
        return fail(Failure::Token::Dest, "classical bit c" + std::to_string(g.dest) + " out of range (cbits " +
                                              std::to_string(c.cbit_count) + ")");
      }
      if (written[g.dest]) return fail(Failure::Token::Dest, "duplicate write of classical bit c" + std::to_string(g.dest));
      written[g.dest] = true;
    } else if (g.condition) {
      const CBit cb = g.condition->cbit;
      if (cb >= c.cbit_count) {
        return fail(Failure::Token::Condition, "classical bit c" + std::to_string(cb) + " out of range (cbits " +
                                                   std::to_string(c.cbit_count) + ")");
      }
      if (!written[cb]) {
        return fail(Failure::Token::Condition, "condition on c" + std::to_string(cb) + " before it is measured");
      }
    }
  }
  return std::nullopt;
}

void validate(const Circuit& circuit) {
  if (auto f = check(circuit)) {
    std::string where;
    switch (f->where) {
      case Failure::Where::Gate: where = "gate " + std::to_string(f->index) + ": "; break;
      case Failure::Where::Input: where = "input register " + std::to_string(f->index) + ": "; break;
      case Failure::Where::Output: where = "output register " + std::to_string(f->index) + ": "; break;
      default: break;
    }
    throw ValidationError(where + f->message);
  }
}

StaticResources static_resources(const Circuit& circuit) {
  StaticResources r;
  r.qubit_count = circuit.qubit_count;
  r.total_gate_count = circuit.gates.size();
  for (const Gate& g : circuit.gates) {
    if (is_non_clifford(g.kind)) ++r.non_clifford_gate_count;
    if (g.kind == GateKind::MX) ++r.measurement_count;
  }
  return r;
}

Circuit inverse(const Circuit& circuit) {
  for (const Gate& g : circuit.gates) {
    if (g.kind == GateKind::MX || g.condition) {
      throw ValidationError("inverse: circuit contains measurements or classical conditions");
    }
  }
  Circuit inv = circuit;
  std::reverse(inv.gates.begin(), inv.gates.end());
  std::swap(inv.inputs, inv.outputs);
  return inv;
}

std::string serialize(const Circuit& c) {
  std::ostringstream out;
  out << "qubits " << c.qubit_count << '\n';
  out << "cbits " << c.cbit_count << '\n';
  for (const auto& [key, value] : c.metadata) out << "meta " << key << ' ' << value << '\n';
  for (const Register& r : c.inputs) out << "in " << r.name << ' ' << r.lo << ".." << r.hi << '\n';
  for (const Register& r : c.outputs) out << "out " << r.name << ' ' << r.lo << ".." << r.hi << '\n';
  for (const Gate& g : c.gates) {
    if (g.condition) {
      out << "IF c" << g.condition->cbit;
      if (!g.condition->value) out << "=0";
      out << ' ';
    }
    out << opcode(g.kind);
    for (Qubit q : g.qubits()) out << ' ' << q;
    if (g.kind == GateKind::MX) out << " -> c" << g.dest;
    out << '\n';
  }
  return out.str();
}

}  // namespace kickmix::ir
