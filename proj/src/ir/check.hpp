#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "kickmix/ir.hpp"

namespace kickmix::ir {

// First invariant violation found in a circuit, located well enough for the
// parser to map it back to a source position.
struct Failure {
  enum class Where { Header, Metadata, Input, Output, Gate };
  enum class Token { Whole, Condition, Opcode, Operand0, Operand1, Operand2, Dest };
  Where where;
  std::size_t index;
  Token token;
  std::string message;
};

std::optional<Failure> check(const Circuit& c);

}  // namespace kickmix::ir
