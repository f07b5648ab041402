#include <charconv>
#include <vector>

#include "check.hpp"
#include "kickmix/ir.hpp"

namespace kickmix::ir {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

struct Position {
  std::size_t line = 0;
  std::array<std::size_t, 7> columns{};  // indexed by Failure::Token
};

std::vector<std::vector<Token>> split_statements(std::string_view line) {
  std::vector<std::vector<Token>> statements(1);
  std::size_t i = 0;
  while (i < line.size()) {
    char ch = line[i];
    if (ch == '#') break;
    if (ch == ';') {
      statements.emplace_back();
      ++i;
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != ';' &&
           line[i] != '#') {
      ++i;
    }
    statements.back().push_back({line.substr(start, i - start), start + 1});
  }
  std::erase_if(statements, [](const auto& s) { return s.empty(); });
  return statements;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Circuit run() {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no;
      for (auto& stmt : split_statements(text_.substr(pos, end - pos))) statement(line_no, stmt);
      if (end == text_.size()) break;
      pos = end + 1;
    }
    if (!saw_qubits_) throw ParseError(1, 1, "missing 'qubits N' header");
    if (auto f = check(circuit_)) throw located(*f);
    return std::move(circuit_);
  }

 private:
  [[noreturn]] static void fail(std::size_t line, const Token& tok, const std::string& msg) {
    throw ParseError(line, tok.column, msg);
  }

  ParseError located(const Failure& f) const {
    switch (f.where) {
      case Failure::Where::Gate: {
        const Position& p = gate_pos_.at(f.index);
        std::size_t col = p.columns[static_cast<std::size_t>(f.token)];
        if (col == 0) col = p.columns[static_cast<std::size_t>(Failure::Token::Opcode)];
        return {p.line, col, f.message};
      }
      case Failure::Where::Input: return {input_pos_.at(f.index).line, input_pos_.at(f.index).columns[0], f.message};
      case Failure::Where::Output: return {output_pos_.at(f.index).line, output_pos_.at(f.index).columns[0], f.message};
      case Failure::Where::Metadata: return {meta_line_, 1, f.message};
      case Failure::Where::Header: return {1, 1, f.message};
    }
    return {0, 0, f.message};
  }

  static std::uint32_t number(std::size_t line, const Token& tok, std::string_view digits, const char* what) {
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
      fail(line, tok, std::string("expected ") + what + ", got '" + std::string(tok.text) + "'");
    }
    return value;
  }

  // "c<k>" with an optional "=0" / "=1" suffix when `allow_value`.
  static Condition cbit_ref(std::size_t line, const Token& tok, bool allow_value) {
    std::string_view t = tok.text;
    if (t.size() < 2 || t[0] != 'c') fail(line, tok, "expected classical bit 'c<k>', got '" + std::string(t) + "'");
    Condition cond;
    std::string_view digits = t.substr(1);
    if (auto eq = digits.find('='); eq != std::string_view::npos) {
      if (!allow_value) fail(line, tok, "unexpected '=' in classical bit reference");
      std::string_view v = digits.substr(eq + 1);
      if (v == "0") {
        cond.value = false;
      } else if (v != "1") {
        fail(line, tok, "condition value must be 0 or 1");
      }
      digits = digits.substr(0, eq);
    }
    cond.cbit = number(line, tok, digits, "classical bit index");
    return cond;
  }

  void header_guard(std::size_t line, const Token& tok) {
    if (!circuit_.gates.empty()) fail(line, tok, "header statement '" + std::string(tok.text) + "' after gates");
  }

  void statement(std::size_t line, const std::vector<Token>& toks) {
    const Token& head = toks.front();
    const auto expect = [&](std::size_t n) {
      if (toks.size() != n) {
        fail(line, toks.size() > n ? toks[n] : toks.back(),
             "'" + std::string(head.text) + "' expects " + std::to_string(n - 1) + " argument(s)");
      }
    };
    if (!saw_qubits_ && head.text != "qubits") fail(line, head, "first statement must be 'qubits N'");

    if (head.text == "qubits") {
      if (saw_qubits_) fail(line, head, "duplicate 'qubits' header");
      expect(2);
      circuit_.qubit_count = number(line, toks[1], toks[1].text, "qubit count");
      if (circuit_.qubit_count == 0) fail(line, toks[1], "qubit count must be positive");
      saw_qubits_ = true;
    } else if (head.text == "cbits") {
      header_guard(line, head);
      if (saw_cbits_) fail(line, head, "duplicate 'cbits' header");
      expect(2);
      circuit_.cbit_count = number(line, toks[1], toks[1].text, "classical bit count");
      saw_cbits_ = true;
    } else if (head.text == "meta") {
      header_guard(line, head);
      expect(3);
      if (!circuit_.metadata.emplace(std::string(toks[1].text), std::string(toks[2].text)).second) {
        fail(line, toks[1], "duplicate metadata key '" + std::string(toks[1].text) + "'");
      }
      meta_line_ = line;
    } else if (head.text == "in" || head.text == "out") {
      header_guard(line, head);
      expect(3);
      std::string_view range = toks[2].text;
      auto dots = range.find("..");
      if (dots == std::string_view::npos) fail(line, toks[2], "expected register range 'lo..hi'");
      Register reg{std::string(toks[1].text), number(line, toks[2], range.substr(0, dots), "range start"),
                   number(line, toks[2], range.substr(dots + 2), "range end")};
      if (reg.lo > reg.hi) fail(line, toks[2], "register range has lo > hi");
      Position p;
      p.line = line;
      p.columns[0] = toks[1].column;
      if (head.text == "in") {
        circuit_.inputs.push_back(std::move(reg));
        input_pos_.push_back(p);
      } else {
        circuit_.outputs.push_back(std::move(reg));
        output_pos_.push_back(p);
      }
    } else {
      gate(line, toks);
    }
  }

  void gate(std::size_t line, const std::vector<Token>& toks) {
    Gate g;
    Position pos;
    pos.line = line;
    std::size_t i = 0;
    if (toks[0].text == "IF") {
      if (toks.size() < 3) fail(line, toks.back(), "incomplete conditioned gate");
      g.condition = cbit_ref(line, toks[1], true);
      pos.columns[static_cast<std::size_t>(Failure::Token::Condition)] = toks[1].column;
      i = 2;
    }
    const Token& op = toks[i];
    auto kind = parse_opcode(op.text);
    if (!kind) fail(line, op, "unknown opcode '" + std::string(op.text) + "'");
    g.kind = *kind;
    pos.columns[static_cast<std::size_t>(Failure::Token::Opcode)] = op.column;
    if (g.kind == GateKind::MX && g.condition) {
      fail(line, op, "measurements cannot be conditioned");
    }
    ++i;
    const unsigned n = arity(g.kind);
    for (unsigned k = 0; k < n; ++k, ++i) {
      if (i >= toks.size()) fail(line, toks.back(), std::string(op.text) + " expects " + std::to_string(n) + " qubit(s)");
      g.operands[k] = number(line, toks[i], toks[i].text, "qubit index");
      pos.columns[static_cast<std::size_t>(Failure::Token::Operand0) + k] = toks[i].column;
    }
    if (g.kind == GateKind::MX) {
      if (i >= toks.size() || toks[i].text != "->") {
        fail(line, i < toks.size() ? toks[i] : toks.back(), "MX expects '-> c<k>'");
      }
      ++i;
      if (i >= toks.size()) fail(line, toks.back(), "MX expects a destination classical bit");
      g.dest = cbit_ref(line, toks[i], false).cbit;
      pos.columns[static_cast<std::size_t>(Failure::Token::Dest)] = toks[i].column;
      ++i;
    }
    if (i < toks.size()) fail(line, toks[i], "unexpected token '" + std::string(toks[i].text) + "'");
    circuit_.gates.push_back(g);
    gate_pos_.push_back(pos);
  }

  std::string_view text_;
  Circuit circuit_;
  bool saw_qubits_ = false;
  bool saw_cbits_ = false;
  std::size_t meta_line_ = 0;
  std::vector<Position> input_pos_, output_pos_, gate_pos_;
};

}  // namespace

Circuit parse(std::string_view text) { return Parser(text).run(); }

}  // namespace kickmix::ir
