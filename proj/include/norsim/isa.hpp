#ifndef NORSIM_ISA_HPP
#define NORSIM_ISA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "norsim/geometry.hpp"
#include "norsim/microop.hpp"

namespace norsim {

enum class Opcode : uint8_t {
  EqualImm = 0,
  NotEqualImm = 1,
  LessThanImm = 2,
  GreaterThanImm = 3,
  AddImm = 4,
  Equal = 5,
  LessThan = 6,
  SetCol = 7,
  ResetCol = 8,
  BitwiseNot = 9,
  BitwiseAnd = 10,
  BitwiseOr = 11,
  Add = 12,
  Multiply = 13,
  ReduceSum = 14,
  ReduceMin = 15,
  ReduceMax = 16,
  ColumnTransform = 17,
  ConfigurePage = 18,
};

constexpr int opcode_count = 19;

const char* opcode_name(Opcode op);

// Operand field layout metadata, published for the request codec.
// Version bumps whenever numbering or operand shape changes.
constexpr uint32_t isa_descriptor_version = 1;

struct OpcodeDescriptor {
  Opcode opcode;
  const char* name;
  bool has_src2;
  bool has_imm;
  bool uses_dst_row;  // result row meaningful (reduce, column-transform)
};

const OpcodeDescriptor& opcode_descriptor(Opcode op);

struct ColRange {
  uint32_t start = 0;
  uint32_t len = 0;
  uint32_t end() const { return start + len; }
  bool overlaps(const ColRange& o) const {
    return len > 0 && o.len > 0 && start < o.end() && o.start < end();
  }
  bool operator==(const ColRange&) const = default;
};

// One ISA-level instruction as carried by a PIM request.
struct PimInstruction {
  Opcode opcode = Opcode::ConfigurePage;
  ColRange src1{};
  ColRange src2{};
  bool has_src2 = false;
  uint32_t dst_col = 0;
  uint32_t dst_row = 0;  // reduce / column-transform result row
  uint64_t immediate = 0;
  uint32_t imm_bits = 0;
  bool has_imm = false;
  // Scratch columns the instruction may clobber. ConfigurePage sets this
  // for the page; other instructions inherit the page's configuration.
  ColRange compute_region{};

  bool operator==(const PimInstruction&) const = default;
};

struct InstructionCost {
  uint64_t cycles = 0;              // length of the expanded sequence
  uint32_t intermediate_cells = 0;  // scratch cells the expansion touches
  uint64_t formula_cycles = 0;      // published cycle-count formula
  uint32_t formula_cells = 0;       // published intermediate-cell count
};

// Throws WidthError / BoundsError / CapacityError when the instruction is
// not executable on the given geometry.
void validate(const PimInstruction& instr, const CrossbarGeometry& g);

// Deterministic expansion into the restricted micro-op set. The sequence,
// run on any crossbar state, leaves dst holding the defined result and
// touches nothing outside dst and compute_region.
std::vector<MicroOp> expand(const PimInstruction& instr,
                            const CrossbarGeometry& g);

InstructionCost cost_of(const PimInstruction& instr,
                        const CrossbarGeometry& g);

// Cycle-count formula from the instruction characteristics table;
// reduce/transform coefficients depend on crossbar size.
uint64_t formula_cycles(const PimInstruction& instr,
                        const CrossbarGeometry& g);
uint32_t formula_cells(const PimInstruction& instr, const CrossbarGeometry& g);

// Width of the result field an instruction writes.
uint32_t result_width(const PimInstruction& instr, const CrossbarGeometry& g);

// Scratch columns the expansion needs inside compute_region.
uint32_t scratch_cells(const PimInstruction& instr, const CrossbarGeometry& g);

// Add/AddImm leave the final carry in one scratch cell; callers that care
// can read it there.
uint32_t add_carry_column(const PimInstruction& instr);

// Binary-tree depth of a reduce over the given row count.
uint32_t reduce_iterations(uint32_t rows);

}  // namespace norsim

#endif
