#ifndef NORSIM_MICROOP_HPP
#define NORSIM_MICROOP_HPP

#include <cstdint>
#include <string>

namespace norsim {

// The six operation types a PIM controller may issue to a crossbar.
// Column-wise ops engage every row in parallel; row-wise ops engage a
// single cell within a single column.
enum class MicroOpKind : uint8_t {
  ColNor2,   // out[r] gated by NOR(a[r], b[r]) on all rows
  ColNot,    // out[r] gated by NOT(in[r]) on all rows
  ColSet,    // whole column to 1
  ColReset,  // whole column to 0
  RowNot,    // cell(out_row, col) gated by NOT(cell(in_row, col))
  RowSet,    // cell(row, col) to 1
};

struct MicroOp {
  MicroOpKind kind;
  uint16_t a = 0;    // first input column (ColNor2/ColNot), or the column
                     // of a row-wise op / single-column set-reset
  uint16_t b = 0;    // second input column (ColNor2 only)
  uint16_t out = 0;  // output column (column-wise logic ops)
  uint32_t in_row = 0;
  uint32_t out_row = 0;

  static MicroOp col_nor2(uint16_t in_a, uint16_t in_b, uint16_t out_col) {
    return MicroOp{MicroOpKind::ColNor2, in_a, in_b, out_col, 0, 0};
  }
  static MicroOp col_not(uint16_t in_col, uint16_t out_col) {
    return MicroOp{MicroOpKind::ColNot, in_col, 0, out_col, 0, 0};
  }
  static MicroOp col_set(uint16_t col) {
    return MicroOp{MicroOpKind::ColSet, col, 0, col, 0, 0};
  }
  static MicroOp col_reset(uint16_t col) {
    return MicroOp{MicroOpKind::ColReset, col, 0, col, 0, 0};
  }
  static MicroOp row_not(uint16_t col, uint32_t in_row, uint32_t out_row) {
    return MicroOp{MicroOpKind::RowNot, col, 0, col, in_row, out_row};
  }
  static MicroOp row_set(uint32_t row, uint16_t col) {
    return MicroOp{MicroOpKind::RowSet, col, 0, col, 0, row};
  }

  bool is_column_wise() const {
    return kind == MicroOpKind::ColNor2 || kind == MicroOpKind::ColNot ||
           kind == MicroOpKind::ColSet || kind == MicroOpKind::ColReset;
  }
  bool is_row_wise() const { return !is_column_wise(); }

  std::string to_string() const;
};

}  // namespace norsim

#endif
