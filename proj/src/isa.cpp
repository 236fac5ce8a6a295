#include "norsim/isa.hpp"

#include <algorithm>
#include <array>

#include "norsim/error.hpp"

namespace norsim {

namespace {

const std::array<OpcodeDescriptor, opcode_count> descriptors = {{
    {Opcode::EqualImm, "equal_imm", false, true, false},
    {Opcode::NotEqualImm, "not_equal_imm", false, true, false},
    {Opcode::LessThanImm, "less_than_imm", false, true, false},
    {Opcode::GreaterThanImm, "greater_than_imm", false, true, false},
    {Opcode::AddImm, "add_imm", false, true, false},
    {Opcode::Equal, "equal", true, false, false},
    {Opcode::LessThan, "less_than", true, false, false},
    {Opcode::SetCol, "set_col", false, false, false},
    {Opcode::ResetCol, "reset_col", false, false, false},
    {Opcode::BitwiseNot, "bitwise_not", false, false, false},
    {Opcode::BitwiseAnd, "bitwise_and", true, false, false},
    {Opcode::BitwiseOr, "bitwise_or", true, false, false},
    {Opcode::Add, "add", true, false, false},
    {Opcode::Multiply, "multiply", true, false, false},
    {Opcode::ReduceSum, "reduce_sum", false, false, true},
    {Opcode::ReduceMin, "reduce_min", false, false, true},
    {Opcode::ReduceMax, "reduce_max", false, false, true},
    {Opcode::ColumnTransform, "column_transform", false, false, true},
    {Opcode::ConfigurePage, "configure_page", false, false, false},
}};

// Emits device-faithful sequences. A gate result of 1 can only survive in
// a cell that was SET beforehand, so "pure" helpers pair the init with the
// gate while "acc" helpers rely on the AND-accumulate behaviour.
class Emitter {
 public:
  std::vector<MicroOp> ops;

  void set(uint32_t col) { ops.push_back(MicroOp::col_set(u16(col))); }
  void reset(uint32_t col) { ops.push_back(MicroOp::col_reset(u16(col))); }
  void nor(uint32_t a, uint32_t b, uint32_t out) {
    set(out);
    ops.push_back(MicroOp::col_nor2(u16(a), u16(b), u16(out)));
  }
  void not_(uint32_t in, uint32_t out) {
    set(out);
    ops.push_back(MicroOp::col_not(u16(in), u16(out)));
  }
  void nor_acc(uint32_t a, uint32_t b, uint32_t out) {
    ops.push_back(MicroOp::col_nor2(u16(a), u16(b), u16(out)));
  }
  void not_acc(uint32_t in, uint32_t out) {
    ops.push_back(MicroOp::col_not(u16(in), u16(out)));
  }
  void row_set(uint32_t row, uint32_t col) {
    ops.push_back(MicroOp::row_set(row, u16(col)));
  }
  void row_not(uint32_t col, uint32_t in_row, uint32_t out_row) {
    ops.push_back(MicroOp::row_not(u16(col), in_row, out_row));
  }
  // move = re-init + negating row copy; polarity flips once
  void row_move_not(uint32_t col, uint32_t in_row, uint32_t out_row) {
    row_set(out_row, col);
    row_not(col, in_row, out_row);
  }

 private:
  static uint16_t u16(uint32_t v) { return static_cast<uint16_t>(v); }
};

bool imm_bit(const PimInstruction& in, uint32_t i) {
  return (in.immediate >> i) & 1u;
}

uint32_t popcount_imm(const PimInstruction& in) {
  uint64_t masked = in.imm_bits >= 64
                        ? in.immediate
                        : (in.immediate & ((1ull << in.imm_bits) - 1));
  return static_cast<uint32_t>(__builtin_popcountll(masked));
}

// m_eq accumulation per the controller's equality algorithm: one
// conjunction into the accumulator per immediate bit.
void emit_equal_imm_core(Emitter& em, const PimInstruction& in, uint32_t acc,
                         uint32_t t) {
  em.set(acc);
  for (uint32_t i = 0; i < in.src1.len; ++i) {
    uint32_t v = in.src1.start + i;
    if (!imm_bit(in, i)) {
      em.nor_acc(v, v, acc);  // acc &= ~v
    } else {
      em.set(t);
      em.nor_acc(v, v, t);    // t = ~v
      em.nor_acc(t, t, acc);  // acc &= v
    }
  }
}

// Shared gt/eq scan, MSB first. gt accumulates strictly-greater, eq
// accumulates equal-so-far; zero immediate bits are where gt can flip.
void emit_greater_scan(Emitter& em, const PimInstruction& in, uint32_t gt,
                       uint32_t eq, uint32_t t1, uint32_t t2, uint32_t t3) {
  em.reset(gt);
  em.set(eq);
  for (int i = static_cast<int>(in.src1.len) - 1; i >= 0; --i) {
    uint32_t v = in.src1.start + static_cast<uint32_t>(i);
    if (imm_bit(in, static_cast<uint32_t>(i))) {
      em.set(t1);
      em.nor_acc(v, v, t1);
      em.nor_acc(t1, t1, eq);  // eq &= v
    } else {
      em.not_(eq, t1);         // t1 = ~eq
      em.not_(v, t2);          // t2 = ~v
      em.nor(t1, t2, t3);      // t3 = eq & v
      em.nor(gt, t3, t1);      // t1 = ~(gt | t3)
      em.not_(t1, gt);         // gt |= eq & v
      em.nor_acc(v, v, eq);    // eq &= ~v
    }
  }
}

struct FaCells {
  uint32_t a, b, c, d;  // four scratch columns, reused across gates
};

// Nine-gate NOR full adder. Inputs x, y and carry cin; sum lands in
// sum_col, carry-out in cout_col. Gate order keeps every read ahead of the
// re-init of its cell, so y may alias sum_col (in-place accumulate).
void emit_full_adder(Emitter& em, uint32_t x, uint32_t y, uint32_t cin,
                     uint32_t cout_col, uint32_t sum_col, const FaCells& s) {
  em.nor(x, y, s.a);      // n1
  em.nor(x, s.a, s.b);    // n2
  em.nor(y, s.a, s.c);    // n3
  em.nor(s.b, s.c, s.d);  // n4 = xnor(x, y)
  em.nor(s.d, cin, s.b);  // m1
  em.nor(s.d, s.b, s.c);  // m2
  em.nor(cin, s.b, s.d);  // m3
  em.nor(s.c, s.d, sum_col);
  em.nor(s.a, s.b, cout_col);
}

// Full adder specialised by an immediate bit; the constant only selects
// which gates run, it is never materialised in the array.
void emit_full_adder_imm(Emitter& em, uint32_t x, bool y_bit, uint32_t cin,
                         uint32_t cout_col, uint32_t sum_col,
                         const FaCells& s) {
  if (!y_bit) {
    em.not_(x, s.a);        // n1 = ~x
    em.nor(x, s.a, s.b);    // n2
    em.not_(s.a, s.c);      // n3 = NOR(0, n1)
    em.nor(s.b, s.c, s.d);  // n4
    em.nor(s.d, cin, s.b);
    em.nor(s.d, s.b, s.c);
    em.nor(cin, s.b, s.d);
    em.nor(s.c, s.d, sum_col);
    em.nor(s.a, s.b, cout_col);
  } else {
    em.reset(s.a);          // n1 = NOR(x, 1) = 0
    em.not_(x, s.b);        // n2 = NOR(x, 0)
    em.reset(s.c);          // n3 = NOR(1, n1) = 0
    em.not_(s.b, s.d);      // n4 = NOR(n2, 0)
    em.nor(s.d, cin, s.b);
    em.nor(s.d, s.b, s.c);
    em.nor(cin, s.b, s.d);
    em.nor(s.c, s.d, sum_col);
    em.not_(s.b, cout_col);  // cout = NOR(0, m1)
  }
}

// Bitwise unsigned less-than, LSB to MSB:
//   lt' = (~a & b) | (xnor(a,b) & lt)
// Ping-pongs the accumulator between lt_final and lt_other so the last
// write lands in lt_final.
void emit_less_than_core(Emitter& em, uint32_t a_start, uint32_t b_start,
                         uint32_t n, uint32_t lt_final, uint32_t lt_other,
                         uint32_t c1, uint32_t c2, uint32_t c3, uint32_t c4) {
  uint32_t cur = (n % 2 == 0) ? lt_final : lt_other;
  em.reset(cur);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t a = a_start + i;
    uint32_t b = b_start + i;
    uint32_t nxt = (cur == lt_final) ? lt_other : lt_final;
    em.nor(a, b, c1);
    em.nor(a, c1, c2);    // ~a & b
    em.nor(b, c1, c3);    // a & ~b
    em.nor(c2, c3, c4);   // xnor
    em.nor(c2, c4, c3);   // nor(term, xnor)
    em.nor(c2, cur, c1);  // nor(term, lt)
    em.nor(c3, c1, nxt);  // lt'
    cur = nxt;
  }
}

// value select: dst_i = take_i if sel else keep_i, given sel and ~sel.
void emit_select_bit(Emitter& em, uint32_t take, uint32_t keep, uint32_t sel,
                     uint32_t nsel, uint32_t dst, uint32_t s1, uint32_t s2,
                     uint32_t s3) {
  em.not_(take, s1);
  em.nor(s1, nsel, s2);  // take & sel
  em.not_(keep, s1);
  em.nor(s1, sel, s3);   // keep & ~sel
  em.nor(s2, s3, s1);
  em.not_(s1, dst);
}

struct ReducePlan {
  uint32_t padded_rows;  // next power of two
  uint32_t iterations;
};

ReducePlan reduce_plan(uint32_t rows) {
  uint32_t k = ceil_log2(rows);
  return {1u << k, k};
}

// Move half of the live values into scratch columns next to the other
// half. Conditional gating keeps injected identity bits intact under the
// column-wide broadcast.
void emit_reduce_move(Emitter& em, uint32_t src_start, uint32_t tmp_start,
                      uint32_t width, uint32_t half, uint32_t live,
                      bool pad_ones) {
  uint32_t moved = live > half ? live - half : 0;
  for (uint32_t b = 0; b < width; ++b) {
    uint32_t src = src_start + b;
    uint32_t tmp = tmp_start + b;
    em.set(tmp);
    if (!pad_ones) {
      // zero identity for rows [moved, half) that have no partner
      for (uint32_t j = moved; j < half; ++j) em.row_not(tmp, half, j);
    }
    em.not_acc(src, tmp);  // tmp[r] &= ~src[r]
    if (pad_ones) {
      for (uint32_t j = moved; j < half; ++j) em.row_set(j, tmp);
    }
    for (uint32_t j = 0; j < moved; ++j) em.row_move_not(tmp, half + j, j);
  }
}

// Double row hop preserving polarity.
void emit_relocate(Emitter& em, uint32_t col_start, uint32_t width,
                   uint32_t from_row, uint32_t to_row, uint32_t rows) {
  if (from_row == to_row) return;
  uint32_t hop = 0;
  while (hop == from_row || hop == to_row) ++hop;
  if (hop >= rows)
    throw CapacityError("reduce: no free row for result relocation");
  for (uint32_t b = 0; b < width; ++b) {
    em.row_move_not(col_start + b, from_row, hop);
    em.row_move_not(col_start + b, hop, to_row);
  }
}

void expand_reduce_sum(Emitter& em, const PimInstruction& in,
                       const CrossbarGeometry& g) {
  auto plan = reduce_plan(g.rows);
  uint32_t n = in.src1.len;
  uint32_t z = in.compute_region.start;
  uint32_t tmp = z;                          // width n + K - 1
  uint32_t fa0 = z + n + plan.iterations - 1;
  FaCells fa{fa0, fa0 + 1, fa0 + 2, fa0 + 3};
  uint32_t carry[2] = {fa0 + 4, fa0 + 5};
  uint32_t live = g.rows;
  for (uint32_t k = 1; k <= plan.iterations; ++k) {
    uint32_t half = plan.padded_rows >> k;
    uint32_t width = n + k - 1;
    uint32_t src = (k == 1) ? in.src1.start : in.dst_col;
    emit_reduce_move(em, src, tmp, width, half, live, /*pad_ones=*/false);
    em.reset(carry[0]);
    for (uint32_t b = 0; b < width; ++b) {
      uint32_t cout =
          (b + 1 == width) ? in.dst_col + width : carry[(b + 1) % 2];
      emit_full_adder(em, tmp + b, src + b, carry[b % 2], cout,
                      in.dst_col + b, fa);
    }
    live = half;
  }
  emit_relocate(em, in.dst_col, n + plan.iterations, 0, in.dst_row, g.rows);
}

void expand_reduce_minmax(Emitter& em, const PimInstruction& in,
                          const CrossbarGeometry& g, bool is_min) {
  auto plan = reduce_plan(g.rows);
  uint32_t n = in.src1.len;
  uint32_t z = in.compute_region.start;
  uint32_t tmp = z;  // width n
  uint32_t c1 = z + n, c2 = z + n + 1, c3 = z + n + 2, c4 = z + n + 3;
  uint32_t lt_other = z + n + 4;
  uint32_t lt = z + n + 5;
  uint32_t live = g.rows;
  for (uint32_t k = 1; k <= plan.iterations; ++k) {
    uint32_t half = plan.padded_rows >> k;
    uint32_t cur = (k == 1) ? in.src1.start : in.dst_col;
    emit_reduce_move(em, cur, tmp, n, half, live, /*pad_ones=*/is_min);
    if (is_min)
      emit_less_than_core(em, tmp, cur, n, lt, lt_other, c1, c2, c3, c4);
    else
      emit_less_than_core(em, cur, tmp, n, lt, lt_other, c1, c2, c3, c4);
    em.not_(lt, c4);  // c4 = ~sel
    for (uint32_t b = 0; b < n; ++b)
      emit_select_bit(em, tmp + b, cur + b, lt, c4, in.dst_col + b, c1, c2,
                      c3);
    live = half;
  }
  emit_relocate(em, in.dst_col, n, 0, in.dst_row, g.rows);
}

// Column-transform: broadcast the negated source into every destination
// column, then negate each bit a second time onto its destination row.
// Writes within a column are ordered so a broadcast bit is always consumed
// before its cell is overwritten; a bit whose destination is its own cell
// needs a polarity-preserving detour through two helper rows.
void expand_column_transform(Emitter& em, const PimInstruction& in,
                             const CrossbarGeometry& g) {
  uint32_t rw = g.read_width_bits;
  uint32_t tr_rows = g.transform_rows();
  uint32_t src = in.src1.start;
  for (uint32_t i = 0; i < rw; ++i) {
    em.set(in.dst_col + i);
    em.not_acc(src, in.dst_col + i);
  }
  auto target_row = [&](uint32_t r) { return in.dst_row + r / rw; };
  for (uint32_t i = 0; i < rw; ++i) {
    uint32_t col = in.dst_col + i;
    std::vector<uint32_t> self_rows;
    std::vector<char> done(g.rows, 0);
    // consume source row r of this column (bits with r % rw == i)
    auto process = [&](auto&& self, uint32_t r) -> void {
      if (done[r]) return;
      done[r] = 1;
      uint32_t t = target_row(r);
      if (t == r) {
        self_rows.push_back(r);
        return;
      }
      // the target cell may itself hold an unconsumed bit of this column
      if (t % rw == i && t < g.rows && !done[t]) self(self, t);
      em.row_move_not(col, r, t);
    };
    for (uint32_t r = i; r < g.rows; r += rw) process(process, r);
    for (uint32_t r : self_rows) {
      // three negating hops via rows that are neither sources of this
      // column nor destination rows
      uint32_t y = 0, ycount = 0, hops[2] = {0, 0};
      for (y = 0; y < g.rows && ycount < 2; ++y) {
        bool is_source = (y % rw == i);
        bool is_target = (y >= in.dst_row && y < in.dst_row + tr_rows);
        if (!is_source && !is_target) hops[ycount++] = y;
      }
      if (ycount < 2)
        throw CapacityError("column-transform: no helper rows for in-place bit");
      em.row_move_not(col, r, hops[0]);
      em.row_move_not(col, hops[0], hops[1]);
      em.row_move_not(col, hops[1], r);
    }
  }
}

void check_range(const ColRange& r, const CrossbarGeometry& g,
                 const char* what) {
  if (r.len == 0) throw WidthError(std::string(what) + ": empty field");
  if (r.end() > g.cols)
    throw BoundsError(std::string(what) + ": columns [" +
                      std::to_string(r.start) + "," + std::to_string(r.end()) +
                      ") outside geometry");
}

}  // namespace

const char* opcode_name(Opcode op) {
  return descriptors[static_cast<size_t>(op)].name;
}

const OpcodeDescriptor& opcode_descriptor(Opcode op) {
  return descriptors[static_cast<size_t>(op)];
}

uint32_t reduce_iterations(uint32_t rows) { return ceil_log2(rows); }

uint32_t result_width(const PimInstruction& in, const CrossbarGeometry& g) {
  switch (in.opcode) {
    case Opcode::EqualImm:
    case Opcode::NotEqualImm:
    case Opcode::LessThanImm:
    case Opcode::GreaterThanImm:
    case Opcode::Equal:
    case Opcode::LessThan:
      return 1;
    case Opcode::AddImm:
    case Opcode::Add:
    case Opcode::SetCol:
    case Opcode::ResetCol:
    case Opcode::BitwiseNot:
    case Opcode::BitwiseAnd:
    case Opcode::BitwiseOr:
    case Opcode::ReduceMin:
    case Opcode::ReduceMax:
      return in.src1.len;
    case Opcode::Multiply:
      return in.src1.len + in.src2.len;
    case Opcode::ReduceSum:
      return in.src1.len + reduce_iterations(g.rows);
    case Opcode::ColumnTransform:
      return g.read_width_bits;
    case Opcode::ConfigurePage:
      return 0;
  }
  return 0;
}

uint32_t scratch_cells(const PimInstruction& in, const CrossbarGeometry& g) {
  switch (in.opcode) {
    case Opcode::EqualImm:
      return 1;
    case Opcode::NotEqualImm:
      return 2;
    case Opcode::GreaterThanImm:
      return 4;
    case Opcode::LessThanImm:
      return 5;
    case Opcode::AddImm:
    case Opcode::Add:
    case Opcode::Multiply:
      return 6;
    case Opcode::Equal:
    case Opcode::LessThan:
      return 5;
    case Opcode::SetCol:
    case Opcode::ResetCol:
    case Opcode::BitwiseNot:
      return 0;
    case Opcode::BitwiseAnd:
      return 2;
    case Opcode::BitwiseOr:
      return 1;
    case Opcode::ReduceSum:
      return in.src1.len + reduce_iterations(g.rows) + 5;
    case Opcode::ReduceMin:
    case Opcode::ReduceMax:
      return in.src1.len + 6;
    case Opcode::ColumnTransform:
    case Opcode::ConfigurePage:
      return 0;
  }
  return 0;
}

uint32_t add_carry_column(const PimInstruction& in) {
  return in.compute_region.start + 4 + (in.src1.len % 2);
}

void validate(const PimInstruction& in, const CrossbarGeometry& g) {
  g.validate();
  const auto& d = opcode_descriptor(in.opcode);
  if (in.opcode == Opcode::ConfigurePage) {
    if (in.compute_region.end() > g.cols)
      throw BoundsError("configure_page: compute region outside geometry");
    return;
  }
  check_range(in.src1, g, "src1");
  if (d.has_src2) {
    check_range(in.src2, g, "src2");
    bool broadcast_ok = in.opcode == Opcode::BitwiseAnd ||
                        in.opcode == Opcode::BitwiseOr;
    if (in.opcode == Opcode::Multiply) {
      // widths may differ
    } else if (in.src2.len != in.src1.len &&
               !(broadcast_ok && in.src2.len == 1)) {
      throw WidthError(std::string(opcode_name(in.opcode)) +
                       ": operand widths differ");
    }
  }
  bool arithmetic = in.opcode != Opcode::SetCol &&
                    in.opcode != Opcode::ResetCol &&
                    in.opcode != Opcode::BitwiseNot &&
                    in.opcode != Opcode::BitwiseAnd &&
                    in.opcode != Opcode::BitwiseOr &&
                    in.opcode != Opcode::ColumnTransform;
  if (arithmetic && in.src1.len > 64)
    throw WidthError(std::string(opcode_name(in.opcode)) +
                     ": operand width > 64");
  if (d.has_imm) {
    if (in.imm_bits != in.src1.len)
      throw WidthError("immediate width must match the operand width");
    if (in.imm_bits > 64) throw WidthError("immediate wider than 64 bits");
  }
  ColRange dst{in.dst_col, result_width(in, g)};
  if (in.opcode == Opcode::ColumnTransform) {
    if (g.read_width_bits < 2)
      throw WidthError("column-transform requires read width >= 2");
    if (in.src1.len != 1)
      throw WidthError("column-transform source is a single column");
    if (in.dst_row + g.transform_rows() > g.rows)
      throw CapacityError("column-transform: destination rows overflow");
    if (dst.overlaps(in.src1))
      throw AliasError("column-transform: destination overlaps source");
    check_range(dst, g, "dst");
    return;
  }
  check_range(dst, g, "dst");
  if (in.opcode == Opcode::ReduceSum &&
      in.src1.len + reduce_iterations(g.rows) > 64)
    throw WidthError("reduce_sum: result exceeds 64 bits");
  if (d.uses_dst_row && in.dst_row >= g.rows)
    throw BoundsError("dst_row outside geometry");
  bool in_place = in.opcode == Opcode::SetCol || in.opcode == Opcode::ResetCol;
  if (!in_place) {
    if (dst.overlaps(in.src1) || (d.has_src2 && dst.overlaps(in.src2)))
      throw AliasError(std::string(opcode_name(in.opcode)) +
                       ": destination overlaps a source");
  }
  uint32_t need = scratch_cells(in, g);
  if (need > 0) {
    if (in.compute_region.len < need)
      throw CapacityError(std::string(opcode_name(in.opcode)) + " needs " +
                          std::to_string(need) + " compute cells, region has " +
                          std::to_string(in.compute_region.len));
    ColRange used{in.compute_region.start, need};
    check_range(used, g, "compute region");
    if (used.overlaps(in.src1) || (d.has_src2 && used.overlaps(in.src2)) ||
        used.overlaps(dst))
      throw AliasError("compute region overlaps an operand");
  }
}

std::vector<MicroOp> expand(const PimInstruction& in,
                            const CrossbarGeometry& g) {
  validate(in, g);
  Emitter em;
  uint32_t z = in.compute_region.start;
  switch (in.opcode) {
    case Opcode::ConfigurePage:
      break;  // page metadata only: no crossbar access
    case Opcode::EqualImm:
      emit_equal_imm_core(em, in, in.dst_col, z);
      break;
    case Opcode::NotEqualImm: {
      emit_equal_imm_core(em, in, z + 1, z);
      em.not_(z + 1, in.dst_col);
      break;
    }
    case Opcode::GreaterThanImm:
      emit_greater_scan(em, in, in.dst_col, z, z + 1, z + 2, z + 3);
      break;
    case Opcode::LessThanImm: {
      uint32_t gt = z + 4;
      emit_greater_scan(em, in, gt, z, z + 1, z + 2, z + 3);
      em.nor(gt, z, in.dst_col);  // lt = ~(gt | eq)
      break;
    }
    case Opcode::AddImm: {
      FaCells fa{z, z + 1, z + 2, z + 3};
      uint32_t carry[2] = {z + 4, z + 5};
      em.reset(carry[0]);
      for (uint32_t i = 0; i < in.src1.len; ++i)
        emit_full_adder_imm(em, in.src1.start + i, imm_bit(in, i),
                            carry[i % 2], carry[(i + 1) % 2], in.dst_col + i,
                            fa);
      break;
    }
    case Opcode::Add: {
      FaCells fa{z, z + 1, z + 2, z + 3};
      uint32_t carry[2] = {z + 4, z + 5};
      em.reset(carry[0]);
      for (uint32_t i = 0; i < in.src1.len; ++i)
        emit_full_adder(em, in.src1.start + i, in.src2.start + i, carry[i % 2],
                        carry[(i + 1) % 2], in.dst_col + i, fa);
      break;
    }
    case Opcode::Equal: {
      em.set(in.dst_col);
      for (uint32_t i = 0; i < in.src1.len; ++i) {
        uint32_t a = in.src1.start + i, b = in.src2.start + i;
        em.nor(a, b, z);
        em.nor(a, z, z + 1);
        em.nor(b, z, z + 2);
        em.nor(z + 1, z + 2, z + 3);  // xnor
        em.not_(z + 3, z + 4);        // xor
        em.nor_acc(z + 4, z + 4, in.dst_col);
      }
      break;
    }
    case Opcode::LessThan:
      emit_less_than_core(em, in.src1.start, in.src2.start, in.src1.len,
                          in.dst_col, z + 4, z, z + 1, z + 2, z + 3);
      break;
    case Opcode::SetCol:
      for (uint32_t i = 0; i < in.src1.len; ++i) em.set(in.dst_col + i);
      break;
    case Opcode::ResetCol:
      for (uint32_t i = 0; i < in.src1.len; ++i) em.reset(in.dst_col + i);
      break;
    case Opcode::BitwiseNot:
      for (uint32_t i = 0; i < in.src1.len; ++i)
        em.not_(in.src1.start + i, in.dst_col + i);
      break;
    case Opcode::BitwiseAnd: {
      for (uint32_t i = 0; i < in.src1.len; ++i) {
        uint32_t b =
            in.src2.len == 1 ? in.src2.start : in.src2.start + i;
        em.not_(in.src1.start + i, z);
        em.not_(b, z + 1);
        em.nor(z, z + 1, in.dst_col + i);
      }
      break;
    }
    case Opcode::BitwiseOr: {
      for (uint32_t i = 0; i < in.src1.len; ++i) {
        uint32_t b =
            in.src2.len == 1 ? in.src2.start : in.src2.start + i;
        em.nor(in.src1.start + i, b, z);
        em.not_(z, in.dst_col + i);
      }
      break;
    }
    case Opcode::Multiply: {
      // iterate over the shorter operand; partial products span the longer
      ColRange lhs = in.src1, rhs = in.src2;
      if (lhs.len < rhs.len) std::swap(lhs, rhs);
      uint32_t n = lhs.len, m = rhs.len;
      FaCells fa{z, z + 1, z + 2, z + 3};
      uint32_t carry[2] = {z + 4, z + 5};
      // first partial product straight into the accumulator
      em.not_(rhs.start, z + 1);
      for (uint32_t i = 0; i < n; ++i) {
        em.not_(lhs.start + i, z);
        em.nor(z, z + 1, in.dst_col + i);
      }
      em.reset(in.dst_col + n);
      for (uint32_t j = 1; j < m; ++j) {
        em.reset(carry[0]);
        for (uint32_t i = 0; i < n; ++i) {
          em.not_(lhs.start + i, z);
          em.not_(rhs.start + j, z + 1);
          em.nor(z, z + 1, z + 2);  // pp = a_i & b_j
          uint32_t cout =
              (i + 1 == n) ? in.dst_col + j + n : carry[(i + 1) % 2];
          emit_full_adder(em, z + 2, in.dst_col + j + i, carry[i % 2], cout,
                          in.dst_col + j + i, fa);
        }
      }
      break;
    }
    case Opcode::ReduceSum:
      expand_reduce_sum(em, in, g);
      break;
    case Opcode::ReduceMin:
      expand_reduce_minmax(em, in, g, true);
      break;
    case Opcode::ReduceMax:
      expand_reduce_minmax(em, in, g, false);
      break;
    case Opcode::ColumnTransform:
      expand_column_transform(em, in, g);
      break;
  }
  return std::move(em.ops);
}

uint64_t formula_cycles(const PimInstruction& in, const CrossbarGeometry& g) {
  uint64_t n = in.src1.len;
  uint64_t ones = popcount_imm(in);
  uint64_t zeros = n - ones;
  bool default_geometry = g.rows == 1024 && g.cols == 512;
  uint64_t rows = g.rows;
  uint64_t k = reduce_iterations(g.rows);
  switch (in.opcode) {
    case Opcode::EqualImm:
      return zeros + 3 * ones + 1;
    case Opcode::NotEqualImm:
      return zeros + 3 * ones + 3;
    case Opcode::LessThanImm:
      return 11 * zeros + 3 * ones + 4;
    case Opcode::GreaterThanImm:
      return 11 * zeros + 3 * ones + 2;
    case Opcode::AddImm:
      return 18 * n + 3;
    case Opcode::Equal:
      return 11 * n + 3;
    case Opcode::LessThan:
      return 16 * n + 2;
    case Opcode::SetCol:
    case Opcode::ResetCol:
      return n;
    case Opcode::BitwiseNot:
      return 2 * n;
    case Opcode::BitwiseAnd:
      return 6 * n;
    case Opcode::BitwiseOr:
      return 4 * n;
    case Opcode::Add:
      return 18 * n + 1;
    case Opcode::Multiply: {
      uint64_t m = in.src2.len;
      uint64_t lo = std::min(n, m), hi = std::max(n, m);
      return 24 * lo * hi - 19 * hi + 2 * lo - 1;
    }
    case Opcode::ReduceSum:
      if (default_geometry) return 2254 * n + 3006;
      return k * (20 * n + 18 + 10 * k) - 30 * k + 2 * (n + 1) * (rows - 1) +
             4 * (n + k);
    case Opcode::ReduceMin:
    case Opcode::ReduceMax:
      if (default_geometry) return 2306 * n + 200;
      return 2 * n * (13 * k + rows - 1) + 2 * k;
    case Opcode::ColumnTransform:
      return 2 * rows + 2;
    case Opcode::ConfigurePage:
      return 0;
  }
  return 0;
}

uint32_t formula_cells(const PimInstruction& in, const CrossbarGeometry& g) {
  uint32_t n = in.src1.len;
  switch (in.opcode) {
    case Opcode::EqualImm:
      return 1;
    case Opcode::NotEqualImm:
      return 2;
    case Opcode::LessThanImm:
      return 5;
    case Opcode::GreaterThanImm:
      return 6;
    case Opcode::AddImm:
      return 8;
    case Opcode::Equal:
      return 5;
    case Opcode::LessThan:
      return 6;
    case Opcode::SetCol:
    case Opcode::ResetCol:
    case Opcode::BitwiseNot:
      return 0;
    case Opcode::BitwiseAnd:
      return 2;
    case Opcode::BitwiseOr:
      return 1;
    case Opcode::Add:
    case Opcode::Multiply:
      return 6;
    case Opcode::ReduceSum:
      return n + reduce_iterations(g.rows) + 5;
    case Opcode::ReduceMin:
    case Opcode::ReduceMax:
      return n + 7;
    case Opcode::ColumnTransform:
      return 1;
    case Opcode::ConfigurePage:
      return 0;
  }
  return 0;
}

InstructionCost cost_of(const PimInstruction& in, const CrossbarGeometry& g) {
  InstructionCost cost;
  cost.cycles = expand(in, g).size();
  cost.intermediate_cells = scratch_cells(in, g);
  cost.formula_cycles = formula_cycles(in, g);
  cost.formula_cells = formula_cells(in, g);
  return cost;
}

}  // namespace norsim
