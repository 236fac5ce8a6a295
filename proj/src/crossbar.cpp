#include "norsim/crossbar.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "norsim/serialize_util.hpp"

namespace norsim {

std::string MicroOp::to_string() const {
  switch (kind) {
    case MicroOpKind::ColNor2:
      return "ColNOR2 a=" + std::to_string(a) + " b=" + std::to_string(b) +
             " out=" + std::to_string(out);
    case MicroOpKind::ColNot:
      return "ColNOT in=" + std::to_string(a) + " out=" + std::to_string(out);
    case MicroOpKind::ColSet:
      return "ColSET col=" + std::to_string(a);
    case MicroOpKind::ColReset:
      return "ColRESET col=" + std::to_string(a);
    case MicroOpKind::RowNot:
      return "RowNOT col=" + std::to_string(a) +
             " in_row=" + std::to_string(in_row) +
             " out_row=" + std::to_string(out_row);
    case MicroOpKind::RowSet:
      return "RowSET row=" + std::to_string(out_row) +
             " col=" + std::to_string(a);
  }
  return "?";
}

Crossbar::Crossbar(CrossbarGeometry g) : geom_(g) {
  geom_.validate();
  words_ = geom_.row_words();
  uint32_t rem = geom_.rows % 64u;
  last_word_mask_ = rem == 0 ? ~0ull : ((1ull << rem) - 1ull);
  bits_.assign(geom_.cols, std::vector<uint64_t>(words_, 0));
  wear_base_.assign(geom_.cols, 0);
  wear_overlay_.resize(geom_.cols);
  row_overlay_sum_.assign(geom_.rows, 0);
}

void Crossbar::check_col(uint16_t c, const char* what) const {
  if (c >= geom_.cols)
    throw BoundsError(std::string(what) + ": column " + std::to_string(c) +
                      " out of range (cols=" + std::to_string(geom_.cols) +
                      ")");
}

void Crossbar::check_row(uint32_t r, const char* what) const {
  if (r >= geom_.rows)
    throw BoundsError(std::string(what) + ": row " + std::to_string(r) +
                      " out of range (rows=" + std::to_string(geom_.rows) +
                      ")");
}

void Crossbar::bump_cell_wear(uint32_t row, uint32_t col) {
  auto& overlay = wear_overlay_[col];
  if (overlay.empty()) overlay.assign(geom_.rows, 0);
  overlay[row] += 1;
  row_overlay_sum_[row] += 1;
}

void Crossbar::apply(const MicroOp& op, const EnergyModel& energy) {
  switch (op.kind) {
    case MicroOpKind::ColNor2: {
      check_col(op.a, "ColNOR2");
      check_col(op.b, "ColNOR2");
      check_col(op.out, "ColNOR2");
      if (op.out == op.a || op.out == op.b)
        throw AliasError("ColNOR2: output column aliases an input");
      const auto& a = bits_[op.a];
      const auto& b = bits_[op.b];
      auto& out = bits_[op.out];
      for (uint32_t w = 0; w < words_; ++w) out[w] &= ~(a[w] | b[w]);
      wear_base_[op.out] += 1;
      wear_base_total_ += 1;
      logic_aj_ += energy.logic_aj_per_bit * geom_.rows;
      col_ops_ += 1;
      break;
    }
    case MicroOpKind::ColNot: {
      check_col(op.a, "ColNOT");
      check_col(op.out, "ColNOT");
      if (op.out == op.a)
        throw AliasError("ColNOT: output column aliases the input");
      const auto& in = bits_[op.a];
      auto& out = bits_[op.out];
      for (uint32_t w = 0; w < words_; ++w) out[w] &= ~in[w];
      wear_base_[op.out] += 1;
      wear_base_total_ += 1;
      logic_aj_ += energy.logic_aj_per_bit * geom_.rows;
      col_ops_ += 1;
      break;
    }
    case MicroOpKind::ColSet: {
      check_col(op.a, "ColSET");
      auto& col = bits_[op.a];
      for (uint32_t w = 0; w < words_; ++w) col[w] = ~0ull;
      col[words_ - 1] &= last_word_mask_;
      wear_base_[op.a] += 1;
      wear_base_total_ += 1;
      logic_aj_ += energy.logic_aj_per_bit * geom_.rows;
      col_ops_ += 1;
      break;
    }
    case MicroOpKind::ColReset: {
      check_col(op.a, "ColRESET");
      auto& col = bits_[op.a];
      std::fill(col.begin(), col.end(), 0);
      wear_base_[op.a] += 1;
      wear_base_total_ += 1;
      logic_aj_ += energy.logic_aj_per_bit * geom_.rows;
      col_ops_ += 1;
      break;
    }
    case MicroOpKind::RowNot: {
      check_col(op.a, "RowNOT");
      check_row(op.in_row, "RowNOT");
      check_row(op.out_row, "RowNOT");
      if (op.in_row == op.out_row)
        throw AliasError("RowNOT: output row aliases the input row");
      auto& col = bits_[op.a];
      bool in = (col[op.in_row >> 6] >> (op.in_row & 63u)) & 1u;
      if (in) col[op.out_row >> 6] &= ~(1ull << (op.out_row & 63u));
      bump_cell_wear(op.out_row, op.a);
      logic_aj_ += energy.logic_aj_per_bit;
      row_ops_ += 1;
      break;
    }
    case MicroOpKind::RowSet: {
      check_col(op.a, "RowSET");
      check_row(op.out_row, "RowSET");
      bits_[op.a][op.out_row >> 6] |= 1ull << (op.out_row & 63u);
      bump_cell_wear(op.out_row, op.a);
      logic_aj_ += energy.logic_aj_per_bit;
      row_ops_ += 1;
      break;
    }
  }
}

uint64_t Crossbar::read_row_bits(uint32_t row, uint32_t unit_index,
                                 const EnergyModel& energy) {
  check_row(row, "read_row_bits");
  if (unit_index >= geom_.units_per_row())
    throw BoundsError("read_row_bits: unit " + std::to_string(unit_index) +
                      " out of range");
  uint32_t w = geom_.read_width_bits;
  uint64_t value = 0;
  uint32_t base = unit_index * w;
  for (uint32_t i = 0; i < w; ++i)
    value |= uint64_t(cell(row, base + i)) << i;
  read_aj_ += energy.read_aj_per_bit * w;
  reads_ += 1;
  return value;
}

void Crossbar::write_row_bits(uint32_t row, uint32_t unit_index, uint64_t v,
                              const EnergyModel& energy) {
  check_row(row, "write_row_bits");
  if (unit_index >= geom_.units_per_row())
    throw BoundsError("write_row_bits: unit " + std::to_string(unit_index) +
                      " out of range");
  uint32_t w = geom_.read_width_bits;
  uint32_t base = unit_index * w;
  uint64_t word_bit = 1ull << (row & 63u);
  for (uint32_t i = 0; i < w; ++i) {
    auto& col = bits_[base + i];
    if ((v >> i) & 1u)
      col[row >> 6] |= word_bit;
    else
      col[row >> 6] &= ~word_bit;
    // every cell of the written unit counts, changed or not
    bump_cell_wear(row, base + i);
  }
  write_aj_ += energy.write_aj_per_bit * w;
  data_writes_ += 1;
}

bool Crossbar::cell(uint32_t row, uint32_t col) const {
  return (bits_[col][row >> 6] >> (row & 63u)) & 1u;
}

uint64_t Crossbar::write_count(uint32_t row, uint32_t col) const {
  uint64_t extra =
      wear_overlay_[col].empty() ? 0 : wear_overlay_[col][row];
  return wear_base_[col] + extra;
}

std::pair<uint32_t, uint64_t> Crossbar::max_row_write_ops() const {
  uint32_t best_row = 0;
  uint64_t best = row_overlay_sum_[0];
  for (uint32_t r = 1; r < geom_.rows; ++r) {
    if (row_overlay_sum_[r] > best) {
      best = row_overlay_sum_[r];
      best_row = r;
    }
  }
  return {best_row, best + wear_base_total_};
}

std::vector<uint64_t> Crossbar::row_write_sums() const {
  std::vector<uint64_t> sums(geom_.rows);
  for (uint32_t r = 0; r < geom_.rows; ++r)
    sums[r] = wear_base_total_ + row_overlay_sum_[r];
  return sums;
}

uint64_t Crossbar::total_write_ops() const {
  uint64_t total = wear_base_total_ * geom_.rows;
  for (uint32_t r = 0; r < geom_.rows; ++r) total += row_overlay_sum_[r];
  return total;
}

void Crossbar::preset_cell(uint32_t row, uint32_t col, bool value) {
  check_row(row, "preset_cell");
  check_col(static_cast<uint16_t>(col), "preset_cell");
  auto& c = bits_[col];
  if (value)
    c[row >> 6] |= 1ull << (row & 63u);
  else
    c[row >> 6] &= ~(1ull << (row & 63u));
}

void Crossbar::preset_field(uint32_t row, uint32_t start_col, uint32_t width,
                            uint64_t value) {
  for (uint32_t i = 0; i < width; ++i)
    preset_cell(row, start_col + i, (value >> i) & 1u);
}

uint64_t Crossbar::peek_field(uint32_t row, uint32_t start_col,
                              uint32_t width) const {
  uint64_t v = 0;
  for (uint32_t i = 0; i < width; ++i)
    v |= uint64_t(cell(row, start_col + i)) << i;
  return v;
}

void Crossbar::serialize(std::ostream& os) const {
  for (const auto& col : bits_) write_u64_vec(os, col);
  write_u64_vec(os, wear_base_);
  uint32_t overlays = 0;
  for (const auto& o : wear_overlay_)
    if (!o.empty()) ++overlays;
  write_u32(os, overlays);
  for (uint32_t c = 0; c < geom_.cols; ++c) {
    if (wear_overlay_[c].empty()) continue;
    write_u32(os, c);
    write_u32_vec(os, wear_overlay_[c]);
  }
  write_u64(os, logic_aj_);
  write_u64(os, read_aj_);
  write_u64(os, write_aj_);
  write_u64(os, reads_);
  write_u64(os, col_ops_);
  write_u64(os, row_ops_);
  write_u64(os, data_writes_);
}

Crossbar Crossbar::deserialize(std::istream& is, const CrossbarGeometry& g) {
  Crossbar xb(g);
  for (auto& col : xb.bits_) col = read_u64_vec(is, xb.words_);
  xb.wear_base_ = read_u64_vec(is, g.cols);
  xb.wear_base_total_ = 0;
  for (uint64_t v : xb.wear_base_) xb.wear_base_total_ += v;
  uint32_t overlays = read_u32(is);
  for (uint32_t i = 0; i < overlays; ++i) {
    uint32_t c = read_u32(is);
    if (c >= g.cols) throw IoError("crossbar image: overlay column corrupt");
    xb.wear_overlay_[c] = read_u32_vec(is, g.rows);
  }
  std::fill(xb.row_overlay_sum_.begin(), xb.row_overlay_sum_.end(), 0);
  for (uint32_t c = 0; c < g.cols; ++c) {
    if (xb.wear_overlay_[c].empty()) continue;
    for (uint32_t r = 0; r < g.rows; ++r)
      xb.row_overlay_sum_[r] += xb.wear_overlay_[c][r];
  }
  xb.logic_aj_ = read_u64(is);
  xb.read_aj_ = read_u64(is);
  xb.write_aj_ = read_u64(is);
  xb.reads_ = read_u64(is);
  xb.col_ops_ = read_u64(is);
  xb.row_ops_ = read_u64(is);
  xb.data_writes_ = read_u64(is);
  return xb;
}

bool Crossbar::state_equals(const Crossbar& other) const {
  return geom_ == other.geom_ && bits_ == other.bits_ &&
         wear_base_ == other.wear_base_ &&
         wear_overlay_ == other.wear_overlay_ && logic_aj_ == other.logic_aj_ &&
         read_aj_ == other.read_aj_ && write_aj_ == other.write_aj_ &&
         reads_ == other.reads_;
}

}  // namespace norsim
