#ifndef NORSIM_CROSSBAR_HPP
#define NORSIM_CROSSBAR_HPP

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "norsim/geometry.hpp"
#include "norsim/microop.hpp"

namespace norsim {

// One memristive crossbar: a rows x cols bit matrix with per-cell wear
// counters and an energy ledger.
//
// Logic gates follow the MAGIC switching behaviour: executing a NOR/NOT
// pulls the output cell toward 0 when the gate evaluates to 0 and leaves
// it untouched otherwise, so the effective result is
//     out <- out AND gate(inputs).
// Writing a 1 through a gate therefore requires an explicit SET of the
// output cell in a previous cycle; expansions emit those SETs and they
// are counted in cycles, energy, and wear. Sequences that rely on the
// AND-accumulate effect (skipping the SET) are legal and are what makes
// the controller's per-bit conjunction steps single-cycle.
//
// Every micro-op output counts one wear unit per written cell whether or
// not the stored value changes, and SET/RESET wear weighs the same as a
// gate output (flagged in reports).
class Crossbar {
 public:
  explicit Crossbar(CrossbarGeometry g);

  const CrossbarGeometry& geometry() const { return geom_; }

  // --- micro-op execution -------------------------------------------------
  void apply(const MicroOp& op, const EnergyModel& energy);

  // --- row-granular data port ---------------------------------------------
  // Returns bits [unit*w, (unit+1)*w) of the row, LSB-first.
  uint64_t read_row_bits(uint32_t row, uint32_t unit_index,
                         const EnergyModel& energy);
  void write_row_bits(uint32_t row, uint32_t unit_index, uint64_t bits,
                      const EnergyModel& energy);

  // --- inspection ----------------------------------------------------------
  bool cell(uint32_t row, uint32_t col) const;
  uint64_t write_count(uint32_t row, uint32_t col) const;
  // Row with the largest summed write count, and that sum.
  std::pair<uint32_t, uint64_t> max_row_write_ops() const;
  // Summed write count of every row, for wear deltas between snapshots.
  std::vector<uint64_t> row_write_sums() const;
  uint64_t total_write_ops() const;
  double ops_per_cell() const {
    return double(max_row_write_ops().second) / double(geom_.cols);
  }

  uint64_t energy_aj() const { return logic_aj_ + read_aj_ + write_aj_; }
  uint64_t logic_energy_aj() const { return logic_aj_; }
  uint64_t read_energy_aj() const { return read_aj_; }
  uint64_t write_energy_aj() const { return write_aj_; }

  uint64_t reads() const { return reads_; }
  uint64_t col_ops() const { return col_ops_; }
  uint64_t row_ops() const { return row_ops_; }
  uint64_t data_writes() const { return data_writes_; }

  // Test/loader fixture: place bits without touching any counter.
  void preset_cell(uint32_t row, uint32_t col, bool value);
  void preset_field(uint32_t row, uint32_t start_col, uint32_t width,
                    uint64_t value);
  uint64_t peek_field(uint32_t row, uint32_t start_col, uint32_t width) const;

  void serialize(std::ostream& os) const;
  static Crossbar deserialize(std::istream& is, const CrossbarGeometry& g);

  bool state_equals(const Crossbar& other) const;

 private:
  void check_col(uint16_t c, const char* what) const;
  void check_row(uint32_t r, const char* what) const;
  void bump_cell_wear(uint32_t row, uint32_t col);

  CrossbarGeometry geom_;
  uint32_t words_;
  uint64_t last_word_mask_;
  // Column-major bit planes: bits_[col][word], row r at bit (r % 64) of
  // word (r / 64). High bits of the last word stay zero.
  std::vector<std::vector<uint64_t>> bits_;
  // Wear = uniform per-column base (column-wise ops hit every row) plus a
  // lazily allocated per-cell overlay for row ops and data writes.
  std::vector<uint64_t> wear_base_;
  std::vector<std::vector<uint32_t>> wear_overlay_;
  std::vector<uint64_t> row_overlay_sum_;
  uint64_t wear_base_total_ = 0;  // sum over columns of wear_base_

  uint64_t logic_aj_ = 0;
  uint64_t read_aj_ = 0;
  uint64_t write_aj_ = 0;
  uint64_t reads_ = 0;
  uint64_t col_ops_ = 0;
  uint64_t row_ops_ = 0;
  uint64_t data_writes_ = 0;
};

}  // namespace norsim

#endif
