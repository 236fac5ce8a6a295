#ifndef NORSIM_GEOMETRY_HPP
#define NORSIM_GEOMETRY_HPP

#include <cstdint>

#include "norsim/error.hpp"

namespace norsim {

// Size of one memristive crossbar and the width of its read port.
struct CrossbarGeometry {
  uint32_t rows = 1024;
  uint32_t cols = 512;
  uint32_t read_width_bits = 16;  // bits returned per crossbar per read

  void validate() const {
    if (rows < 2) throw BoundsError("geometry: rows must be >= 2");
    if (cols < 2) throw BoundsError("geometry: cols must be >= 2");
    if (read_width_bits == 0 || read_width_bits > 64)
      throw BoundsError("geometry: read_width_bits must be in [1,64]");
    if (read_width_bits > cols)
      throw BoundsError("geometry: read_width_bits exceeds cols");
    if (cols % read_width_bits != 0)
      throw BoundsError("geometry: read_width_bits must divide cols");
  }

  uint32_t units_per_row() const { return cols / read_width_bits; }
  uint32_t row_words() const { return (rows + 63u) / 64u; }
  // Rows a column-transform result occupies.
  uint32_t transform_rows() const {
    return (rows + read_width_bits - 1u) / read_width_bits;
  }

  bool operator==(const CrossbarGeometry&) const = default;
};

inline uint32_t ceil_log2(uint64_t v) {
  uint32_t k = 0;
  while ((1ull << k) < v) ++k;
  return k;
}

// Per-bit energy constants, kept in integer attojoules so ledgers can be
// compared exactly. Defaults: 81.6 fJ logic, 0.84 pJ read, 6.9 pJ write.
struct EnergyModel {
  uint64_t logic_aj_per_bit = 81600;
  uint64_t read_aj_per_bit = 840000;
  uint64_t write_aj_per_bit = 6900000;

  static constexpr uint64_t aj_per_fj = 1000;
  static constexpr uint64_t aj_per_pj = 1000000;

  double logic_fj_per_bit() const { return double(logic_aj_per_bit) / 1e3; }
  double read_pj_per_bit() const { return double(read_aj_per_bit) / 1e6; }
  double write_pj_per_bit() const { return double(write_aj_per_bit) / 1e6; }

  bool operator==(const EnergyModel&) const = default;
};

// Latency/bandwidth knobs for the request timeline.
struct TimingModel {
  uint64_t logic_cycle_ns = 30;
  uint64_t read_latency_ns = 100;
  uint64_t write_latency_ns = 100;
  uint64_t link_bytes_per_us = 25000;  // 25 GB/s

  void validate() const {
    if (logic_cycle_ns == 0 || read_latency_ns == 0 ||
        write_latency_ns == 0 || link_bytes_per_us == 0)
      throw BoundsError("timing: all values must be positive");
  }

  bool operator==(const TimingModel&) const = default;
};

}  // namespace norsim

#endif
