#ifndef NORSIM_ADDRESS_MAP_HPP
#define NORSIM_ADDRESS_MAP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "norsim/geometry.hpp"

namespace norsim {

// Which hardware coordinate a run of page-offset bits selects.
enum class AddrField : uint8_t {
  ByteInUnit,
  CrossbarLow,
  UnitIndex,
  RowIndex,
  CrossbarHigh,
};

const char* addr_field_name(AddrField f);
AddrField addr_field_from_name(const std::string& name);

struct FieldSpec {
  AddrField field;
  uint32_t bits;
  bool operator==(const FieldSpec&) const = default;
};

struct DecodedAddr {
  uint32_t crossbar = 0;
  uint32_t row = 0;
  uint32_t unit = 0;
  uint32_t byte = 0;  // byte within the read unit
  bool operator==(const DecodedAddr&) const = default;
};

// Bijective mapping between a page offset and (crossbar, row, byte-in-row).
// Field placement is ordered from the least significant offset bit up and
// must partition the offset bits exactly.
class AddressMap {
 public:
  AddressMap(std::vector<FieldSpec> fields, CrossbarGeometry geom,
             uint32_t crossbars_per_page);

  // Standard placement: byte-in-unit, low crossbar bits covering one
  // 64-byte line, unit index, row index, remaining crossbar bits.
  static AddressMap standard(const CrossbarGeometry& geom,
                             uint32_t crossbars_per_page);

  DecodedAddr decode(uint64_t offset) const;
  uint64_t encode(const DecodedAddr& a) const;

  uint32_t page_offset_bits() const { return offset_bits_; }
  uint64_t page_bytes() const { return 1ull << offset_bits_; }
  uint32_t crossbars_per_page() const { return crossbars_; }
  uint32_t unit_bytes() const { return geom_.read_width_bits / 8; }
  // crossbars touched by one 64-byte line access
  uint32_t crossbars_per_line() const {
    uint32_t span = 512 / geom_.read_width_bits;
    return span < crossbars_ ? span : crossbars_;
  }
  const std::vector<FieldSpec>& fields() const { return fields_; }
  const CrossbarGeometry& geometry() const { return geom_; }

 private:
  std::vector<FieldSpec> fields_;
  CrossbarGeometry geom_;
  uint32_t crossbars_;
  uint32_t offset_bits_;
};

}  // namespace norsim

#endif
