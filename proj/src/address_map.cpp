#include "norsim/address_map.hpp"

#include "norsim/error.hpp"

namespace norsim {

const char* addr_field_name(AddrField f) {
  switch (f) {
    case AddrField::ByteInUnit:
      return "byte_in_unit";
    case AddrField::CrossbarLow:
      return "crossbar_low";
    case AddrField::UnitIndex:
      return "unit_index";
    case AddrField::RowIndex:
      return "row_index";
    case AddrField::CrossbarHigh:
      return "crossbar_high";
  }
  return "?";
}

AddrField addr_field_from_name(const std::string& name) {
  if (name == "byte_in_unit") return AddrField::ByteInUnit;
  if (name == "crossbar_low") return AddrField::CrossbarLow;
  if (name == "unit_index") return AddrField::UnitIndex;
  if (name == "row_index") return AddrField::RowIndex;
  if (name == "crossbar_high") return AddrField::CrossbarHigh;
  throw ParseError("unknown address field '" + name + "'");
}

namespace {

bool is_pow2(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

AddressMap::AddressMap(std::vector<FieldSpec> fields, CrossbarGeometry geom,
                       uint32_t crossbars_per_page)
    : fields_(std::move(fields)), geom_(geom), crossbars_(crossbars_per_page) {
  geom_.validate();
  if (geom_.read_width_bits % 8 != 0)
    throw BoundsError("address map: read width must be a whole byte count");
  if (!is_pow2(crossbars_) || !is_pow2(geom_.rows) ||
      !is_pow2(geom_.units_per_row()) || !is_pow2(unit_bytes()))
    throw BoundsError("address map: all dimensions must be powers of two");
  uint32_t want_byte = ceil_log2(unit_bytes());
  uint32_t want_unit = ceil_log2(geom_.units_per_row());
  uint32_t want_row = ceil_log2(geom_.rows);
  uint32_t want_xbar = ceil_log2(crossbars_);
  uint32_t have_byte = 0, have_unit = 0, have_row = 0, have_xbar = 0;
  offset_bits_ = 0;
  for (const auto& f : fields_) {
    offset_bits_ += f.bits;
    switch (f.field) {
      case AddrField::ByteInUnit:
        have_byte += f.bits;
        break;
      case AddrField::UnitIndex:
        have_unit += f.bits;
        break;
      case AddrField::RowIndex:
        have_row += f.bits;
        break;
      case AddrField::CrossbarLow:
      case AddrField::CrossbarHigh:
        have_xbar += f.bits;
        break;
    }
  }
  if (have_byte != want_byte || have_unit != want_unit ||
      have_row != want_row || have_xbar != want_xbar)
    throw BoundsError("address map: fields do not partition the page offset");
}

AddressMap AddressMap::standard(const CrossbarGeometry& geom,
                                uint32_t crossbars_per_page) {
  uint32_t byte_bits = ceil_log2(geom.read_width_bits / 8);
  uint32_t xbar_bits = ceil_log2(crossbars_per_page);
  // a 64-byte line spans 512/read_width consecutive crossbars
  uint32_t line_span_bits = ceil_log2(512 / geom.read_width_bits);
  uint32_t low_bits = std::min(xbar_bits, line_span_bits);
  std::vector<FieldSpec> fields;
  if (byte_bits) fields.push_back({AddrField::ByteInUnit, byte_bits});
  if (low_bits) fields.push_back({AddrField::CrossbarLow, low_bits});
  uint32_t unit_bits = ceil_log2(geom.units_per_row());
  if (unit_bits) fields.push_back({AddrField::UnitIndex, unit_bits});
  fields.push_back({AddrField::RowIndex, ceil_log2(geom.rows)});
  if (xbar_bits > low_bits)
    fields.push_back({AddrField::CrossbarHigh, xbar_bits - low_bits});
  return AddressMap(std::move(fields), geom, crossbars_per_page);
}

DecodedAddr AddressMap::decode(uint64_t offset) const {
  if (offset >= page_bytes())
    throw BoundsError("address: offset outside the page");
  DecodedAddr a;
  uint32_t xbar_low = 0, xbar_low_bits = 0, xbar_high = 0;
  uint32_t shift = 0;
  for (const auto& f : fields_) {
    uint32_t v = uint32_t((offset >> shift) & ((1ull << f.bits) - 1));
    switch (f.field) {
      case AddrField::ByteInUnit:
        a.byte = v;
        break;
      case AddrField::UnitIndex:
        a.unit = v;
        break;
      case AddrField::RowIndex:
        a.row = v;
        break;
      case AddrField::CrossbarLow:
        xbar_low = v;
        xbar_low_bits = f.bits;
        break;
      case AddrField::CrossbarHigh:
        xbar_high = v;
        break;
    }
    shift += f.bits;
  }
  a.crossbar = (xbar_high << xbar_low_bits) | xbar_low;
  return a;
}

uint64_t AddressMap::encode(const DecodedAddr& a) const {
  uint32_t xbar_low_bits = 0;
  for (const auto& f : fields_)
    if (f.field == AddrField::CrossbarLow) xbar_low_bits = f.bits;
  uint64_t offset = 0;
  uint32_t shift = 0;
  for (const auto& f : fields_) {
    uint64_t v = 0;
    switch (f.field) {
      case AddrField::ByteInUnit:
        v = a.byte;
        break;
      case AddrField::UnitIndex:
        v = a.unit;
        break;
      case AddrField::RowIndex:
        v = a.row;
        break;
      case AddrField::CrossbarLow:
        v = a.crossbar & ((1ull << f.bits) - 1);
        break;
      case AddrField::CrossbarHigh:
        v = a.crossbar >> xbar_low_bits;
        break;
    }
    if (v >= (1ull << f.bits))
      throw BoundsError("address: coordinate outside its field");
    offset |= v << shift;
    shift += f.bits;
  }
  return offset;
}

}  // namespace norsim
