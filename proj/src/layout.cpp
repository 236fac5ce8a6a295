#include "norsim/layout.hpp"

#include <algorithm>
#include <cstdio>

namespace norsim {

const char* logical_type_name(LogicalType t) {
  switch (t) {
    case LogicalType::Integer:
      return "integer";
    case LogicalType::Decimal:
      return "decimal";
    case LogicalType::Date:
      return "date";
    case LogicalType::Enum:
      return "enum";
  }
  return "?";
}

const char* encoding_name(Encoding e) {
  switch (e) {
    case Encoding::Raw:
      return "raw";
    case Encoding::Dictionary:
      return "dictionary";
    case Encoding::LeadingZero:
      return "leading_zero_suppressed";
  }
  return "?";
}

Dictionary::Dictionary(const std::vector<std::string>& values)
    : by_code_(values) {
  for (uint64_t i = 0; i < by_code_.size(); ++i) {
    if (!by_value_.emplace(by_code_[i], i).second)
      throw DomainError("dictionary: duplicate value '" + by_code_[i] + "'");
  }
}

uint64_t Dictionary::code(const std::string& value) const {
  auto it = by_value_.find(value);
  if (it == by_value_.end())
    throw DomainError("value '" + value + "' is not in the dictionary");
  return it->second;
}

const std::string& Dictionary::value(uint64_t code) const {
  if (code >= by_code_.size())
    throw DomainError("dictionary code " + std::to_string(code) +
                      " out of range");
  return by_code_[code];
}

uint32_t Dictionary::code_bits() const {
  uint32_t bits = ceil_log2(by_code_.size());
  return bits == 0 ? 1 : bits;
}

int RelationLayout::attribute_index(const std::string& attr) const {
  for (size_t i = 0; i < attributes.size(); ++i)
    if (attributes[i].name == attr) return int(i);
  return -1;
}

RelationLayout plan_layout(const RelationSchema& schema,
                           const CrossbarGeometry& geometry) {
  geometry.validate();
  RelationLayout layout;
  layout.name = schema.name;
  layout.geometry = geometry;
  layout.attributes = schema.attributes;
  uint32_t col = 0;
  for (auto& attr : layout.attributes) {
    if (attr.encoding == Encoding::Dictionary) {
      layout.dicts.emplace_back(attr.dict_values);
      uint32_t bits = layout.dicts.back().code_bits();
      if (attr.bit_width == 0) attr.bit_width = bits;
      if (attr.bit_width < bits)
        throw CapacityError("attribute " + attr.name +
                            ": bit width too small for its dictionary");
    } else {
      layout.dicts.emplace_back(std::vector<std::string>{});
      if (attr.bit_width == 0 || attr.bit_width > 63)
        throw CapacityError("attribute " + attr.name +
                            ": bit width must be in [1,63]");
    }
    layout.slots.push_back({col, attr.bit_width});
    col += attr.bit_width;
  }
  layout.valid_col = col;
  layout.record_bits = col + 1;
  if (layout.record_bits > geometry.cols)
    throw CapacityError("relation " + schema.name + ": record of " +
                        std::to_string(layout.record_bits) +
                        " bits does not fit " +
                        std::to_string(geometry.cols) + " columns");
  layout.free_region = {layout.record_bits,
                        geometry.cols - layout.record_bits};
  return layout;
}

uint64_t encode_value(const AttributeSpec& attr, const Dictionary& dict,
                      const Scalar& value) {
  if (attr.encoding == Encoding::Dictionary) {
    if (!std::holds_alternative<std::string>(value))
      throw DomainError("attribute " + attr.name + " expects a string");
    return dict.code(std::get<std::string>(value));
  }
  if (!std::holds_alternative<int64_t>(value))
    throw DomainError("attribute " + attr.name + " expects a number");
  int64_t v = std::get<int64_t>(value);
  if (v < 0)
    throw DomainError("attribute " + attr.name + ": negative value");
  if (attr.bit_width < 64 && uint64_t(v) >= (1ull << attr.bit_width))
    throw DomainError("attribute " + attr.name + ": value " +
                      std::to_string(v) + " exceeds " +
                      std::to_string(attr.bit_width) + " bits");
  return uint64_t(v);
}

Scalar decode_value(const AttributeSpec& attr, const Dictionary& dict,
                    uint64_t bits) {
  if (attr.encoding == Encoding::Dictionary) return dict.value(bits);
  return int64_t(bits);
}

int64_t logical_value(const AttributeSpec& attr, const Dictionary& dict,
                      const Scalar& value) {
  return int64_t(encode_value(attr, dict, value));
}

namespace {

// proleptic Gregorian day arithmetic anchored at 1992-01-01
int64_t days_from_civil(int64_t y, int64_t m, int64_t d) {
  y -= m <= 2;
  int64_t era = (y >= 0 ? y : y - 399) / 400;
  int64_t yoe = y - era * 400;
  int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

void civil_from_days(int64_t z, int64_t& y, int64_t& m, int64_t& d) {
  z += 719468;
  int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  int64_t doe = z - era * 146097;
  int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = yoe + era * 400;
  int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  int64_t mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

const int64_t epoch_1992 = days_from_civil(1992, 1, 1);

}  // namespace

int64_t parse_date_days(const std::string& iso) {
  int y, m, d;
  if (std::sscanf(iso.c_str(), "%d-%d-%d", &y, &m, &d) != 3)
    throw ParseError("bad date literal '" + iso + "'");
  return days_from_civil(y, m, d) - epoch_1992;
}

std::string format_date_days(int64_t days) {
  int64_t y, m, d;
  civil_from_days(days + epoch_1992, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", int(y), int(m), int(d));
  return buf;
}

std::string scalar_to_text(const AttributeSpec& attr, const Scalar& value) {
  if (attr.encoding == Encoding::Dictionary)
    return std::get<std::string>(value);
  int64_t v = std::get<int64_t>(value);
  switch (attr.type) {
    case LogicalType::Integer:
      return std::to_string(v);
    case LogicalType::Decimal: {
      int64_t whole = v / attr.scale, frac = v % attr.scale;
      int digits = 0;
      for (int64_t s = attr.scale; s > 1; s /= 10) ++digits;
      std::string f = std::to_string(frac);
      while (int(f.size()) < digits) f.insert(f.begin(), '0');
      return std::to_string(whole) + "." + f;
    }
    case LogicalType::Date:
      return format_date_days(v);
    case LogicalType::Enum:
      return std::to_string(v);
  }
  return std::to_string(v);
}

Scalar scalar_from_text(const AttributeSpec& attr, const std::string& text) {
  if (attr.encoding == Encoding::Dictionary) return text;
  switch (attr.type) {
    case LogicalType::Date:
      return parse_date_days(text);
    case LogicalType::Decimal: {
      auto dot = text.find('.');
      int64_t whole = std::stoll(dot == std::string::npos
                                     ? text
                                     : text.substr(0, dot));
      int64_t frac = 0, frac_scale = 1;
      if (dot != std::string::npos) {
        std::string f = text.substr(dot + 1);
        frac = f.empty() ? 0 : std::stoll(f);
        for (size_t i = 0; i < f.size(); ++i) frac_scale *= 10;
      }
      // normalise the fraction to the attribute scale exactly
      int64_t v = whole * attr.scale;
      if (frac != 0) {
        if ((frac * attr.scale) % frac_scale != 0)
          throw DomainError("attribute " + attr.name + ": '" + text +
                            "' is finer than scale 1/" +
                            std::to_string(attr.scale));
        v += frac * attr.scale / frac_scale;
      }
      return v;
    }
    default:
      return int64_t(std::stoll(text));
  }
}

namespace {

void encode_record_bits(const RelationLayout& layout,
                        const std::vector<Scalar>& record,
                        std::vector<uint8_t>& row) {
  if (record.size() != layout.attributes.size())
    throw DomainError("record arity does not match the schema");
  auto put_bit = [&](uint32_t col, bool v) {
    if (v) row[col >> 3] |= uint8_t(1u << (col & 7));
  };
  for (size_t a = 0; a < record.size(); ++a) {
    uint64_t bits =
        encode_value(layout.attributes[a], layout.dicts[a], record[a]);
    for (uint32_t i = 0; i < layout.slots[a].bits; ++i)
      put_bit(layout.slots[a].start_col + i, (bits >> i) & 1);
  }
  put_bit(layout.valid_col, true);
}

}  // namespace

uint64_t load_records(RelationLayout& layout, PimModule& module,
                      const std::vector<std::vector<Scalar>>& records) {
  const auto& map = module.address_map();
  const auto& geom = layout.geometry;
  const uint32_t rows = geom.rows;
  const uint32_t row_bytes = geom.cols / 8;
  const uint32_t unit_bytes = map.unit_bytes();
  const uint32_t units = geom.units_per_row();
  const uint32_t line_span = map.crossbars_per_line();
  const uint32_t xbars_per_page = map.crossbars_per_page();
  uint64_t per_page = uint64_t(rows) * xbars_per_page;
  uint64_t line_writes = 0;

  for (uint64_t first = 0; first < records.size(); first += per_page) {
    uint64_t page = module.allocate_page();
    layout.pages.push_back(page);
    uint64_t count = std::min<uint64_t>(per_page, records.size() - first);
    // encode this page's records: row-major per crossbar
    std::vector<std::vector<uint8_t>> encoded(count);
    for (uint64_t i = 0; i < count; ++i) {
      encoded[i].assign(row_bytes, 0);
      encode_record_bits(layout, records[first + i], encoded[i]);
    }
    uint32_t used_xbars = uint32_t((count + rows - 1) / rows);
    // one line carries the same (row, unit) slice of line_span crossbars
    std::vector<uint8_t> line(uint64_t(line_span) * unit_bytes);
    for (uint32_t g = 0; g < used_xbars; g += line_span) {
      uint32_t span = std::min(line_span, xbars_per_page - g);
      for (uint32_t r = 0; r < rows; ++r) {
        bool any = false;
        for (uint32_t x = g; x < g + span && !any; ++x)
          any = uint64_t(x) * rows + r < count;
        if (!any) continue;
        for (uint32_t u = 0; u < units; ++u) {
          std::fill(line.begin(), line.end(), 0);
          for (uint32_t x = 0; x < span; ++x) {
            uint64_t rec = uint64_t(g + x) * rows + r;
            if (rec >= count) continue;
            for (uint32_t b = 0; b < unit_bytes; ++b)
              line[uint64_t(x) * unit_bytes + b] =
                  encoded[rec][uint64_t(u) * unit_bytes + b];
          }
          uint64_t offset =
              map.encode({g, r, u, 0});
          module.host_write(page, offset,
                            std::span<const uint8_t>(
                                line.data(), uint64_t(span) * unit_bytes));
          ++line_writes;
        }
      }
    }
  }
  layout.row_count = records.size();
  return line_writes;
}

std::vector<Scalar> read_record(const RelationLayout& layout,
                                PimModule& module, uint64_t record_id) {
  const auto& map = module.address_map();
  const auto& geom = layout.geometry;
  uint64_t per_page = layout.records_per_page(module.config().topology);
  uint64_t page = layout.pages.at(record_id / per_page);
  uint64_t in_page = record_id % per_page;
  uint32_t xbar = uint32_t(in_page / geom.rows);
  uint32_t row = uint32_t(in_page % geom.rows);
  // gather the whole record row of this crossbar
  std::vector<uint8_t> row_bytes(geom.cols / 8);
  uint32_t ub = map.unit_bytes();
  for (uint32_t u = 0; u < geom.units_per_row(); ++u) {
    auto bytes = module.host_read(page, map.encode({xbar, row, u, 0}), ub);
    std::copy(bytes.begin(), bytes.end(), row_bytes.begin() + u * ub);
  }
  auto get_bits = [&](uint32_t start, uint32_t width) {
    uint64_t v = 0;
    for (uint32_t i = 0; i < width; ++i) {
      uint32_t col = start + i;
      v |= uint64_t((row_bytes[col >> 3] >> (col & 7)) & 1) << i;
    }
    return v;
  };
  std::vector<Scalar> out;
  for (size_t a = 0; a < layout.attributes.size(); ++a)
    out.push_back(decode_value(
        layout.attributes[a], layout.dicts[a],
        get_bits(layout.slots[a].start_col, layout.slots[a].bits)));
  return out;
}

}  // namespace norsim
