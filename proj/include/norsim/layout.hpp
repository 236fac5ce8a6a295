#ifndef NORSIM_LAYOUT_HPP
#define NORSIM_LAYOUT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "norsim/isa.hpp"
#include "norsim/memory_system.hpp"

namespace norsim {

enum class LogicalType : uint8_t { Integer, Decimal, Date, Enum };
enum class Encoding : uint8_t { Raw, Dictionary, LeadingZero };

const char* logical_type_name(LogicalType t);
const char* encoding_name(Encoding e);

// Attribute values are carried as their logical integers: decimals are
// scaled fixed-point, dates are days since 1992-01-01, enums are carried
// as strings until dictionary encoding.
using Scalar = std::variant<int64_t, std::string>;

struct AttributeSpec {
  std::string name;
  LogicalType type = LogicalType::Integer;
  Encoding encoding = Encoding::LeadingZero;
  uint32_t bit_width = 0;
  int64_t scale = 1;       // decimal attributes: logical = value * scale
  int64_t min_value = 0;   // generator domain, logical units
  int64_t max_value = 0;
  std::vector<std::string> dict_values;  // dictionary-encoded attributes

  bool comparable_by_order() const { return encoding != Encoding::Dictionary; }
};

struct RelationSchema {
  std::string name;
  std::vector<AttributeSpec> attributes;
  uint64_t default_rows = 0;  // generator hint
};

// value <-> code bijection for one dictionary attribute
class Dictionary {
 public:
  explicit Dictionary(const std::vector<std::string>& values);
  uint64_t code(const std::string& value) const;        // DomainError if absent
  const std::string& value(uint64_t code) const;        // DomainError if absent
  uint64_t size() const { return by_code_.size(); }
  uint32_t code_bits() const;

 private:
  std::vector<std::string> by_code_;
  std::map<std::string, uint64_t> by_value_;
};

struct ColumnSlot {
  uint32_t start_col = 0;
  uint32_t bits = 0;
};

// Column assignment of one relation on the crossbar rows of its pages.
struct RelationLayout {
  std::string name;
  CrossbarGeometry geometry;
  std::vector<AttributeSpec> attributes;
  std::vector<ColumnSlot> slots;      // aligned with attributes
  std::vector<Dictionary> dicts;      // aligned; empty dictionary when unused
  uint32_t valid_col = 0;
  uint32_t record_bits = 0;           // attributes plus the valid bit
  ColRange free_region{};             // compute-eligible columns
  std::vector<uint64_t> pages;        // owned pages, in record order
  uint64_t row_count = 0;             // loaded records

  int attribute_index(const std::string& name) const;  // -1 when absent
  const AttributeSpec& attribute(int idx) const { return attributes[idx]; }
  uint64_t records_per_page(const Topology& topo) const {
    return uint64_t(geometry.rows) * topo.crossbars_per_page;
  }
};

RelationLayout plan_layout(const RelationSchema& schema,
                           const CrossbarGeometry& geometry);

// logical value -> stored bits (and back) for one attribute
uint64_t encode_value(const AttributeSpec& attr, const Dictionary& dict,
                      const Scalar& value);
Scalar decode_value(const AttributeSpec& attr, const Dictionary& dict,
                    uint64_t bits);

// Logical integer for comparisons and generation (dictionary code for
// enum attributes).
int64_t logical_value(const AttributeSpec& attr, const Dictionary& dict,
                      const Scalar& value);

// Text form used in .tbl data files.
std::string scalar_to_text(const AttributeSpec& attr, const Scalar& value);
Scalar scalar_from_text(const AttributeSpec& attr, const std::string& text);

int64_t parse_date_days(const std::string& iso);  // days since 1992-01-01
std::string format_date_days(int64_t days);

// Places records one per crossbar row, in load order, allocating pages on
// demand. Returns the number of 64-byte line writes performed.
uint64_t load_records(RelationLayout& layout, PimModule& module,
                      const std::vector<std::vector<Scalar>>& records);

// Reads one record back through the host data path.
std::vector<Scalar> read_record(const RelationLayout& layout,
                                PimModule& module, uint64_t record_id);

}  // namespace norsim

#endif
