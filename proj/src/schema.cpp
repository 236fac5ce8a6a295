#include "norsim/schema.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace norsim {

using nlohmann::json;

namespace {

LogicalType type_from_name(const std::string& s) {
  if (s == "integer") return LogicalType::Integer;
  if (s == "decimal") return LogicalType::Decimal;
  if (s == "date") return LogicalType::Date;
  if (s == "enum") return LogicalType::Enum;
  throw ParseError("schema: unknown type '" + s + "'");
}

Encoding encoding_from_name(const std::string& s) {
  if (s == "raw") return Encoding::Raw;
  if (s == "dictionary") return Encoding::Dictionary;
  if (s == "leading_zero_suppressed" || s == "lzs")
    return Encoding::LeadingZero;
  throw ParseError("schema: unknown encoding '" + s + "'");
}

int64_t domain_value(const AttributeSpec& attr, const json& v) {
  if (v.is_string()) {
    if (attr.type == LogicalType::Date)
      return parse_date_days(v.get<std::string>());
    throw ParseError("schema: string domain bound on attribute " + attr.name);
  }
  if (attr.type == LogicalType::Decimal)
    return int64_t(llround(v.get<double>() * double(attr.scale)));
  return v.get<int64_t>();
}

}  // namespace

std::vector<RelationSchema> parse_schema_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("schema: ") + e.what());
  }
  std::vector<RelationSchema> out;
  for (const auto& rel : j.at("relations")) {
    RelationSchema schema;
    schema.name = rel.at("name").get<std::string>();
    schema.default_rows = rel.value("rows", 0ull);
    for (const auto& a : rel.at("attributes")) {
      AttributeSpec attr;
      attr.name = a.at("name").get<std::string>();
      attr.type = type_from_name(a.value("type", "integer"));
      attr.encoding = encoding_from_name(
          a.value("encoding", attr.type == LogicalType::Enum
                                  ? "dictionary"
                                  : "leading_zero_suppressed"));
      attr.scale = a.value("scale", 1);
      attr.bit_width = a.value("bits", 0u);
      if (a.contains("values"))
        attr.dict_values = a["values"].get<std::vector<std::string>>();
      if (attr.encoding == Encoding::Dictionary && attr.dict_values.empty())
        throw ParseError("schema: attribute " + attr.name +
                         " is dictionary encoded but lists no values");
      if (a.contains("min")) attr.min_value = domain_value(attr, a["min"]);
      if (a.contains("max")) attr.max_value = domain_value(attr, a["max"]);
      schema.attributes.push_back(std::move(attr));
    }
    out.push_back(std::move(schema));
  }
  return out;
}

std::vector<RelationSchema> load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_schema_json(ss.str());
}

std::string schema_to_json(const std::vector<RelationSchema>& schemas) {
  json relations = json::array();
  for (const auto& s : schemas) {
    json attrs = json::array();
    for (const auto& a : s.attributes) {
      json attr = {{"name", a.name},
                   {"type", logical_type_name(a.type)},
                   {"encoding", encoding_name(a.encoding)},
                   {"bits", a.bit_width}};
      if (a.scale != 1) attr["scale"] = a.scale;
      if (!a.dict_values.empty()) attr["values"] = a.dict_values;
      if (a.type == LogicalType::Date) {
        attr["min"] = format_date_days(a.min_value);
        attr["max"] = format_date_days(a.max_value);
      } else if (a.min_value != 0 || a.max_value != 0) {
        if (a.type == LogicalType::Decimal) {
          attr["min"] = double(a.min_value) / double(a.scale);
          attr["max"] = double(a.max_value) / double(a.scale);
        } else {
          attr["min"] = a.min_value;
          attr["max"] = a.max_value;
        }
      }
      attrs.push_back(std::move(attr));
    }
    relations.push_back(
        {{"name", s.name}, {"rows", s.default_rows}, {"attributes", attrs}});
  }
  return json{{"relations", relations}}.dump(2);
}

std::vector<RelationSchema> desk_schema() {
  // lineitem-like: 190 attribute bits, 191 with the valid bit
  RelationSchema li;
  li.name = "lineitem";
  li.default_rows = 8192;
  auto add = [](RelationSchema& s, const std::string& name, LogicalType t,
                Encoding e, uint32_t bits, int64_t lo, int64_t hi,
                int64_t scale = 1,
                std::vector<std::string> values = {}) {
    AttributeSpec a;
    a.name = name;
    a.type = t;
    a.encoding = e;
    a.bit_width = bits;
    a.min_value = lo;
    a.max_value = hi;
    a.scale = scale;
    a.dict_values = std::move(values);
    s.attributes.push_back(std::move(a));
  };
  using LT = LogicalType;
  using EN = Encoding;
  add(li, "l_orderkey", LT::Integer, EN::LeadingZero, 40, 1, 6000000);
  add(li, "l_partkey", LT::Integer, EN::LeadingZero, 30, 1, 200000);
  add(li, "l_suppkey", LT::Integer, EN::LeadingZero, 24, 1, 10000);
  add(li, "l_linenumber", LT::Integer, EN::LeadingZero, 3, 1, 7);
  add(li, "l_quantity", LT::Integer, EN::LeadingZero, 8, 1, 50);
  add(li, "l_extendedprice", LT::Decimal, EN::LeadingZero, 30, 100,
      10494950, 100);
  add(li, "l_discount", LT::Decimal, EN::LeadingZero, 4, 0, 10, 100);
  add(li, "l_tax", LT::Decimal, EN::LeadingZero, 4, 0, 8, 100);
  add(li, "l_returnflag", LT::Enum, EN::Dictionary, 2, 0, 0, 1,
      {"A", "N", "R"});
  add(li, "l_linestatus", LT::Enum, EN::Dictionary, 1, 0, 0, 1, {"F", "O"});
  add(li, "l_shipdate", LT::Date, EN::LeadingZero, 13,
      parse_date_days("1992-01-02"), parse_date_days("1998-12-01"));
  add(li, "l_commitdate", LT::Date, EN::LeadingZero, 13,
      parse_date_days("1992-01-31"), parse_date_days("1998-10-31"));
  add(li, "l_receiptdate", LT::Date, EN::LeadingZero, 13,
      parse_date_days("1992-01-03"), parse_date_days("1998-12-31"));
  add(li, "l_shipinstruct", LT::Enum, EN::Dictionary, 2, 0, 0, 1,
      {"DELIVER IN PERSON", "COLLECT COD", "NONE", "TAKE BACK RETURN"});
  add(li, "l_shipmode", LT::Enum, EN::Dictionary, 3, 0, 0, 1,
      {"REG AIR", "AIR", "RAIL", "SHIP", "TRUCK", "MAIL", "FOB"});

  RelationSchema cu;
  cu.name = "customer";
  cu.default_rows = 2048;
  add(cu, "c_custkey", LT::Integer, EN::LeadingZero, 27, 1, 150000);
  add(cu, "c_nationkey", LT::Integer, EN::LeadingZero, 5, 0, 24);
  // account balance stored shifted by +1000.00 to stay non-negative
  add(cu, "c_acctbal", LT::Decimal, EN::LeadingZero, 21, 1, 1099999, 100);
  add(cu, "c_mktsegment", LT::Enum, EN::Dictionary, 3, 0, 0, 1,
      {"AUTOMOBILE", "BUILDING", "FURNITURE", "HOUSEHOLD", "MACHINERY"});
  add(cu, "c_ordercount", LT::Integer, EN::LeadingZero, 10, 0, 1000);
  return {li, cu};
}

}  // namespace norsim
