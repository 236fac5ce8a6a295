// Shared randomized (schema, data, query) triple generator for the query
// tests and the acceptance suite.
#ifndef NORSIM_TESTS_QUERY_FUZZ_HPP
#define NORSIM_TESTS_QUERY_FUZZ_HPP

#include <string>
#include <vector>

#include "norsim/executor.hpp"
#include "norsim/generator.hpp"
#include "norsim/planner.hpp"
#include "norsim/schema.hpp"

namespace norsim_fuzz {

using namespace norsim;

struct FuzzCase {
  SystemConfig cfg;
  RelationSchema schema;
  std::vector<std::vector<Scalar>> records;
  std::string query;
};

inline RelationSchema random_schema(Rng& rng) {
  RelationSchema s;
  s.name = "r";
  uint32_t attrs = 2 + uint32_t(rng.below(4));
  for (uint32_t i = 0; i < attrs; ++i) {
    AttributeSpec a;
    a.name = "a" + std::to_string(i);
    uint64_t pick = rng.below(10);
    if (pick < 2) {
      a.type = LogicalType::Enum;
      a.encoding = Encoding::Dictionary;
      uint32_t card = 2 + uint32_t(rng.below(6));
      for (uint32_t v = 0; v < card; ++v)
        a.dict_values.push_back("V" + std::to_string(v));
      a.bit_width = 0;  // derived from the dictionary
    } else if (pick < 3) {
      a.type = LogicalType::Decimal;
      a.scale = 100;
      a.bit_width = 10 + uint32_t(rng.below(4));
      a.min_value = 0;
      a.max_value = int64_t((1ull << a.bit_width) - 1);
    } else {
      a.type = LogicalType::Integer;
      a.bit_width = 2 + uint32_t(rng.below(8));
      a.min_value = 0;
      // keep duplicates likely so equality predicates match something
      a.max_value = int64_t(
          std::min<uint64_t>((1ull << a.bit_width) - 1, 3 + rng.below(40)));
    }
    s.attributes.push_back(std::move(a));
  }
  return s;
}

inline std::string random_term(Rng& rng, const RelationSchema& s,
                               bool allow_arith) {
  // prefer plain numeric attributes
  std::vector<uint32_t> numeric;
  for (uint32_t i = 0; i < s.attributes.size(); ++i)
    if (s.attributes[i].encoding != Encoding::Dictionary) numeric.push_back(i);
  if (numeric.empty()) return s.attributes[0].name;
  uint32_t idx = numeric[rng.below(numeric.size())];
  const auto& attr = s.attributes[idx];
  if (!allow_arith || rng.below(4) != 0) return attr.name;
  uint64_t c = 1 + rng.below(6);
  if (rng.below(2))
    return "(" + attr.name + " + " + std::to_string(c) + ")";
  return "(" + attr.name + " * " + std::to_string(c) + ")";
}

inline std::string random_comparison(Rng& rng, const RelationSchema& s) {
  uint32_t idx = uint32_t(rng.below(s.attributes.size()));
  const auto& attr = s.attributes[idx];
  if (attr.encoding == Encoding::Dictionary) {
    const char* op = rng.below(2) ? "=" : "!=";
    const auto& v = attr.dict_values[rng.below(attr.dict_values.size())];
    return attr.name + " " + op + " '" + v + "'";
  }
  static const char* ops[] = {"=", "!=", "<", ">", "<=", ">="};
  const char* op = ops[rng.below(6)];
  if (rng.below(5) == 0) {
    // attribute vs attribute
    std::string other = random_term(rng, s, false);
    return attr.name + " " + op + " " + other;
  }
  int64_t hi = attr.max_value > 0 ? attr.max_value : 8;
  int64_t c = int64_t(rng.below(uint64_t(hi) + 3));  // sometimes out of range
  std::string lhs =
      rng.below(6) == 0 ? random_term(rng, s, true) : attr.name;
  if (attr.type == LogicalType::Decimal && lhs == attr.name &&
      rng.below(2)) {
    return lhs + " " + op + " " + std::to_string(c / 100) + "." +
           (c % 100 < 10 ? "0" : "") + std::to_string(c % 100);
  }
  return lhs + " " + op + " " + std::to_string(c);
}

inline std::string random_filter(Rng& rng, const RelationSchema& s,
                                 int depth) {
  if (depth <= 0 || rng.below(3) == 0) return random_comparison(rng, s);
  uint64_t pick = rng.below(5);
  if (pick == 0)
    return "NOT (" + random_filter(rng, s, depth - 1) + ")";
  const char* op = pick < 3 ? "AND" : "OR";
  return "(" + random_filter(rng, s, depth - 1) + " " + op + " " +
         random_filter(rng, s, depth - 1) + ")";
}

inline std::string random_query(Rng& rng, const RelationSchema& s) {
  bool numeric = false;
  for (const auto& a : s.attributes)
    if (a.encoding != Encoding::Dictionary) numeric = true;
  std::string select;
  uint64_t pick = numeric ? rng.below(8) : rng.below(4);
  if (pick < 3) {
    select = "IDS";
  } else if (pick == 3) {
    select = "COUNT";
  } else {
    std::vector<std::string> aggs;
    uint32_t n = 1 + uint32_t(rng.below(2));
    for (uint32_t i = 0; i < n; ++i) {
      switch (rng.below(4)) {
        case 0:
          aggs.push_back("SUM(" + random_term(rng, s, true) + ")");
          break;
        case 1:
          aggs.push_back("MIN(" + random_term(rng, s, false) + ")");
          break;
        case 2:
          aggs.push_back("MAX(" + random_term(rng, s, false) + ")");
          break;
        default:
          aggs.push_back("AVG(" + random_term(rng, s, false) + ")");
          break;
      }
    }
    for (size_t i = 0; i < aggs.size(); ++i)
      select += (i ? ", " : "") + aggs[i];
  }
  std::string q = "SELECT " + select + " FROM " + s.name;
  if (rng.below(8) != 0) q += " WHERE " + random_filter(rng, s, 2);
  return q;
}

inline FuzzCase make_case(uint64_t seed, uint64_t max_rows) {
  Rng rng(seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
  FuzzCase fc;
  fc.schema = random_schema(rng);
  uint32_t record_bits = 1;
  for (auto& a : fc.schema.attributes)
    record_bits += a.bit_width ? a.bit_width : 3;
  uint32_t rows = 16u << rng.below(3);  // 16..64 rows per crossbar
  uint32_t units = 1;
  while (units * 16 < record_bits + 112) units *= 2;
  uint32_t cols = units * 16;
  fc.cfg.geometry = {rows, cols, 16};
  fc.cfg.topology.crossbars_per_page = 1u << rng.below(3);
  uint64_t n = 1 + rng.below(max_rows);
  fc.records = generate_records(fc.schema, n, seed ^ 0xABCDEF);
  fc.query = random_query(rng, fc.schema);
  return fc;
}

struct FuzzOutcome {
  bool pass;
  std::string detail;
  QueryResult result;
  OracleResult reference;
};

inline FuzzOutcome run_case(const FuzzCase& fc) {
  SystemConfig cfg = fc.cfg;
  for (;;) {
    RelationLayout layout = plan_layout(fc.schema, cfg.geometry);
    auto ast = parse_query(fc.query);
    auto bound = bind_query(ast, layout);
    ExecutionPlan plan;
    try {
      plan = compile(bound, cfg);
    } catch (const CapacityError&) {
      // desk-scale sizing: widen the crossbar until the plan fits; the
      // request codec's 10-bit column fields bound cols at 1024
      if (cfg.geometry.cols >= 1024) throw;
      cfg.geometry.cols *= 2;
      continue;
    }
    PimModule module(cfg);
    load_records(layout, module, fc.records);
    FuzzOutcome out;
    out.result = execute(plan, layout, module);
    auto table = OracleTable::from_records(layout, fc.records);
    out.reference = oracle_execute(bound, table);
    auto verdict = compare_results(out.result.ids, out.result.aggregates,
                                   out.reference, bound.select_ids);
    out.pass = verdict.pass;
    out.detail = verdict.detail;
    return out;
  }
}

}  // namespace norsim_fuzz

#endif
