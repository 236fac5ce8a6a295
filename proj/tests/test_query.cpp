#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "query_fuzz.hpp"

using namespace norsim;

namespace {

struct Fixture {
  SystemConfig cfg;
  PimModule module;
  RelationSchema schema;
  RelationLayout layout;
  std::vector<std::vector<Scalar>> records;
  OracleTable table;

  Fixture(RelationSchema s, std::vector<std::vector<Scalar>> recs,
          SystemConfig c)
      : cfg(c),
        module(c),
        schema(std::move(s)),
        layout(plan_layout(schema, c.geometry)),
        records(std::move(recs)) {
    load_records(layout, module, records);
    table = OracleTable::from_records(layout, records);
  }

  QueryResult run(const std::string& q) {
    auto bound = bind_query(parse_query(q), layout);
    auto plan = compile(bound, cfg);
    return execute(plan, layout, module);
  }
  OracleResult ref(const std::string& q) {
    auto bound = bind_query(parse_query(q), layout);
    return oracle_execute(bound, table);
  }
  ExecutionPlan plan_of(const std::string& q) {
    auto bound = bind_query(parse_query(q), layout);
    return compile(bound, cfg);
  }
};

RelationSchema two_attr_schema() {
  RelationSchema s;
  s.name = "t";
  AttributeSpec a;
  a.name = "a";
  a.bit_width = 8;
  a.max_value = 255;
  AttributeSpec b = a;
  b.name = "b";
  s.attributes = {a, b};
  return s;
}

SystemConfig cfg_64() {
  SystemConfig cfg;
  cfg.geometry = {64, 128, 16};
  cfg.topology.crossbars_per_page = 4;
  return cfg;
}

std::vector<std::vector<Scalar>> pairs_data(int n, uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<Scalar>> recs;
  for (int i = 0; i < n; ++i)
    recs.push_back({int64_t(rng.below(16)), int64_t(rng.below(256))});
  return recs;
}

std::vector<Opcode> phase_opcodes(const PlannedPhase& phase) {
  std::vector<Opcode> ops;
  for (const auto& in : phase.compute) ops.push_back(in.opcode);
  return ops;
}

}  // namespace

TEST_CASE("plan shape: conjunctive filter lowers per the instruction set") {
  Fixture f(two_attr_schema(), pairs_data(100, 3), cfg_64());
  auto plan = f.plan_of("SELECT IDS FROM t WHERE a = 5 AND b < 7");
  REQUIRE(plan.phases.size() == 1);
  auto ops = phase_opcodes(plan.phases[0]);
  CHECK(ops == std::vector<Opcode>{
                   Opcode::ConfigurePage, Opcode::EqualImm,
                   Opcode::LessThanImm, Opcode::BitwiseAnd,
                   Opcode::BitwiseAnd,  // filter AND valid
                   Opcode::ColumnTransform});
  REQUIRE(plan.phases[0].reads.size() == 1);
  CHECK(plan.phases[0].reads[0].kind == PlannedRead::Kind::Bitmask);
  CHECK(plan.mask_root >= 0);
}

TEST_CASE("plan shape: AVG is two reduces plus a host division") {
  Fixture f(two_attr_schema(), pairs_data(100, 4), cfg_64());
  auto plan = f.plan_of("SELECT AVG(b) FROM t WHERE a = 3");
  CHECK(plan.reduce_instructions == 2);
  uint32_t reduces = 0;
  for (const auto& phase : plan.phases)
    for (const auto& in : phase.compute)
      if (in.opcode == Opcode::ReduceSum) ++reduces;
  CHECK(reduces == 2);
  REQUIRE(plan.aggregates.size() == 1);
  CHECK(plan.aggregates[0].kind == AggKind::Avg);
  auto res = f.run("SELECT AVG(b) FROM t WHERE a = 3");
  auto ref = f.ref("SELECT AVG(b) FROM t WHERE a = 3");
  CHECK(res.aggregates[0].num == ref.aggregates[0].num);
  CHECK(res.aggregates[0].den == ref.aggregates[0].den);
}

TEST_CASE("tight free area splits the plan into several phases") {
  // record: 8+8+16 bits + valid = 33 bits; 64 columns leave 31 free, and
  // the 16-wide transform staging plus booleans exhaust them quickly
  SystemConfig cfg;
  cfg.geometry = {32, 64, 16};
  cfg.topology.crossbars_per_page = 2;
  RelationSchema schema = two_attr_schema();
  AttributeSpec filler;
  filler.name = "pad";
  filler.bit_width = 16;
  filler.max_value = 1000;
  schema.attributes.push_back(filler);
  std::vector<std::vector<Scalar>> recs;
  for (auto& r : pairs_data(60, 5))
    recs.push_back({r[0], r[1], int64_t(5)});
  Fixture f(schema, recs, cfg);
  std::string q =
      "SELECT IDS FROM t WHERE a = 1 OR a = 2 OR a = 3 OR a = 4 OR a = 5 "
      "OR b = 6 OR b = 7 OR b = 8";
  auto plan = f.plan_of(q);
  CHECK(plan.phases.size() >= 2);
  for (const auto& phase : plan.phases)
    CHECK(phase.footprint_cols <= f.layout.free_region.len);
  // splitting must not change the answer
  auto res = f.run(q);
  auto ref = f.ref(q);
  CHECK(compare_results(res.ids, res.aggregates, ref, true).pass);
}

TEST_CASE("every phase footprint fits the free area") {
  for (uint64_t seed : {1ull, 7ull, 23ull, 91ull}) {
    auto fc = norsim_fuzz::make_case(seed, 500);
    RelationLayout layout = plan_layout(fc.schema, fc.cfg.geometry);
    auto bound = bind_query(parse_query(fc.query), layout);
    auto plan = compile(bound, fc.cfg);
    for (const auto& phase : plan.phases) {
      CHECK(phase.footprint_cols <= layout.free_region.len);
      for (const auto& in : phase.compute) {
        if (in.opcode == Opcode::ConfigurePage) continue;
        CHECK(in.src1.end() <= fc.cfg.geometry.cols);
        validate(in, fc.cfg.geometry);  // throws on any bad operand
      }
    }
  }
}

TEST_CASE("end-to-end: ids, empty matches, aggregate examples") {
  Fixture f(two_attr_schema(), pairs_data(200, 6), cfg_64());
  SUBCASE("8-record scan example") {
    SystemConfig cfg;
    cfg.geometry = {8, 64, 16};
    cfg.topology.crossbars_per_page = 1;
    std::vector<std::vector<Scalar>> recs;
    for (int64_t v : {7, 3, 9, 1, 2, 3, 4, 8})
      recs.push_back({v, int64_t(0)});
    Fixture tiny(two_attr_schema(), recs, cfg);
    auto res = tiny.run("SELECT IDS FROM t WHERE a = 3");
    CHECK(res.ids == std::vector<uint64_t>{1, 5});
  }
  SUBCASE("empty match returns no ids and zero sums") {
    auto res = f.run("SELECT IDS FROM t WHERE a = 200 AND b = 1");
    CHECK(res.ids.empty());
    auto agg = f.run("SELECT SUM(b), COUNT FROM t WHERE a = 200 AND b = 1");
    CHECK(agg.aggregates[0].value == 0);
    CHECK(agg.aggregates[1].value == 0);
  }
  SUBCASE("aggregates match the oracle") {
    for (const char* q :
         {"SELECT SUM(b) FROM t WHERE a < 9",
          "SELECT MIN(b), MAX(b) FROM t WHERE a > 2",
          "SELECT COUNT FROM t WHERE b >= 100",
          "SELECT SUM(a * b) FROM t WHERE b != 3"}) {
      auto res = f.run(q);
      auto ref = f.ref(q);
      CHECK(compare_results(res.ids, res.aggregates, ref, false).pass);
    }
  }
}

TEST_CASE("a full crossbar of constant values reduces to one value") {
  SystemConfig cfg;
  cfg.geometry = {1024, 64, 16};
  cfg.topology.crossbars_per_page = 1;
  RelationSchema s;
  s.name = "t";
  AttributeSpec a;
  a.name = "a";
  a.bit_width = 4;
  a.max_value = 15;
  s.attributes = {a};
  std::vector<std::vector<Scalar>> recs(1024, {int64_t(2)});
  Fixture f(std::move(s), std::move(recs), cfg);
  auto res = f.run("SELECT SUM(a) FROM t");
  CHECK(res.aggregates[0].value == 2048);
  // the read phase pulled one value from the single crossbar
  CHECK(res.delta.crossbar_unit_reads ==
        (4 + reduce_iterations(1024) + 15) / 16);
}

TEST_CASE("monotone masking: adding an AND term never adds ids") {
  Fixture f(two_attr_schema(), pairs_data(300, 8), cfg_64());
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::string base = norsim_fuzz::random_filter(rng, f.schema, 1);
    std::string extra = norsim_fuzz::random_comparison(rng, f.schema);
    auto wide = f.run("SELECT IDS FROM t WHERE " + base);
    auto narrow =
        f.run("SELECT IDS FROM t WHERE (" + base + ") AND " + extra);
    std::set<uint64_t> wide_set(wide.ids.begin(), wide.ids.end());
    for (uint64_t id : narrow.ids) CHECK(wide_set.count(id) == 1);
  }
}

TEST_CASE("De Morgan: NOT(a AND b) equals (NOT a) OR (NOT b)") {
  Fixture f(two_attr_schema(), pairs_data(300, 9), cfg_64());
  Rng rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    std::string ca = norsim_fuzz::random_comparison(rng, f.schema);
    std::string cb = norsim_fuzz::random_comparison(rng, f.schema);
    auto lhs =
        f.run("SELECT IDS FROM t WHERE NOT (" + ca + " AND " + cb + ")");
    auto rhs = f.run("SELECT IDS FROM t WHERE (NOT " + ca + ") OR (NOT " +
                     cb + ")");
    CHECK(lhs.ids == rhs.ids);
  }
}

TEST_CASE("filter-only queries read one bit per record after transform") {
  SystemConfig cfg;
  cfg.geometry = {64, 256, 16};
  cfg.topology.crossbars_per_page = 4;
  auto schema = desk_schema()[1];  // 66 attribute bits per record
  auto records = generate_records(schema, 64 * 4, 31);
  Fixture f(schema, records, cfg);
  auto res = f.run("SELECT IDS FROM customer WHERE c_nationkey < 9");
  uint64_t record_count = 64 * 4;
  CHECK(res.pim_bytes_read * 8 == record_count);  // exactly 1 bit/record
  auto ref = f.ref("SELECT IDS FROM customer WHERE c_nationkey < 9");
  auto [ratio, inf] =
      read_reduction(ref.baseline_bytes_read, res.pim_bytes_read);
  CHECK_FALSE(inf);
  CHECK(ratio >= 1.0);
}

TEST_CASE("fuzzed corpus agrees with the oracle") {
  int failures = 0;
  for (uint64_t seed = 1; seed <= 120; ++seed) {
    auto fc = norsim_fuzz::make_case(seed, 800);
    auto outcome = norsim_fuzz::run_case(fc);
    if (!outcome.pass) {
      ++failures;
      MESSAGE("seed " << seed << " query " << fc.query << ": "
                      << outcome.detail);
    }
  }
  CHECK(failures == 0);
}
