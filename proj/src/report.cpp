#include "norsim/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace norsim {

using nlohmann::json;

namespace {

double aj_to_pj(uint64_t aj) { return double(aj) / 1e6; }

json aggregates_json(const QueryResult& r) {
  json out = json::array();
  for (const auto& a : r.aggregates) {
    json entry = {{"label", a.label}, {"kind", agg_kind_name(a.kind)}};
    if (a.kind == AggKind::Avg) {
      entry["num"] = a.num;
      entry["den"] = a.den;
      if (a.den != 0) entry["value"] = double(a.num) / double(a.den);
    } else {
      entry["value"] = a.value;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

// instruction families reported at their paper-table names
json instruction_json(const RunStats& d, bool formulas) {
  json out = json::array();
  for (int i = 0; i < opcode_count; ++i) {
    if (d.instr_count[i] == 0) continue;
    json entry = {{"instruction", opcode_name(Opcode(i))},
                  {"count", d.instr_count[i]},
                  {"cycles", d.instr_cycles[i]}};
    if (formulas) entry["formula_cycles"] = d.instr_formula_cycles[i];
    out.push_back(std::move(entry));
  }
  return out;
}

PimInstruction table_instr(Opcode op, uint32_t n, uint32_t m,
                           const CrossbarGeometry& g) {
  PimInstruction in;
  in.opcode = op;
  in.src1 = {0, n};
  const auto& d = opcode_descriptor(op);
  if (d.has_imm) {
    // alternating bit pattern: half zeros, half ones
    uint64_t imm = 0;
    for (uint32_t i = 0; i < n; i += 2) imm |= 1ull << i;
    in.immediate = imm;
    in.imm_bits = n;
    in.has_imm = true;
  }
  if (d.has_src2) {
    in.src2 = {n, op == Opcode::Multiply ? m : n};
    in.has_src2 = true;
  }
  uint32_t dst = ((2 * n + m + 7) / 8) * 8;
  in.dst_col = dst;
  in.dst_row = 0;
  uint32_t scratch = scratch_cells(in, g);
  in.compute_region = {g.cols - std::max(scratch, 1u), std::max(scratch, 1u)};
  if (op == Opcode::ColumnTransform) {
    in.src1 = {0, 1};
    in.dst_col = g.read_width_bits;
  }
  return in;
}

struct TableRow {
  std::string name;
  uint32_t n, m;
  InstructionCost cost;
};

std::vector<TableRow> formula_rows(const CrossbarGeometry& g,
                                   const std::vector<uint32_t>& widths) {
  std::vector<TableRow> rows;
  auto add = [&](Opcode op, uint32_t n, uint32_t m) {
    PimInstruction in = table_instr(op, n, m, g);
    rows.push_back({opcode_name(op), n, m, cost_of(in, g)});
  };
  for (Opcode op :
       {Opcode::EqualImm, Opcode::NotEqualImm, Opcode::LessThanImm,
        Opcode::GreaterThanImm, Opcode::AddImm, Opcode::Equal,
        Opcode::LessThan, Opcode::SetCol, Opcode::BitwiseNot,
        Opcode::BitwiseAnd, Opcode::BitwiseOr, Opcode::Add}) {
    for (uint32_t n : widths) add(op, n, 0);
  }
  for (uint32_t n : widths) add(Opcode::Multiply, n, n);
  for (Opcode op : {Opcode::ReduceSum, Opcode::ReduceMin, Opcode::ReduceMax})
    for (uint32_t n : widths) add(op, n, 0);
  add(Opcode::ColumnTransform, 1, 0);
  return rows;
}

}  // namespace

RunReport make_report(const std::string& query_text,
                      const std::string& relation, QueryResult result,
                      uint64_t baseline_bytes) {
  RunReport rep;
  rep.query = query_text;
  rep.relation = relation;
  rep.result = std::move(result);
  rep.baseline_bytes = baseline_bytes;
  auto [ratio, infinite] =
      read_reduction(baseline_bytes, rep.result.pim_bytes_read);
  rep.reduction_ratio = ratio;
  rep.reduction_infinite = infinite;
  return rep;
}

std::string RunReport::to_json() const {
  const RunStats& d = result.delta;
  json j;
  j["query"] = query;
  j["relation"] = relation;
  if (!result.ids.empty() || result.aggregates.empty())
    j["matching_ids"] = result.ids;
  j["aggregates"] = aggregates_json(result);
  j["instructions"] = instruction_json(d, true);
  j["logic_cycles"] = d.logic_cycles;
  j["pim_requests"] = d.pim_requests;
  j["bytes_read"] = d.bytes_read;
  j["bytes_written"] = d.bytes_written;
  j["baseline_bytes_read"] = baseline_bytes;
  if (reduction_infinite)
    j["read_reduction"] = "inf";
  else
    j["read_reduction"] = reduction_ratio;
  j["energy"] = {{"logic_aj", d.energy_logic_aj},
                 {"read_aj", d.energy_read_aj},
                 {"write_aj", d.energy_write_aj},
                 {"logic_pj", aj_to_pj(d.energy_logic_aj)},
                 {"read_pj", aj_to_pj(d.energy_read_aj)},
                 {"write_pj", aj_to_pj(d.energy_write_aj)}};
  j["endurance"] = {{"max_row_write_ops", result.max_row_write_delta},
                    {"ops_per_cell", result.ops_per_cell_delta},
                    {"set_reset_weighted_equally", set_reset_wear_equal}};
  j["elapsed_ns"] = d.elapsed_ns;
  return j.dump(2);
}

std::string RunReport::to_text() const {
  const RunStats& d = result.delta;
  std::ostringstream os;
  os << "query: " << query << "\n";
  if (!result.aggregates.empty()) {
    for (const auto& a : result.aggregates) {
      os << "  " << a.label << " = ";
      if (a.kind == AggKind::Avg) {
        os << a.num << "/" << a.den;
        if (a.den != 0) {
          char buf[32];
          std::snprintf(buf, sizeof buf, " (%.6f)",
                        double(a.num) / double(a.den));
          os << buf;
        }
      } else {
        os << a.value;
      }
      os << "\n";
    }
  } else {
    os << "  matching ids: " << result.ids.size() << "\n";
  }
  os << "instruction cycles (measured / formula):\n";
  for (int i = 0; i < opcode_count; ++i) {
    if (d.instr_count[i] == 0) continue;
    char buf[128];
    std::snprintf(buf, sizeof buf, "  %-18s x%-6" PRIu64 " %10" PRIu64
                  " / %" PRIu64 "\n",
                  opcode_name(Opcode(i)), d.instr_count[i],
                  d.instr_cycles[i], d.instr_formula_cycles[i]);
    os << buf;
  }
  char line[160];
  std::snprintf(line, sizeof line,
                "logic cycles %" PRIu64 ", elapsed %" PRIu64 " ns\n",
                d.logic_cycles, d.elapsed_ns);
  os << line;
  std::snprintf(line, sizeof line,
                "bytes read %" PRIu64 " (baseline %" PRIu64 "), reduction ",
                d.bytes_read, baseline_bytes);
  os << line;
  if (reduction_infinite)
    os << "inf\n";
  else {
    std::snprintf(line, sizeof line, "%.2fx\n", reduction_ratio);
    os << line;
  }
  std::snprintf(line, sizeof line,
                "energy pJ: logic %.3f, read %.3f, write %.3f\n",
                aj_to_pj(d.energy_logic_aj), aj_to_pj(d.energy_read_aj),
                aj_to_pj(d.energy_write_aj));
  os << line;
  std::snprintf(line, sizeof line,
                "endurance: max row writes +%" PRIu64
                ", ops/cell +%.6f (set/reset weighted equally)\n",
                result.max_row_write_delta, result.ops_per_cell_delta);
  os << line;
  return os.str();
}

std::string formula_table_text(const CrossbarGeometry& geom,
                               const std::vector<uint32_t>& widths) {
  std::ostringstream os;
  os << "instruction            n    m   measured    formula   cells  "
        "table\n";
  for (const auto& row : formula_rows(geom, widths)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%-20s %4u %4u %10" PRIu64 " %10" PRIu64 " %7u %6u\n",
                  row.name.c_str(), row.n, row.m, row.cost.cycles,
                  row.cost.formula_cycles, row.cost.intermediate_cells,
                  row.cost.formula_cells);
    os << buf;
  }
  return os.str();
}

std::string formula_table_json(const CrossbarGeometry& geom,
                               const std::vector<uint32_t>& widths) {
  json rows = json::array();
  for (const auto& row : formula_rows(geom, widths)) {
    rows.push_back({{"instruction", row.name},
                    {"n", row.n},
                    {"m", row.m},
                    {"measured_cycles", row.cost.cycles},
                    {"formula_cycles", row.cost.formula_cycles},
                    {"measured_cells", row.cost.intermediate_cells},
                    {"table_cells", row.cost.formula_cells}});
  }
  return json{{"geometry",
               {{"rows", geom.rows},
                {"cols", geom.cols},
                {"read_width_bits", geom.read_width_bits}}},
              {"rows", rows}}
      .dump(2);
}

}  // namespace norsim
