// norsim command line: data generation, loading, query execution against
// the simulated memory, reference verification, and accounting reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "norsim/executor.hpp"
#include "norsim/generator.hpp"
#include "norsim/image.hpp"
#include "norsim/planner.hpp"
#include "norsim/report.hpp"
#include "norsim/schema.hpp"
#include "norsim/workspace_util.hpp"

namespace fs = std::filesystem;
using namespace norsim;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_usage = 2;
constexpr int exit_runtime = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<RelationSchema> load_schemas(const std::string& path) {
  if (path.empty()) return desk_schema();
  return load_schema_file(path);
}

SystemConfig load_config(const std::string& path) {
  if (path.empty()) return SystemConfig{};
  return SystemConfig::from_json_file(path);
}

std::string query_text_from(const std::string& inline_text,
                            const std::string& file) {
  if (!inline_text.empty()) return inline_text;
  if (!file.empty()) return read_file(file);
  throw ParseError("no query given: use --query or --query-file");
}

struct QueryRun {
  QueryResult result;
  OracleResult reference;
  Verdict verdict;
  std::string relation;
};

QueryRun run_query(Workspace& ws, const std::string& text) {
  QueryAst ast = parse_query(text);
  const RelationLayout& layout = ws.layout_for(ast.relation);
  BoundQuery bound = bind_query(ast, layout);
  ExecutionPlan plan = compile(bound, ws.module->config());
  QueryRun run;
  run.relation = ast.relation;
  // ground truth and baseline byte count from the decoded copy
  OracleTable table =
      OracleTable::from_records(layout, dump_records(layout, *ws.module));
  run.reference = oracle_execute(bound, table);
  run.result = execute(plan, layout, *ws.module);
  run.verdict = compare_results(run.result.ids, run.result.aggregates,
                                run.reference, bound.select_ids);
  return run;
}

int cmd_generate(const std::string& spec_path, const std::string& schema_path,
                 const std::string& out_dir, uint64_t seed_override,
                 bool has_seed) {
  auto schemas = load_schemas(schema_path);
  GeneratorSpec spec;
  if (!spec_path.empty()) {
    spec = GeneratorSpec::from_json_file(spec_path);
  } else {
    for (const auto& s : schemas)
      spec.relations.push_back({s.name, s.default_rows});
  }
  if (has_seed) spec.seed = seed_override;
  fs::create_directories(out_dir);
  for (const auto& rel : spec.relations) {
    const RelationSchema* schema = nullptr;
    for (const auto& s : schemas)
      if (s.name == rel.name) schema = &s;
    if (!schema) throw ParseError("generator names unknown relation " +
                                  rel.name);
    auto records = generate_records(*schema, rel.rows, spec.seed);
    std::string path = out_dir + "/" + rel.name + ".tbl";
    write_tbl_file(path, *schema, records);
    std::cout << path << ": " << records.size() << " records\n";
  }
  return exit_ok;
}

int cmd_load(const std::string& config_path, const std::string& schema_path,
             const std::string& data_dir, const std::string& image_path,
             const std::string& trace_out) {
  Workspace ws;
  ws.schemas = load_schemas(schema_path);
  SystemConfig cfg = load_config(config_path);
  ws.module = std::make_unique<PimModule>(cfg);
  for (const auto& schema : ws.schemas) {
    std::string path = data_dir + "/" + schema.name + ".tbl";
    if (!fs::exists(path)) continue;
    auto records = read_tbl_file(path, schema);
    RelationLayout layout = plan_layout(schema, cfg.geometry);
    uint64_t lines = load_records(layout, *ws.module, records);
    std::cout << schema.name << ": " << records.size() << " records, "
              << layout.pages.size() << " pages, " << lines
              << " line writes\n";
    ws.layouts.push_back(std::move(layout));
  }
  if (ws.layouts.empty())
    throw IoError("no .tbl files for the schema found in " + data_dir);
  if (!trace_out.empty()) write_trace_file(trace_out, ws.module->trace());
  ws.module->clear_trace();
  ws.load_baseline = ws.module->stats();
  save_image(image_path, ws);
  std::cout << "image written to " << image_path << "\n";
  return exit_ok;
}

int cmd_query(const std::string& image_path, const std::string& image_out,
              const std::string& text, const std::string& report_kind,
              const std::string& report_out, const std::string& trace_out,
              bool no_save, bool verify) {
  Workspace ws = load_image(image_path);
  ws.module->clear_trace();
  QueryRun run = run_query(ws, text);
  RunReport report = make_report(text, run.relation, std::move(run.result),
                                 run.reference.baseline_bytes_read);
  std::string rendered =
      report_kind == "json" ? report.to_json() : report.to_text();
  if (report_out.empty()) {
    std::cout << rendered << "\n";
  } else {
    std::ofstream out(report_out);
    out << rendered << "\n";
    std::cout << "report written to " << report_out << "\n";
  }
  if (!trace_out.empty()) write_trace_file(trace_out, ws.module->trace());
  ws.module->clear_trace();
  if (!no_save) save_image(image_out.empty() ? image_path : image_out, ws);
  if (verify && !run.verdict.pass) {
    std::cerr << "verification FAILED: " << run.verdict.detail << "\n";
    return exit_verify_failed;
  }
  return exit_ok;
}

int cmd_verify(const std::string& image_path, const std::string& text) {
  Workspace ws = load_image(image_path);
  QueryRun run = run_query(ws, text);
  if (run.verdict.pass) {
    std::cout << "verify PASS: results match the reference executor ("
              << run.reference.matching << " matching records)\n";
    return exit_ok;
  }
  std::cerr << "verify FAIL: " << run.verdict.detail << "\n";
  return exit_verify_failed;
}

int cmd_formulas(const std::string& config_path, const std::string& widths_csv,
                 const std::string& report_kind) {
  SystemConfig cfg = load_config(config_path);
  std::vector<uint32_t> widths;
  std::stringstream ss(widths_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) widths.push_back(uint32_t(std::stoul(tok)));
  if (report_kind == "json")
    std::cout << formula_table_json(cfg.geometry, widths);
  else
    std::cout << formula_table_text(cfg.geometry, widths);
  return exit_ok;
}

// Replays a query trace against the pre-query image and asserts that the
// report's counters are recoverable from it.
int cmd_check(const std::string& image_path, const std::string& trace_path,
              const std::string& report_path) {
  Workspace ws = load_image(image_path);
  RunStats before = ws.module->stats();
  ws.module->set_trace_enabled(false);
  ws.module->replay(read_trace_file(trace_path));
  RunStats delta = ws.module->stats().minus(before);
  auto j = nlohmann::json::parse(read_file(report_path));
  auto expect = [&](const char* name, uint64_t got, uint64_t want) {
    if (got != want)
      throw Error(std::string("ledger mismatch on ") + name + ": replay " +
                  std::to_string(got) + ", report " + std::to_string(want));
  };
  expect("logic_cycles", delta.logic_cycles, j.at("logic_cycles"));
  expect("bytes_read", delta.bytes_read, j.at("bytes_read"));
  expect("bytes_written", delta.bytes_written, j.at("bytes_written"));
  expect("energy.logic_aj", delta.energy_logic_aj,
         j.at("energy").at("logic_aj"));
  expect("energy.read_aj", delta.energy_read_aj,
         j.at("energy").at("read_aj"));
  expect("energy.write_aj", delta.energy_write_aj,
         j.at("energy").at("write_aj"));
  for (const auto& instr : j.at("instructions")) {
    std::string name = instr.at("instruction");
    for (int i = 0; i < opcode_count; ++i)
      if (name == opcode_name(Opcode(i)))
        expect(("cycles of " + name).c_str(), delta.instr_cycles[i],
               instr.at("cycles"));
  }
  std::cout << "check PASS: report numbers recovered from the trace\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "norsim: functional, cycle- and energy-accounted simulator of a "
      "bulk-bitwise NOR-logic memory running filter/aggregation queries"};
  app.require_subcommand(1);

  std::string spec_path, schema_path, out_dir = "data";
  uint64_t seed = 1;
  auto* gen = app.add_subcommand("generate", "write seeded .tbl data files");
  gen->add_option("--spec", spec_path, "generator spec JSON");
  gen->add_option("--schema", schema_path, "schema JSON (default: built-in)");
  gen->add_option("--out", out_dir, "output directory");
  auto* seed_opt = gen->add_option("--seed", seed, "seed override");

  std::string config_path, data_dir = "data", image_path = "norsim.img";
  std::string trace_out;
  auto* load = app.add_subcommand("load", "build a memory image from data");
  load->add_option("--config", config_path, "system config JSON");
  load->add_option("--schema", schema_path, "schema JSON (default: built-in)");
  load->add_option("--data", data_dir, "directory with .tbl files");
  load->add_option("--image", image_path, "output image path");
  load->add_option("--trace-out", trace_out, "write the load trace");

  std::string query_text, query_file, report_kind = "text", report_out;
  std::string image_out;
  bool no_save = false, query_verify = false;
  auto* query = app.add_subcommand("query", "run a query on an image");
  query->add_option("--image", image_path, "memory image")->required();
  query->add_option("--image-out", image_out, "write the image here instead");
  query->add_option("--query", query_text, "query text");
  query->add_option("--query-file", query_file, "file with the query");
  query->add_option("--report", report_kind, "report form: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  query->add_option("--report-out", report_out, "write the report to a file");
  query->add_option("--trace-out", trace_out, "write the request trace");
  query->add_flag("--no-save", no_save, "do not persist wear back");
  query->add_flag("--verify", query_verify,
                  "also compare against the reference executor");

  auto* verify = app.add_subcommand(
      "verify", "compare a query against the reference executor");
  verify->add_option("--image", image_path, "memory image")->required();
  verify->add_option("--query", query_text, "query text");
  verify->add_option("--query-file", query_file, "file with the query");

  std::string widths = "2,4,8,16,32";
  auto* formulas = app.add_subcommand(
      "formulas", "measured vs published cycle counts per instruction");
  formulas->add_option("--config", config_path, "system config JSON");
  formulas->add_option("--widths", widths, "comma-separated operand widths");
  formulas->add_option("--report", report_kind, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string check_trace, check_report;
  auto* check = app.add_subcommand(
      "check", "replay a trace against a pre-query image and verify the "
               "report's ledger");
  check->add_option("--image", image_path, "pre-query memory image")
      ->required();
  check->add_option("--trace", check_trace, "request trace")->required();
  check->add_option("--report", check_report, "query report JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  try {
    if (gen->parsed())
      return cmd_generate(spec_path, schema_path, out_dir, seed,
                          seed_opt->count() > 0);
    if (load->parsed())
      return cmd_load(config_path, schema_path, data_dir, image_path,
                      trace_out);
    if (query->parsed())
      return cmd_query(image_path, image_out,
                       query_text_from(query_text, query_file), report_kind,
                       report_out, trace_out, no_save, query_verify);
    if (verify->parsed())
      return cmd_verify(image_path, query_text_from(query_text, query_file));
    if (formulas->parsed())
      return cmd_formulas(config_path, widths, report_kind);
    if (check->parsed())
      return cmd_check(image_path, check_trace, check_report);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_runtime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_runtime;
  }
  return exit_usage;
}
