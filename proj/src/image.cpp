#include "norsim/image.hpp"

#include <fstream>
#include <sstream>

#include "norsim/serialize_util.hpp"

namespace norsim {

namespace {

constexpr uint32_t image_magic = 0x4D49534Eu;  // "NSIM"
constexpr uint32_t image_version = 1;

void write_stats(std::ostream& os, const RunStats& s) {
  for (int i = 0; i < opcode_count; ++i) write_u64(os, s.instr_count[i]);
  for (int i = 0; i < opcode_count; ++i) write_u64(os, s.instr_cycles[i]);
  for (int i = 0; i < opcode_count; ++i)
    write_u64(os, s.instr_formula_cycles[i]);
  write_u64(os, s.logic_cycles);
  write_u64(os, s.pim_requests);
  write_u64(os, s.read_requests);
  write_u64(os, s.write_requests);
  write_u64(os, s.bytes_read);
  write_u64(os, s.bytes_written);
  write_u64(os, s.crossbar_unit_reads);
  write_u64(os, s.col_ops);
  write_u64(os, s.row_ops);
  write_u64(os, s.energy_logic_aj);
  write_u64(os, s.energy_read_aj);
  write_u64(os, s.energy_write_aj);
  write_u64(os, s.elapsed_ns);
}

RunStats read_stats(std::istream& is) {
  RunStats s;
  for (int i = 0; i < opcode_count; ++i) s.instr_count[i] = read_u64(is);
  for (int i = 0; i < opcode_count; ++i) s.instr_cycles[i] = read_u64(is);
  for (int i = 0; i < opcode_count; ++i)
    s.instr_formula_cycles[i] = read_u64(is);
  s.logic_cycles = read_u64(is);
  s.pim_requests = read_u64(is);
  s.read_requests = read_u64(is);
  s.write_requests = read_u64(is);
  s.bytes_read = read_u64(is);
  s.bytes_written = read_u64(is);
  s.crossbar_unit_reads = read_u64(is);
  s.col_ops = read_u64(is);
  s.row_ops = read_u64(is);
  s.energy_logic_aj = read_u64(is);
  s.energy_read_aj = read_u64(is);
  s.energy_write_aj = read_u64(is);
  s.elapsed_ns = read_u64(is);
  return s;
}

}  // namespace

RelationLayout& Workspace::layout_for(const std::string& relation) {
  for (auto& l : layouts)
    if (l.name == relation) return l;
  throw TypeError("relation '" + relation + "' is not loaded in this image");
}

const RelationLayout& Workspace::layout_for(const std::string& relation) const {
  for (const auto& l : layouts)
    if (l.name == relation) return l;
  throw TypeError("relation '" + relation + "' is not loaded in this image");
}

void save_image_bytes(std::ostream& os, const Workspace& ws) {
  write_u32(os, image_magic);
  write_u32(os, image_version);
  ws.module->serialize(os);
  write_string(os, schema_to_json(ws.schemas));
  write_u64(os, ws.layouts.size());
  for (const auto& l : ws.layouts) {
    write_string(os, l.name);
    write_u64(os, l.row_count);
    write_u64(os, l.pages.size());
    for (uint64_t p : l.pages) write_u64(os, p);
  }
  write_stats(os, ws.load_baseline);
}

Workspace load_image_bytes(std::istream& is) {
  if (read_u32(is) != image_magic) throw IoError("not a memory image");
  uint32_t version = read_u32(is);
  if (version != image_version)
    throw IoError("unsupported image version " + std::to_string(version));
  Workspace ws;
  ws.module = std::make_unique<PimModule>(PimModule::deserialize(is));
  ws.schemas = parse_schema_json(read_string(is));
  uint64_t n = read_u64(is);
  for (uint64_t i = 0; i < n; ++i) {
    std::string name = read_string(is);
    uint64_t rows = read_u64(is);
    uint64_t npages = read_u64(is);
    const RelationSchema* schema = nullptr;
    for (const auto& s : ws.schemas)
      if (s.name == name) schema = &s;
    if (!schema) throw IoError("image: layout for unknown relation " + name);
    RelationLayout layout =
        plan_layout(*schema, ws.module->config().geometry);
    layout.row_count = rows;
    for (uint64_t p = 0; p < npages; ++p)
      layout.pages.push_back(read_u64(is));
    ws.layouts.push_back(std::move(layout));
  }
  ws.load_baseline = read_stats(is);
  return ws;
}

void save_image(const std::string& path, const Workspace& ws) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open image file " + path + " for writing");
  save_image_bytes(out, ws);
  if (!out) throw IoError("failed writing image file " + path);
}

Workspace load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image file " + path);
  return load_image_bytes(in);
}

}  // namespace norsim
