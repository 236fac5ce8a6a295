#include "norsim/memory_system.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "norsim/serialize_util.hpp"

namespace norsim {

using nlohmann::json;

AddressMap SystemConfig::make_address_map() const {
  if (address_fields.empty())
    return AddressMap::standard(geometry, topology.crossbars_per_page);
  return AddressMap(address_fields, geometry, topology.crossbars_per_page);
}

std::string SystemConfig::to_json() const {
  json j;
  j["geometry"] = {{"rows", geometry.rows},
                   {"cols", geometry.cols},
                   {"read_width_bits", geometry.read_width_bits}};
  j["energy"] = {{"logic_fj_per_bit", energy.logic_fj_per_bit()},
                 {"read_pj_per_bit", energy.read_pj_per_bit()},
                 {"write_pj_per_bit", energy.write_pj_per_bit()}};
  j["timing"] = {{"logic_cycle_ns", timing.logic_cycle_ns},
                 {"read_latency_ns", timing.read_latency_ns},
                 {"write_latency_ns", timing.write_latency_ns},
                 {"link_bytes_per_us", timing.link_bytes_per_us}};
  j["topology"] = {
      {"banks_per_module", topology.banks_per_module},
      {"subarrays_per_controller", topology.subarrays_per_controller},
      {"crossbars_per_subarray", topology.crossbars_per_subarray},
      {"crossbars_per_page", topology.crossbars_per_page}};
  if (!address_fields.empty()) {
    json fields = json::array();
    for (const auto& f : address_fields)
      fields.push_back(
          {{"field", addr_field_name(f.field)}, {"bits", f.bits}});
    j["address_fields"] = fields;
  }
  return j.dump(2);
}

SystemConfig SystemConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  SystemConfig cfg;
  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    cfg.geometry.rows = g.value("rows", cfg.geometry.rows);
    cfg.geometry.cols = g.value("cols", cfg.geometry.cols);
    cfg.geometry.read_width_bits =
        g.value("read_width_bits", cfg.geometry.read_width_bits);
  }
  if (j.contains("energy")) {
    const auto& e = j["energy"];
    auto to_aj = [](double v, double unit) {
      return uint64_t(llround(v * unit));
    };
    if (e.contains("logic_fj_per_bit"))
      cfg.energy.logic_aj_per_bit =
          to_aj(e["logic_fj_per_bit"].get<double>(), 1e3);
    if (e.contains("read_pj_per_bit"))
      cfg.energy.read_aj_per_bit =
          to_aj(e["read_pj_per_bit"].get<double>(), 1e6);
    if (e.contains("write_pj_per_bit"))
      cfg.energy.write_aj_per_bit =
          to_aj(e["write_pj_per_bit"].get<double>(), 1e6);
  }
  if (j.contains("timing")) {
    const auto& t = j["timing"];
    cfg.timing.logic_cycle_ns =
        t.value("logic_cycle_ns", cfg.timing.logic_cycle_ns);
    cfg.timing.read_latency_ns =
        t.value("read_latency_ns", cfg.timing.read_latency_ns);
    cfg.timing.write_latency_ns =
        t.value("write_latency_ns", cfg.timing.write_latency_ns);
    cfg.timing.link_bytes_per_us =
        t.value("link_bytes_per_us", cfg.timing.link_bytes_per_us);
  }
  if (j.contains("topology")) {
    const auto& t = j["topology"];
    cfg.topology.banks_per_module =
        t.value("banks_per_module", cfg.topology.banks_per_module);
    cfg.topology.subarrays_per_controller = t.value(
        "subarrays_per_controller", cfg.topology.subarrays_per_controller);
    cfg.topology.crossbars_per_subarray = t.value(
        "crossbars_per_subarray", cfg.topology.crossbars_per_subarray);
    cfg.topology.crossbars_per_page =
        t.value("crossbars_per_page", cfg.topology.crossbars_per_page);
  }
  if (j.contains("address_fields")) {
    for (const auto& f : j["address_fields"])
      cfg.address_fields.push_back(
          {addr_field_from_name(f["field"].get<std::string>()),
           f["bits"].get<uint32_t>()});
  }
  cfg.geometry.validate();
  cfg.timing.validate();
  cfg.topology.validate();
  return cfg;
}

SystemConfig SystemConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

RunStats RunStats::minus(const RunStats& before) const {
  RunStats d = *this;
  for (int i = 0; i < opcode_count; ++i) {
    d.instr_count[i] -= before.instr_count[i];
    d.instr_cycles[i] -= before.instr_cycles[i];
    d.instr_formula_cycles[i] -= before.instr_formula_cycles[i];
  }
  d.logic_cycles -= before.logic_cycles;
  d.pim_requests -= before.pim_requests;
  d.read_requests -= before.read_requests;
  d.write_requests -= before.write_requests;
  d.bytes_read -= before.bytes_read;
  d.bytes_written -= before.bytes_written;
  d.crossbar_unit_reads -= before.crossbar_unit_reads;
  d.col_ops -= before.col_ops;
  d.row_ops -= before.row_ops;
  d.energy_logic_aj -= before.energy_logic_aj;
  d.energy_read_aj -= before.energy_read_aj;
  d.energy_write_aj -= before.energy_write_aj;
  d.elapsed_ns -= before.elapsed_ns;
  return d;
}

namespace {

std::string hex_bytes(const std::vector<uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

std::vector<uint8_t> parse_hex(const std::string& s, int lineno) {
  if (s.size() % 2 != 0)
    throw ParseError("trace: odd hex payload length", lineno);
  auto nib = [&](char c) -> uint8_t {
    if (c >= '0' && c <= '9') return uint8_t(c - '0');
    if (c >= 'a' && c <= 'f') return uint8_t(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return uint8_t(c - 'A' + 10);
    throw ParseError("trace: bad hex digit", lineno);
  };
  std::vector<uint8_t> out(s.size() / 2);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = uint8_t((nib(s[2 * i]) << 4) | nib(s[2 * i + 1]));
  return out;
}

}  // namespace

std::string TraceRecord::to_line() const {
  std::ostringstream os;
  os << kind << ' ' << page << ' ' << std::hex << offset << ' '
     << hex_bytes(payload);
  return os.str();
}

TraceRecord TraceRecord::from_line(const std::string& line, int lineno) {
  std::istringstream is(line);
  TraceRecord rec;
  std::string kind, page, offset, payload;
  if (!(is >> kind >> page >> offset))
    throw ParseError("trace: malformed record", lineno);
  is >> payload;  // may be empty for zero-length reads
  if (kind.size() != 1 || (kind[0] != 'R' && kind[0] != 'W' && kind[0] != 'P'))
    throw ParseError("trace: kind must be R, W, or P", lineno);
  rec.kind = kind[0];
  rec.page = std::stoull(page);
  rec.offset = std::stoull(offset, nullptr, 16);
  rec.payload = parse_hex(payload, lineno);
  return rec;
}

PimModule::PimModule(SystemConfig cfg)
    : cfg_(std::move(cfg)), map_(cfg_.make_address_map()) {
  cfg_.timing.validate();
  cfg_.topology.validate();
}

uint64_t PimModule::allocate_page() {
  uint64_t id = next_page_++;
  Page p;
  p.bank = uint32_t(id % cfg_.topology.banks_per_module);
  p.crossbars.reserve(cfg_.topology.crossbars_per_page);
  for (uint32_t i = 0; i < cfg_.topology.crossbars_per_page; ++i)
    p.crossbars.emplace_back(cfg_.geometry);
  pages_.emplace(id, std::move(p));
  return id;
}

PimModule::Page& PimModule::page_at(uint64_t id) {
  auto it = pages_.find(id);
  if (it == pages_.end())
    throw BoundsError("page " + std::to_string(id) + " is not mapped");
  return it->second;
}

const PimModule::Page& PimModule::page_at(uint64_t id) const {
  auto it = pages_.find(id);
  if (it == pages_.end())
    throw BoundsError("page " + std::to_string(id) + " is not mapped");
  return it->second;
}

ColRange PimModule::page_compute_region(uint64_t page_id) const {
  return page_at(page_id).compute_region;
}

Ticket PimModule::schedule(uint64_t page_id, uint32_t first_ctrl,
                           uint32_t last_ctrl, uint64_t duration_ns) {
  uint64_t start = issue_cursor_ns_;
  for (uint32_t c = first_ctrl; c <= last_ctrl; ++c) {
    auto it = ctrl_busy_until_.find({page_id, c});
    if (it != ctrl_busy_until_.end()) start = std::max(start, it->second);
  }
  uint64_t complete = start + duration_ns;
  for (uint32_t c = first_ctrl; c <= last_ctrl; ++c)
    ctrl_busy_until_[{page_id, c}] = complete;
  issue_cursor_ns_ = start;  // later arrivals never start earlier
  elapsed_ns_ = std::max(elapsed_ns_, complete);
  Ticket t{next_ticket_++, start, complete};
  pending_.push_back(t);
  return t;
}

void PimModule::host_write(uint64_t page_id, uint64_t offset,
                           std::span<const uint8_t> bytes) {
  Page& page = page_at(page_id);
  uint32_t ub = map_.unit_bytes();
  if (offset % ub != 0 || bytes.size() % ub != 0)
    throw BoundsError("host_write: access must be unit aligned");
  uint32_t first_ctrl = ~0u, last_ctrl = 0;
  for (size_t i = 0; i < bytes.size(); i += ub) {
    DecodedAddr a = map_.decode(offset + i);
    uint64_t v = 0;
    for (uint32_t b = 0; b < ub; ++b) v |= uint64_t(bytes[i + b]) << (8 * b);
    page.crossbars.at(a.crossbar).write_row_bits(a.row, a.unit, v,
                                                 cfg_.energy);
    uint32_t ctrl = a.crossbar / cfg_.topology.crossbars_per_controller();
    first_ctrl = std::min(first_ctrl, ctrl);
    last_ctrl = std::max(last_ctrl, ctrl);
  }
  counters_.write_requests += 1;
  counters_.bytes_written += bytes.size();
  uint64_t link_ns =
      (bytes.size() * 1000 + cfg_.timing.link_bytes_per_us - 1) /
      cfg_.timing.link_bytes_per_us;
  schedule(page_id, first_ctrl, last_ctrl,
           cfg_.timing.write_latency_ns + link_ns);
  if (trace_enabled_)
    trace_.push_back(
        {'W', page_id, offset, {bytes.begin(), bytes.end()}});
}

std::vector<uint8_t> PimModule::host_read(uint64_t page_id, uint64_t offset,
                                          size_t len) {
  Page& page = page_at(page_id);
  uint32_t ub = map_.unit_bytes();
  if (offset % ub != 0 || len % ub != 0)
    throw BoundsError("host_read: access must be unit aligned");
  std::vector<uint8_t> out(len);
  uint32_t first_ctrl = ~0u, last_ctrl = 0;
  for (size_t i = 0; i < len; i += ub) {
    DecodedAddr a = map_.decode(offset + i);
    uint64_t v =
        page.crossbars.at(a.crossbar).read_row_bits(a.row, a.unit,
                                                    cfg_.energy);
    for (uint32_t b = 0; b < ub; ++b) out[i + b] = uint8_t(v >> (8 * b));
    counters_.crossbar_unit_reads += 1;
    uint32_t ctrl = a.crossbar / cfg_.topology.crossbars_per_controller();
    first_ctrl = std::min(first_ctrl, ctrl);
    last_ctrl = std::max(last_ctrl, ctrl);
  }
  counters_.read_requests += 1;
  counters_.bytes_read += len;
  uint64_t link_ns = (len * 1000 + cfg_.timing.link_bytes_per_us - 1) /
                     cfg_.timing.link_bytes_per_us;
  schedule(page_id, first_ctrl, last_ctrl,
           cfg_.timing.read_latency_ns + link_ns);
  if (trace_enabled_) trace_.push_back({'R', page_id, offset, out});
  return out;
}

Ticket PimModule::submit_pim(const PimRequest& req) {
  Page& page = page_at(req.page_id);
  PimInstruction instr = decode_request(req, map_, page.compute_region);
  size_t op = static_cast<size_t>(instr.opcode);

  if (trace_enabled_) {
    std::vector<uint8_t> payload(req.has_ext ? 16 : 8);
    for (int b = 0; b < 8; ++b) payload[b] = uint8_t(req.data >> (8 * b));
    if (req.has_ext)
      for (int b = 0; b < 8; ++b)
        payload[8 + b] = uint8_t(req.ext >> (8 * b));
    trace_.push_back({'P', req.page_id, req.offset, payload});
  }

  if (instr.opcode == Opcode::ConfigurePage) {
    if (instr.compute_region.end() > cfg_.geometry.cols)
      throw BoundsError("configure_page: region outside geometry");
    page.compute_region = instr.compute_region;
    counters_.pim_requests += 1;
    counters_.instr_count[op] += 1;
    Ticket t{next_ticket_++, issue_cursor_ns_, issue_cursor_ns_};
    pending_.push_back(t);
    return t;
  }

  auto ops = expand(instr, cfg_.geometry);
  // one controller drives the sequence on all its crossbars in lockstep
  for (auto& xb : page.crossbars)
    for (const auto& mop : ops) xb.apply(mop, cfg_.energy);

  counters_.pim_requests += 1;
  counters_.instr_count[op] += 1;
  counters_.instr_cycles[op] += ops.size();
  counters_.instr_formula_cycles[op] += formula_cycles(instr, cfg_.geometry);
  counters_.logic_cycles += ops.size();

  uint64_t duration = ops.size() * cfg_.timing.logic_cycle_ns;
  return schedule(req.page_id, 0, cfg_.topology.controllers_per_page() - 1,
                  duration);
}

std::vector<uint64_t> PimModule::advance(uint64_t now_ns) {
  std::vector<uint64_t> done;
  auto it = pending_.begin();
  while (it != pending_.end()) {
    if (it->complete_ns <= now_ns) {
      done.push_back(it->id);
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
  std::sort(done.begin(), done.end());
  return done;
}

RunStats PimModule::stats() const {
  RunStats s = counters_;
  s.elapsed_ns = elapsed_ns_;
  uint64_t col_ops = 0, row_ops = 0;
  uint64_t max_row = 0, total = 0;
  double max_opc = 0.0;
  for (const auto& [id, page] : pages_) {
    for (const auto& xb : page.crossbars) {
      col_ops += xb.col_ops();
      row_ops += xb.row_ops();
      auto [r, m] = xb.max_row_write_ops();
      (void)r;
      max_row = std::max(max_row, m);
      total += xb.total_write_ops();
      max_opc = std::max(max_opc, xb.ops_per_cell());
    }
  }
  s.col_ops = col_ops;
  s.row_ops = row_ops;
  s.max_row_write_ops = max_row;
  s.total_cell_writes = total;
  s.max_ops_per_cell = max_opc;
  uint64_t logic = 0, read = 0, write = 0;
  for (const auto& [id, page] : pages_)
    for (const auto& xb : page.crossbars) {
      logic += xb.logic_energy_aj();
      read += xb.read_energy_aj();
      write += xb.write_energy_aj();
    }
  s.energy_logic_aj = logic;
  s.energy_read_aj = read;
  s.energy_write_aj = write;
  return s;
}

const Crossbar& PimModule::crossbar(uint64_t page_id, uint32_t index) const {
  return page_at(page_id).crossbars.at(index);
}

void PimModule::replay(const std::vector<TraceRecord>& records) {
  for (const auto& rec : records) {
    while (!has_page(rec.page)) allocate_page();
    switch (rec.kind) {
      case 'W':
        host_write(rec.page, rec.offset, rec.payload);
        break;
      case 'R': {
        auto got = host_read(rec.page, rec.offset, rec.payload.size());
        if (got != rec.payload)
          throw Error("replay: read data diverges from trace at page " +
                      std::to_string(rec.page));
        break;
      }
      case 'P': {
        if (rec.payload.size() != 8 && rec.payload.size() != 16)
          throw ParseError("replay: PIM payload must be 8 or 16 bytes");
        PimRequest req;
        req.page_id = rec.page;
        req.offset = rec.offset;
        for (int b = 0; b < 8; ++b)
          req.data |= uint64_t(rec.payload[b]) << (8 * b);
        if (rec.payload.size() == 16) {
          req.has_ext = true;
          for (int b = 0; b < 8; ++b)
            req.ext |= uint64_t(rec.payload[8 + b]) << (8 * b);
        }
        submit_pim(req);
        break;
      }
      default:
        throw ParseError("replay: unknown record kind");
    }
  }
}

void PimModule::serialize(std::ostream& os) const {
  write_string(os, cfg_.to_json());
  write_u64(os, next_page_);
  write_u64(os, pages_.size());
  for (const auto& [id, page] : pages_) {
    write_u64(os, id);
    write_u32(os, page.bank);
    write_u32(os, page.compute_region.start);
    write_u32(os, page.compute_region.len);
    for (const auto& xb : page.crossbars) xb.serialize(os);
  }
  write_u64(os, issue_cursor_ns_);
  write_u64(os, elapsed_ns_);
  write_u64(os, next_ticket_);
  // counters
  for (int i = 0; i < opcode_count; ++i) write_u64(os, counters_.instr_count[i]);
  for (int i = 0; i < opcode_count; ++i)
    write_u64(os, counters_.instr_cycles[i]);
  for (int i = 0; i < opcode_count; ++i)
    write_u64(os, counters_.instr_formula_cycles[i]);
  write_u64(os, counters_.logic_cycles);
  write_u64(os, counters_.pim_requests);
  write_u64(os, counters_.read_requests);
  write_u64(os, counters_.write_requests);
  write_u64(os, counters_.bytes_read);
  write_u64(os, counters_.bytes_written);
  write_u64(os, counters_.crossbar_unit_reads);
}

PimModule PimModule::deserialize(std::istream& is) {
  SystemConfig cfg = SystemConfig::from_json(read_string(is));
  PimModule m(cfg);
  m.next_page_ = read_u64(is);
  uint64_t npages = read_u64(is);
  for (uint64_t i = 0; i < npages; ++i) {
    uint64_t id = read_u64(is);
    Page p;
    p.bank = read_u32(is);
    p.compute_region.start = read_u32(is);
    p.compute_region.len = read_u32(is);
    for (uint32_t x = 0; x < cfg.topology.crossbars_per_page; ++x)
      p.crossbars.push_back(Crossbar::deserialize(is, cfg.geometry));
    m.pages_.emplace(id, std::move(p));
  }
  m.issue_cursor_ns_ = read_u64(is);
  m.elapsed_ns_ = read_u64(is);
  m.next_ticket_ = read_u64(is);
  for (int i = 0; i < opcode_count; ++i)
    m.counters_.instr_count[i] = read_u64(is);
  for (int i = 0; i < opcode_count; ++i)
    m.counters_.instr_cycles[i] = read_u64(is);
  for (int i = 0; i < opcode_count; ++i)
    m.counters_.instr_formula_cycles[i] = read_u64(is);
  m.counters_.logic_cycles = read_u64(is);
  m.counters_.pim_requests = read_u64(is);
  m.counters_.read_requests = read_u64(is);
  m.counters_.write_requests = read_u64(is);
  m.counters_.bytes_read = read_u64(is);
  m.counters_.bytes_written = read_u64(is);
  m.counters_.crossbar_unit_reads = read_u64(is);
  return m;
}

bool PimModule::state_equals(const PimModule& other) const {
  if (pages_.size() != other.pages_.size()) return false;
  auto a = pages_.begin();
  auto b = other.pages_.begin();
  for (; a != pages_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.bank != b->second.bank) return false;
    for (size_t i = 0; i < a->second.crossbars.size(); ++i)
      if (!a->second.crossbars[i].state_equals(b->second.crossbars[i]))
        return false;
  }
  return issue_cursor_ns_ == other.issue_cursor_ns_ &&
         elapsed_ns_ == other.elapsed_ns_;
}

void write_trace_file(const std::string& path,
                      const std::vector<TraceRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open trace file " + path);
  for (const auto& rec : records) out << rec.to_line() << '\n';
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file " + path);
  std::vector<TraceRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    records.push_back(TraceRecord::from_line(line, lineno));
  }
  return records;
}

}  // namespace norsim
