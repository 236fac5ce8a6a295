#ifndef NORSIM_MEMORY_SYSTEM_HPP
#define NORSIM_MEMORY_SYSTEM_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "norsim/address_map.hpp"
#include "norsim/crossbar.hpp"
#include "norsim/request.hpp"

namespace norsim {

struct Topology {
  uint32_t banks_per_module = 64;
  uint32_t subarrays_per_controller = 64;
  uint32_t crossbars_per_subarray = 4;
  uint32_t crossbars_per_page = 64;  // desk-scale default

  uint32_t crossbars_per_controller() const {
    return subarrays_per_controller * crossbars_per_subarray;
  }
  uint32_t controllers_per_page() const {
    uint32_t per = crossbars_per_controller();
    return (crossbars_per_page + per - 1) / per;
  }
  void validate() const {
    if (!banks_per_module || !subarrays_per_controller ||
        !crossbars_per_subarray || !crossbars_per_page)
      throw BoundsError("topology: counts must be positive");
  }
  bool operator==(const Topology&) const = default;
};

struct SystemConfig {
  CrossbarGeometry geometry{};
  EnergyModel energy{};
  TimingModel timing{};
  Topology topology{};
  // empty means the standard placement for geometry/topology
  std::vector<FieldSpec> address_fields{};

  AddressMap make_address_map() const;
  std::string to_json() const;
  static SystemConfig from_json(const std::string& text);
  static SystemConfig from_json_file(const std::string& path);

  bool operator==(const SystemConfig&) const = default;
};

// Counter snapshot; wear numbers are absolute state, everything else is a
// running total since the module was created (or image load).
struct RunStats {
  std::array<uint64_t, opcode_count> instr_count{};
  std::array<uint64_t, opcode_count> instr_cycles{};
  std::array<uint64_t, opcode_count> instr_formula_cycles{};
  uint64_t logic_cycles = 0;
  uint64_t pim_requests = 0;
  uint64_t read_requests = 0;
  uint64_t write_requests = 0;
  uint64_t bytes_read = 0;
  uint64_t bytes_written = 0;
  uint64_t crossbar_unit_reads = 0;
  uint64_t col_ops = 0;
  uint64_t row_ops = 0;
  uint64_t energy_logic_aj = 0;
  uint64_t energy_read_aj = 0;
  uint64_t energy_write_aj = 0;
  uint64_t elapsed_ns = 0;
  uint64_t max_row_write_ops = 0;   // absolute wear, max over crossbars
  uint64_t total_cell_writes = 0;   // absolute wear
  double max_ops_per_cell = 0.0;    // max_row_write_ops / cols

  uint64_t energy_total_aj() const {
    return energy_logic_aj + energy_read_aj + energy_write_aj;
  }
  // counter-wise difference (wear fields are copied from *this)
  RunStats minus(const RunStats& before) const;
};

struct TraceRecord {
  char kind;  // 'R', 'W', 'P'
  uint64_t page = 0;
  uint64_t offset = 0;
  std::vector<uint8_t> payload;

  std::string to_line() const;
  static TraceRecord from_line(const std::string& line, int lineno);
  bool operator==(const TraceRecord&) const = default;
};

struct Ticket {
  uint64_t id = 0;
  uint64_t start_ns = 0;
  uint64_t complete_ns = 0;
};

// A PIM module: pages of crossbars behind a media controller. Requests
// update functional state in arrival order; the timeline models per-page
// controller occupancy, so requests to other controllers overlap while
// one is busy.
class PimModule {
 public:
  explicit PimModule(SystemConfig cfg);

  const SystemConfig& config() const { return cfg_; }
  const AddressMap& address_map() const { return map_; }

  uint64_t allocate_page();
  bool has_page(uint64_t page_id) const { return pages_.count(page_id) > 0; }
  uint64_t page_count() const { return pages_.size(); }
  ColRange page_compute_region(uint64_t page_id) const;

  void host_write(uint64_t page_id, uint64_t offset,
                  std::span<const uint8_t> bytes);
  std::vector<uint8_t> host_read(uint64_t page_id, uint64_t offset,
                                 size_t len);
  Ticket submit_pim(const PimRequest& req);
  std::vector<uint64_t> advance(uint64_t now_ns);

  RunStats stats() const;
  const Crossbar& crossbar(uint64_t page_id, uint32_t index) const;
  std::vector<uint64_t> page_row_write_sums(uint64_t page_id,
                                            uint32_t index) const {
    return crossbar(page_id, index).row_write_sums();
  }

  const std::vector<TraceRecord>& trace() const { return trace_; }
  void clear_trace() { trace_.clear(); }
  void set_trace_enabled(bool on) { trace_enabled_ = on; }
  // Re-issues a recorded stream; read records are verified against the
  // current state.
  void replay(const std::vector<TraceRecord>& records);

  void serialize(std::ostream& os) const;
  static PimModule deserialize(std::istream& is);

  bool state_equals(const PimModule& other) const;

 private:
  struct Page {
    uint32_t bank = 0;
    ColRange compute_region{};
    std::vector<Crossbar> crossbars;
  };
  Page& page_at(uint64_t id);
  const Page& page_at(uint64_t id) const;
  // serialize controller occupancy around [first, last] controller of a
  // page for a request lasting duration_ns
  Ticket schedule(uint64_t page_id, uint32_t first_ctrl, uint32_t last_ctrl,
                  uint64_t duration_ns);

  SystemConfig cfg_;
  AddressMap map_;
  std::map<uint64_t, Page> pages_;
  uint64_t next_page_ = 0;
  // timeline
  uint64_t issue_cursor_ns_ = 0;
  uint64_t elapsed_ns_ = 0;
  std::map<std::pair<uint64_t, uint32_t>, uint64_t> ctrl_busy_until_;
  uint64_t next_ticket_ = 1;
  std::vector<Ticket> pending_;
  // counters
  RunStats counters_{};
  bool trace_enabled_ = true;
  std::vector<TraceRecord> trace_;
};

void write_trace_file(const std::string& path,
                      const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_trace_file(const std::string& path);

}  // namespace norsim

#endif
