#ifndef NORSIM_PLANNER_HPP
#define NORSIM_PLANNER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "norsim/memory_system.hpp"
#include "norsim/query_ast.hpp"

namespace norsim {

struct PlannedRead {
  enum class Kind : uint8_t { Bitmask, Value };
  Kind kind;
  uint32_t col = 0;    // bitmask: transform destination (unit aligned)
  uint32_t row = 0;    // result row
  uint32_t width = 0;  // value width in bits
  uint32_t slot = 0;   // host slot receiving the data
};

// One computation phase and the reads that drain it. Compute starts with
// the ConfigurePage that publishes the phase's scratch area.
struct PlannedPhase {
  std::vector<PimInstruction> compute;
  std::vector<PlannedRead> reads;
  uint32_t footprint_cols = 0;  // free-area columns the phase occupies
};

// Host-side boolean combine over bitmask slots.
struct HostNode {
  enum class Kind : uint8_t { Slot, And, Or, Not } kind = Kind::Slot;
  int a = -1, b = -1;
  uint32_t slot = 0;
};

struct PlannedAggregate {
  AggKind kind;
  std::string label;
  uint32_t value_slot = 0;
  uint32_t count_slot = 0;  // AVG
  uint32_t value_width = 0;
};

struct ExecutionPlan {
  std::string relation;
  bool select_ids = false;
  std::vector<PlannedPhase> phases;
  std::vector<HostNode> mask_nodes;
  int mask_root = -1;  // -1 when the query reads no bitmask
  std::vector<PlannedAggregate> aggregates;
  uint32_t slot_count = 0;
  uint32_t reduce_instructions = 0;
};

// Lowers a bound query onto the relation's free crossbar columns,
// splitting into multiple phases when scratch would overflow.
ExecutionPlan compile(const BoundQuery& query, const SystemConfig& cfg);

}  // namespace norsim

#endif
