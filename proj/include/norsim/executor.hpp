#ifndef NORSIM_EXECUTOR_HPP
#define NORSIM_EXECUTOR_HPP

#include "norsim/oracle.hpp"
#include "norsim/planner.hpp"

namespace norsim {

struct QueryResult {
  std::vector<uint64_t> ids;
  std::vector<AggregateResult> aggregates;
  uint64_t matching = 0;  // only meaningful when ids were read
  RunStats delta;         // counters accrued by this execution
  uint64_t max_row_write_delta = 0;  // wear added to the worst row
  double ops_per_cell_delta = 0.0;   // per the endurance definition
  uint64_t pim_bytes_read = 0;
};

// Runs a compiled plan page by page, reads partial results over the host
// data path, and combines them.
QueryResult execute(const ExecutionPlan& plan, const RelationLayout& layout,
                    PimModule& module);

// baseline bytes / simulated bytes; infinite when the PIM path read
// nothing (flagged by the bool).
std::pair<double, bool> read_reduction(uint64_t baseline_bytes,
                                       uint64_t pim_bytes);

}  // namespace norsim

#endif
