#ifndef NORSIM_REPORT_HPP
#define NORSIM_REPORT_HPP

#include <string>

#include "norsim/executor.hpp"

namespace norsim {

// Per-query accounting: cycles by instruction with the published formula
// values alongside, bytes moved on both paths, energy by class, wear.
struct RunReport {
  std::string query;
  std::string relation;
  QueryResult result;
  uint64_t baseline_bytes = 0;
  double reduction_ratio = 0.0;
  bool reduction_infinite = false;
  // SET/RESET wear is counted at the same weight as gate outputs
  bool set_reset_wear_equal = true;

  std::string to_json() const;
  std::string to_text() const;
};

RunReport make_report(const std::string& query_text,
                      const std::string& relation, QueryResult result,
                      uint64_t baseline_bytes);

// measured vs published cycle counts for the whole instruction set
std::string formula_table_text(const CrossbarGeometry& geom,
                               const std::vector<uint32_t>& widths);
std::string formula_table_json(const CrossbarGeometry& geom,
                               const std::vector<uint32_t>& widths);

}  // namespace norsim

#endif
