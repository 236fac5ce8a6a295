#ifndef NORSIM_ORACLE_HPP
#define NORSIM_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "norsim/query_ast.hpp"

namespace norsim {

// In-memory decoded copy of a relation: one row of logical integers per
// record (dictionary attributes hold their codes).
struct OracleTable {
  const RelationLayout* layout = nullptr;
  std::vector<std::vector<int64_t>> rows;

  static OracleTable from_records(
      const RelationLayout& layout,
      const std::vector<std::vector<Scalar>>& records);
};

struct AggregateResult {
  AggKind kind;
  std::string label;
  // SUM/MIN/MAX/COUNT carry value; AVG carries num/den (den = count)
  int64_t value = 0;
  int64_t num = 0;
  int64_t den = 0;
};

struct OracleResult {
  std::vector<uint64_t> ids;
  std::vector<AggregateResult> aggregates;
  uint64_t matching = 0;
  // column-store bytes the host would read for the same operations, with
  // the filter order chosen offline to minimise access and evaluation
  // short-circuited
  uint64_t baseline_bytes_read = 0;
};

// Direct row-scan interpreter; the ground truth for query results.
OracleResult oracle_execute(const BoundQuery& query, const OracleTable& table);

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Compares a simulated result (ids as sets, aggregates exactly) against
// the reference, naming the first divergence.
Verdict compare_results(const std::vector<uint64_t>& pim_ids,
                        const std::vector<AggregateResult>& pim_aggs,
                        const OracleResult& ref, bool select_ids);

}  // namespace norsim

#endif
