#include "norsim/oracle.hpp"

#include <algorithm>

namespace norsim {

OracleTable OracleTable::from_records(
    const RelationLayout& layout,
    const std::vector<std::vector<Scalar>>& records) {
  OracleTable t;
  t.layout = &layout;
  t.rows.reserve(records.size());
  for (const auto& rec : records) {
    std::vector<int64_t> row(rec.size());
    for (size_t a = 0; a < rec.size(); ++a)
      row[a] = logical_value(layout.attributes[a], layout.dicts[a], rec[a]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

// Term/filter evaluation tracks the attribute bytes each step examines so
// the baseline read count reflects a short-circuiting column scan.
struct Eval {
  const RelationLayout& layout;
  const std::vector<std::vector<int64_t>>& rows;
  uint64_t bytes = 0;
  bool count_bytes = true;

  uint64_t attr_bytes(int idx) const {
    return (layout.slots[idx].bits + 7) / 8;
  }

  int64_t term(const BoundTerm& t, uint64_t row) {
    switch (t.kind) {
      case BoundTerm::Kind::Attr:
        if (count_bytes) bytes += attr_bytes(t.attr_index);
        return rows[row][t.attr_index];
      case BoundTerm::Kind::Const:
        return t.constant;
      case BoundTerm::Kind::Add:
        return term(*t.lhs, row) + term(*t.rhs, row);
      case BoundTerm::Kind::Mul:
        return term(*t.lhs, row) * term(*t.rhs, row);
    }
    return 0;
  }

  bool compare(const BoundBool& n, uint64_t row) {
    int64_t a = term(*n.lhs, row);
    int64_t b = term(*n.rhs, row);
    switch (n.op) {
      case CmpOp::Eq:
        return a == b;
      case CmpOp::Ne:
        return a != b;
      case CmpOp::Lt:
        return a < b;
      case CmpOp::Gt:
        return a > b;
      case CmpOp::Le:
        return a <= b;
      case CmpOp::Ge:
        return a >= b;
    }
    return false;
  }

  bool filter(const BoundBool& n, uint64_t row) {
    switch (n.kind) {
      case BoundBool::Kind::Cmp:
        return compare(n, row);
      case BoundBool::Kind::And: {
        const BoundBool* first = n.a.get();
        const BoundBool* second = n.b.get();
        if (order_.count(&n) && order_.at(&n)) std::swap(first, second);
        return filter(*first, row) && filter(*second, row);
      }
      case BoundBool::Kind::Or: {
        const BoundBool* first = n.a.get();
        const BoundBool* second = n.b.get();
        if (order_.count(&n) && order_.at(&n)) std::swap(first, second);
        return filter(*first, row) || filter(*second, row);
      }
      case BoundBool::Kind::Not:
        return !filter(*n.a, row);
    }
    return false;
  }

  // Offline pass: measure each child's pass rate, then evaluate AND with
  // the more selective child first and OR with the less selective first.
  void choose_order(const BoundBool& n) {
    if (n.kind == BoundBool::Kind::Cmp) return;
    if (n.kind == BoundBool::Kind::Not) {
      choose_order(*n.a);
      return;
    }
    choose_order(*n.a);
    choose_order(*n.b);
    uint64_t pass_a = 0, pass_b = 0;
    bool saved = count_bytes;
    count_bytes = false;
    for (uint64_t r = 0; r < rows.size(); ++r) {
      if (filter(*n.a, r)) ++pass_a;
      if (filter(*n.b, r)) ++pass_b;
    }
    count_bytes = saved;
    bool swap = n.kind == BoundBool::Kind::And ? pass_b < pass_a
                                               : pass_b > pass_a;
    order_[&n] = swap;
  }

  std::map<const BoundBool*, bool> order_;
};

}  // namespace

OracleResult oracle_execute(const BoundQuery& query,
                            const OracleTable& table) {
  const RelationLayout& layout = *query.layout;
  Eval eval{layout, table.rows, 0, true, {}};
  if (query.filter) eval.choose_order(*query.filter);

  OracleResult out;
  struct Acc {
    int64_t sum = 0;
    int64_t min = 0;
    int64_t max = 0;
    bool any = false;
  };
  std::vector<Acc> accs(query.aggregates.size());

  for (uint64_t r = 0; r < table.rows.size(); ++r) {
    bool pass = !query.filter || eval.filter(*query.filter, r);
    if (!pass) continue;
    ++out.matching;
    if (query.select_ids) out.ids.push_back(r);
    for (size_t i = 0; i < query.aggregates.size(); ++i) {
      const auto& agg = query.aggregates[i];
      if (agg.kind == AggKind::Count) continue;
      int64_t v = eval.term(*agg.term, r);
      auto& acc = accs[i];
      acc.sum += v;
      acc.min = acc.any ? std::min(acc.min, v) : v;
      acc.max = acc.any ? std::max(acc.max, v) : v;
      acc.any = true;
    }
  }
  out.baseline_bytes_read = eval.bytes;

  for (size_t i = 0; i < query.aggregates.size(); ++i) {
    const auto& agg = query.aggregates[i];
    AggregateResult res;
    res.kind = agg.kind;
    res.label = agg.label;
    switch (agg.kind) {
      case AggKind::Sum:
        res.value = accs[i].sum;
        break;
      case AggKind::Count:
        res.value = int64_t(out.matching);
        break;
      case AggKind::Min:
        // empty input saturates to the attribute's all-ones pattern,
        // matching what a masked in-array reduce yields
        res.value = accs[i].any
                        ? accs[i].min
                        : int64_t((1ull << layout.slots[agg.term->attr_index]
                                              .bits) -
                                  1);
        break;
      case AggKind::Max:
        res.value = accs[i].any ? accs[i].max : 0;
        break;
      case AggKind::Avg:
        res.num = accs[i].sum;
        res.den = int64_t(out.matching);
        break;
    }
    out.aggregates.push_back(std::move(res));
  }
  return out;
}

Verdict compare_results(const std::vector<uint64_t>& pim_ids,
                        const std::vector<AggregateResult>& pim_aggs,
                        const OracleResult& ref, bool select_ids) {
  Verdict v;
  if (select_ids) {
    std::vector<uint64_t> a = pim_ids, b = ref.ids;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      v.pass = false;
      // name the first divergent id
      size_t i = 0;
      while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
      if (i < a.size() && (i >= b.size() || a[i] < b[i]))
        v.detail = "id " + std::to_string(a[i]) +
                   " reported but not in the reference";
      else
        v.detail = "id " + std::to_string(b[i]) + " missing from the result";
      return v;
    }
  }
  if (pim_aggs.size() != ref.aggregates.size()) {
    v.pass = false;
    v.detail = "aggregate count differs";
    return v;
  }
  for (size_t i = 0; i < pim_aggs.size(); ++i) {
    const auto& p = pim_aggs[i];
    const auto& r = ref.aggregates[i];
    bool same = p.kind == r.kind &&
                (p.kind == AggKind::Avg
                     ? (p.num == r.num && p.den == r.den)
                     : p.value == r.value);
    if (!same) {
      v.pass = false;
      v.detail = r.label + ": got " +
                 (p.kind == AggKind::Avg
                      ? std::to_string(p.num) + "/" + std::to_string(p.den)
                      : std::to_string(p.value)) +
                 ", reference " +
                 (r.kind == AggKind::Avg
                      ? std::to_string(r.num) + "/" + std::to_string(r.den)
                      : std::to_string(r.value));
      return v;
    }
  }
  return v;
}

}  // namespace norsim
