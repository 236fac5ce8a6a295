#include "norsim/executor.hpp"

#include <algorithm>

namespace norsim {

namespace {

struct SlotData {
  // per crossbar: packed record mask or a single value
  std::vector<std::vector<uint64_t>> masks;
  std::vector<uint64_t> values;
};

// bitwise evaluation of the host combine tree for one crossbar
std::vector<uint64_t> eval_mask(const ExecutionPlan& plan, int node,
                                const std::vector<SlotData>& slots,
                                uint32_t xbar, uint32_t words,
                                uint64_t last_mask) {
  const HostNode& n = plan.mask_nodes[size_t(node)];
  switch (n.kind) {
    case HostNode::Kind::Slot:
      return slots[n.slot].masks[xbar];
    case HostNode::Kind::Not: {
      auto a = eval_mask(plan, n.a, slots, xbar, words, last_mask);
      for (auto& w : a) w = ~w;
      a[words - 1] &= last_mask;
      return a;
    }
    case HostNode::Kind::And:
    case HostNode::Kind::Or: {
      auto a = eval_mask(plan, n.a, slots, xbar, words, last_mask);
      auto b = eval_mask(plan, n.b, slots, xbar, words, last_mask);
      for (uint32_t w = 0; w < words; ++w)
        a[w] = n.kind == HostNode::Kind::And ? (a[w] & b[w]) : (a[w] | b[w]);
      return a;
    }
  }
  return {};
}

}  // namespace

QueryResult execute(const ExecutionPlan& plan, const RelationLayout& layout,
                    PimModule& module) {
  const auto& map = module.address_map();
  const auto& geom = layout.geometry;
  const uint32_t rw = geom.read_width_bits;
  const uint32_t ub = map.unit_bytes();
  const uint32_t span = map.crossbars_per_line();
  const uint32_t xbars = map.crossbars_per_page();
  const uint32_t rows = geom.rows;
  const uint32_t tr_rows = geom.transform_rows();
  const uint32_t words = geom.row_words();
  const uint64_t last_mask =
      rows % 64 == 0 ? ~0ull : ((1ull << (rows % 64)) - 1);

  RunStats before = module.stats();
  std::vector<std::vector<std::vector<uint64_t>>> wear_before;
  for (uint64_t page : layout.pages) {
    std::vector<std::vector<uint64_t>> page_sums;
    for (uint32_t x = 0; x < xbars; ++x)
      page_sums.push_back(module.page_row_write_sums(page, x));
    wear_before.push_back(std::move(page_sums));
  }

  QueryResult out;
  struct AggAcc {
    int64_t sum = 0;
    uint64_t min = 0;
    uint64_t max = 0;
    int64_t count_sum = 0;
  };
  std::vector<AggAcc> accs(plan.aggregates.size());
  for (size_t a = 0; a < plan.aggregates.size(); ++a) {
    // MIN saturates when nothing matches
    uint32_t w = plan.aggregates[a].value_width;
    accs[a].min = w >= 64 ? ~0ull : ((1ull << w) - 1);
  }

  for (size_t pi = 0; pi < layout.pages.size(); ++pi) {
    uint64_t page = layout.pages[pi];
    std::vector<SlotData> slots(plan.slot_count);
    for (const auto& phase : plan.phases) {
      for (const auto& instr : phase.compute)
        module.submit_pim(encode_request(instr, map, page));
      for (const auto& read : phase.reads) {
        SlotData& slot = slots[read.slot];
        if (read.kind == PlannedRead::Kind::Bitmask) {
          slot.masks.assign(xbars, std::vector<uint64_t>(words, 0));
          uint32_t unit = read.col / rw;
          for (uint32_t r = 0; r < tr_rows; ++r) {
            for (uint32_t g = 0; g < xbars; g += span) {
              uint32_t n = std::min(span, xbars - g);
              auto line = module.host_read(
                  page, map.encode({g, read.row + r, unit, 0}),
                  size_t(n) * ub);
              for (uint32_t x = 0; x < n; ++x) {
                uint64_t bits = 0;
                for (uint32_t b = 0; b < ub; ++b)
                  bits |= uint64_t(line[size_t(x) * ub + b]) << (8 * b);
                // these rw bits are records [r*rw, r*rw+rw) of crossbar g+x
                uint64_t base = uint64_t(r) * rw;
                for (uint32_t i = 0; i < rw && base + i < rows; ++i)
                  if ((bits >> i) & 1)
                    slot.masks[g + x][(base + i) >> 6] |=
                        1ull << ((base + i) & 63);
              }
            }
          }
        } else {
          slot.values.assign(xbars, 0);
          uint32_t u0 = read.col / rw;
          uint32_t u1 = (read.col + read.width - 1) / rw;
          for (uint32_t u = u0; u <= u1; ++u) {
            for (uint32_t g = 0; g < xbars; g += span) {
              uint32_t n = std::min(span, xbars - g);
              auto line = module.host_read(
                  page, map.encode({g, read.row, u, 0}), size_t(n) * ub);
              for (uint32_t x = 0; x < n; ++x) {
                uint64_t bits = 0;
                for (uint32_t b = 0; b < ub; ++b)
                  bits |= uint64_t(line[size_t(x) * ub + b]) << (8 * b);
                for (uint32_t i = 0; i < rw; ++i) {
                  uint32_t col = u * rw + i;
                  if (col < read.col || col >= read.col + read.width)
                    continue;
                  if ((bits >> i) & 1)
                    slot.values[g + x] |= 1ull << (col - read.col);
                }
              }
            }
          }
        }
      }
    }

    if (plan.mask_root >= 0) {
      for (uint32_t x = 0; x < xbars; ++x) {
        auto mask =
            eval_mask(plan, plan.mask_root, slots, x, words, last_mask);
        for (uint32_t w = 0; w < words; ++w) {
          uint64_t bits = mask[w];
          while (bits) {
            uint32_t b = uint32_t(__builtin_ctzll(bits));
            bits &= bits - 1;
            uint64_t row = uint64_t(w) * 64 + b;
            out.ids.push_back((pi * xbars + x) * uint64_t(rows) + row);
          }
        }
      }
    }
    for (size_t a = 0; a < plan.aggregates.size(); ++a) {
      const auto& agg = plan.aggregates[a];
      for (uint32_t x = 0; x < xbars; ++x) {
        uint64_t v = slots[agg.value_slot].values[x];
        switch (agg.kind) {
          case AggKind::Sum:
          case AggKind::Count:
            accs[a].sum += int64_t(v);
            break;
          case AggKind::Min:
            accs[a].min = std::min(accs[a].min, v);
            break;
          case AggKind::Max:
            accs[a].max = std::max(accs[a].max, v);
            break;
          case AggKind::Avg:
            accs[a].sum += int64_t(v);
            accs[a].count_sum +=
                int64_t(slots[agg.count_slot].values[x]);
            break;
        }
      }
    }
  }

  std::sort(out.ids.begin(), out.ids.end());
  out.matching = out.ids.size();
  for (size_t a = 0; a < plan.aggregates.size(); ++a) {
    const auto& agg = plan.aggregates[a];
    AggregateResult res;
    res.kind = agg.kind;
    res.label = agg.label;
    switch (agg.kind) {
      case AggKind::Sum:
      case AggKind::Count:
        res.value = accs[a].sum;
        break;
      case AggKind::Min:
        res.value = int64_t(accs[a].min);
        break;
      case AggKind::Max:
        res.value = int64_t(accs[a].max);
        break;
      case AggKind::Avg:
        res.num = accs[a].sum;
        res.den = accs[a].count_sum;
        break;
    }
    out.aggregates.push_back(std::move(res));
  }

  RunStats after = module.stats();
  out.delta = after.minus(before);
  out.pim_bytes_read = out.delta.bytes_read;
  uint64_t max_row_delta = 0;
  for (size_t pi = 0; pi < layout.pages.size(); ++pi) {
    for (uint32_t x = 0; x < xbars; ++x) {
      auto now = module.page_row_write_sums(layout.pages[pi], x);
      const auto& was = wear_before[pi][x];
      for (uint32_t r = 0; r < rows; ++r)
        max_row_delta = std::max(max_row_delta, now[r] - was[r]);
    }
  }
  out.max_row_write_delta = max_row_delta;
  out.ops_per_cell_delta = double(max_row_delta) / double(geom.cols);
  return out;
}

std::pair<double, bool> read_reduction(uint64_t baseline_bytes,
                                       uint64_t pim_bytes) {
  if (pim_bytes == 0) return {0.0, true};
  return {double(baseline_bytes) / double(pim_bytes), false};
}

}  // namespace norsim
