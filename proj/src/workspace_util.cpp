#include "norsim/workspace_util.hpp"

namespace norsim {

std::vector<std::vector<Scalar>> dump_records(const RelationLayout& layout,
                                              const PimModule& module) {
  const auto& geom = layout.geometry;
  uint64_t per_page = layout.records_per_page(module.config().topology);
  std::vector<std::vector<Scalar>> out;
  out.reserve(layout.row_count);
  for (uint64_t id = 0; id < layout.row_count; ++id) {
    uint64_t page = layout.pages.at(id / per_page);
    uint64_t in_page = id % per_page;
    const Crossbar& xb =
        module.crossbar(page, uint32_t(in_page / geom.rows));
    uint32_t row = uint32_t(in_page % geom.rows);
    std::vector<Scalar> rec;
    rec.reserve(layout.attributes.size());
    for (size_t a = 0; a < layout.attributes.size(); ++a)
      rec.push_back(decode_value(
          layout.attributes[a], layout.dicts[a],
          xb.peek_field(row, layout.slots[a].start_col,
                        layout.slots[a].bits)));
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace norsim
