#ifndef NORSIM_WORKSPACE_UTIL_HPP
#define NORSIM_WORKSPACE_UTIL_HPP

#include "norsim/image.hpp"

namespace norsim {

// Decodes every loaded record of a relation straight from crossbar state,
// bypassing the host data path so no counter moves.
std::vector<std::vector<Scalar>> dump_records(const RelationLayout& layout,
                                              const PimModule& module);

}  // namespace norsim

#endif
