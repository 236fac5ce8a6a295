#ifndef NORSIM_IMAGE_HPP
#define NORSIM_IMAGE_HPP

#include <memory>
#include <string>
#include <vector>

#include "norsim/layout.hpp"
#include "norsim/memory_system.hpp"
#include "norsim/schema.hpp"

namespace norsim {

// A persisted memory image: the module (bit planes, wear, counters), the
// relation layouts on it, and the counter snapshot taken when loading
// finished so query-phase accounting stays separate.
// Byte layout is documented in docs/formats.md.
struct Workspace {
  std::unique_ptr<PimModule> module;
  std::vector<RelationSchema> schemas;
  std::vector<RelationLayout> layouts;
  RunStats load_baseline{};

  RelationLayout& layout_for(const std::string& relation);
  const RelationLayout& layout_for(const std::string& relation) const;
};

void save_image(const std::string& path, const Workspace& ws);
Workspace load_image(const std::string& path);

void save_image_bytes(std::ostream& os, const Workspace& ws);
Workspace load_image_bytes(std::istream& is);

}  // namespace norsim

#endif
