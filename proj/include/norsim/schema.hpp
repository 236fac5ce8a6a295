#ifndef NORSIM_SCHEMA_HPP
#define NORSIM_SCHEMA_HPP

#include <string>
#include <vector>

#include "norsim/layout.hpp"

namespace norsim {

// Schema files are JSON: a list of relations, each with typed, encoded
// attributes. See docs/formats.md for the exact shape.
std::vector<RelationSchema> parse_schema_json(const std::string& text);
std::vector<RelationSchema> load_schema_file(const std::string& path);
std::string schema_to_json(const std::vector<RelationSchema>& schemas);

// Built-in desk-scale schema: a lineitem-like and a customer-like
// relation sized so a record fits one crossbar row.
std::vector<RelationSchema> desk_schema();

}  // namespace norsim

#endif
