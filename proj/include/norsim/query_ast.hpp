#ifndef NORSIM_QUERY_AST_HPP
#define NORSIM_QUERY_AST_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "norsim/layout.hpp"

namespace norsim {

enum class CmpOp : uint8_t { Eq, Ne, Lt, Gt, Le, Ge };
enum class AggKind : uint8_t { Sum, Min, Max, Count, Avg };

const char* cmp_op_name(CmpOp op);
const char* agg_kind_name(AggKind k);

// Arithmetic over attributes and constants: additions and products.
struct TermNode {
  enum class Kind : uint8_t { Attr, Const, Add, Mul } kind;
  std::string attr;      // Attr
  std::string literal;   // Const: raw token text, typed during binding
  bool literal_is_string = false;
  std::unique_ptr<TermNode> lhs, rhs;
};

struct BoolNode {
  enum class Kind : uint8_t { Cmp, And, Or, Not } kind;
  CmpOp op{};  // Cmp
  std::unique_ptr<TermNode> lhs, rhs;
  std::unique_ptr<BoolNode> a, b;
};

struct Aggregate {
  AggKind kind;
  std::unique_ptr<TermNode> term;  // SUM argument; plain attr for MIN/MAX/AVG
  std::string label;               // display text
};

struct QueryAst {
  std::string relation;
  bool select_ids = false;
  std::vector<Aggregate> aggregates;
  std::unique_ptr<BoolNode> filter;  // null means no WHERE clause
};

QueryAst parse_query(const std::string& text);

// ---------------------------------------------------------------------
// Bound form: attribute indices resolved, constants scaled to each
// attribute's logical units, widths known. Shared by the planner and the
// reference executor.

struct BoundTerm {
  enum class Kind : uint8_t { Attr, Const, Add, Mul } kind;
  int attr_index = -1;
  int64_t constant = 0;
  std::unique_ptr<BoundTerm> lhs, rhs;

  bool is_attr() const { return kind == Kind::Attr; }
};

struct BoundBool {
  enum class Kind : uint8_t { Cmp, And, Or, Not } kind;
  CmpOp op{};
  std::unique_ptr<BoundTerm> lhs, rhs;
  std::unique_ptr<BoundBool> a, b;
};

struct BoundAggregate {
  AggKind kind;
  std::unique_ptr<BoundTerm> term;  // null for COUNT
  std::string label;
};

struct BoundQuery {
  const RelationLayout* layout = nullptr;
  bool select_ids = false;
  std::vector<BoundAggregate> aggregates;
  std::unique_ptr<BoundBool> filter;
};

// Resolves names and types against a layout. Dictionary-encoded
// attributes only admit equality comparisons against constants of their
// own dictionary.
BoundQuery bind_query(const QueryAst& ast, const RelationLayout& layout);

// Upper bound (exclusive) on the values a term can take, as a bit width.
uint32_t bound_term_width(const BoundTerm& term, const RelationLayout& layout);

std::string query_to_string(const QueryAst& ast);

}  // namespace norsim

#endif
