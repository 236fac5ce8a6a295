#ifndef NORSIM_ERROR_HPP
#define NORSIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace norsim {

// Error categories used across the simulator. Everything derives from
// Error so callers can catch the whole family at the CLI boundary.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Index outside the crossbar/page/field it addresses.
class BoundsError : public Error {
 public:
  explicit BoundsError(const std::string& what) : Error(what) {}
};

// A logic micro-op names the same cell as input and output. MAGIC gates
// drive a distinct output device, so this is never legal.
class AliasError : public Error {
 public:
  explicit AliasError(const std::string& what) : Error(what) {}
};

// Not enough compute area / destination area for an expansion.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(what) {}
};

// Operand width outside what an instruction supports.
class WidthError : public Error {
 public:
  explicit WidthError(const std::string& what) : Error(what) {}
};

// A PIM request payload that does not decode to a valid instruction.
class CodecError : public Error {
 public:
  explicit CodecError(const std::string& what) : Error(what) {}
};

// Value outside an attribute's encodable domain.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// Ill-typed query against a relation layout.
class TypeError : public Error {
 public:
  explicit TypeError(const std::string& what) : Error(what) {}
};

// Text input (query, schema, config, trace) that does not parse.
// Carries a 1-based line/column when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int col = 0)
      : Error(format(what, line, col)), line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  static std::string format(const std::string& what, int line, int col) {
    if (line <= 0) return what;
    return what + " (line " + std::to_string(line) + ", col " +
           std::to_string(col) + ")";
  }
  int line_;
  int col_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace norsim

#endif
