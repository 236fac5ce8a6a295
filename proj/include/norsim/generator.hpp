#ifndef NORSIM_GENERATOR_HPP
#define NORSIM_GENERATOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "norsim/layout.hpp"

namespace norsim {

// Seeded desk-scale data generation. Same seed, same bytes.
struct GeneratorSpec {
  uint64_t seed = 1;
  struct Relation {
    std::string name;
    uint64_t rows = 0;
  };
  std::vector<Relation> relations;

  std::string to_json() const;
  static GeneratorSpec from_json(const std::string& text);
  static GeneratorSpec from_json_file(const std::string& path);
};

// Stateless splitmix64; stable across platforms.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  uint64_t below(uint64_t bound) { return bound ? next() % bound : 0; }
  int64_t in_range(int64_t lo, int64_t hi) {
    return lo + int64_t(below(uint64_t(hi - lo + 1)));
  }
};

std::vector<std::vector<Scalar>> generate_records(const RelationSchema& schema,
                                                  uint64_t rows,
                                                  uint64_t seed);

void write_tbl_file(const std::string& path, const RelationSchema& schema,
                    const std::vector<std::vector<Scalar>>& records);
std::vector<std::vector<Scalar>> read_tbl_file(const std::string& path,
                                               const RelationSchema& schema);

}  // namespace norsim

#endif
