#ifndef NORSIM_SERIALIZE_UTIL_HPP
#define NORSIM_SERIALIZE_UTIL_HPP

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "norsim/error.hpp"

// Little-endian primitives for the memory-image format.

namespace norsim {

inline void write_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xFF;
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xFF;
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw IoError("image: truncated u32");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(b[i]) << (8 * i);
  return v;
}

inline uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw IoError("image: truncated u64");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
  return v;
}

inline void write_u64_vec(std::ostream& os, const std::vector<uint64_t>& v) {
  for (uint64_t x : v) write_u64(os, x);
}

inline std::vector<uint64_t> read_u64_vec(std::istream& is, size_t n) {
  std::vector<uint64_t> v(n);
  for (auto& x : v) x = read_u64(is);
  return v;
}

inline void write_u32_vec(std::ostream& os, const std::vector<uint32_t>& v) {
  for (uint32_t x : v) write_u32(os, x);
}

inline std::vector<uint32_t> read_u32_vec(std::istream& is, size_t n) {
  std::vector<uint32_t> v(n);
  for (auto& x : v) x = read_u32(is);
  return v;
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is) {
  uint64_t n = read_u64(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw IoError("image: truncated string");
  return s;
}

}  // namespace norsim

#endif
