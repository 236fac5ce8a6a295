#ifndef NORSIM_REQUEST_HPP
#define NORSIM_REQUEST_HPP

#include <cstdint>

#include "norsim/address_map.hpp"
#include "norsim/isa.hpp"

namespace norsim {

// A PIM request is write-like: the address names the page and result
// location, the data word carries the instruction. Immediates wider than
// the inline field travel in one extension word.
//
// Data word layout (LSB first):
//   [ 0: 7] opcode          [ 8:17] src1_col    [18:27] src1_len
//   [28:37] src2_col        [38:47] src2_len or imm_len
//   [48]    imm_present     [49]    ext_present
//   [50:52] dst bit offset within the addressed byte
//   [53:63] inline immediate
struct PimRequest {
  uint64_t page_id = 0;
  uint64_t offset = 0;
  uint64_t data = 0;
  bool has_ext = false;
  uint64_t ext = 0;

  bool operator==(const PimRequest&) const = default;
};

constexpr uint32_t inline_imm_bits = 11;

PimRequest encode_request(const PimInstruction& instr, const AddressMap& map,
                          uint64_t page_id);

// page_compute_region supplies the page's configured scratch area for
// everything except ConfigurePage itself, which carries a region in its
// operand fields.
PimInstruction decode_request(const PimRequest& req, const AddressMap& map,
                              const ColRange& page_compute_region);

}  // namespace norsim

#endif
