#include "norsim/request.hpp"

#include "norsim/error.hpp"

namespace norsim {

namespace {

constexpr uint32_t opcode_shift = 0;
constexpr uint32_t src1_col_shift = 8;
constexpr uint32_t src1_len_shift = 18;
constexpr uint32_t src2_col_shift = 28;
constexpr uint32_t src2_len_shift = 38;
constexpr uint32_t imm_present_shift = 48;
constexpr uint32_t ext_present_shift = 49;
constexpr uint32_t dst_bit_shift = 50;
constexpr uint32_t inline_imm_shift = 53;

constexpr uint64_t field10 = 0x3FF;

uint64_t get(uint64_t word, uint32_t shift, uint64_t mask) {
  return (word >> shift) & mask;
}

}  // namespace

PimRequest encode_request(const PimInstruction& in, const AddressMap& map,
                          uint64_t page_id) {
  const auto& d = opcode_descriptor(in.opcode);
  PimRequest req;
  req.page_id = page_id;

  DecodedAddr addr;
  addr.crossbar = 0;  // PIM requests target all crossbars of the page
  addr.row = d.uses_dst_row ? in.dst_row : 0;
  addr.unit = in.dst_col / map.geometry().read_width_bits;
  addr.byte = (in.dst_col % map.geometry().read_width_bits) / 8;
  uint32_t dst_bit = in.dst_col % 8;
  req.offset = map.encode(addr);

  if (in.src1.start > field10 || in.src1.len > field10 ||
      in.src2.start > field10 || in.src2.len > field10)
    throw CodecError("request: operand field exceeds 10 bits");

  uint64_t w = 0;
  w |= uint64_t(static_cast<uint8_t>(in.opcode)) << opcode_shift;
  if (in.opcode == Opcode::ConfigurePage) {
    // compute region rides in the src1 fields
    w |= uint64_t(in.compute_region.start) << src1_col_shift;
    w |= uint64_t(in.compute_region.len) << src1_len_shift;
  } else {
    w |= uint64_t(in.src1.start) << src1_col_shift;
    w |= uint64_t(in.src1.len) << src1_len_shift;
  }
  if (d.has_src2) {
    w |= uint64_t(in.src2.start) << src2_col_shift;
    w |= uint64_t(in.src2.len) << src2_len_shift;
  }
  w |= uint64_t(dst_bit) << dst_bit_shift;
  if (d.has_imm) {
    w |= uint64_t(in.imm_bits) << src2_len_shift;
    w |= 1ull << imm_present_shift;
    if (in.imm_bits <= inline_imm_bits) {
      w |= (in.immediate & ((1ull << inline_imm_bits) - 1))
           << inline_imm_shift;
    } else {
      w |= 1ull << ext_present_shift;
      req.has_ext = true;
      req.ext = in.immediate;
    }
  }
  req.data = w;
  return req;
}

PimInstruction decode_request(const PimRequest& req, const AddressMap& map,
                              const ColRange& page_compute_region) {
  uint64_t w = req.data;
  uint64_t op_raw = get(w, opcode_shift, 0xFF);
  if (op_raw >= opcode_count)
    throw CodecError("request: unknown opcode " + std::to_string(op_raw));
  PimInstruction in;
  in.opcode = static_cast<Opcode>(op_raw);
  const auto& d = opcode_descriptor(in.opcode);

  DecodedAddr addr = map.decode(req.offset);
  in.dst_col = addr.unit * map.geometry().read_width_bits + addr.byte * 8 +
               uint32_t(get(w, dst_bit_shift, 0x7));
  in.dst_row = d.uses_dst_row ? addr.row : 0;

  if (in.opcode == Opcode::ConfigurePage) {
    in.compute_region.start = uint32_t(get(w, src1_col_shift, field10));
    in.compute_region.len = uint32_t(get(w, src1_len_shift, field10));
    in.dst_col = 0;
    return in;
  }
  in.src1.start = uint32_t(get(w, src1_col_shift, field10));
  in.src1.len = uint32_t(get(w, src1_len_shift, field10));
  if (d.has_src2) {
    in.src2.start = uint32_t(get(w, src2_col_shift, field10));
    in.src2.len = uint32_t(get(w, src2_len_shift, field10));
    in.has_src2 = true;
  }
  bool imm_present = get(w, imm_present_shift, 1);
  if (imm_present != d.has_imm)
    throw CodecError("request: immediate flag does not match opcode");
  if (d.has_imm) {
    in.has_imm = true;
    in.imm_bits = uint32_t(get(w, src2_len_shift, field10));
    if (get(w, ext_present_shift, 1)) {
      if (!req.has_ext)
        throw CodecError("request: extension word missing");
      in.immediate = req.ext;
    } else {
      if (in.imm_bits > inline_imm_bits)
        throw CodecError("request: immediate too wide for inline field");
      in.immediate =
          get(w, inline_imm_shift, (1ull << inline_imm_bits) - 1) &
          (in.imm_bits >= 64 ? ~0ull : ((1ull << in.imm_bits) - 1));
    }
  }
  in.compute_region = page_compute_region;
  return in;
}

}  // namespace norsim
