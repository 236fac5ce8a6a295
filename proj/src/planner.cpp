#include "norsim/planner.hpp"

#include <algorithm>

namespace norsim {

namespace {

struct PhaseOverflow {};  // internal: current phase ran out of columns

struct TermVal {
  bool is_const = false;
  int64_t constant = 0;
  uint32_t col = 0;
  uint32_t width = 0;
};

struct BoolVal {
  bool in_array = true;
  uint32_t col = 0;
  int node = -1;  // host combine node when spilled
};

uint32_t const_bits(int64_t v) {
  uint64_t u = v <= 0 ? 0 : uint64_t(v);
  uint32_t bits = 1;
  while (bits < 63 && (u >> bits) != 0) ++bits;
  return bits;
}

class Planner {
 public:
  Planner(const BoundQuery& query, const SystemConfig& cfg)
      : q_(query),
        layout_(*query.layout),
        geom_(cfg.geometry),
        rw_(cfg.geometry.read_width_bits) {
    plan_.relation = layout_.name;
    plan_.select_ids = q_.select_ids;
    free_start_ = layout_.free_region.start;
    // the top read-width unit is reserved for staging spilled booleans
    staging_col_ = (geom_.cols / rw_ - 1) * rw_;
    if (staging_col_ < free_start_ + 8)
      throw CapacityError("relation " + layout_.name +
                          ": free area too small to stage results");
    reset_alloc();
  }

  ExecutionPlan run() {
    BoolVal mask = build_filter_mask();
    if (q_.select_ids) {
      to_host(mask);
      plan_.mask_root = mask.node;
    } else {
      if (!mask.in_array)
        throw CapacityError(
            "aggregate filter spilled to the host; it must fit one phase");
      try {
        for (const auto& agg : q_.aggregates) lower_aggregate(agg, mask.col);
      } catch (const PhaseOverflow&) {
        throw CapacityError(
            "aggregation does not fit the free crossbar area");
      }
    }
    finish_phase();
    plan_.slot_count = next_slot_;
    patch_regions();
    return std::move(plan_);
  }

 private:
  // ---- column allocation -------------------------------------------------
  void reset_alloc() {
    alloc_ptr_ = free_start_;
    high_water_ = free_start_;
    phase_demand_ = 0;
  }
  uint32_t alloc(uint32_t width, uint32_t align = 1) {
    uint32_t start = ((alloc_ptr_ + align - 1) / align) * align;
    if (start + width + phase_demand_ > staging_col_) throw PhaseOverflow{};
    alloc_ptr_ = start + width;
    high_water_ = std::max(high_water_, alloc_ptr_);
    return start;
  }

  // ---- instruction emission ----------------------------------------------
  void emit(PimInstruction instr) {
    uint32_t need = scratch_cells(instr, geom_);
    // the scratch region starts at the phase's final high water
    if (std::max(alloc_ptr_, high_water_) + need > geom_.cols)
      throw PhaseOverflow{};
    phase_demand_ = std::max(phase_demand_, need);
    if (instr.opcode == Opcode::ReduceSum || instr.opcode == Opcode::ReduceMin ||
        instr.opcode == Opcode::ReduceMax)
      plan_.reduce_instructions += 1;
    compute_.push_back(instr);
  }

  PimInstruction make(Opcode op, ColRange src1, uint32_t dst) {
    PimInstruction in;
    in.opcode = op;
    in.src1 = src1;
    in.dst_col = dst;
    return in;
  }

  void emit_set_reset(Opcode op, uint32_t col, uint32_t width) {
    PimInstruction in = make(op, {col, width}, col);
    emit(in);
  }

  void emit_copy(uint32_t src, uint32_t width, uint32_t dst) {
    PimInstruction in = make(Opcode::BitwiseOr, {src, width}, dst);
    in.src2 = {src, width};
    in.has_src2 = true;
    emit(in);
  }

  uint32_t widen(const TermVal& f, uint32_t w) {
    uint32_t dst = alloc(w);
    if (w > f.width)
      emit_set_reset(Opcode::ResetCol, dst + f.width, w - f.width);
    emit_copy(f.col, f.width, dst);
    return dst;
  }

  // ---- term lowering -----------------------------------------------------
  TermVal lower_term(const BoundTerm& t) {
    switch (t.kind) {
      case BoundTerm::Kind::Attr: {
        const auto& slot = layout_.slots[t.attr_index];
        return {false, 0, slot.start_col, slot.bits};
      }
      case BoundTerm::Kind::Const:
        return {true, t.constant, 0, 0};
      case BoundTerm::Kind::Add:
        return lower_add(lower_term(*t.lhs), lower_term(*t.rhs));
      case BoundTerm::Kind::Mul:
        return lower_mul(lower_term(*t.lhs), lower_term(*t.rhs));
    }
    throw TypeError("bad term");
  }

  TermVal lower_add(TermVal a, TermVal b) {
    if (a.is_const && b.is_const)
      return {true, a.constant + b.constant, 0, 0};
    if (a.is_const) std::swap(a, b);
    if (b.is_const) {
      if (b.constant < 0) throw TypeError("negative constants unsupported");
      uint32_t w = std::max(a.width, const_bits(b.constant)) + 1;
      uint32_t wide = widen(a, w);
      uint32_t dst = alloc(w);
      PimInstruction in = make(Opcode::AddImm, {wide, w}, dst);
      in.immediate = uint64_t(b.constant);
      in.imm_bits = w;
      in.has_imm = true;
      emit(in);
      return {false, 0, dst, w};
    }
    uint32_t w = std::max(a.width, b.width) + 1;
    uint32_t wa = widen(a, w);
    uint32_t wb = widen(b, w);
    uint32_t dst = alloc(w);
    PimInstruction in = make(Opcode::Add, {wa, w}, dst);
    in.src2 = {wb, w};
    in.has_src2 = true;
    emit(in);
    return {false, 0, dst, w};
  }

  TermVal lower_mul(TermVal a, TermVal b) {
    if (a.is_const && b.is_const)
      return {true, a.constant * b.constant, 0, 0};
    if (a.is_const) std::swap(a, b);
    if (b.is_const) {
      if (b.constant < 0) throw TypeError("negative constants unsupported");
      if (b.constant == 0) return {true, 0, 0, 0};
      // constants have no immediate multiply; stage the constant pattern
      uint32_t cw = const_bits(b.constant);
      uint32_t cfield = alloc(cw);
      emit_set_reset(Opcode::ResetCol, cfield, cw);
      for (uint32_t i = 0; i < cw; ++i)
        if ((uint64_t(b.constant) >> i) & 1)
          emit_set_reset(Opcode::SetCol, cfield + i, 1);
      b = {false, 0, cfield, cw};
    }
    uint32_t dst = alloc(a.width + b.width);
    PimInstruction in = make(Opcode::Multiply, {a.col, a.width}, dst);
    in.src2 = {b.col, b.width};
    in.has_src2 = true;
    emit(in);
    return {false, 0, dst, a.width + b.width};
  }

  // ---- comparison lowering -------------------------------------------------
  uint32_t alloc_bool() { return alloc(1); }

  uint32_t emit_const_bool(bool v) {
    uint32_t col = alloc_bool();
    emit_set_reset(v ? Opcode::SetCol : Opcode::ResetCol, col, 1);
    return col;
  }

  uint32_t emit_not_bool(uint32_t src) {
    uint32_t dst = alloc_bool();
    emit(make(Opcode::BitwiseNot, {src, 1}, dst));
    return dst;
  }

  BoolVal lower_cmp_once(const BoundBool& n) {
    TermVal l = lower_term(*n.lhs);
    TermVal r = lower_term(*n.rhs);
    CmpOp op = n.op;
    if (l.is_const && r.is_const) {
      bool v = false;
      switch (op) {
        case CmpOp::Eq: v = l.constant == r.constant; break;
        case CmpOp::Ne: v = l.constant != r.constant; break;
        case CmpOp::Lt: v = l.constant < r.constant; break;
        case CmpOp::Gt: v = l.constant > r.constant; break;
        case CmpOp::Le: v = l.constant <= r.constant; break;
        case CmpOp::Ge: v = l.constant >= r.constant; break;
      }
      return {true, emit_const_bool(v), -1};
    }
    if (l.is_const) {  // mirror so the field is on the left
      std::swap(l, r);
      switch (op) {
        case CmpOp::Lt: op = CmpOp::Gt; break;
        case CmpOp::Gt: op = CmpOp::Lt; break;
        case CmpOp::Le: op = CmpOp::Ge; break;
        case CmpOp::Ge: op = CmpOp::Le; break;
        default: break;
      }
    }
    if (r.is_const) return lower_cmp_imm(l, op, r.constant);
    return lower_cmp_fields(l, op, r);
  }

  BoolVal lower_cmp_imm(const TermVal& f, CmpOp op, int64_t c) {
    // fold constants outside the unsigned field domain
    if (c < 0) {
      switch (op) {
        case CmpOp::Eq:
        case CmpOp::Lt:
        case CmpOp::Le:
          return {true, emit_const_bool(false), -1};
        default:
          return {true, emit_const_bool(true), -1};
      }
    }
    if (const_bits(c) > f.width) {  // c above the representable range
      switch (op) {
        case CmpOp::Eq:
        case CmpOp::Gt:
        case CmpOp::Ge:
          return {true, emit_const_bool(false), -1};
        default:
          return {true, emit_const_bool(true), -1};
      }
    }
    auto imm_cmp = [&](Opcode opc) {
      uint32_t dst = alloc_bool();
      PimInstruction in = make(opc, {f.col, f.width}, dst);
      in.immediate = uint64_t(c);
      in.imm_bits = f.width;
      in.has_imm = true;
      emit(in);
      return dst;
    };
    switch (op) {
      case CmpOp::Eq:
        return {true, imm_cmp(Opcode::EqualImm), -1};
      case CmpOp::Ne:
        return {true, imm_cmp(Opcode::NotEqualImm), -1};
      case CmpOp::Lt:
        return {true, imm_cmp(Opcode::LessThanImm), -1};
      case CmpOp::Gt:
        return {true, imm_cmp(Opcode::GreaterThanImm), -1};
      case CmpOp::Le:
        return {true, emit_not_bool(imm_cmp(Opcode::GreaterThanImm)), -1};
      case CmpOp::Ge:
        return {true, emit_not_bool(imm_cmp(Opcode::LessThanImm)), -1};
    }
    throw TypeError("bad comparison");
  }

  BoolVal lower_cmp_fields(TermVal l, CmpOp op, TermVal r) {
    uint32_t w = std::max(l.width, r.width);
    uint32_t lc = l.width == w ? l.col : widen(l, w);
    uint32_t rc = r.width == w ? r.col : widen(r, w);
    auto reg_cmp = [&](Opcode opc, uint32_t s1, uint32_t s2) {
      uint32_t dst = alloc_bool();
      PimInstruction in = make(opc, {s1, w}, dst);
      in.src2 = {s2, w};
      in.has_src2 = true;
      emit(in);
      return dst;
    };
    switch (op) {
      case CmpOp::Eq:
        return {true, reg_cmp(Opcode::Equal, lc, rc), -1};
      case CmpOp::Ne:
        return {true, emit_not_bool(reg_cmp(Opcode::Equal, lc, rc)), -1};
      case CmpOp::Lt:
        return {true, reg_cmp(Opcode::LessThan, lc, rc), -1};
      case CmpOp::Gt:
        return {true, reg_cmp(Opcode::LessThan, rc, lc), -1};
      case CmpOp::Le:
        return {true, emit_not_bool(reg_cmp(Opcode::LessThan, rc, lc)), -1};
      case CmpOp::Ge:
        return {true, emit_not_bool(reg_cmp(Opcode::LessThan, lc, rc)), -1};
    }
    throw TypeError("bad comparison");
  }

  // ---- boolean tree --------------------------------------------------------
  BoolVal lower_cmp(const BoundBool& n) {
    size_t mark = compute_.size();
    uint32_t ptr = alloc_ptr_;
    try {
      return lower_cmp_once(n);
    } catch (const PhaseOverflow&) {
      // drop the partial emission, spill, retry in a fresh phase
      compute_.resize(mark);
      alloc_ptr_ = ptr;
      split_phase();
      try {
        return lower_cmp_once(n);
      } catch (const PhaseOverflow&) {
        throw CapacityError(
            "comparison does not fit the free crossbar area even alone");
      }
    }
  }

  BoolVal lower_bool(const BoundBool& n) {
    switch (n.kind) {
      case BoundBool::Kind::Cmp:
        return lower_cmp(n);
      case BoundBool::Kind::Not: {
        BoolVal a = lower_bool(*n.a);
        if (!a.in_array) {
          plan_.mask_nodes.push_back(
              {HostNode::Kind::Not, a.node, -1, 0});
          return {false, 0, int(plan_.mask_nodes.size() - 1)};
        }
        live_.push_back(&a);
        BoolVal out = combine_unary_not(a);
        live_.pop_back();
        return out;
      }
      case BoundBool::Kind::And:
      case BoundBool::Kind::Or: {
        BoolVal a = lower_bool(*n.a);
        live_.push_back(&a);
        BoolVal b = lower_bool(*n.b);
        live_.pop_back();
        return combine(n.kind == BoundBool::Kind::And, a, b);
      }
    }
    throw TypeError("bad filter node");
  }

  BoolVal combine_unary_not(BoolVal& a) {
    try {
      return {true, emit_not_bool(a.col), -1};
    } catch (const PhaseOverflow&) {
      split_phase_with(&a);
      plan_.mask_nodes.push_back({HostNode::Kind::Not, a.node, -1, 0});
      return {false, 0, int(plan_.mask_nodes.size() - 1)};
    }
  }

  BoolVal combine(bool is_and, BoolVal& a, BoolVal& b) {
    if (a.in_array && b.in_array) {
      try {
        uint32_t dst = alloc_bool();
        PimInstruction in = make(
            is_and ? Opcode::BitwiseAnd : Opcode::BitwiseOr, {a.col, 1}, dst);
        in.src2 = {b.col, 1};
        in.has_src2 = true;
        emit(in);
        return {true, dst, -1};
      } catch (const PhaseOverflow&) {
        live_.push_back(&a);
        live_.push_back(&b);
        split_phase();
        live_.pop_back();
        live_.pop_back();
      }
    } else {
      to_host(a);
      to_host(b);
    }
    plan_.mask_nodes.push_back({is_and ? HostNode::Kind::And
                                       : HostNode::Kind::Or,
                                a.node, b.node, 0});
    return {false, 0, int(plan_.mask_nodes.size() - 1)};
  }

  // Spill one in-array boolean: transform it and read it as a bitmask.
  // Falls back to a dedicated phase through the reserved staging unit
  // when the open phase has no room left.
  void to_host(BoolVal& v) {
    if (!v.in_array) return;
    try {
      uint32_t dst = alloc(rw_, rw_);
      emit_spill(v, dst);
    } catch (const PhaseOverflow&) {
      finish_phase();
      staging_phase_ = true;
      emit_spill(v, staging_col_);
      finish_phase();
    }
  }

  void emit_spill(BoolVal& v, uint32_t dst) {
    PimInstruction tr = make(Opcode::ColumnTransform, {v.col, 1}, dst);
    tr.dst_row = 0;
    emit(tr);
    uint32_t slot = next_slot_++;
    reads_.push_back({PlannedRead::Kind::Bitmask, dst, 0, rw_, slot});
    plan_.mask_nodes.push_back({HostNode::Kind::Slot, -1, -1, slot});
    v.in_array = false;
    v.node = int(plan_.mask_nodes.size() - 1);
  }

  void split_phase_with(BoolVal* extra) {
    live_.push_back(extra);
    split_phase();
    live_.pop_back();
  }

  // Read out every live boolean and open a fresh phase over a cleared
  // free area.
  void split_phase() {
    for (BoolVal* v : live_) to_host(*v);
    finish_phase();
    uint32_t dirty = high_water_ - free_start_;
    reset_alloc();
    if (dirty > 0)
      emit_set_reset(Opcode::ResetCol, free_start_, dirty);
    alloc_ptr_ = free_start_;
    high_water_ = free_start_ + dirty;  // the reset itself touched them
  }

  void finish_phase() {
    if (compute_.empty() && reads_.empty()) return;
    PlannedPhase phase;
    PimInstruction cfg;
    cfg.opcode = Opcode::ConfigurePage;
    phase.compute.push_back(cfg);
    for (auto& in : compute_) phase.compute.push_back(in);
    phase.reads = std::move(reads_);
    phase.footprint_cols = high_water_ - free_start_;
    phase_high_waters_.push_back(high_water_);
    phase_uses_staging_.push_back(staging_phase_);
    staging_phase_ = false;
    plan_.phases.push_back(std::move(phase));
    compute_.clear();
    reads_.clear();
  }

  // The page scratch region must clear every column the phase allocated;
  // written after the fact because allocations grow during lowering.
  void patch_regions() {
    for (size_t p = 0; p < plan_.phases.size(); ++p) {
      uint32_t start = phase_high_waters_[p];
      uint32_t end = phase_uses_staging_[p] ? staging_col_ : geom_.cols;
      ColRange region{start, end - start};
      for (auto& in : plan_.phases[p].compute) {
        in.compute_region = region;
        validate(in, geom_);
      }
    }
  }

  // ---- filter & aggregates -------------------------------------------------
  BoolVal build_filter_mask() {
    if (!q_.filter) return {true, layout_.valid_col, -1};
    BoolVal f = lower_bool(*q_.filter);
    if (!f.in_array) {
      // valid bit joins on the host
      BoolVal valid{true, layout_.valid_col, -1};
      to_host(valid);
      plan_.mask_nodes.push_back(
          {HostNode::Kind::And, f.node, valid.node, 0});
      return {false, 0, int(plan_.mask_nodes.size() - 1)};
    }
    live_.push_back(&f);
    BoolVal out = [&] {
      try {
        uint32_t dst = alloc_bool();
        PimInstruction in = make(Opcode::BitwiseAnd, {f.col, 1}, dst);
        in.src2 = {layout_.valid_col, 1};
        in.has_src2 = true;
        emit(in);
        return BoolVal{true, dst, -1};
      } catch (const PhaseOverflow&) {
        split_phase();
        BoolVal valid{true, layout_.valid_col, -1};
        to_host(valid);
        plan_.mask_nodes.push_back(
            {HostNode::Kind::And, f.node, valid.node, 0});
        return BoolVal{false, 0, int(plan_.mask_nodes.size() - 1)};
      }
    }();
    live_.pop_back();
    return out;
  }

  void lower_aggregate(const BoundAggregate& agg, uint32_t mask_col) {
    uint32_t k = reduce_iterations(geom_.rows);
    auto reduce_into = [&](Opcode opc, uint32_t src, uint32_t w,
                           uint32_t result_w) {
      uint32_t dst;
      try {
        dst = alloc(result_w, rw_);  // unit aligned, fewest reads
      } catch (const PhaseOverflow&) {
        dst = alloc(result_w);  // unaligned costs an extra unit read
      }
      PimInstruction in = make(opc, {src, w}, dst);
      in.dst_row = 0;
      emit(in);
      uint32_t slot = next_slot_++;
      reads_.push_back({PlannedRead::Kind::Value, dst, 0, result_w, slot});
      return slot;
    };
    auto mask_field = [&](const TermVal& f) {
      uint32_t dst = alloc(f.width);
      PimInstruction in = make(Opcode::BitwiseAnd, {f.col, f.width}, dst);
      in.src2 = {mask_col, 1};
      in.has_src2 = true;
      emit(in);
      return dst;
    };
    PlannedAggregate out;
    out.kind = agg.kind;
    out.label = agg.label;
    switch (agg.kind) {
      case AggKind::Count: {
        out.value_width = 1 + k;
        out.value_slot =
            reduce_into(Opcode::ReduceSum, mask_col, 1, 1 + k);
        break;
      }
      case AggKind::Sum: {
        TermVal f = lower_term(*agg.term);
        if (f.is_const) throw TypeError("SUM needs an attribute term");
        uint32_t masked = mask_field(f);
        out.value_width = f.width + k;
        out.value_slot =
            reduce_into(Opcode::ReduceSum, masked, f.width, f.width + k);
        break;
      }
      case AggKind::Max: {
        TermVal f = lower_term(*agg.term);
        uint32_t masked = mask_field(f);
        out.value_width = f.width;
        out.value_slot =
            reduce_into(Opcode::ReduceMax, masked, f.width, f.width);
        break;
      }
      case AggKind::Min: {
        TermVal f = lower_term(*agg.term);
        uint32_t nm = emit_not_bool(mask_col);
        uint32_t sat = alloc(f.width);
        PimInstruction in =
            make(Opcode::BitwiseOr, {f.col, f.width}, sat);
        in.src2 = {nm, 1};
        in.has_src2 = true;
        emit(in);
        out.value_width = f.width;
        out.value_slot =
            reduce_into(Opcode::ReduceMin, sat, f.width, f.width);
        break;
      }
      case AggKind::Avg: {
        TermVal f = lower_term(*agg.term);
        uint32_t masked = mask_field(f);
        out.value_width = f.width + k;
        out.value_slot =
            reduce_into(Opcode::ReduceSum, masked, f.width, f.width + k);
        out.count_slot = reduce_into(Opcode::ReduceSum, mask_col, 1, 1 + k);
        break;
      }
    }
    plan_.aggregates.push_back(std::move(out));
  }

  const BoundQuery& q_;
  const RelationLayout& layout_;
  CrossbarGeometry geom_;
  uint32_t rw_;
  uint32_t free_start_ = 0;
  uint32_t alloc_ptr_ = 0;
  uint32_t high_water_ = 0;
  uint32_t phase_demand_ = 0;
  uint32_t next_slot_ = 0;
  uint32_t staging_col_ = 0;
  bool staging_phase_ = false;
  std::vector<char> phase_uses_staging_;
  std::vector<PimInstruction> compute_;
  std::vector<PlannedRead> reads_;
  std::vector<BoolVal*> live_;
  std::vector<uint32_t> phase_high_waters_;
  ExecutionPlan plan_;
};

}  // namespace

ExecutionPlan compile(const BoundQuery& query, const SystemConfig& cfg) {
  return Planner(query, cfg).run();
}

}  // namespace norsim
