#include "norsim/query_ast.hpp"

#include <cctype>

namespace norsim {

const char* cmp_op_name(CmpOp op) {
  switch (op) {
    case CmpOp::Eq:
      return "=";
    case CmpOp::Ne:
      return "!=";
    case CmpOp::Lt:
      return "<";
    case CmpOp::Gt:
      return ">";
    case CmpOp::Le:
      return "<=";
    case CmpOp::Ge:
      return ">=";
  }
  return "?";
}

const char* agg_kind_name(AggKind k) {
  switch (k) {
    case AggKind::Sum:
      return "SUM";
    case AggKind::Min:
      return "MIN";
    case AggKind::Max:
      return "MAX";
    case AggKind::Count:
      return "COUNT";
    case AggKind::Avg:
      return "AVG";
  }
  return "?";
}

namespace {

struct Token {
  enum class Kind {
    Ident,
    Number,
    String,
    Symbol,
    End,
  } kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }
  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(uint8_t(text_[pos_]))) bump();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_ = {Token::Kind::End, "", line_, col_};
      return;
    }
    char c = text_[pos_];
    if (std::isalpha(uint8_t(c)) || c == '_') {
      std::string s;
      while (pos_ < text_.size() &&
             (std::isalnum(uint8_t(text_[pos_])) || text_[pos_] == '_')) {
        s.push_back(text_[pos_]);
        bump();
      }
      tok_ = {Token::Kind::Ident, s, line_, col_};
      return;
    }
    if (std::isdigit(uint8_t(c))) {
      std::string s;
      // dates are numeric-leading: 1994-01-01
      while (pos_ < text_.size() &&
             (std::isdigit(uint8_t(text_[pos_])) || text_[pos_] == '.' ||
              text_[pos_] == '-')) {
        if (text_[pos_] == '-' &&
            !(s.size() == 4 || s.size() == 7))  // only date separators
          break;
        s.push_back(text_[pos_]);
        bump();
      }
      tok_ = {Token::Kind::Number, s, line_, col_};
      return;
    }
    if (c == '\'') {
      bump();
      std::string s;
      while (pos_ < text_.size() && text_[pos_] != '\'') {
        s.push_back(text_[pos_]);
        bump();
      }
      if (pos_ >= text_.size())
        throw ParseError("unterminated string literal", line_, col_);
      bump();
      tok_ = {Token::Kind::String, s, line_, col_};
      return;
    }
    static const char* two[] = {"<=", ">=", "!=", "<>"};
    for (const char* t : two) {
      if (text_.compare(pos_, 2, t) == 0) {
        tok_ = {Token::Kind::Symbol, t, line_, col_};
        bump();
        bump();
        return;
      }
    }
    tok_ = {Token::Kind::Symbol, std::string(1, c), line_, col_};
    bump();
  }
  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  std::string text_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_{};
};

bool ident_is(const Token& t, const char* kw) {
  if (t.kind != Token::Kind::Ident) return false;
  if (t.text.size() != std::string(kw).size()) return false;
  for (size_t i = 0; i < t.text.size(); ++i)
    if (std::toupper(uint8_t(t.text[i])) != kw[i]) return false;
  return true;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  QueryAst parse() {
    QueryAst q;
    expect_kw("SELECT");
    parse_select_list(q);
    expect_kw("FROM");
    q.relation = expect_ident();
    if (ident_is(lex_.peek(), "WHERE")) {
      lex_.next();
      q.filter = parse_or();
    }
    if (lex_.peek().kind != Token::Kind::End)
      throw err("unexpected trailing input");
    return q;
  }

 private:
  ParseError err(const std::string& msg) {
    return ParseError(msg, lex_.peek().line, lex_.peek().col);
  }
  void expect_kw(const char* kw) {
    if (!ident_is(lex_.peek(), kw)) throw err(std::string("expected ") + kw);
    lex_.next();
  }
  std::string expect_ident() {
    if (lex_.peek().kind != Token::Kind::Ident)
      throw err("expected identifier");
    return lex_.next().text;
  }
  void expect_sym(const char* s) {
    if (lex_.peek().kind != Token::Kind::Symbol || lex_.peek().text != s)
      throw err(std::string("expected '") + s + "'");
    lex_.next();
  }

  void parse_select_list(QueryAst& q) {
    if (lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == "*") {
      lex_.next();
      q.select_ids = true;
      return;
    }
    if (ident_is(lex_.peek(), "IDS")) {
      lex_.next();
      q.select_ids = true;
      return;
    }
    while (true) {
      q.aggregates.push_back(parse_aggregate());
      if (lex_.peek().kind == Token::Kind::Symbol &&
          lex_.peek().text == ",") {
        lex_.next();
        continue;
      }
      break;
    }
  }

  Aggregate parse_aggregate() {
    Token t = lex_.peek();
    AggKind kind;
    if (ident_is(t, "SUM"))
      kind = AggKind::Sum;
    else if (ident_is(t, "MIN"))
      kind = AggKind::Min;
    else if (ident_is(t, "MAX"))
      kind = AggKind::Max;
    else if (ident_is(t, "AVG"))
      kind = AggKind::Avg;
    else if (ident_is(t, "COUNT"))
      kind = AggKind::Count;
    else
      throw err("expected an aggregate (SUM/MIN/MAX/AVG/COUNT) or IDS");
    lex_.next();
    Aggregate agg;
    agg.kind = kind;
    std::string label = t.text;
    for (auto& ch : label) ch = char(std::toupper(uint8_t(ch)));
    if (kind == AggKind::Count) {
      if (lex_.peek().kind == Token::Kind::Symbol &&
          lex_.peek().text == "(") {
        lex_.next();
        if (lex_.peek().kind == Token::Kind::Symbol &&
            lex_.peek().text == "*")
          lex_.next();
        expect_sym(")");
      }
      agg.label = "COUNT";
      return agg;
    }
    expect_sym("(");
    agg.term = parse_term();
    expect_sym(")");
    agg.label = label;
    return agg;
  }

  std::unique_ptr<BoolNode> parse_or() {
    auto node = parse_and();
    while (ident_is(lex_.peek(), "OR")) {
      lex_.next();
      auto n = std::make_unique<BoolNode>();
      n->kind = BoolNode::Kind::Or;
      n->a = std::move(node);
      n->b = parse_and();
      node = std::move(n);
    }
    return node;
  }

  std::unique_ptr<BoolNode> parse_and() {
    auto node = parse_not();
    while (ident_is(lex_.peek(), "AND")) {
      lex_.next();
      auto n = std::make_unique<BoolNode>();
      n->kind = BoolNode::Kind::And;
      n->a = std::move(node);
      n->b = parse_not();
      node = std::move(n);
    }
    return node;
  }

  std::unique_ptr<BoolNode> parse_not() {
    if (ident_is(lex_.peek(), "NOT")) {
      lex_.next();
      auto n = std::make_unique<BoolNode>();
      n->kind = BoolNode::Kind::Not;
      n->a = parse_not();
      return n;
    }
    if (lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == "(") {
      // '(' opens either a boolean group or an arithmetic term; try the
      // boolean reading and fall back on failure
      Lexer saved = lex_;
      try {
        lex_.next();
        auto inner = parse_or();
        expect_sym(")");
        const Token& after = lex_.peek();
        if (after.kind == Token::Kind::Symbol &&
            (after.text == "=" || after.text == "!=" || after.text == "<>" ||
             after.text == "<" || after.text == ">" || after.text == "<=" ||
             after.text == ">=" || after.text == "+" || after.text == "*"))
          throw ParseError("parenthesised term", after.line, after.col);
        return inner;
      } catch (const ParseError&) {
        lex_ = saved;
      }
    }
    return parse_comparison();
  }

  std::unique_ptr<BoolNode> parse_comparison() {
    auto n = std::make_unique<BoolNode>();
    n->kind = BoolNode::Kind::Cmp;
    n->lhs = parse_term();
    Token t = lex_.peek();
    if (t.kind != Token::Kind::Symbol) throw err("expected comparison");
    if (t.text == "=")
      n->op = CmpOp::Eq;
    else if (t.text == "!=" || t.text == "<>")
      n->op = CmpOp::Ne;
    else if (t.text == "<")
      n->op = CmpOp::Lt;
    else if (t.text == ">")
      n->op = CmpOp::Gt;
    else if (t.text == "<=")
      n->op = CmpOp::Le;
    else if (t.text == ">=")
      n->op = CmpOp::Ge;
    else
      throw err("expected comparison operator");
    lex_.next();
    n->rhs = parse_term();
    return n;
  }

  std::unique_ptr<TermNode> parse_term() {
    auto node = parse_product();
    while (lex_.peek().kind == Token::Kind::Symbol &&
           lex_.peek().text == "+") {
      lex_.next();
      auto n = std::make_unique<TermNode>();
      n->kind = TermNode::Kind::Add;
      n->lhs = std::move(node);
      n->rhs = parse_product();
      node = std::move(n);
    }
    return node;
  }

  std::unique_ptr<TermNode> parse_product() {
    auto node = parse_factor();
    while (lex_.peek().kind == Token::Kind::Symbol &&
           lex_.peek().text == "*") {
      lex_.next();
      auto n = std::make_unique<TermNode>();
      n->kind = TermNode::Kind::Mul;
      n->lhs = std::move(node);
      n->rhs = parse_factor();
      node = std::move(n);
    }
    return node;
  }

  std::unique_ptr<TermNode> parse_factor() {
    Token t = lex_.peek();
    if (t.kind == Token::Kind::Symbol && t.text == "(") {
      lex_.next();
      auto inner = parse_term();
      expect_sym(")");
      return inner;
    }
    auto n = std::make_unique<TermNode>();
    if (t.kind == Token::Kind::Ident) {
      n->kind = TermNode::Kind::Attr;
      n->attr = lex_.next().text;
      return n;
    }
    if (t.kind == Token::Kind::Number) {
      n->kind = TermNode::Kind::Const;
      n->literal = lex_.next().text;
      return n;
    }
    if (t.kind == Token::Kind::String) {
      n->kind = TermNode::Kind::Const;
      n->literal = lex_.next().text;
      n->literal_is_string = true;
      return n;
    }
    throw err("expected attribute, literal, or '('");
  }

  Lexer lex_;
};

// ---- binding ----------------------------------------------------------

struct Binder {
  const RelationLayout& layout;

  // The attribute context a constant binds against: scale of the nearest
  // attribute in the comparison/product.
  std::unique_ptr<BoundTerm> bind_term(const TermNode& t,
                                       const AttributeSpec* context) {
    auto out = std::make_unique<BoundTerm>();
    switch (t.kind) {
      case TermNode::Kind::Attr: {
        int idx = layout.attribute_index(t.attr);
        if (idx < 0)
          throw TypeError("unknown attribute '" + t.attr + "' in relation " +
                          layout.name);
        out->kind = BoundTerm::Kind::Attr;
        out->attr_index = idx;
        return out;
      }
      case TermNode::Kind::Const: {
        out->kind = BoundTerm::Kind::Const;
        out->constant = bind_constant(t, context);
        return out;
      }
      case TermNode::Kind::Add:
      case TermNode::Kind::Mul: {
        out->kind = t.kind == TermNode::Kind::Add ? BoundTerm::Kind::Add
                                                  : BoundTerm::Kind::Mul;
        const AttributeSpec* ctx = context ? context : term_context(t);
        out->lhs = bind_term(*t.lhs, ctx);
        out->rhs = bind_term(*t.rhs, ctx);
        if (term_has_dictionary(*out))
          throw TypeError("dictionary attributes admit no arithmetic");
        // constant folding keeps the lowering simple
        if (out->lhs->kind == BoundTerm::Kind::Const &&
            out->rhs->kind == BoundTerm::Kind::Const) {
          int64_t v = out->kind == BoundTerm::Kind::Add
                          ? out->lhs->constant + out->rhs->constant
                          : out->lhs->constant * out->rhs->constant;
          out->kind = BoundTerm::Kind::Const;
          out->constant = v;
          out->lhs.reset();
          out->rhs.reset();
        }
        return out;
      }
    }
    throw TypeError("bad term");
  }

  bool term_has_dictionary(const BoundTerm& t) {
    if (t.kind == BoundTerm::Kind::Attr)
      return layout.attributes[t.attr_index].encoding ==
             Encoding::Dictionary;
    if (t.lhs && term_has_dictionary(*t.lhs)) return true;
    if (t.rhs && term_has_dictionary(*t.rhs)) return true;
    return false;
  }

  // first attribute mentioned in a term, for typing constants next to it
  const AttributeSpec* term_context(const TermNode& t) {
    if (t.kind == TermNode::Kind::Attr) {
      int idx = layout.attribute_index(t.attr);
      return idx < 0 ? nullptr : &layout.attributes[idx];
    }
    if (t.lhs)
      if (const auto* c = term_context(*t.lhs)) return c;
    if (t.rhs)
      if (const auto* c = term_context(*t.rhs)) return c;
    return nullptr;
  }

  int64_t bind_constant(const TermNode& t, const AttributeSpec* context) {
    if (t.literal_is_string) {
      if (!context)
        throw TypeError("string literal '" + t.literal +
                        "' has no attribute to bind against");
      if (context->encoding == Encoding::Dictionary) {
        int idx = layout.attribute_index(context->name);
        return int64_t(layout.dicts[idx].code(t.literal));
      }
      if (context->type == LogicalType::Date)
        return parse_date_days(t.literal);
      throw TypeError("string literal against non-string attribute " +
                      context->name);
    }
    // bare date literal: 1994-01-01
    if (t.literal.find('-') != std::string::npos)
      return parse_date_days(t.literal);
    if (t.literal.find('.') != std::string::npos) {
      if (!context || context->type != LogicalType::Decimal)
        throw TypeError("decimal literal '" + t.literal +
                        "' needs a decimal attribute context");
      AttributeSpec tmp = *context;
      return std::get<int64_t>(scalar_from_text(tmp, t.literal));
    }
    int64_t v = std::stoll(t.literal);
    if (context && context->type == LogicalType::Decimal) v *= context->scale;
    return v;
  }

  std::unique_ptr<BoundBool> bind_bool(const BoolNode& n) {
    auto out = std::make_unique<BoundBool>();
    switch (n.kind) {
      case BoolNode::Kind::And:
      case BoolNode::Kind::Or:
        out->kind = n.kind == BoolNode::Kind::And ? BoundBool::Kind::And
                                                  : BoundBool::Kind::Or;
        out->a = bind_bool(*n.a);
        out->b = bind_bool(*n.b);
        return out;
      case BoolNode::Kind::Not:
        out->kind = BoundBool::Kind::Not;
        out->a = bind_bool(*n.a);
        return out;
      case BoolNode::Kind::Cmp: {
        out->kind = BoundBool::Kind::Cmp;
        out->op = n.op;
        const AttributeSpec* ctx = term_context(*n.lhs);
        if (!ctx) ctx = term_context(*n.rhs);
        if (!ctx)
          throw TypeError("comparison mentions no attribute");
        out->lhs = bind_term(*n.lhs, ctx);
        out->rhs = bind_term(*n.rhs, ctx);
        check_dictionary_rules(*out);
        return out;
      }
    }
    throw TypeError("bad filter node");
  }

  void check_dictionary_rules(const BoundBool& cmp) {
    bool ordered = cmp.op != CmpOp::Eq && cmp.op != CmpOp::Ne;
    auto dict_attr = [&](const BoundTerm& t) {
      return t.kind == BoundTerm::Kind::Attr &&
             layout.attributes[t.attr_index].encoding == Encoding::Dictionary;
    };
    if (ordered && (dict_attr(*cmp.lhs) || dict_attr(*cmp.rhs)))
      throw TypeError(
          "dictionary-encoded attributes admit only = and != comparisons");
  }
};

void term_to_string(const TermNode& t, std::string& out) {
  switch (t.kind) {
    case TermNode::Kind::Attr:
      out += t.attr;
      return;
    case TermNode::Kind::Const:
      if (t.literal_is_string) out += "'";
      out += t.literal;
      if (t.literal_is_string) out += "'";
      return;
    case TermNode::Kind::Add:
    case TermNode::Kind::Mul:
      out += "(";
      term_to_string(*t.lhs, out);
      out += t.kind == TermNode::Kind::Add ? " + " : " * ";
      term_to_string(*t.rhs, out);
      out += ")";
      return;
  }
}

void bool_to_string(const BoolNode& n, std::string& out) {
  switch (n.kind) {
    case BoolNode::Kind::Cmp:
      term_to_string(*n.lhs, out);
      out += " ";
      out += cmp_op_name(n.op);
      out += " ";
      term_to_string(*n.rhs, out);
      return;
    case BoolNode::Kind::And:
    case BoolNode::Kind::Or:
      out += "(";
      bool_to_string(*n.a, out);
      out += n.kind == BoolNode::Kind::And ? " AND " : " OR ";
      bool_to_string(*n.b, out);
      out += ")";
      return;
    case BoolNode::Kind::Not:
      out += "NOT (";
      bool_to_string(*n.a, out);
      out += ")";
      return;
  }
}

}  // namespace

QueryAst parse_query(const std::string& text) {
  return Parser(text).parse();
}

BoundQuery bind_query(const QueryAst& ast, const RelationLayout& layout) {
  if (ast.relation != layout.name)
    throw TypeError("query names relation '" + ast.relation +
                    "', layout holds '" + layout.name + "'");
  Binder binder{layout};
  BoundQuery q;
  q.layout = &layout;
  q.select_ids = ast.select_ids;
  if (ast.filter) q.filter = binder.bind_bool(*ast.filter);
  for (const auto& agg : ast.aggregates) {
    BoundAggregate b;
    b.kind = agg.kind;
    b.label = agg.label;
    if (agg.kind != AggKind::Count) {
      b.term = binder.bind_term(*agg.term, binder.term_context(*agg.term));
      if (binder.term_has_dictionary(*b.term))
        throw TypeError("aggregates need numeric attributes");
      if (agg.kind != AggKind::Sum && b.term->kind != BoundTerm::Kind::Attr)
        throw TypeError(std::string(agg_kind_name(agg.kind)) +
                        " takes a plain attribute");
      b.label += "(";
      std::string t;
      term_to_string(*agg.term, t);
      b.label += t + ")";
    }
    q.aggregates.push_back(std::move(b));
  }
  return q;
}

uint32_t bound_term_width(const BoundTerm& term,
                          const RelationLayout& layout) {
  switch (term.kind) {
    case BoundTerm::Kind::Attr:
      return layout.slots[term.attr_index].bits;
    case BoundTerm::Kind::Const: {
      uint64_t v = term.constant < 0 ? 0 : uint64_t(term.constant);
      uint32_t bits = 1;
      while (bits < 63 && (v >> bits) != 0) ++bits;
      return bits;
    }
    case BoundTerm::Kind::Add:
      return std::max(bound_term_width(*term.lhs, layout),
                      bound_term_width(*term.rhs, layout)) +
             1;
    case BoundTerm::Kind::Mul:
      return bound_term_width(*term.lhs, layout) +
             bound_term_width(*term.rhs, layout);
  }
  return 0;
}

std::string query_to_string(const QueryAst& ast) {
  std::string out = "SELECT ";
  if (ast.select_ids) {
    out += "IDS";
  } else {
    for (size_t i = 0; i < ast.aggregates.size(); ++i) {
      if (i) out += ", ";
      const auto& a = ast.aggregates[i];
      if (a.kind == AggKind::Count) {
        out += "COUNT";
      } else {
        out += agg_kind_name(a.kind);
        out += "(";
        term_to_string(*a.term, out);
        out += ")";
      }
    }
  }
  out += " FROM " + ast.relation;
  if (ast.filter) {
    out += " WHERE ";
    bool_to_string(*ast.filter, out);
  }
  return out;
}

}  // namespace norsim
