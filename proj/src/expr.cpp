#include "rmt/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace rmt {

namespace {

enum class Op { kConst, kVarS, kVarT, kAdd, kSub, kMul, kDiv, kNeg,
                kSqrt, kExp, kCos, kLe, kLt, kGe, kGt };

}  // namespace

struct Expr::Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr,
             double value = 0.0) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = value;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

double eval_node(const Expr::Node& n, double s, double t) {
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVarS: return s;
    case Op::kVarT: return t;
    case Op::kAdd: return eval_node(*n.lhs, s, t) + eval_node(*n.rhs, s, t);
    case Op::kSub: return eval_node(*n.lhs, s, t) - eval_node(*n.rhs, s, t);
    case Op::kMul: return eval_node(*n.lhs, s, t) * eval_node(*n.rhs, s, t);
    case Op::kDiv: return eval_node(*n.lhs, s, t) / eval_node(*n.rhs, s, t);
    case Op::kNeg: return -eval_node(*n.lhs, s, t);
    case Op::kSqrt: return std::sqrt(eval_node(*n.lhs, s, t));
    case Op::kExp: return std::exp(eval_node(*n.lhs, s, t));
    case Op::kCos: return std::cos(eval_node(*n.lhs, s, t));
    case Op::kLe:
      return eval_node(*n.lhs, s, t) <= eval_node(*n.rhs, s, t) ? 1.0 : 0.0;
    case Op::kLt:
      return eval_node(*n.lhs, s, t) < eval_node(*n.rhs, s, t) ? 1.0 : 0.0;
    case Op::kGe:
      return eval_node(*n.lhs, s, t) >= eval_node(*n.rhs, s, t) ? 1.0 : 0.0;
    case Op::kGt:
      return eval_node(*n.lhs, s, t) > eval_node(*n.rhs, s, t) ? 1.0 : 0.0;
  }
  return 0.0;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  NodePtr parse() {
    NodePtr e = expression();
    skip_ws();
    if (pos_ != src_.size())
      fail("unexpected trailing input at position " + std::to_string(pos_));
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ExprParseError("expression '" + src_ + "': " + msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(uchar(src_[pos_]))) ++pos_;
  }

  static unsigned char uchar(char c) { return static_cast<unsigned char>(c); }

  bool consume(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (consume('+')) lhs = make(Op::kAdd, lhs, term());
      else if (consume('-')) lhs = make(Op::kSub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (consume('*')) lhs = make(Op::kMul, lhs, factor());
      else if (consume('/')) lhs = make(Op::kDiv, lhs, factor());
      else return lhs;
    }
  }

  NodePtr factor() {
    if (consume('-')) return make(Op::kNeg, factor());
    return primary();
  }

  std::string identifier() {
    skip_ws();
    std::string id;
    while (pos_ < src_.size() &&
           (std::isalnum(uchar(src_[pos_])) || src_[pos_] == '_'))
      id += src_[pos_++];
    return id;
  }

  NodePtr primary() {
    const char c = peek();
    if (c == '(') {
      consume('(');
      NodePtr e = expression();
      if (!consume(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(uchar(c)) || c == '.') {
      skip_ws();
      char* end = nullptr;
      const double v = std::strtod(src_.c_str() + pos_, &end);
      if (end == src_.c_str() + pos_) fail("bad number");
      pos_ = size_t(end - src_.c_str());
      return make(Op::kConst, nullptr, nullptr, v);
    }
    if (std::isalpha(uchar(c))) {
      const std::string id = identifier();
      if (id == "s") return make(Op::kVarS);
      if (id == "t" || id == "r") return make(Op::kVarT);
      if (id == "sqrt" || id == "exp" || id == "cos") {
        if (!consume('(')) fail("expected '(' after " + id);
        NodePtr arg = expression();
        if (!consume(')')) fail("missing ')'");
        const Op op = id == "sqrt" ? Op::kSqrt
                      : id == "exp" ? Op::kExp
                                    : Op::kCos;
        return make(op, arg);
      }
      if (id == "indicator") {
        if (!consume('(')) fail("expected '(' after indicator");
        NodePtr lhs = expression();
        Op op;
        if (consume('<')) op = consume('=') ? Op::kLe : Op::kLt;
        else if (consume('>')) op = consume('=') ? Op::kGe : Op::kGt;
        else fail("indicator needs a comparison");
        NodePtr rhs = expression();
        if (!consume(')')) fail("missing ')'");
        return make(op, lhs, rhs);
      }
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected character");
  }

  const std::string& src_;
  size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& source) {
  Expr e;
  e.root_ = Parser(source).parse();
  e.source_ = source;
  return e;
}

double Expr::operator()(double s, double t) const {
  return eval_node(*root_, s, t);
}

}  // namespace rmt
