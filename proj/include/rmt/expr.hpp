#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace rmt {

struct ExprParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed expression over two variables, used for variance profiles
/// sigma(s,t) and volatility surfaces gamma(s,r).
///
/// Grammar: numbers, variables s and t (r is an alias for t), + - * /,
/// unary minus, parentheses, sqrt(e), exp(e), cos(e), and
/// indicator(e <= e) / indicator(e < e) / (>=, >) returning 0 or 1.
class Expr {
 public:
  static Expr parse(const std::string& source);

  double operator()(double s, double t) const;
  const std::string& source() const { return source_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace rmt
