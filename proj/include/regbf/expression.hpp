#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace regbf {

// Closed-form expression over named variables.
// Grammar: + - * / ^, unary -, sqrt atan exp abs tanh log, decimal literals.
// '^' is right associative and binds tighter than unary minus.
class Expression {
 public:
  static Expression parse(std::string_view text, std::vector<std::string> variables = {"s"});

  double eval(std::span<const double> vars) const;
  double eval(double s) const { return eval(std::span<const double>(&s, 1)); }

  // Value and exact partial derivative with respect to variable `wrt` (forward mode).
  std::pair<double, double> eval_with_derivative(std::span<const double> vars, std::size_t wrt) const;
  std::pair<double, double> eval_with_derivative(double s) const {
    return eval_with_derivative(std::span<const double>(&s, 1), 0);
  }

  const std::string& text() const { return text_; }
  std::size_t variable_count() const { return variables_.size(); }

  struct Node;

 private:
  std::string text_;
  std::vector<std::string> variables_;
  std::shared_ptr<const std::vector<Node>> nodes_;
  int root_{-1};
};

}  // namespace regbf
