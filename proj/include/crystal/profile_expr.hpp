#pragma once

// Arithmetic expressions over x1..xd used for initial density profiles.
//
//   expr   := term (("+" | "-") term)*
//   term   := factor (("*" | "/") factor)*
//   factor := unary ("^" factor)?
//   unary  := "-" unary | atom
//   atom   := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"
//
// Functions: cos sin exp abs (one argument), min max (two). Constant: pi.
// The minus sign may be ASCII '-' or U+2212.

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>

namespace crystal {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t offset);
  /// Byte offset into the source text.
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class ProfileExpr {
public:
  struct Node;

  /// Value at a point; x has at least as many entries as the highest xi used.
  double operator()(const Eigen::VectorXd& x) const;
  /// Highest variable index referenced (0 if none).
  int max_variable() const { return max_variable_; }
  const std::string& source() const { return source_; }

private:
  friend ProfileExpr parse_profile(const std::string& text, int dimension);
  std::shared_ptr<const Node> root_;
  int max_variable_ = 0;
  std::string source_;
};

/// Throws ParseError on syntax errors, unknown identifiers, arity mismatch,
/// or variables beyond x<dimension>.
ProfileExpr parse_profile(const std::string& text, int dimension);

}  // namespace crystal
