#include "crystal/profile_expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace crystal {

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

struct ProfileExpr::Node {
  enum class Op { number, variable, neg, add, sub, mul, div, pow, call };
  Op op = Op::number;
  double value = 0.0;
  int variable = 0;
  std::string function;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(const Eigen::VectorXd& x) const {
    switch (op) {
      case Op::number: return value;
      case Op::variable: return x[variable];
      case Op::neg: return -args[0]->eval(x);
      case Op::add: return args[0]->eval(x) + args[1]->eval(x);
      case Op::sub: return args[0]->eval(x) - args[1]->eval(x);
      case Op::mul: return args[0]->eval(x) * args[1]->eval(x);
      case Op::div: return args[0]->eval(x) / args[1]->eval(x);
      case Op::pow: return std::pow(args[0]->eval(x), args[1]->eval(x));
      case Op::call: {
        const double a = args[0]->eval(x);
        if (function == "cos") return std::cos(a);
        if (function == "sin") return std::sin(a);
        if (function == "exp") return std::exp(a);
        if (function == "abs") return std::abs(a);
        const double b = args[1]->eval(x);
        return function == "min" ? std::min(a, b) : std::max(a, b);
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const ProfileExpr::Node>;
using Node = ProfileExpr::Node;

NodePtr make(Node::Op op, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

class Parser {
public:
  Parser(const std::string& text, int dimension) : s_(text), dim_(dimension) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError("unexpected input", pos_);
    return e;
  }

  int max_variable = 0;

private:
  const std::string& s_;
  int dim_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  // U+2212 is E2 88 92 in UTF-8.
  bool at_minus() const {
    if (pos_ < s_.size() && s_[pos_] == '-') return true;
    return s_.compare(pos_, 3, "\xE2\x88\x92") == 0;
  }
  void eat_minus() { pos_ += s_[pos_] == '-' ? 1 : 3; }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      skip();
      if (accept('+')) {
        lhs = make(Node::Op::add, {lhs, term()});
      } else if (at_minus()) {
        eat_minus();
        lhs = make(Node::Op::sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (true) {
      if (accept('*')) lhs = make(Node::Op::mul, {lhs, factor()});
      else if (accept('/')) lhs = make(Node::Op::div, {lhs, factor()});
      else return lhs;
    }
  }

  NodePtr factor() {
    NodePtr base = unary();
    if (accept('^')) return make(Node::Op::pow, {base, factor()});
    return base;
  }

  NodePtr unary() {
    skip();
    if (at_minus()) {
      // Negation applies to the whole power: -2^2 = -(2^2).
      eat_minus();
      return make(Node::Op::neg, {factor()});
    }
    return atom();
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", start);
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Node>();
    n->op = Node::Op::number;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      int arity = 0;
      if (name == "cos" || name == "sin" || name == "exp" || name == "abs") arity = 1;
      else if (name == "min" || name == "max") arity = 2;
      else throw ParseError("unknown function '" + name + "'", start);
      ++pos_;
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      if (!accept(')')) throw ParseError("expected ')' or ','", pos_);
      if (static_cast<int>(args.size()) != arity)
        throw ParseError("function '" + name + "' takes " + std::to_string(arity) + " argument(s)", start);
      auto n = std::make_shared<Node>();
      n->op = Node::Op::call;
      n->function = name;
      n->args = std::move(args);
      return n;
    }
    auto n = std::make_shared<Node>();
    if (name == "pi") {
      n->op = Node::Op::number;
      n->value = std::numbers::pi;
      return n;
    }
    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos && name[1] != '0') {
      const int i = std::stoi(name.substr(1));
      if (i > dim_) throw ParseError("variable '" + name + "' exceeds the dimension", start);
      max_variable = std::max(max_variable, i);
      n->op = Node::Op::variable;
      n->variable = i - 1;
      return n;
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }
};

}  // namespace

double ProfileExpr::operator()(const Eigen::VectorXd& x) const {
  if (x.size() < max_variable_) throw std::invalid_argument("point has too few coordinates");
  return root_->eval(x);
}

ProfileExpr parse_profile(const std::string& text, int dimension) {
  Parser p(text, dimension);
  ProfileExpr e;
  e.root_ = p.parse();
  e.max_variable_ = p.max_variable;
  e.source_ = text;
  return e;
}

}  // namespace crystal
