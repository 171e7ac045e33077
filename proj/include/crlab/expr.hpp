#pragma once

// Scalar field expressions for configuration files.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := '-' factor | atom ('^' integer)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//
// Identifiers: pi, the coordinates x y t (3 axes) or x1 x2 y1 y2 t (5 axes;
// x1, y1 are accepted on 3 axes too), x y on 2 and x on 1 axis, and the
// functions sin cos exp.

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "crlab/grid.hpp"

namespace crlab::expr {

class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::set<std::string> expected, const std::string& found);
    std::size_t offset() const { return offset_; }
    const std::set<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::set<std::string> expected_;
};

struct Node {
    enum class Kind { number, variable, pi, neg, binary, call };
    Kind kind = Kind::number;
    double value = 0.0;   ///< number
    std::string name;     ///< variable or function
    char op = 0;          ///< + - * / ^
    int exponent = 0;     ///< integer exponent of ^
    std::vector<std::shared_ptr<const Node>> args;

    bool operator==(const Node& o) const;
};

using Ast = std::shared_ptr<const Node>;

Ast parse(const std::string& src);
/// Fully parenthesized form; parse(print(a)) == a structurally.
std::string print(const Ast& ast);
/// Pointwise evaluation on the grid. Throws UnknownVariable and
/// DivisionByZero.
grid::GridScalar eval(const Ast& ast, const grid::GridSpec& grid);
/// Evaluation at one point given the axis coordinates.
double eval_at(const Ast& ast, std::span<const double> coords);
/// Variables referenced by the expression.
std::set<std::string> variables(const Ast& ast);

} // namespace crlab::expr
