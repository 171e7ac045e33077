#include "crlab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace crlab::expr {

namespace {

std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

const std::set<std::string> kFunctions{"sin", "cos", "exp"};

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {}

    Ast parse_all() {
        Ast e = expr();
        skip();
        if (pos_ != src_.size()) fail({"operator", "end of input"});
        return e;
    }

private:
    const std::string& src_;
    std::size_t pos_ = 0;

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(std::set<std::string> expected) {
        skip();
        const std::string found = pos_ < src_.size() ? std::string("'") + src_[pos_] + "'" : "end of input";
        throw ParseError(pos_, std::move(expected), found);
    }

    static Ast binary(char op, Ast a, Ast b) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::binary;
        n->op = op;
        n->args = {std::move(a), std::move(b)};
        return n;
    }

    Ast expr() {
        Ast lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = binary('+', lhs, term());
            else if (accept('-'))
                lhs = binary('-', lhs, term());
            else
                return lhs;
        }
    }

    Ast term() {
        Ast lhs = factor();
        for (;;) {
            if (accept('*'))
                lhs = binary('*', lhs, factor());
            else if (accept('/'))
                lhs = binary('/', lhs, factor());
            else
                return lhs;
        }
    }

    Ast factor() {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::neg;
            n->args = {factor()};
            return n;
        }
        Ast base = atom();
        if (!accept('^')) return base;
        skip();
        const std::size_t start = pos_;
        if (pos_ < src_.size() && src_[pos_] == '-') ++pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        int k = 0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, k);
        if (ec != std::errc() || ptr != src_.data() + pos_) {
            pos_ = start;
            fail({"integer"});
        }
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::binary;
        n->op = '^';
        n->exponent = k;
        n->args = {std::move(base)};
        return n;
    }

    Ast atom() {
        skip();
        if (accept('(')) {
            Ast e = expr();
            if (!accept(')')) fail({"')'", "operator"});
            return e;
        }
        if (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            return number();
        if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            return ident();
        fail({"number", "identifier", "'('", "'-'"});
    }

    Ast number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc() || ptr != src_.data() + pos_) {
            pos_ = start;
            fail({"number"});
        }
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::number;
        n->value = v;
        return n;
    }

    Ast ident() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        auto n = std::make_shared<Node>();
        if (kFunctions.count(name)) {
            if (!accept('(')) fail({"'('"});
            n->kind = Node::Kind::call;
            n->name = name;
            n->args = {expr()};
            if (!accept(')')) fail({"')'", "operator"});
            return n;
        }
        if (name == "pi") {
            n->kind = Node::Kind::pi;
            return n;
        }
        n->kind = Node::Kind::variable;
        n->name = name;
        return n;
    }
};

// Axis of a coordinate name on a grid of the given rank, -1 if unknown.
int axis_of(const std::string& name, int rank) {
    if (rank == 1) return name == "x" ? 0 : -1;
    if (rank == 2) return name == "x" ? 0 : name == "y" ? 1 : -1;
    if (rank == 3) {
        if (name == "x" || name == "x1") return 0;
        if (name == "y" || name == "y1") return 1;
        if (name == "t") return 2;
        return -1;
    }
    if (rank == 5) {
        if (name == "x1") return 0;
        if (name == "x2") return 1;
        if (name == "y1") return 2;
        if (name == "y2") return 3;
        if (name == "t") return 4;
    }
    return -1;
}

void check_variables(const Ast& ast, int rank) {
    for (const auto& v : variables(ast))
        if (axis_of(v, rank) < 0)
            throw UnknownVariable("unknown variable '" + v + "' on a grid with " + std::to_string(rank) + " axes");
}

double eval_point(const Node& n, std::span<const double> x, int rank) {
    switch (n.kind) {
    case Node::Kind::number: return n.value;
    case Node::Kind::pi: return std::numbers::pi;
    case Node::Kind::variable: return x[static_cast<std::size_t>(axis_of(n.name, rank))];
    case Node::Kind::neg: return -eval_point(*n.args[0], x, rank);
    case Node::Kind::call: {
        const double a = eval_point(*n.args[0], x, rank);
        if (n.name == "sin") return std::sin(a);
        if (n.name == "cos") return std::cos(a);
        return std::exp(a);
    }
    case Node::Kind::binary: {
        const double a = eval_point(*n.args[0], x, rank);
        if (n.op == '^') {
            if (n.exponent < 0 && a == 0.0) throw DivisionByZero("zero raised to a negative power");
            return std::pow(a, n.exponent);
        }
        const double b = eval_point(*n.args[1], x, rank);
        switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        default:
            if (b == 0.0) throw DivisionByZero("division by zero");
            return a / b;
        }
    }
    }
    return 0.0;
}

void collect(const Node& n, std::set<std::string>& out) {
    if (n.kind == Node::Kind::variable) out.insert(n.name);
    for (const auto& a : n.args) collect(*a, out);
}

} // namespace

ParseError::ParseError(std::size_t offset, std::set<std::string> expected, const std::string& found)
    : Error("parse error at offset " + std::to_string(offset) + ": expected " + join(expected) + ", found " + found),
      offset_(offset), expected_(std::move(expected)) {}

bool Node::operator==(const Node& o) const {
    if (kind != o.kind || value != o.value || name != o.name || op != o.op || exponent != o.exponent ||
        args.size() != o.args.size())
        return false;
    for (std::size_t i = 0; i < args.size(); ++i)
        if (!(*args[i] == *o.args[i])) return false;
    return true;
}

Ast parse(const std::string& src) { return Parser(src).parse_all(); }

std::string print(const Ast& ast) {
    const Node& n = *ast;
    switch (n.kind) {
    case Node::Kind::number: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        return buf;
    }
    case Node::Kind::pi: return "pi";
    case Node::Kind::variable: return n.name;
    case Node::Kind::neg: return "(-" + print(n.args[0]) + ")";
    case Node::Kind::call: return n.name + "(" + print(n.args[0]) + ")";
    case Node::Kind::binary:
        if (n.op == '^') return "(" + print(n.args[0]) + "^" + std::to_string(n.exponent) + ")";
        return "(" + print(n.args[0]) + " " + n.op + " " + print(n.args[1]) + ")";
    }
    return "";
}

grid::GridScalar eval(const Ast& ast, const grid::GridSpec& grid) {
    check_variables(ast, grid.rank());
    const int rank = grid.rank();
    return grid::GridScalar::sample(grid, [&](std::span<const double> x) { return eval_point(*ast, x, rank); });
}

double eval_at(const Ast& ast, std::span<const double> coords) {
    const int rank = static_cast<int>(coords.size());
    check_variables(ast, rank);
    return eval_point(*ast, coords, rank);
}

std::set<std::string> variables(const Ast& ast) {
    std::set<std::string> out;
    collect(*ast, out);
    return out;
}

} // namespace crlab::expr
