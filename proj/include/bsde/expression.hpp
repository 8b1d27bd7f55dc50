#pragma once

#include <memory>
#include <span>
#include <string>

namespace bsde {

// Closed expression grammar for config-defined drivers and terminal
// conditions:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' number)?
//   atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: abs, sqrt, exp, sign, min, max, pow. Variable names resolve
// against the evaluation context: drivers see y, z (z1..z3 components, z the
// Euclidean norm), t, u, v, f; terminal conditions see b1..b3, b (first
// component) and T.
class Expression {
public:
    static Expression parse(const std::string& text);

    struct Context {
        double y = 0.0;
        std::span<const double> z;
        double t = 0.0;
        double u = 0.0;
        double v = 0.0;
        double f = 0.0;
        std::span<const double> terminal; // b1..bd
        double horizon = 0.0;
    };

    double eval(const Context& ctx) const;

    // Which variables the expression references (drives search-axis pruning).
    bool references(const std::string& name) const;

    const std::string& text() const { return text_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace bsde
