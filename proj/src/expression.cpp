#include "bsde/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bsde {

struct Expression::Node {
    enum class Kind { Number, Variable, Unary, Binary, Call };
    Kind kind;
    double number = 0.0;
    std::string name; // variable or function
    char op = 0;      // + - * / ^
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr run() {
        auto node = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) {
            throw std::invalid_argument("expression: trailing input at position " +
                                        std::to_string(pos_) + " in '" + text_ + "'");
        }
        return node;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        auto lhs = parse_term();
        while (true) {
            const char c = peek();
            if (c != '+' && c != '-') break;
            ++pos_;
            auto rhs = parse_term();
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Binary;
            node->op = c;
            node->args = {lhs, rhs};
            lhs = node;
        }
        return lhs;
    }

    NodePtr parse_term() {
        auto lhs = parse_factor();
        while (true) {
            const char c = peek();
            if (c != '*' && c != '/') break;
            ++pos_;
            auto rhs = parse_factor();
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Binary;
            node->op = c;
            node->args = {lhs, rhs};
            lhs = node;
        }
        return lhs;
    }

    NodePtr parse_factor() {
        if (consume('-')) {
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Unary;
            node->op = '-';
            node->args = {parse_factor()};
            return node;
        }
        auto base = parse_atom();
        if (consume('^')) {
            auto exponent = parse_factor();
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Binary;
            node->op = '^';
            node->args = {base, exponent};
            return node;
        }
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw std::invalid_argument("expression: unexpected end");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double value = std::stod(text_.substr(pos_), &used);
            pos_ += used;
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Number;
            node->number = value;
            return node;
        }
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!consume(')')) throw std::invalid_argument("expression: missing ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
                ++end;
            }
            std::string name = text_.substr(pos_, end - pos_);
            pos_ = end;
            if (consume('(')) {
                auto node = std::make_shared<Node>();
                node->kind = Node::Kind::Call;
                node->name = std::move(name);
                if (peek() != ')') {
                    node->args.push_back(parse_expr());
                    while (consume(',')) node->args.push_back(parse_expr());
                }
                if (!consume(')')) throw std::invalid_argument("expression: missing ')' after args");
                return node;
            }
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Variable;
            node->name = std::move(name);
            return node;
        }
        throw std::invalid_argument(std::string("expression: unexpected character '") + c + "'");
    }
};

double znorm(std::span<const double> z) {
    double s = 0.0;
    for (double c : z) s += c * c;
    return std::sqrt(s);
}

double lookup(const std::string& name, const Expression::Context& ctx) {
    if (name == "y") return ctx.y;
    if (name == "t") return ctx.t;
    if (name == "u") return ctx.u;
    if (name == "v") return ctx.v;
    if (name == "f") return ctx.f;
    if (name == "z") return znorm(ctx.z);
    if (name == "T") return ctx.horizon;
    if (name == "b") return ctx.terminal.empty() ? 0.0 : ctx.terminal[0];
    if (name.size() == 2 && (name[0] == 'z' || name[0] == 'b')) {
        const std::size_t idx = static_cast<std::size_t>(name[1] - '1');
        const auto& src = name[0] == 'z' ? ctx.z : ctx.terminal;
        if (name[1] >= '1' && name[1] <= '9' && idx < src.size()) return src[idx];
        throw std::invalid_argument("expression: component out of range: " + name);
    }
    throw std::invalid_argument("expression: unknown variable '" + name + "'");
}

double eval_node(const Node& node, const Expression::Context& ctx) {
    switch (node.kind) {
        case Node::Kind::Number:
            return node.number;
        case Node::Kind::Variable:
            return lookup(node.name, ctx);
        case Node::Kind::Unary:
            return -eval_node(*node.args[0], ctx);
        case Node::Kind::Binary: {
            const double a = eval_node(*node.args[0], ctx);
            const double b = eval_node(*node.args[1], ctx);
            switch (node.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': return std::pow(a, b);
            }
            throw std::logic_error("expression: bad operator");
        }
        case Node::Kind::Call: {
            const auto& name = node.name;
            auto need = [&](std::size_t n) {
                if (node.args.size() != n) {
                    throw std::invalid_argument("expression: " + name + " expects " +
                                                std::to_string(n) + " argument(s)");
                }
            };
            if (name == "abs") {
                need(1);
                return std::abs(eval_node(*node.args[0], ctx));
            }
            if (name == "sqrt") {
                need(1);
                return std::sqrt(eval_node(*node.args[0], ctx));
            }
            if (name == "exp") {
                need(1);
                return std::exp(eval_node(*node.args[0], ctx));
            }
            if (name == "sign") {
                need(1);
                const double x = eval_node(*node.args[0], ctx);
                return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
            }
            if (name == "min") {
                need(2);
                return std::min(eval_node(*node.args[0], ctx), eval_node(*node.args[1], ctx));
            }
            if (name == "max") {
                need(2);
                return std::max(eval_node(*node.args[0], ctx), eval_node(*node.args[1], ctx));
            }
            if (name == "pow") {
                need(2);
                return std::pow(eval_node(*node.args[0], ctx), eval_node(*node.args[1], ctx));
            }
            throw std::invalid_argument("expression: unknown function '" + name + "'");
        }
    }
    throw std::logic_error("expression: bad node");
}

bool node_references(const Node& node, const std::string& name) {
    if (node.kind == Node::Kind::Variable) {
        if (node.name == name) return true;
        // Component references count toward their family (z1 -> z, b2 -> b).
        return node.name.size() == 2 && name.size() == 1 && node.name[0] == name[0];
    }
    for (const auto& a : node.args) {
        if (node_references(*a, name)) return true;
    }
    return false;
}

} // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.root_ = Parser(text).run();
    e.text_ = text;
    return e;
}

double Expression::eval(const Context& ctx) const {
    if (!root_) throw std::logic_error("expression: empty");
    return eval_node(*root_, ctx);
}

bool Expression::references(const std::string& name) const {
    return root_ && node_references(*root_, name);
}

} // namespace bsde
