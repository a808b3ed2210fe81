#include "levyfbsde/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "levyfbsde/errors.hpp"

namespace levyfbsde {

struct Expression::Node {
    enum class Op { Const, Var, Add, Sub, Mul, Neg, Exp, Sin, Cos, Min, Max };
    Op op = Op::Const;
    double value = 0.0;
    std::size_t var_index = 0;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(std::span<const double> v) const {
        switch (op) {
            case Op::Const: return value;
            case Op::Var: return v[var_index];
            case Op::Add: return lhs->eval(v) + rhs->eval(v);
            case Op::Sub: return lhs->eval(v) - rhs->eval(v);
            case Op::Mul: return lhs->eval(v) * rhs->eval(v);
            case Op::Neg: return -lhs->eval(v);
            case Op::Exp: return std::exp(lhs->eval(v));
            case Op::Sin: return std::sin(lhs->eval(v));
            case Op::Cos: return std::cos(lhs->eval(v));
            case Op::Min: return std::min(lhs->eval(v), rhs->eval(v));
            case Op::Max: return std::max(lhs->eval(v), rhs->eval(v));
        }
        return 0.0;
    }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
  public:
    Parser(const std::string& text, const std::vector<std::string>& variables)
        : text_(text), vars_(variables) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            skip_space();
            if (consume('+')) {
                left = binary(Node::Op::Add, left, term());
            } else if (consume('-')) {
                left = binary(Node::Op::Sub, left, term());
            } else {
                return left;
            }
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        for (;;) {
            skip_space();
            if (consume('*')) {
                left = binary(Node::Op::Mul, left, unary());
            } else {
                return left;
            }
        }
    }

    NodePtr unary() {
        skip_space();
        if (consume('-')) {
            auto n = std::make_shared<Node>();
            n->op = Node::Op::Neg;
            n->lhs = unary();
            return n;
        }
        return primary();
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (consume('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        fail(std::string("unexpected character '") + c + "'");
        return nullptr;
    }

    NodePtr number() {
        const char* start = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(start, &end);
        if (end == start) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - start);
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Const;
        n->value = v;
        return n;
    }

    NodePtr identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            return function_call(name);
        }
        if (name == "pi") {
            auto n = std::make_shared<Node>();
            n->op = Node::Op::Const;
            n->value = 3.14159265358979323846;
            return n;
        }
        const auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end())
            fail("unknown identifier '" + name + "' (allowed: " + allowed_vars() + ")");
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Var;
        n->var_index = static_cast<std::size_t>(it - vars_.begin());
        return n;
    }

    NodePtr function_call(const std::string& name) {
        Node::Op op;
        int args;
        if (name == "exp") { op = Node::Op::Exp; args = 1; }
        else if (name == "sin") { op = Node::Op::Sin; args = 1; }
        else if (name == "cos") { op = Node::Op::Cos; args = 1; }
        else if (name == "min") { op = Node::Op::Min; args = 2; }
        else if (name == "max") { op = Node::Op::Max; args = 2; }
        else { fail("unknown function '" + name + "'"); return nullptr; }

        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = expr();
        if (args == 2) {
            expect(',');
            n->rhs = expr();
        }
        expect(')');
        return n;
    }

    NodePtr binary(Node::Op op, NodePtr l, NodePtr r) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool consume(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        skip_space();
        if (!consume(c)) fail(std::string("expected '") + c + "'");
    }
    std::string allowed_vars() const {
        std::string s;
        for (const std::string& v : vars_) {
            if (!s.empty()) s += ", ";
            s += v;
        }
        return s.empty() ? "none" : s;
    }
    [[noreturn]] void fail(const std::string& why) const {
        std::ostringstream os;
        os << "expression error at position " << pos_ << " in \"" << text_ << "\": " << why;
        throw ConfigError(os.str());
    }

    const std::string& text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables) {
    Expression e;
    e.text_ = text;
    e.variable_count_ = variables.size();
    e.root_ = Parser(text, variables).run();
    return e;
}

double Expression::eval(std::span<const double> values) const {
    if (values.size() != variable_count_)
        throw std::invalid_argument("Expression::eval: wrong number of values");
    return root_->eval(values);
}

}  // namespace levyfbsde
