#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace levyfbsde {

// Arithmetic over a fixed variable set: +, -, *, unary minus, exp, sin,
// cos, min, max, numeric literals and parentheses. Grammar in the README.
class Expression {
  public:
    struct Node;

    static Expression parse(const std::string& text, const std::vector<std::string>& variables);

    // Values aligned with the variable list given at parse time.
    double eval(std::span<const double> values) const;

    const std::string& text() const { return text_; }

  private:
    std::shared_ptr<const Node> root_;
    std::string text_;
    std::size_t variable_count_ = 0;
};

}  // namespace levyfbsde
