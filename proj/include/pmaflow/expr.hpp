#pragma once

#include <string>
#include <vector>

#include "pmaflow/common.hpp"

namespace pmaflow {

/// Arithmetic expression in the variables x, y, t (aliases x1, x2) and
/// r = sqrt(x^2 + y^2), compiled to a flat postfix program.
///
/// Grammar: + - * / ^ (right assoc), unary minus, parentheses, numeric
/// literals, constants pi and e, and the functions sin cos tan tanh exp log
/// sqrt abs atan floor pow(a,b) min(a,b) max(a,b).
///
/// Throws EvaluationError on any parse problem; evaluation itself never
/// throws (domain errors surface as inf/nan in the result, which downstream
/// finiteness checks catch).
class Expr {
  public:
    static Expr parse(const std::string& text);

    double eval(double x, double y, double t) const;

    const std::string& text() const { return text_; }

  private:
    enum class Op : uint8_t {
        push_const, push_x, push_y, push_t, push_r,
        add, sub, mul, div, pow_, neg,
        sin_, cos_, tan_, tanh_, exp_, log_, sqrt_, abs_, atan_, floor_,
        min_, max_,
    };
    struct Instr {
        Op op;
        double value = 0.0;
    };

    std::string text_;
    std::vector<Instr> prog_;

    friend class ExprParser;
};

}  // namespace pmaflow
