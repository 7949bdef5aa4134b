#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pmc/errors.hpp"

namespace pmc::cli {

/**
 * Arithmetic expressions over x1..xn and s.
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := '-' unary | power
 *   power   := primary ('^' unary)?          right-associative
 *   primary := number | name | func '(' expr ')' | '(' expr ')'
 *   func    := sin | cos | exp
 *   name    := pi | eps | x1 .. xn | s
 *
 * `eps` is bound when the expression is compiled.
 */
class Expression {
public:
    struct Node;

    /// Throws ParseError naming the offending position.
    static Expression parse(const std::string& text, int dim);

    const std::string& text() const { return text_; }
    int dim() const { return dim_; }
    bool depends_on_s() const;

    /// Symbolic d/ds. Exponents that depend on s are rejected.
    Expression derivative_s() const;

    /// Stack program with eps substituted; cheap to copy, safe to share across threads.
    class Compiled {
    public:
        double operator()(std::span<const double> x, double s) const;

        struct Op {
            int code;
            double value;
        };

    private:
        friend class Expression;
        std::shared_ptr<const std::vector<Op>> program_;
        int depth_ = 0;
    };

    Compiled compile(double eps) const;

private:
    Expression(std::shared_ptr<const Node> root, std::string text, int dim)
        : root_(std::move(root)), text_(std::move(text)), dim_(dim) {}

    std::shared_ptr<const Node> root_;
    std::string text_;
    int dim_;
};

}  // namespace pmc::cli
