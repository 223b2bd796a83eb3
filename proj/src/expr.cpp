#include "pmaflow/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

namespace pmaflow {

namespace {

struct Token {
    enum Kind { number, ident, op, lparen, rparen, comma, end } kind;
    double value = 0.0;
    std::string name;
    char symbol = 0;
};

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            auto res = std::from_chars(text.data() + i, text.data() + text.size(), v);
            if (res.ec != std::errc{})
                throw EvaluationError("expr: bad numeric literal at offset " + std::to_string(i));
            out.push_back({Token::number, v, {}, 0});
            i = std::size_t(res.ptr - text.data());
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            out.push_back({Token::ident, 0.0, text.substr(i, j - i), 0});
            i = j;
            continue;
        }
        switch (c) {
            case '+': case '-': case '*': case '/': case '^':
                out.push_back({Token::op, 0.0, {}, c});
                break;
            case '(': out.push_back({Token::lparen, 0.0, {}, 0}); break;
            case ')': out.push_back({Token::rparen, 0.0, {}, 0}); break;
            case ',': out.push_back({Token::comma, 0.0, {}, 0}); break;
            default:
                throw EvaluationError(std::string("expr: unexpected character '") + c + "'");
        }
        ++i;
    }
    out.push_back({Token::end, 0.0, {}, 0});
    return out;
}

}  // namespace

class ExprParser {
  public:
    explicit ExprParser(const std::string& text) : tokens_(lex(text)) {}

    std::vector<Expr::Instr> run() {
        parse_sum();
        if (peek().kind != Token::end) throw EvaluationError("expr: trailing input");
        return std::move(prog_);
    }

  private:
    using Op = Expr::Op;

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<Expr::Instr> prog_;

    const Token& peek() const { return tokens_[pos_]; }
    Token take() { return tokens_[pos_++]; }

    void emit(Op op, double v = 0.0) { prog_.push_back({op, v}); }

    bool last_n_const(std::size_t n) const {
        if (prog_.size() < n) return false;
        for (std::size_t k = prog_.size() - n; k < prog_.size(); ++k)
            if (prog_[k].op != Op::push_const) return false;
        return true;
    }

    /// Emits a binary op, folding it when both operands are literals.
    void emit_binary(Op op) {
        if (last_n_const(2)) {
            double b = prog_.back().value;
            prog_.pop_back();
            double a = prog_.back().value;
            double v = 0.0;
            switch (op) {
                case Op::add: v = a + b; break;
                case Op::sub: v = a - b; break;
                case Op::mul: v = a * b; break;
                case Op::div: v = a / b; break;
                case Op::pow_: v = std::pow(a, b); break;
                case Op::min_: v = std::fmin(a, b); break;
                case Op::max_: v = std::fmax(a, b); break;
                default: throw EvaluationError("expr: internal fold error");
            }
            prog_.back().value = v;
            return;
        }
        emit(op);
    }

    void emit_unary(Op op) {
        if (last_n_const(1)) {
            double a = prog_.back().value;
            double v = 0.0;
            switch (op) {
                case Op::neg: v = -a; break;
                case Op::sin_: v = std::sin(a); break;
                case Op::cos_: v = std::cos(a); break;
                case Op::tan_: v = std::tan(a); break;
                case Op::tanh_: v = std::tanh(a); break;
                case Op::exp_: v = std::exp(a); break;
                case Op::log_: v = std::log(a); break;
                case Op::sqrt_: v = std::sqrt(a); break;
                case Op::abs_: v = std::fabs(a); break;
                case Op::atan_: v = std::atan(a); break;
                case Op::floor_: v = std::floor(a); break;
                default: throw EvaluationError("expr: internal fold error");
            }
            prog_.back().value = v;
            return;
        }
        emit(op);
    }

    void parse_sum() {
        parse_product();
        while (peek().kind == Token::op && (peek().symbol == '+' || peek().symbol == '-')) {
            char s = take().symbol;
            parse_product();
            emit_binary(s == '+' ? Op::add : Op::sub);
        }
    }

    void parse_product() {
        parse_power();
        while (peek().kind == Token::op && (peek().symbol == '*' || peek().symbol == '/')) {
            char s = take().symbol;
            parse_power();
            emit_binary(s == '*' ? Op::mul : Op::div);
        }
    }

    void parse_power() {
        parse_unary();
        if (peek().kind == Token::op && peek().symbol == '^') {
            take();
            parse_power();
            emit_binary(Op::pow_);
        }
    }

    void parse_unary() {
        if (peek().kind == Token::op && peek().symbol == '-') {
            take();
            parse_unary();
            emit_unary(Op::neg);
            return;
        }
        if (peek().kind == Token::op && peek().symbol == '+') {
            take();
            parse_unary();
            return;
        }
        parse_primary();
    }

    void parse_primary() {
        Token tok = take();
        if (tok.kind == Token::number) {
            emit(Op::push_const, tok.value);
            return;
        }
        if (tok.kind == Token::lparen) {
            parse_sum();
            expect_rparen();
            return;
        }
        if (tok.kind != Token::ident)
            throw EvaluationError("expr: expected value, found '" + describe(tok) + "'");

        static const std::map<std::string, Op> vars = {
            {"x", Op::push_x},  {"x1", Op::push_x}, {"y", Op::push_y},
            {"x2", Op::push_y}, {"t", Op::push_t},  {"r", Op::push_r},
        };
        if (auto it = vars.find(tok.name); it != vars.end()) {
            emit(it->second);
            return;
        }
        if (tok.name == "pi") {
            emit(Op::push_const, 3.14159265358979323846);
            return;
        }
        if (tok.name == "e") {
            emit(Op::push_const, 2.71828182845904523536);
            return;
        }

        static const std::map<std::string, Op> unary_fns = {
            {"sin", Op::sin_},   {"cos", Op::cos_},   {"tan", Op::tan_},
            {"tanh", Op::tanh_}, {"exp", Op::exp_},   {"log", Op::log_},
            {"sqrt", Op::sqrt_}, {"abs", Op::abs_},   {"atan", Op::atan_},
            {"floor", Op::floor_},
        };
        static const std::map<std::string, Op> binary_fns = {
            {"pow", Op::pow_}, {"min", Op::min_}, {"max", Op::max_},
        };

        if (auto it = unary_fns.find(tok.name); it != unary_fns.end()) {
            expect_lparen(tok.name);
            parse_sum();
            expect_rparen();
            emit_unary(it->second);
            return;
        }
        if (auto it = binary_fns.find(tok.name); it != binary_fns.end()) {
            expect_lparen(tok.name);
            parse_sum();
            if (take().kind != Token::comma)
                throw EvaluationError("expr: " + tok.name + " needs two arguments");
            parse_sum();
            expect_rparen();
            emit_binary(it->second);
            return;
        }
        throw EvaluationError("expr: unknown identifier '" + tok.name + "'");
    }

    void expect_lparen(const std::string& fn) {
        if (take().kind != Token::lparen)
            throw EvaluationError("expr: expected '(' after " + fn);
    }

    void expect_rparen() {
        if (take().kind != Token::rparen) throw EvaluationError("expr: expected ')'");
    }

    static std::string describe(const Token& tok) {
        switch (tok.kind) {
            case Token::end: return "end of input";
            case Token::comma: return ",";
            case Token::rparen: return ")";
            case Token::op: return std::string(1, tok.symbol);
            default: return tok.name;
        }
    }
};

Expr Expr::parse(const std::string& text) {
    Expr e;
    e.text_ = text;
    e.prog_ = ExprParser(text).run();
    int depth = 0;
    for (const Instr& ins : e.prog_) {
        switch (ins.op) {
            case Op::push_const: case Op::push_x: case Op::push_y:
            case Op::push_t: case Op::push_r:
                ++depth;
                break;
            case Op::add: case Op::sub: case Op::mul: case Op::div:
            case Op::pow_: case Op::min_: case Op::max_:
                --depth;
                break;
            default: break;
        }
        if (depth > 63) throw EvaluationError("expr: expression too deeply nested");
    }
    return e;
}

double Expr::eval(double x, double y, double t) const {
    double stack[64];
    int top = -1;
    for (const Instr& ins : prog_) {
        switch (ins.op) {
            case Op::push_const: stack[++top] = ins.value; break;
            case Op::push_x: stack[++top] = x; break;
            case Op::push_y: stack[++top] = y; break;
            case Op::push_t: stack[++top] = t; break;
            case Op::push_r: stack[++top] = std::hypot(x, y); break;
            case Op::add: --top; stack[top] += stack[top + 1]; break;
            case Op::sub: --top; stack[top] -= stack[top + 1]; break;
            case Op::mul: --top; stack[top] *= stack[top + 1]; break;
            case Op::div: --top; stack[top] /= stack[top + 1]; break;
            case Op::pow_: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
            case Op::neg: stack[top] = -stack[top]; break;
            case Op::sin_: stack[top] = std::sin(stack[top]); break;
            case Op::cos_: stack[top] = std::cos(stack[top]); break;
            case Op::tan_: stack[top] = std::tan(stack[top]); break;
            case Op::tanh_: stack[top] = std::tanh(stack[top]); break;
            case Op::exp_: stack[top] = std::exp(stack[top]); break;
            case Op::log_: stack[top] = std::log(stack[top]); break;
            case Op::sqrt_: stack[top] = std::sqrt(stack[top]); break;
            case Op::abs_: stack[top] = std::fabs(stack[top]); break;
            case Op::atan_: stack[top] = std::atan(stack[top]); break;
            case Op::floor_: stack[top] = std::floor(stack[top]); break;
            case Op::min_: --top; stack[top] = std::fmin(stack[top], stack[top + 1]); break;
            case Op::max_: --top; stack[top] = std::fmax(stack[top], stack[top + 1]); break;
        }
    }
    return stack[0];
}

}  // namespace pmaflow
