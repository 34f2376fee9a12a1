#include "prevec/dsl.hpp"

#include "prevec/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace prevec::dsl {

const char* to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::classical_field: return "classical_field";
        case FieldKind::displacement_map: return "displacement_map";
        case FieldKind::scalar_probe: return "scalar_probe";
        case FieldKind::transition: return "transition";
    }
    return "classical_field";
}

FieldKind field_kind_from_string(const std::string& name) {
    for (auto k : {FieldKind::classical_field, FieldKind::displacement_map, FieldKind::scalar_probe,
                   FieldKind::transition}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    throw ConfigError("unknown field kind '" + name + "'");
}

namespace {

constexpr std::array<std::pair<const char*, Func>, 8> kFunctions{{
    {"sin", Func::sin},
    {"cos", Func::cos},
    {"tan", Func::tan},
    {"exp", Func::exp},
    {"log", Func::log},
    {"sqrt", Func::sqrt},
    {"abs", Func::abs},
    {"floor", Func::floor},
}};

const char* func_name(Func f) {
    for (const auto& [name, func] : kFunctions) {
        if (func == f) {
            return name;
        }
    }
    return "?";
}

// =============================================================================
// Lexer
// =============================================================================

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
    double number = 0.0;
};

std::string describe(const Token& t) {
    if (t.kind == Tok::end) {
        return "end of input";
    }
    return "'" + t.text + "'";
}

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if ((c >= '0' && c <= '9') || c == '.') {
            while (i < src.size() && ((src[i] >= '0' && src[i] <= '9') || src[i] == '.')) {
                ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == '+' || src[j] == '-')) {
                    ++j;
                }
                if (j < src.size() && src[j] >= '0' && src[j] <= '9') {
                    i = j;
                    while (i < src.size() && src[i] >= '0' && src[i] <= '9') {
                        ++i;
                    }
                }
            }
            const std::string text = src.substr(start, i - start);
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
                throw SyntaxError(start, {"number"}, "'" + text + "'");
            }
            out.push_back({Tok::number, start, text, value});
            continue;
        }
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            while (i < src.size() && ((src[i] >= 'a' && src[i] <= 'z') || (src[i] >= 'A' && src[i] <= 'Z') ||
                                      (src[i] >= '0' && src[i] <= '9') || src[i] == '_')) {
                ++i;
            }
            out.push_back({Tok::ident, start, src.substr(start, i - start)});
            continue;
        }
        Tok kind;
        switch (c) {
            case '+': kind = Tok::plus; break;
            case '-': kind = Tok::minus; break;
            case '*': kind = Tok::star; break;
            case '/': kind = Tok::slash; break;
            case '^': kind = Tok::caret; break;
            case '(': kind = Tok::lparen; break;
            case ')': kind = Tok::rparen; break;
            case ',': kind = Tok::comma; break;
            default:
                throw SyntaxError(start, {"number", "identifier", "operator"}, "'" + std::string(1, c) + "'");
        }
        out.push_back({kind, start, std::string(1, c)});
        ++i;
    }
    out.push_back({Tok::end, src.size(), ""});
    return out;
}

// =============================================================================
// Parser
// =============================================================================

ExprPtr make(auto node) { return std::make_shared<const Expr>(Expr{std::move(node)}); }

class Parser {
public:
    Parser(std::vector<Token> tokens, int dimension) : toks_(std::move(tokens)), dim_(dimension) {}

    std::vector<ExprPtr> definition() {
        if (peek().kind == Tok::lparen) {
            const std::size_t save = pos_;
            advance();
            std::vector<ExprPtr> parts;
            parts.push_back(expr());
            while (peek().kind == Tok::comma) {
                advance();
                parts.push_back(expr());
            }
            expect(Tok::rparen, {"','", "')'"});
            if (peek().kind == Tok::end) {
                return parts;
            }
            if (parts.size() > 1) {
                fail({"end of input"});
            }
            pos_ = save;
        }
        auto e = expr();
        if (peek().kind != Tok::end) {
            fail({"end of input", "operator"});
        }
        return {e};
    }

    ExprPtr single() {
        auto e = expr();
        if (peek().kind != Tok::end) {
            fail({"end of input", "operator"});
        }
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        throw SyntaxError(peek().offset, std::move(expected), describe(peek()));
    }

    void expect(Tok kind, std::vector<std::string> expected) {
        if (peek().kind != kind) {
            fail(std::move(expected));
        }
        advance();
    }

    ExprPtr expr() {
        auto lhs = term();
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            const auto op = advance().kind == Tok::plus ? BinaryOp::add : BinaryOp::sub;
            lhs = make(Binary{op, lhs, term()});
        }
        return lhs;
    }

    ExprPtr term() {
        auto lhs = unary();
        while (peek().kind == Tok::star || peek().kind == Tok::slash) {
            const auto op = advance().kind == Tok::star ? BinaryOp::mul : BinaryOp::div;
            lhs = make(Binary{op, lhs, unary()});
        }
        return lhs;
    }

    ExprPtr unary() {
        if (peek().kind == Tok::minus) {
            advance();
            return make(Negate{unary()});
        }
        return power();
    }

    ExprPtr power() {
        auto base = primary();
        if (peek().kind == Tok::caret) {
            advance();
            return make(Binary{BinaryOp::pow, base, unary()});
        }
        return base;
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::number:
                advance();
                return make(Number{t.number});
            case Tok::lparen: {
                advance();
                auto e = expr();
                expect(Tok::rparen, {"')'"});
                return e;
            }
            case Tok::ident:
                return identifier();
            default:
                fail({"number", "identifier", "'('", "'-'"});
        }
    }

    ExprPtr identifier() {
        const Token t = advance();
        for (const auto& [name, func] : kFunctions) {
            if (t.text == name) {
                if (peek().kind != Tok::lparen) {
                    fail({"'('"});
                }
                advance();
                if (peek().kind == Tok::rparen) {
                    throw ArityMismatch(std::string("function '") + name + "' takes 1 argument, got 0");
                }
                auto arg = expr();
                if (peek().kind == Tok::comma) {
                    int count = 1;
                    while (peek().kind == Tok::comma) {
                        advance();
                        (void)expr();
                        ++count;
                    }
                    throw ArityMismatch(std::string("function '") + name + "' takes 1 argument, got " +
                                        std::to_string(count));
                }
                expect(Tok::rparen, {"')'"});
                return make(Call{func, arg});
            }
        }
        if (t.text == "pi") {
            return make(Pi{});
        }
        if (t.text == "lambda") {
            return make(Lambda{});
        }
        if (auto idx = variable_index(t.text)) {
            return make(Variable{*idx});
        }
        throw UnknownIdentifier(t.offset, t.text);
    }

    std::optional<int> variable_index(const std::string& name) const {
        if (dim_ <= 3 && name.size() == 1) {
            const int idx = name[0] == 'x' ? 0 : name[0] == 'y' ? 1 : name[0] == 'z' ? 2 : -1;
            if (idx >= 0 && idx < dim_) {
                return idx;
            }
            return std::nullopt;
        }
        if (name.size() >= 2 && name[0] == 'x' && name[1] != '0') {
            int value = 0;
            auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), value);
            if (ec == std::errc{} && ptr == name.data() + name.size() && value >= 1 && value <= dim_) {
                return value - 1;
            }
        }
        return std::nullopt;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int dim_;
};

std::string variable_name(int index, int dimension) {
    if (dimension <= 3) {
        return std::string(1, "xyz"[index]);
    }
    return "x" + std::to_string(index + 1);
}

}  // namespace

FieldDef parse(const std::string& source, int dimension, FieldKind kind) {
    if (dimension < 1) {
        throw ConfigError("dimension must be positive");
    }
    Parser parser(lex(source), dimension);
    FieldDef def;
    def.dimension = dimension;
    def.kind = kind;
    def.components = parser.definition();
    const std::size_t want = kind == FieldKind::scalar_probe ? 1 : static_cast<std::size_t>(dimension);
    if (def.components.size() != want) {
        throw ArityMismatch(std::string(to_string(kind)) + " in dimension " + std::to_string(dimension) +
                            " needs " + std::to_string(want) + " components, got " +
                            std::to_string(def.components.size()));
    }
    return def;
}

ExprPtr parse_expression(const std::string& source, int dimension) {
    Parser parser(lex(source), dimension);
    return parser.single();
}

// =============================================================================
// Evaluation
// =============================================================================

namespace {

struct Evaluator {
    const Vec& point;
    double lambda;
    int dimension;

    double operator()(const Expr& e) const {
        return std::visit([&](const auto& n) { return eval(n, e); }, e.node);
    }

    [[noreturn]] void domain_error(const std::string& what, const Expr& e) const {
        const auto sub = print(e, dimension);
        throw DomainError(what + " in " + sub, sub);
    }

    double eval(const Number& n, const Expr&) const { return n.value; }
    double eval(const Variable& v, const Expr&) const { return point[v.index]; }
    double eval(const Pi&, const Expr&) const { return std::numbers::pi; }
    double eval(const Lambda&, const Expr&) const { return lambda; }
    double eval(const Negate& n, const Expr&) const { return -(*this)(*n.operand); }

    double eval(const Binary& b, const Expr& e) const {
        const double x = (*this)(*b.lhs);
        const double y = (*this)(*b.rhs);
        double r = 0.0;
        switch (b.op) {
            case BinaryOp::add: r = x + y; break;
            case BinaryOp::sub: r = x - y; break;
            case BinaryOp::mul: r = x * y; break;
            case BinaryOp::div:
                if (y == 0.0) {
                    domain_error("division by zero", e);
                }
                r = x / y;
                break;
            case BinaryOp::pow: r = std::pow(x, y); break;
        }
        if (!std::isfinite(r)) {
            domain_error("non-finite result", e);
        }
        return r;
    }

    double eval(const Call& c, const Expr& e) const {
        const double x = (*this)(*c.arg);
        double r = 0.0;
        switch (c.func) {
            case Func::sin: r = std::sin(x); break;
            case Func::cos: r = std::cos(x); break;
            case Func::tan: r = std::tan(x); break;
            case Func::exp: r = std::exp(x); break;
            case Func::log:
                if (!(x > 0.0)) {
                    domain_error("log of non-positive value", e);
                }
                r = std::log(x);
                break;
            case Func::sqrt:
                if (x < 0.0) {
                    domain_error("sqrt of negative value", e);
                }
                r = std::sqrt(x);
                break;
            case Func::abs: r = std::abs(x); break;
            case Func::floor: r = std::floor(x); break;
        }
        if (!std::isfinite(r)) {
            domain_error("non-finite result", e);
        }
        return r;
    }
};

}  // namespace

double evaluate(const Expr& expr, const Vec& point, double lambda) {
    return Evaluator{point, lambda, static_cast<int>(point.size())}(expr);
}

Vec evaluate(const FieldDef& def, const Vec& point, double lambda) {
    if (point.size() != def.dimension) {
        throw ConfigError("point of dimension " + std::to_string(point.size()) + " for a definition of dimension " +
                          std::to_string(def.dimension));
    }
    const Evaluator ev{point, lambda, def.dimension};
    Vec out(static_cast<Eigen::Index>(def.components.size()));
    for (std::size_t i = 0; i < def.components.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = ev(*def.components[i]);
    }
    return out;
}

Vec evaluate(const FieldDef& def, const Vec& point, const Scale& scale) {
    return evaluate(def, point, scale.lambda());
}

// =============================================================================
// Printing
// =============================================================================

std::string print(const Expr& expr, int dimension) {
    struct Printer {
        int dim;
        std::string operator()(const Number& n) const { return format_double(n.value); }
        std::string operator()(const Variable& v) const { return variable_name(v.index, dim); }
        std::string operator()(const Pi&) const { return "pi"; }
        std::string operator()(const Lambda&) const { return "lambda"; }
        std::string operator()(const Negate& n) const { return "(-" + print(*n.operand, dim) + ")"; }
        std::string operator()(const Binary& b) const {
            static constexpr std::array<const char*, 5> ops{"+", "-", "*", "/", "^"};
            return "(" + print(*b.lhs, dim) + " " + ops[static_cast<std::size_t>(b.op)] + " " + print(*b.rhs, dim) +
                   ")";
        }
        std::string operator()(const Call& c) const {
            return std::string(func_name(c.func)) + "(" + print(*c.arg, dim) + ")";
        }
    };
    return std::visit(Printer{dimension}, expr.node);
}

std::string print(const FieldDef& def) {
    std::string out = "(";
    for (std::size_t i = 0; i < def.components.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += print(*def.components[i], def.dimension);
    }
    return out + ")";
}

}  // namespace prevec::dsl
