#include "jetflow/expr.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <sstream>

#include "jetflow/errors.hpp"

namespace jetflow {

namespace {

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
    Kind kind;
    std::size_t pos;
    double number = 0.0;
    std::string text;

    Token(Kind k, std::size_t p) : kind(k), pos(p) {}
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    Token next() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        const std::size_t start = i_;
        if (i_ >= src_.size()) return {Token::Kind::End, start};

        const char c = src_[i_];
        switch (c) {
            case '+': ++i_; return {Token::Kind::Plus, start};
            case '-': ++i_; return {Token::Kind::Minus, start};
            case '*': ++i_; return {Token::Kind::Star, start};
            case '/': ++i_; return {Token::Kind::Slash, start};
            case '^': ++i_; return {Token::Kind::Caret, start};
            case '(': ++i_; return {Token::Kind::LParen, start};
            case ')': ++i_; return {Token::Kind::RParen, start};
            case ',': ++i_; return {Token::Kind::Comma, start};
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
                ++j;
            Token t{Token::Kind::Ident, start};
            t.text = src_.substr(i_, j - i_);
            i_ = j;
            return t;
        }
        throw SyntaxError(start, std::string("unexpected character '") + c + "'");
    }

private:
    Token lex_number(std::size_t start) {
        std::size_t j = i_;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        if (j < src_.size() && src_[j] == '.') {
            ++j;
            while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        }
        if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
            std::size_t k = j + 1;
            if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
            if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
                while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
                j = k;
            }
        }
        const std::string body = src_.substr(i_, j - i_);
        if (body == ".") throw SyntaxError(start, "malformed number");
        Token t{Token::Kind::Number, start};
        t.number = std::strtod(body.c_str(), nullptr);
        i_ = j;
        return t;
    }

    const std::string& src_;
    std::size_t i_ = 0;
};

const std::map<std::string, UnaryFn>& function_table() {
    static const std::map<std::string, UnaryFn> table = {
        {"sqrt", UnaryFn::Sqrt},    {"exp", UnaryFn::Exp},       {"ln", UnaryFn::Ln},
        {"sin", UnaryFn::Sin},      {"cos", UnaryFn::Cos},       {"tan", UnaryFn::Tan},
        {"arctan", UnaryFn::Arctan},{"arcsin", UnaryFn::Arcsin}, {"arcsinh", UnaryFn::Arcsinh},
    };
    return table;
}

// x, u, u1, u2, ... are reserved for jet coordinates; anything of that shape
// outside the allowed set is an error rather than a silently free parameter.
bool looks_like_jet_variable(const std::string& name) {
    if (name == "x" || name == "u") return true;
    if (name.size() >= 2 && name[0] == 'u') {
        for (std::size_t i = 1; i < name.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
        return true;
    }
    return false;
}

class Parser {
public:
    Parser(const std::string& src, const std::vector<std::string>& allowed_vars)
        : lexer_(src), vars_(allowed_vars.begin(), allowed_vars.end()) {
        advance();
    }

    ExprPtr run() {
        ExprPtr e = expression();
        if (tok_.kind != Token::Kind::End) throw SyntaxError(tok_.pos, "unexpected trailing input");
        return e;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    bool accept(Token::Kind k) {
        if (tok_.kind != k) return false;
        advance();
        return true;
    }

    ExprPtr expression() {
        ExprPtr lhs = term();
        for (;;) {
            const std::size_t pos = tok_.pos;
            if (accept(Token::Kind::Plus)) lhs = binary(BinaryOp::Add, lhs, term(), pos);
            else if (accept(Token::Kind::Minus)) lhs = binary(BinaryOp::Sub, lhs, term(), pos);
            else return lhs;
        }
    }

    ExprPtr term() {
        ExprPtr lhs = unary();
        for (;;) {
            const std::size_t pos = tok_.pos;
            if (accept(Token::Kind::Star)) lhs = binary(BinaryOp::Mul, lhs, unary(), pos);
            else if (accept(Token::Kind::Slash)) lhs = binary(BinaryOp::Div, lhs, unary(), pos);
            else return lhs;
        }
    }

    ExprPtr unary() {
        const std::size_t pos = tok_.pos;
        if (accept(Token::Kind::Minus)) {
            auto node = std::make_shared<ExprNode>();
            node->kind = ExprNode::Kind::Unary;
            node->position = pos;
            node->unary_fn = UnaryFn::Neg;
            node->lhs = unary();
            return node;
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        const std::size_t pos = tok_.pos;
        if (accept(Token::Kind::Caret)) return binary(BinaryOp::Pow, base, unary(), pos);
        return base;
    }

    ExprPtr primary() {
        const Token t = tok_;
        if (accept(Token::Kind::Number)) {
            auto node = std::make_shared<ExprNode>();
            node->kind = ExprNode::Kind::Number;
            node->position = t.pos;
            node->number = t.number;
            return node;
        }
        if (accept(Token::Kind::LParen)) {
            ExprPtr inner = expression();
            if (!accept(Token::Kind::RParen)) throw SyntaxError(tok_.pos, "expected ')'");
            return inner;
        }
        if (accept(Token::Kind::Ident)) {
            if (tok_.kind == Token::Kind::LParen) return call(t);
            return identifier(t);
        }
        throw SyntaxError(t.pos, "expected a number, identifier or '('");
    }

    ExprPtr call(const Token& name) {
        auto it = function_table().find(name.text);
        if (name.text == "abs") throw UnsupportedFunction("abs");
        if (it == function_table().end()) throw UnknownIdentifier(name.text);
        advance();  // consume '('
        ExprPtr arg = expression();
        if (tok_.kind == Token::Kind::Comma)
            throw ArityError(name.text + " takes exactly one argument");
        if (!accept(Token::Kind::RParen)) throw SyntaxError(tok_.pos, "expected ')'");
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::Unary;
        node->position = name.pos;
        node->unary_fn = it->second;
        node->lhs = arg;
        return node;
    }

    ExprPtr identifier(const Token& t) {
        auto node = std::make_shared<ExprNode>();
        node->position = t.pos;
        if (t.text == "pi" || t.text == "e") {
            node->kind = ExprNode::Kind::Number;
            node->number = (t.text == "pi") ? std::numbers::pi : std::numbers::e;
            node->name = t.text;  // keep the spelling for printing
            return node;
        }
        if (vars_.count(t.text)) {
            node->kind = ExprNode::Kind::Var;
            node->name = t.text;
            return node;
        }
        if (looks_like_jet_variable(t.text)) throw UnknownIdentifier(t.text);
        node->kind = ExprNode::Kind::Param;
        node->name = t.text;
        return node;
    }

    static ExprPtr binary(BinaryOp op, ExprPtr l, ExprPtr r, std::size_t pos) {
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::Binary;
        node->position = pos;
        node->binary_op = op;
        node->lhs = std::move(l);
        node->rhs = std::move(r);
        return node;
    }

    Lexer lexer_;
    std::set<std::string> vars_;
    Token tok_{Token::Kind::End, 0};
};

// ===== evaluation =====

// Instantiated with HyperDual2 only; the unqualified function calls resolve
// through argument-dependent lookup to the overloads in jetflow.
template <typename Scalar, typename VarMap>
Scalar eval_node(const ExprNode& n, const ParamMap& params, const VarMap& vars) {
    switch (n.kind) {
        case ExprNode::Kind::Number:
            return Scalar(n.number);
        case ExprNode::Kind::Var: {
            auto it = vars.find(n.name);
            if (it == vars.end()) throw UnknownIdentifier(n.name);
            return it->second;
        }
        case ExprNode::Kind::Param: {
            auto it = params.find(n.name);
            if (it == params.end()) throw MissingParam(n.name);
            return Scalar(it->second);
        }
        case ExprNode::Kind::Unary: {
            Scalar a = eval_node<Scalar>(*n.lhs, params, vars);
            switch (n.unary_fn) {
                case UnaryFn::Neg: return -a;
                case UnaryFn::Sqrt: return sqrt(a);
                case UnaryFn::Exp: return exp(a);
                case UnaryFn::Ln: return ln(a);
                case UnaryFn::Sin: return sin(a);
                case UnaryFn::Cos: return cos(a);
                case UnaryFn::Tan: return tan(a);
                case UnaryFn::Arctan: return arctan(a);
                case UnaryFn::Arcsin: return arcsin(a);
                case UnaryFn::Arcsinh: return arcsinh(a);
            }
            throw Error("unreachable unary function");
        }
        case ExprNode::Kind::Binary: {
            Scalar a = eval_node<Scalar>(*n.lhs, params, vars);
            Scalar b = eval_node<Scalar>(*n.rhs, params, vars);
            switch (n.binary_op) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div: return a / b;
                case BinaryOp::Pow: return pow(a, b);
            }
            throw Error("unreachable binary operator");
        }
    }
    throw Error("unreachable expression node");
}

// double versions of the function names so eval_node<double> compiles
double ln(double a) {
    if (!(a > 0.0)) throw InvalidDomain("ln requires a strictly positive argument");
    return std::log(a);
}
double arctan(double a) { return std::atan(a); }
double arcsin(double a) {
    if (!(std::abs(a) < 1.0)) throw InvalidDomain("arcsin requires |argument| < 1");
    return std::asin(a);
}
double arcsinh(double a) { return std::asinh(a); }
double sqrt_checked(double a) {
    if (!(a > 0.0)) throw InvalidDomain("sqrt requires a strictly positive argument");
    return std::sqrt(a);
}

double apply_unary_real(UnaryFn f, double a) {
    switch (f) {
        case UnaryFn::Neg: return -a;
        case UnaryFn::Sqrt: return sqrt_checked(a);
        case UnaryFn::Exp: return std::exp(a);
        case UnaryFn::Ln: return ln(a);
        case UnaryFn::Sin: return std::sin(a);
        case UnaryFn::Cos: return std::cos(a);
        case UnaryFn::Tan: {
            if (std::cos(a) == 0.0) throw InvalidDomain("tan undefined at odd multiples of pi/2");
            return std::tan(a);
        }
        case UnaryFn::Arctan: return arctan(a);
        case UnaryFn::Arcsin: return arcsin(a);
        case UnaryFn::Arcsinh: return arcsinh(a);
    }
    throw Error("unreachable unary function");
}

double apply_pow_real(double a, double b) {
    const double n = std::nearbyint(b);
    if (b == n && std::abs(n) < 1e9) {
        if (a == 0.0 && n < 0.0) throw DivisionByZero("zero base with negative exponent");
        return std::pow(a, n);
    }
    if (!(a > 0.0)) throw InvalidDomain("fractional power requires a strictly positive base");
    return std::pow(a, b);
}

double eval_real(const ExprNode& n, const ParamMap& params,
                 const std::map<std::string, double>& vars) {
    switch (n.kind) {
        case ExprNode::Kind::Number: return n.number;
        case ExprNode::Kind::Var: {
            auto it = vars.find(n.name);
            if (it == vars.end()) throw UnknownIdentifier(n.name);
            return it->second;
        }
        case ExprNode::Kind::Param: {
            auto it = params.find(n.name);
            if (it == params.end()) throw MissingParam(n.name);
            return it->second;
        }
        case ExprNode::Kind::Unary:
            return apply_unary_real(n.unary_fn, eval_real(*n.lhs, params, vars));
        case ExprNode::Kind::Binary: {
            const double a = eval_real(*n.lhs, params, vars);
            const double b = eval_real(*n.rhs, params, vars);
            switch (n.binary_op) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div:
                    if (b == 0.0) throw DivisionByZero();
                    return a / b;
                case BinaryOp::Pow: return apply_pow_real(a, b);
            }
            throw Error("unreachable binary operator");
        }
    }
    throw Error("unreachable expression node");
}

// ===== printing =====

const char* fn_name(UnaryFn f) {
    switch (f) {
        case UnaryFn::Neg: return "-";
        case UnaryFn::Sqrt: return "sqrt";
        case UnaryFn::Exp: return "exp";
        case UnaryFn::Ln: return "ln";
        case UnaryFn::Sin: return "sin";
        case UnaryFn::Cos: return "cos";
        case UnaryFn::Tan: return "tan";
        case UnaryFn::Arctan: return "arctan";
        case UnaryFn::Arcsin: return "arcsin";
        case UnaryFn::Arcsinh: return "arcsinh";
    }
    return "?";
}

int node_precedence(const ExprNode& n) {
    if (n.kind == ExprNode::Kind::Binary) {
        switch (n.binary_op) {
            case BinaryOp::Add:
            case BinaryOp::Sub: return 1;
            case BinaryOp::Mul:
            case BinaryOp::Div: return 2;
            case BinaryOp::Pow: return 4;
        }
    }
    if (n.kind == ExprNode::Kind::Unary && n.unary_fn == UnaryFn::Neg) return 3;
    return 5;  // atoms and function calls
}

void print_number(std::ostream& os, const ExprNode& n) {
    if (!n.name.empty()) {  // pi or e, preserved
        os << n.name;
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", n.number);
    os << buf;
}

void print_node(std::ostream& os, const ExprNode& n) {
    const int prec = node_precedence(n);
    auto child = [&](const ExprNode& c, bool needs_paren) {
        if (needs_paren) {
            os << '(';
            print_node(os, c);
            os << ')';
        } else {
            print_node(os, c);
        }
    };

    switch (n.kind) {
        case ExprNode::Kind::Number: print_number(os, n); return;
        case ExprNode::Kind::Var:
        case ExprNode::Kind::Param: os << n.name; return;
        case ExprNode::Kind::Unary:
            if (n.unary_fn == UnaryFn::Neg) {
                os << '-';
                child(*n.lhs, node_precedence(*n.lhs) < prec);
            } else {
                os << fn_name(n.unary_fn) << '(';
                print_node(os, *n.lhs);
                os << ')';
            }
            return;
        case ExprNode::Kind::Binary: {
            const char* op = nullptr;
            bool left_paren, right_paren;
            switch (n.binary_op) {
                case BinaryOp::Add: op = " + "; break;
                case BinaryOp::Sub: op = " - "; break;
                case BinaryOp::Mul: op = "*"; break;
                case BinaryOp::Div: op = "/"; break;
                case BinaryOp::Pow: op = "^"; break;
            }
            if (n.binary_op == BinaryOp::Pow) {
                // right associative; left operand must be an atom-level item
                left_paren = node_precedence(*n.lhs) <= prec && n.lhs->kind == ExprNode::Kind::Binary;
                left_paren = left_paren || (n.lhs->kind == ExprNode::Kind::Unary &&
                                            n.lhs->unary_fn == UnaryFn::Neg);
                right_paren = false;  // exponent is a unary production already
            } else {
                // Left associative chains keep the left child bare. An equal
                // precedence right child is parenthesized even for + and * so
                // the reparse rebuilds the identical tree.
                left_paren = node_precedence(*n.lhs) < prec;
                right_paren = node_precedence(*n.rhs) <= prec;
            }
            child(*n.lhs, left_paren);
            os << op;
            child(*n.rhs, right_paren);
            return;
        }
    }
}

void collect_params(const ExprNode& n, std::set<std::string>& out) {
    if (n.kind == ExprNode::Kind::Param) out.insert(n.name);
    if (n.lhs) collect_params(*n.lhs, out);
    if (n.rhs) collect_params(*n.rhs, out);
}

} // namespace

Expr parse(const std::string& text, const std::vector<std::string>& allowed_vars) {
    Parser p(text, allowed_vars);
    return Expr(p.run(), text);
}

std::string Expr::print() const {
    if (!root_) return "";
    std::ostringstream os;
    print_node(os, *root_);
    return os.str();
}

HyperDual2 Expr::eval_hd(const ParamMap& params,
                         const std::map<std::string, HyperDual2>& vars) const {
    if (!root_) throw Error("empty expression");
    return eval_node<HyperDual2>(*root_, params, vars);
}

double Expr::eval(const ParamMap& params, const std::map<std::string, double>& vars) const {
    if (!root_) throw Error("empty expression");
    return eval_real(*root_, params, vars);
}

std::set<std::string> Expr::param_names() const {
    std::set<std::string> out;
    if (root_) collect_params(*root_, out);
    return out;
}

bool same_tree(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprNode::Kind::Number:
            return a->number == b->number && a->name == b->name;
        case ExprNode::Kind::Var:
        case ExprNode::Kind::Param:
            return a->name == b->name;
        case ExprNode::Kind::Unary:
            return a->unary_fn == b->unary_fn && same_tree(a->lhs, b->lhs);
        case ExprNode::Kind::Binary:
            return a->binary_op == b->binary_op && same_tree(a->lhs, b->lhs) &&
                   same_tree(a->rhs, b->rhs);
    }
    return false;
}

} // namespace jetflow
