#ifndef ANNULUS_EXPR_HPP
#define ANNULUS_EXPR_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace annulus {

/*
 * Arithmetic expression language for the nonlinearities f(r, u, v, gu, gv).
 * Grammar, precedence low -> high:
 *
 *   additive        := multiplicative (('+'|'-') multiplicative)*
 *   multiplicative  := unary (('*'|'/') unary)*
 *   unary           := '-' unary | power
 *   power           := primary ('^' power)?          (right associative)
 *   primary         := NUMBER | VAR | FUNC '(' args ')' | '(' additive ')'
 *
 * Variables: r u v gu gv.  Functions: exp log sqrt abs sin cos tan sinh
 * cosh (unary), min max pow (binary).  Constants pi and e are folded into
 * literals at parse time.  Note that '-' is not admitted as the right
 * operand of '^' without parentheses.
 */

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& what,
               std::vector<std::string> expected = {})
        : std::runtime_error(format(offset, what, expected)),
          offset_(offset), expected_(std::move(expected))
    {
    }
    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    static std::string format(std::size_t off, const std::string& what,
                              const std::vector<std::string>& exp)
    {
        std::string s = "parse error at offset " + std::to_string(off) + ": " + what;
        if (!exp.empty()) {
            s += " (expected ";
            for (std::size_t i = 0; i < exp.size(); ++i) {
                if (i)
                    s += ", ";
                s += exp[i];
            }
            s += ")";
        }
        return s;
    }
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Var : std::uint8_t { R, U, V, Gu, Gv };

enum class Func : std::uint8_t {
    Exp, Log, Sqrt, Abs, Sin, Cos, Tan, Sinh, Cosh, // unary
    Min, Max, Pow                                   // binary
};

inline const char* func_name(Func f)
{
    switch (f) {
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Min: return "min";
    case Func::Max: return "max";
    case Func::Pow: return "pow";
    }
    return "?";
}

inline int func_arity(Func f)
{
    return (f == Func::Min || f == Func::Max || f == Func::Pow) ? 2 : 1;
}

class Expr {
public:
    Expr() { root_.kind = Kind::Literal; root_.value = 0.0; }

    static Expr parse(std::string_view source);

    double eval(double r, double u, double v, double gu, double gv) const
    {
        const double vars[5] = {r, u, v, gu, gv};
        return eval_node(root_, vars);
    }

    std::string str() const
    {
        std::string out;
        print_node(root_, 0, out);
        return out;
    }

    bool operator==(const Expr& other) const { return node_eq(root_, other.root_); }
    bool operator!=(const Expr& other) const { return !(*this == other); }

    // construction API (used by tests and generators)
    static Expr literal(double v)
    {
        Expr e;
        e.root_.value = v;
        return e;
    }
    static Expr variable(Var v)
    {
        Expr e;
        e.root_.kind = Kind::Variable;
        e.root_.var = v;
        return e;
    }
    static Expr unary_minus(Expr child)
    {
        Expr e;
        e.root_.kind = Kind::Unary;
        e.root_.children.push_back(std::move(child.root_));
        return e;
    }
    static Expr binary(char op, Expr lhs, Expr rhs)
    {
        Expr e;
        e.root_.kind = Kind::Binary;
        e.root_.op = op;
        e.root_.children.push_back(std::move(lhs.root_));
        e.root_.children.push_back(std::move(rhs.root_));
        return e;
    }
    static Expr call(Func f, std::vector<Expr> args)
    {
        Expr e;
        e.root_.kind = Kind::Call;
        e.root_.func = f;
        for (auto& a : args)
            e.root_.children.push_back(std::move(a.root_));
        return e;
    }

private:
    enum class Kind : std::uint8_t { Literal, Variable, Unary, Binary, Call };

    struct Node {
        Kind kind = Kind::Literal;
        double value = 0.0;
        Var var = Var::R;
        char op = '+';
        Func func = Func::Exp;
        std::vector<Node> children;
    };

    static double checked(double x, const char* what)
    {
        if (!std::isfinite(x))
            throw EvalError(std::string("non-finite result in ") + what);
        return x;
    }

    static double eval_pow(double base, double expo)
    {
        const double r = std::nearbyint(expo);
        if (r == expo) {
            if (base == 0.0 && expo < 0.0)
                throw EvalError("zero raised to a negative power");
            if (std::abs(expo) <= 16.0) {
                const int n = static_cast<int>(r);
                double acc = 1.0;
                const int an = n < 0 ? -n : n;
                for (int i = 0; i < an; ++i)
                    acc *= base;
                if (n < 0)
                    acc = 1.0 / acc;
                return checked(acc, "'^'");
            }
            return checked(std::pow(base, expo), "'^'");
        }
        if (base < 0.0)
            throw EvalError("negative base with non-integer exponent");
        if (base == 0.0 && expo < 0.0)
            throw EvalError("zero raised to a negative power");
        return checked(std::pow(base, expo), "'^'");
    }

    static double eval_node(const Node& n, const double vars[5])
    {
        switch (n.kind) {
        case Kind::Literal:
            return n.value;
        case Kind::Variable:
            return vars[static_cast<int>(n.var)];
        case Kind::Unary:
            return -eval_node(n.children[0], vars);
        case Kind::Binary: {
            const double a = eval_node(n.children[0], vars);
            const double b = eval_node(n.children[1], vars);
            switch (n.op) {
            case '+': return checked(a + b, "'+'");
            case '-': return checked(a - b, "'-'");
            case '*': return checked(a * b, "'*'");
            case '/':
                if (b == 0.0)
                    throw EvalError("division by zero");
                return checked(a / b, "'/'");
            case '^': return eval_pow(a, b);
            }
            throw EvalError("corrupt expression node");
        }
        case Kind::Call: {
            const double a = eval_node(n.children[0], vars);
            switch (n.func) {
            case Func::Exp: return checked(std::exp(a), "exp");
            case Func::Log:
                if (a <= 0.0)
                    throw EvalError("log of non-positive argument");
                return checked(std::log(a), "log");
            case Func::Sqrt:
                if (a < 0.0)
                    throw EvalError("sqrt of negative argument");
                return std::sqrt(a);
            case Func::Abs: return std::abs(a);
            case Func::Sin: return std::sin(a);
            case Func::Cos: return std::cos(a);
            case Func::Tan: return checked(std::tan(a), "tan");
            case Func::Sinh: return checked(std::sinh(a), "sinh");
            case Func::Cosh: return checked(std::cosh(a), "cosh");
            case Func::Min: return std::min(a, eval_node(n.children[1], vars));
            case Func::Max: return std::max(a, eval_node(n.children[1], vars));
            case Func::Pow: return eval_pow(a, eval_node(n.children[1], vars));
            }
            throw EvalError("corrupt expression node");
        }
        }
        throw EvalError("corrupt expression node");
    }

    // minimal-parenthesis printer; inverse of the parser by construction
    static void print_node(const Node& n, int min_prec, std::string& out)
    {
        switch (n.kind) {
        case Kind::Literal: {
            char buf[32];
            auto res = std::to_chars(buf, buf + sizeof buf, n.value);
            out.append(buf, res.ptr);
            return;
        }
        case Kind::Variable: {
            static const char* names[5] = {"r", "u", "v", "gu", "gv"};
            out += names[static_cast<int>(n.var)];
            return;
        }
        case Kind::Unary: {
            const bool paren = min_prec > 3;
            if (paren)
                out += '(';
            out += '-';
            print_node(n.children[0], 3, out);
            if (paren)
                out += ')';
            return;
        }
        case Kind::Binary: {
            int prec, lmin, rmin;
            switch (n.op) {
            case '+': prec = 1; lmin = 1; rmin = 2; break;
            case '-': prec = 1; lmin = 1; rmin = 2; break;
            case '*': prec = 2; lmin = 2; rmin = 3; break;
            case '/': prec = 2; lmin = 2; rmin = 3; break;
            default:  prec = 4; lmin = 5; rmin = 4; break; // '^'
            }
            const bool paren = min_prec > prec;
            if (paren)
                out += '(';
            print_node(n.children[0], lmin, out);
            out += n.op;
            print_node(n.children[1], rmin, out);
            if (paren)
                out += ')';
            return;
        }
        case Kind::Call: {
            out += func_name(n.func);
            out += '(';
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i)
                    out += ',';
                print_node(n.children[i], 0, out);
            }
            out += ')';
            return;
        }
        }
    }

    static bool node_eq(const Node& a, const Node& b)
    {
        if (a.kind != b.kind)
            return false;
        switch (a.kind) {
        case Kind::Literal:
            return a.value == b.value;
        case Kind::Variable:
            return a.var == b.var;
        case Kind::Unary:
            break;
        case Kind::Binary:
            if (a.op != b.op)
                return false;
            break;
        case Kind::Call:
            if (a.func != b.func)
                return false;
            break;
        }
        if (a.children.size() != b.children.size())
            return false;
        for (std::size_t i = 0; i < a.children.size(); ++i)
            if (!node_eq(a.children[i], b.children[i]))
                return false;
        return true;
    }

    class Parser;
    Node root_;
};

class Expr::Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Node run()
    {
        Node n = additive();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError(pos_, "unexpected trailing input",
                             {"operator", "end of input"});
        return n;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws()
    {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                src_[pos_] == '\r'))
            ++pos_;
    }

    bool peek_char(char c)
    {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    bool accept_char(char c)
    {
        if (peek_char(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    Node additive()
    {
        Node lhs = multiplicative();
        for (;;) {
            if (accept_char('+'))
                lhs = make_binary('+', std::move(lhs), multiplicative());
            else if (accept_char('-'))
                lhs = make_binary('-', std::move(lhs), multiplicative());
            else
                return lhs;
        }
    }

    Node multiplicative()
    {
        Node lhs = unary();
        for (;;) {
            if (accept_char('*'))
                lhs = make_binary('*', std::move(lhs), unary());
            else if (accept_char('/'))
                lhs = make_binary('/', std::move(lhs), unary());
            else
                return lhs;
        }
    }

    Node unary()
    {
        if (accept_char('-')) {
            Node n;
            n.kind = Kind::Unary;
            n.children.push_back(unary());
            return n;
        }
        return power();
    }

    Node power()
    {
        Node base = primary();
        if (accept_char('^'))
            return make_binary('^', std::move(base), power());
        return base;
    }

    Node primary()
    {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError(pos_, "unexpected end of input",
                             {"number", "identifier", "'('"});
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Node inner = additive();
            if (!accept_char(')'))
                throw ParseError(pos_, "unbalanced parenthesis", {"')'"});
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.')
            return number();
        if (is_ident_start(c))
            return identifier();
        throw ParseError(pos_, std::string("unexpected character '") + c + "'",
                         {"number", "identifier", "'('"});
    }

    static bool is_ident_start(char c)
    {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_ident_char(char c)
    {
        return is_ident_start(c) || (c >= '0' && c <= '9');
    }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    Node number()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_digit(src_[pos_]))
            ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && is_digit(src_[pos_]))
                ++pos_;
        }
        // exponent part only when followed by digits, so that "2*e" still
        // sees the constant e
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-'))
                ++p;
            if (p < src_.size() && is_digit(src_[p])) {
                pos_ = p;
                while (pos_ < src_.size() && is_digit(src_[pos_]))
                    ++pos_;
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        if (text == ".")
            throw ParseError(start, "malformed number", {"number"});
        double value = 0.0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size())
            throw ParseError(start, "malformed number '" + text + "'", {"number"});
        Node n;
        n.kind = Kind::Literal;
        n.value = value;
        return n;
    }

    Node identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_]))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));

        Node n;
        if (name == "r") { n.kind = Kind::Variable; n.var = Var::R; return n; }
        if (name == "u") { n.kind = Kind::Variable; n.var = Var::U; return n; }
        if (name == "v") { n.kind = Kind::Variable; n.var = Var::V; return n; }
        if (name == "gu") { n.kind = Kind::Variable; n.var = Var::Gu; return n; }
        if (name == "gv") { n.kind = Kind::Variable; n.var = Var::Gv; return n; }
        if (name == "pi") { n.value = M_PI; return n; }
        if (name == "e") { n.value = M_E; return n; }

        static const Func funcs[] = {Func::Exp, Func::Log, Func::Sqrt, Func::Abs,
                                     Func::Sin, Func::Cos, Func::Tan, Func::Sinh,
                                     Func::Cosh, Func::Min, Func::Max, Func::Pow};
        for (Func f : funcs) {
            if (name == func_name(f)) {
                if (!accept_char('('))
                    throw ParseError(pos_, "function '" + name + "' requires arguments",
                                     {"'('"});
                n.kind = Kind::Call;
                n.func = f;
                n.children.push_back(additive());
                while (accept_char(','))
                    n.children.push_back(additive());
                if (!accept_char(')'))
                    throw ParseError(pos_, "unbalanced parenthesis in call", {"')'", "','"});
                if (static_cast<int>(n.children.size()) != func_arity(f))
                    throw ParseError(start,
                                     "function '" + name + "' expects " +
                                         std::to_string(func_arity(f)) + " argument(s), got " +
                                         std::to_string(n.children.size()));
                return n;
            }
        }
        throw ParseError(start, "unknown identifier '" + name + "'",
                         {"r", "u", "v", "gu", "gv", "pi", "e", "function name"});
    }

    static Node make_binary(char op, Node lhs, Node rhs)
    {
        Node n;
        n.kind = Kind::Binary;
        n.op = op;
        n.children.push_back(std::move(lhs));
        n.children.push_back(std::move(rhs));
        return n;
    }
};

inline Expr Expr::parse(std::string_view source)
{
    Expr e;
    e.root_ = Parser(source).run();
    return e;
}

} // namespace annulus

#endif
