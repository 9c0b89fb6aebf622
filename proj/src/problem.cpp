#include "crrigid/problem.hpp"
#include "crrigid/solver.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace crr {

namespace {

const std::set<std::string> kFunctions{"conj", "real", "imag", "sqrt"};

// Line/column lookup over the whole input.
struct Source {
    const std::string &s;
    std::vector<std::size_t> lineStarts;
    int lineBase = 1, colBase = 1; // position of s[0]

    explicit Source(const std::string &text, int line = 1, int col = 1) : s(text), lineBase(line), colBase(col) {
        lineStarts.push_back(0);
        for (std::size_t k = 0; k < s.size(); ++k)
            if (s[k] == '\n') lineStarts.push_back(k + 1);
    }
    std::pair<int, int> at(std::size_t pos) const {
        auto it = std::upper_bound(lineStarts.begin(), lineStarts.end(), pos);
        std::size_t l = static_cast<std::size_t>(it - lineStarts.begin()) - 1;
        int col = static_cast<int>(pos - lineStarts[l]) + 1;
        if (l == 0) col += colBase - 1;
        return {lineBase + static_cast<int>(l), col};
    }
    [[noreturn]] void fail(std::size_t pos, const std::string &msg) const {
        auto [l, c] = at(pos);
        throw ParseError(std::to_string(l) + ":" + std::to_string(c) + ": " + msg);
    }
};

[[noreturn]] void invalid(const Expr &e, const std::string &msg) {
    throw ValidationError(std::to_string(e.line) + ":" + std::to_string(e.col) + ": " + msg);
}

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Recursive descent over [pos, end).
class ExprParser {
public:
    ExprParser(const Source &src, std::size_t begin, std::size_t end) : src_(src), pos_(begin), end_(end) {}

    ExprPtr parseAll() {
        auto e = expr();
        skip();
        if (pos_ < end_) src_.fail(pos_, std::string("unexpected '") + src_.s[pos_] + "'");
        return e;
    }

private:
    const Source &src_;
    std::size_t pos_, end_;

    void skip() {
        while (pos_ < end_ && std::isspace(static_cast<unsigned char>(src_.s[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < end_ && src_.s[pos_] == c;
    }
    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= end_) src_.fail(pos_, std::string("expected '") + c + "' before end of expression");
            src_.fail(pos_, std::string("expected '") + c + "'");
        }
    }
    std::shared_ptr<Expr> node(Expr::Kind k, std::size_t at) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        auto [l, c] = src_.at(at);
        e->line = l;
        e->col = c;
        return e;
    }

    ExprPtr expr() {
        skip();
        ExprPtr a = term();
        for (;;) {
            skip();
            std::size_t at = pos_;
            Expr::Kind k;
            if (accept('+')) k = Expr::Kind::Add;
            else if (accept('-')) k = Expr::Kind::Sub;
            else return a;
            auto n = node(k, at);
            n->args = {a, term()};
            a = n;
        }
    }
    ExprPtr term() {
        ExprPtr a = unary();
        for (;;) {
            skip();
            std::size_t at = pos_;
            Expr::Kind k;
            if (accept('*')) k = Expr::Kind::Mul;
            else if (accept('/')) k = Expr::Kind::Div;
            else return a;
            auto n = node(k, at);
            n->args = {a, unary()};
            a = n;
        }
    }
    ExprPtr unary() {
        skip();
        std::size_t at = pos_;
        if (accept('-')) {
            auto n = node(Expr::Kind::Neg, at);
            n->args = {unary()};
            return n;
        }
        return power();
    }
    ExprPtr power() {
        ExprPtr base = atom();
        skip();
        std::size_t at = pos_;
        if (!accept('^')) return base;
        skip();
        bool neg = accept('-');
        skip();
        std::size_t d0 = pos_;
        while (pos_ < end_ && std::isdigit(static_cast<unsigned char>(src_.s[pos_]))) ++pos_;
        if (d0 == pos_) src_.fail(pos_, "exponent must be an integer literal");
        if (pos_ - d0 > 4) src_.fail(d0, "exponent too large");
        auto n = node(Expr::Kind::Pow, at);
        n->exponent = std::stoi(src_.s.substr(d0, pos_ - d0)) * (neg ? -1 : 1);
        n->args = {base};
        return n;
    }
    ExprPtr atom() {
        skip();
        if (pos_ >= end_) src_.fail(pos_, "expression expected");
        std::size_t at = pos_;
        char c = src_.s[pos_];
        if (c == '(') {
            ++pos_;
            auto e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (pos_ < end_ && std::isdigit(static_cast<unsigned char>(src_.s[pos_]))) ++pos_;
            if (pos_ < end_ && src_.s[pos_] == '.') {
                ++pos_;
                std::size_t f0 = pos_;
                while (pos_ < end_ && std::isdigit(static_cast<unsigned char>(src_.s[pos_]))) ++pos_;
                if (f0 == pos_) src_.fail(pos_, "digits expected after '.'");
            }
            if (pos_ < end_ && identChar(src_.s[pos_])) src_.fail(pos_, "malformed number");
            auto n = node(Expr::Kind::Number, at);
            n->text = src_.s.substr(at, pos_ - at);
            return n;
        }
        if (identStart(c)) {
            while (pos_ < end_ && identChar(src_.s[pos_])) ++pos_;
            std::string id = src_.s.substr(at, pos_ - at);
            if (kFunctions.count(id)) {
                auto n = node(Expr::Kind::Call, at);
                n->text = id;
                expect('(');
                n->args = {expr()};
                expect(')');
                return n;
            }
            if (id == "i") return node(Expr::Kind::Imag, at);
            auto n = node(Expr::Kind::Var, at);
            n->text = id;
            return n;
        }
        src_.fail(pos_, std::string("unexpected '") + c + "'");
    }
};

int precedence(const Expr &e) {
    switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    default: return 5;
    }
}

void print(const Expr &e, std::ostream &os) {
    auto sub = [&](const ExprPtr &c, bool paren) {
        if (paren) os << '(';
        print(*c, os);
        if (paren) os << ')';
    };
    switch (e.kind) {
    case Expr::Kind::Number:
    case Expr::Kind::Var: os << e.text; return;
    case Expr::Kind::Imag: os << 'i'; return;
    case Expr::Kind::Call:
        os << e.text << '(';
        print(*e.args[0], os);
        os << ')';
        return;
    case Expr::Kind::Neg:
        os << '-';
        sub(e.args[0], precedence(*e.args[0]) < 3);
        return;
    case Expr::Kind::Pow:
        sub(e.args[0], precedence(*e.args[0]) < 5);
        os << '^' << e.exponent;
        return;
    default: break;
    }
    int p = precedence(e);
    // left-associative: the right operand needs parentheses at equal precedence
    sub(e.args[0], precedence(*e.args[0]) < p);
    const char *op = e.kind == Expr::Kind::Add ? " + " : e.kind == Expr::Kind::Sub ? " - " : e.kind == Expr::Kind::Mul ? "*" : "/";
    os << op;
    sub(e.args[1], precedence(*e.args[1]) <= p);
}

// ---------------------------------------------------------------- statements

std::string trim(const std::string &s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

const std::set<std::string> kOptions{"d", "order", "cond-order", "window", "oracle", "map-order", "field-order", "work-order"};
const std::set<std::string> kExpectKeys{"dimension", "verdict", "error", "trivial", "source-trivial", "status",
                                        "full-rank", "automorphisms", "k0"};

class StatementParser {
public:
    explicit StatementParser(const std::string &text) : text_(stripComments(text)), src_(text_) {}

    ProblemSpec run() {
        ProblemSpec spec;
        std::size_t start = 0;
        for (std::size_t k = 0; k <= text_.size(); ++k) {
            if (k < text_.size() && text_[k] != ';') continue;
            if (k == text_.size()) {
                if (!trim(text_.substr(start)).empty()) src_.fail(firstNonSpace(start, k), "missing ';'");
                break;
            }
            statement(spec, start, k);
            start = k + 1;
        }
        return spec;
    }

private:
    std::string text_;
    Source src_;
    std::set<std::string> seen_;

    // comments run from '#' to the end of the line; replaced by spaces to keep columns
    static std::string stripComments(std::string s) {
        bool in = false;
        for (char &c : s) {
            if (c == '\n') in = false;
            else if (c == '#') in = true;
            if (in) c = ' ';
        }
        return s;
    }
    std::size_t firstNonSpace(std::size_t a, std::size_t b) const {
        while (a < b && std::isspace(static_cast<unsigned char>(text_[a]))) ++a;
        return a;
    }
    std::size_t find(char c, std::size_t a, std::size_t b) const {
        for (std::size_t k = a; k < b; ++k)
            if (text_[k] == c) return k;
        return std::string::npos;
    }
    std::string word(std::size_t &p, std::size_t b, bool allowDash = false) const {
        p = firstNonSpace(p, b);
        std::size_t a = p;
        if (p < b && identStart(text_[p])) {
            while (p < b && (identChar(text_[p]) || (allowDash && text_[p] == '-'))) ++p;
        }
        if (a == p) src_.fail(a, "name expected");
        return text_.substr(a, p - a);
    }
    void once(const std::string &key, std::size_t at) {
        if (!seen_.insert(key).second) src_.fail(at, "duplicate '" + key + "'");
    }
    void colon(std::size_t &p, std::size_t b) {
        p = firstNonSpace(p, b);
        if (p >= b || text_[p] != ':') src_.fail(p, "expected ':'");
        ++p;
    }
    void checkName(const std::string &n, std::size_t at) const {
        if (n == "i" || kFunctions.count(n)) src_.fail(at, "reserved name '" + n + "'");
    }
    Equation equation(std::size_t a, std::size_t b) {
        std::size_t eq = find('=', a, b);
        if (eq == std::string::npos) src_.fail(firstNonSpace(a, b), "expected 'lhs = rhs'");
        return {ExprParser(src_, a, eq).parseAll(), ExprParser(src_, eq + 1, b).parseAll()};
    }
    std::array<ExprPtr, 3> triple(std::size_t a, std::size_t b) {
        std::size_t p = firstNonSpace(a, b);
        if (p >= b || text_[p] != '(') src_.fail(p, "expected '(' starting three components");
        std::size_t q = b;
        while (q > p && std::isspace(static_cast<unsigned char>(text_[q - 1]))) --q;
        if (q <= p + 1 || text_[q - 1] != ')') src_.fail(q, "expected ')' closing three components");
        // split at top-level commas
        std::vector<std::size_t> cuts{p};
        int depth = 0;
        for (std::size_t k = p + 1; k < q - 1; ++k) {
            if (text_[k] == '(') ++depth;
            else if (text_[k] == ')') --depth;
            else if (text_[k] == ',' && depth == 0) cuts.push_back(k);
        }
        cuts.push_back(q - 1);
        if (cuts.size() != 4) src_.fail(p, "exactly three components expected");
        std::array<ExprPtr, 3> out;
        for (int l = 0; l < 3; ++l) out[l] = ExprParser(src_, cuts[l] + 1, cuts[l + 1]).parseAll();
        return out;
    }
    int integer(std::size_t a, std::size_t b) const {
        std::string t = trim(text_.substr(a, b - a));
        std::size_t at = firstNonSpace(a, b);
        std::size_t k = (t.size() && (t[0] == '+' || t[0] == '-')) ? 1 : 0;
        if (k == t.size() || t.size() > 9) src_.fail(at, "integer expected");
        for (std::size_t j = k; j < t.size(); ++j)
            if (!std::isdigit(static_cast<unsigned char>(t[j]))) src_.fail(at, "integer expected");
        return std::stoi(t);
    }

    void statement(ProblemSpec &spec, std::size_t a, std::size_t b) {
        std::size_t p = firstNonSpace(a, b);
        if (p == b) return; // empty statement
        std::size_t at = p;
        std::string key = word(p, b, true);
        if (key == "title") {
            once(key, at);
            colon(p, b);
            spec.title = trim(text_.substr(p, b - p));
        } else if (key == "vars" || key == "tvars") {
            once(key, at);
            std::vector<std::string> names;
            std::set<std::string> distinct;
            for (p = firstNonSpace(p, b); p < b; p = firstNonSpace(p, b)) {
                std::size_t w0 = p;
                names.push_back(word(p, b));
                checkName(names.back(), w0);
                if (!distinct.insert(names.back()).second) src_.fail(w0, "repeated variable '" + names.back() + "'");
            }
            std::size_t want = key == "vars" ? 2 : 3;
            if (names.size() != want)
                src_.fail(at, key + " declares " + std::to_string(want) + " variables (" +
                                  (key == "vars" ? "z w" : "z1 z2 w") + ")");
            (key == "vars" ? spec.vars : spec.tvars) = names;
        } else if (key == "let") {
            std::size_t n0 = firstNonSpace(p, b);
            std::string name = word(p, b);
            checkName(name, n0);
            for (auto &l : spec.lets)
                if (l.first == name) src_.fail(n0, "constant '" + name + "' defined twice");
            p = firstNonSpace(p, b);
            if (p >= b || text_[p] != '=') src_.fail(p, "expected '='");
            spec.lets.push_back({name, ExprParser(src_, p + 1, b).parseAll()});
        } else if (key == "source") {
            once(key, at);
            colon(p, b);
            spec.source = equation(p, b);
        } else if (key == "target") {
            once(key, at);
            colon(p, b);
            std::size_t r = firstNonSpace(p, b);
            while (r < b && identChar(text_[r])) ++r;
            if (trim(text_.substr(p, r - p)) == "hyperquadric") {
                int eps = integer(r, b);
                if (eps != 1 && eps != -1) src_.fail(firstNonSpace(r, b), "hyperquadric sign must be +1 or -1");
                spec.hyperquadricSign = eps;
            } else {
                spec.target = equation(p, b);
            }
        } else if (key == "map") {
            once(key, at);
            colon(p, b);
            spec.map = triple(p, b);
        } else if (key == "field") {
            std::size_t n0 = firstNonSpace(p, b);
            std::string name = word(p, b, true);
            for (auto &f : spec.fields)
                if (f.name == name) src_.fail(n0, "field '" + name + "' defined twice");
            colon(p, b);
            spec.fields.push_back({name, triple(p, b)});
        } else if (key == "command") {
            once(key, at);
            colon(p, b);
            std::size_t c0 = firstNonSpace(p, b);
            spec.command = word(p, b, true);
            if (firstNonSpace(p, b) != b) src_.fail(firstNonSpace(p, b), "single command name expected");
            static const std::set<std::string> cmds{"check", "normal-coords", "deform", "rigidity", "genericity"};
            if (!cmds.count(spec.command)) src_.fail(c0, "unknown command '" + spec.command + "'");
        } else if (key == "expect") {
            std::size_t k0 = firstNonSpace(p, b);
            std::string k = word(p, b, true);
            if (!kExpectKeys.count(k)) src_.fail(k0, "unknown expectation '" + k + "'");
            colon(p, b);
            std::string v = trim(text_.substr(p, b - p));
            if (v.empty()) src_.fail(p, "value expected");
            spec.expect.push_back({k, v});
        } else if (key == "option") {
            std::size_t k0 = firstNonSpace(p, b);
            std::string k = word(p, b, true);
            if (!kOptions.count(k)) src_.fail(k0, "unknown option '" + k + "'");
            if (spec.options.count(k)) src_.fail(k0, "option '" + k + "' set twice");
            p = firstNonSpace(p, b);
            if (p >= b || text_[p] != '=') src_.fail(p, "expected '='");
            spec.options[k] = integer(p + 1, b);
        } else {
            src_.fail(at, "unknown statement '" + key + "'");
        }
    }
};

// ---------------------------------------------------------------- evaluation

using Constants = std::map<std::string, Scalar>;

struct Ring {
    Vars vars;
    int order = 0; // expansion order of reciprocals
    std::map<std::string, Series> symbols;
    std::function<Series(const Series &)> conj; // empty: conj() not allowed
    const Constants *constants = nullptr;
    std::string what; // for messages
};

bool isConstant(const Series &s) {
    for (auto &t : s.terms())
        for (std::size_t k = 0; k < s.vars()->size(); ++k)
            if (t.first[k] != 0) return false;
    return true;
}

Scalar parseNumber(const std::string &t) {
    auto dot = t.find('.');
    if (dot == std::string::npos) return Scalar::rational(mpq_class(t));
    std::string digits = t.substr(0, dot) + t.substr(dot + 1);
    mpz_class den = 1;
    for (std::size_t k = dot + 1; k < t.size(); ++k) den *= 10;
    mpq_class v(mpz_class(digits), den);
    v.canonicalize();
    return Scalar::rational(v);
}

// sqrt of a rational in Q(i, sqrt d)
Scalar sqrtRational(const mpq_class &x, const Expr &at) {
    bool neg = sgn(x) < 0;
    mpq_class y = neg ? mpq_class(-x) : x;
    mpz_class n = y.get_num() * y.get_den(); // sqrt(y) = sqrt(n) / den
    Scalar r;
    auto over = [&](const mpz_class &k) {
        mpq_class v(k, y.get_den());
        v.canonicalize();
        return v;
    };
    if (mpz_perfect_square_p(n.get_mpz_t())) {
        r = Scalar::rational(over(sqrt(n)));
    } else if (n % fieldD() == 0 && mpz_perfect_square_p(mpz_class(n / fieldD()).get_mpz_t())) {
        r = Scalar(Real(0, over(sqrt(mpz_class(n / fieldD())))));
    } else {
        throw NonRepresentableParameter(std::to_string(at.line) + ":" + std::to_string(at.col) + ": sqrt(" +
                                        x.get_str() + ") is not in Q(i, sqrt " + std::to_string(fieldD()) + ")");
    }
    return neg ? r.timesI() : r;
}

Series reciprocal(const Series &den, const Ring &R, const Expr &at) {
    if (isConstant(den)) {
        if (den.isZero()) invalid(at, "division by zero");
        return Series::constant(R.vars, den.constantTerm().inv(), kExact);
    }
    if (den.constantTerm().isZero()) invalid(at, "denominator vanishes at 0 in " + R.what);
    return invertUnit(den.truncated(std::min(den.order(), R.order)));
}

Series eval(const Expr &e, const Ring &R) {
    switch (e.kind) {
    case Expr::Kind::Number: return Series::constant(R.vars, parseNumber(e.text), kExact);
    case Expr::Kind::Imag: return Series::constant(R.vars, Scalar::I(), kExact);
    case Expr::Kind::Var: {
        if (R.constants) {
            auto c = R.constants->find(e.text);
            if (c != R.constants->end()) return Series::constant(R.vars, c->second, kExact);
        }
        auto s = R.symbols.find(e.text);
        if (s == R.symbols.end()) invalid(e, "unknown symbol '" + e.text + "' in " + R.what);
        return s->second;
    }
    case Expr::Kind::Neg: return -eval(*e.args[0], R);
    case Expr::Kind::Add: return eval(*e.args[0], R) + eval(*e.args[1], R);
    case Expr::Kind::Sub: return eval(*e.args[0], R) - eval(*e.args[1], R);
    case Expr::Kind::Mul: return eval(*e.args[0], R) * eval(*e.args[1], R);
    case Expr::Kind::Div: {
        Series den = eval(*e.args[1], R);
        return eval(*e.args[0], R) * reciprocal(den, R, e);
    }
    case Expr::Kind::Pow: {
        Series b = eval(*e.args[0], R);
        if (e.exponent >= 0) return pow(b, e.exponent);
        return pow(reciprocal(b, R, e), -e.exponent);
    }
    case Expr::Kind::Call: {
        Series x = eval(*e.args[0], R);
        if (e.text == "sqrt") {
            if (!isConstant(x)) invalid(e, "sqrt takes a constant argument");
            Scalar c = x.constantTerm();
            if (!c.isReal() || !c.re.isRational()) invalid(e, "sqrt takes a rational argument");
            return Series::constant(R.vars, sqrtRational(c.re.r, e), kExact);
        }
        if (!R.conj) invalid(e, e.text + "() is not allowed in " + R.what + " (holomorphic expressions only)");
        Series xc = R.conj(x);
        if (e.text == "conj") return xc;
        if (e.text == "real") return (x + xc) * Scalar(Real(mpq_class(1, 2)));
        return (x - xc) * Scalar(Real(), Real(2)).inv(); // imag
    }
    }
    invalid(e, "bad expression");
}

Constants evalConstants(const ProblemSpec &spec, const std::map<std::string, std::string> &overrides) {
    Constants out;
    for (auto &[name, value] : overrides) {
        bool known = false;
        for (auto &l : spec.lets) known = known || l.first == name;
        if (!known) throw ValidationError("--set " + name + ": no 'let " + name + "' in the input");
    }
    for (auto &[name, expr] : spec.lets) {
        Ring R;
        R.vars = vs::zw();
        R.order = 0;
        R.conj = [](const Series &s) { return s.conj(); };
        R.constants = &out;
        R.what = "constant '" + name + "'";
        auto ov = overrides.find(name);
        ExprPtr e = ov == overrides.end() ? expr : parseExpr(ov->second);
        Series v = eval(*e, R);
        if (!isConstant(v)) invalid(*e, "constant '" + name + "' depends on a variable");
        out[name] = v.constantTerm();
    }
    return out;
}

void rejectShadowing(const ProblemSpec &spec) {
    std::set<std::string> names(spec.vars.begin(), spec.vars.end());
    names.insert(spec.tvars.begin(), spec.tvars.end());
    for (auto &[n, e] : spec.lets)
        if (names.count(n)) invalid(*e, "constant '" + n + "' shadows a variable");
}

Ring holomorphicRing(const ProblemSpec &spec, const Constants &c, int order, const std::string &what) {
    Ring R;
    R.vars = vs::zw();
    R.order = order;
    R.constants = &c;
    R.what = what;
    R.symbols[spec.vars[0]] = Series::variable(vs::zw(), 0, kExact);
    R.symbols[spec.vars[1]] = Series::variable(vs::zw(), 1, kExact);
    return R;
}

Series truncateFinite(const Series &s, int order) { return s.order() >= kExact ? s : s.truncated(std::min(order, s.order())); }

SourceHypersurface buildSource(const ProblemSpec &spec, const Constants &c, int workOrder) {
    const Equation &eq = *spec.source;
    Ring R;
    R.vars = vs::zcwt();
    R.order = workOrder;
    R.constants = &c;
    R.what = "the source";
    R.symbols[spec.vars[0]] = Series::variable(vs::zcwt(), 0, kExact);
    R.symbols[spec.vars[1]] = Series::variable(vs::zcwt(), 2, kExact);
    R.conj = [](const Series &s) { return conjugateSeries(s, vs::zcwt(), {1, 0, 3, 2}); };

    if (eq.lhs->kind == Expr::Kind::Var && eq.lhs->text == spec.vars[1]) {
        // normal form w = Q(z, conj(z), conj(w))
        Series q = eval(*eq.rhs, R);
        Series::Builder b(vs::zct(), q.order());
        for (auto &[m, v] : q.terms()) {
            if (m[2] != 0) invalid(*eq.rhs, "Q may not depend on " + spec.vars[1]);
            b.add(Mono{m[0], m[1], m[3]}, v);
        }
        SourceHypersurface M;
        try {
            M = sourceFromQ(b.build());
        } catch (const Error &err) {
            invalid(*eq.rhs, err.what());
        }
        int check = std::min(M.order, workOrder);
        if (!realityResidual(M, check).isZero()) invalid(*eq.rhs, "Q fails the reality identity Q(z, chi, Qbar(chi, z, w)) = w");
        return M;
    }

    Series rho = eval(*eq.lhs, R) - eval(*eq.rhs, R);
    if (!isHermitian(rho, {1, 0, 3, 2})) invalid(*eq.lhs, "source defining function is not real-valued");
    if (!rho.constantTerm().isZero()) invalid(*eq.lhs, "source does not pass through 0");

    // rigid: rho = a w + conj(a)... tau + phi(z, chi) with a tau coefficient equal to -a
    Scalar a = rho.coeff(Mono{0, 0, 1, 0});
    Series phi = rho - Series::monomial(rho.vars(), Mono{0, 0, 1, 0}, a, kExact) +
                 Series::monomial(rho.vars(), Mono{0, 0, 0, 1}, a, kExact);
    bool rigid = !a.isZero() && rho.coeff(Mono{0, 0, 0, 1}) == -a;
    for (auto &[m, v] : phi.terms()) rigid = rigid && m[2] == 0 && m[3] == 0 && m[0] > 0 && m[1] > 0;
    if (rigid) {
        // w = tau - phi / a
        Series::Builder b(vs::zct(), phi.order());
        b.add(Mono{0, 0, 1}, Scalar(1));
        Scalar f = -a.inv();
        for (auto &[m, v] : phi.terms()) b.add(Mono{m[0], m[1], 0}, v * f);
        return sourceFromQ(b.build());
    }
    try {
        return toNormalCoordinates(truncateFinite(rho, workOrder), workOrder);
    } catch (const NotHypersurface &err) {
        invalid(*eq.lhs, err.what());
    } catch (const SingularJacobian &err) {
        invalid(*eq.lhs, err.what());
    }
}

TargetHypersurface buildTarget(const ProblemSpec &spec, const Constants &c, int workOrder) {
    if (spec.hyperquadricSign) return hyperquadric(*spec.hyperquadricSign);
    const Equation &eq = *spec.target;
    const int nz = 2;
    Vars v = vs::target(nz);
    Ring R;
    R.vars = v;
    R.order = workOrder;
    R.constants = &c;
    R.what = "the target";
    for (int k = 0; k <= nz; ++k) R.symbols[spec.tvars[k]] = Series::variable(v, k, kExact);
    R.conj = [v](const Series &s) { return conjugateSeries(s, v, {3, 4, 5, 0, 1, 2}); };
    Series rho = eval(*eq.lhs, R) - eval(*eq.rhs, R);
    try {
        return targetFromDefining(truncateFinite(rho, workOrder), nz, "input");
    } catch (const Error &err) {
        invalid(*eq.lhs, err.what());
    }
}

std::array<Series, 3> evalTriple(const ProblemSpec &spec, const std::array<ExprPtr, 3> &t, const Constants &c,
                                 int order, const std::string &what) {
    Ring R = holomorphicRing(spec, c, order, what);
    std::array<Series, 3> out;
    for (int l = 0; l < 3; ++l) {
        out[l] = truncateFinite(eval(*t[l], R), order);
        if (!out[l].constantTerm().isZero()) invalid(*t[l], what + " component " + std::to_string(l + 1) + " does not vanish at 0");
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------- public

ExprPtr parseExpr(const std::string &text, int line, int col) {
    Source src(text, line, col);
    return ExprParser(src, 0, text.size()).parseAll();
}

std::string printExpr(const ExprPtr &e) {
    std::ostringstream os;
    print(*e, os);
    return os.str();
}

ProblemSpec parseProblem(const std::string &text) { return StatementParser(text).run(); }

ProblemSpec parseProblemFile(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parseProblem(ss.str());
}

std::string printProblem(const ProblemSpec &spec) {
    std::ostringstream os;
    if (!spec.title.empty()) os << "title: " << spec.title << ";\n";
    os << "vars " << spec.vars[0] << ' ' << spec.vars[1] << ";\n";
    os << "tvars " << spec.tvars[0] << ' ' << spec.tvars[1] << ' ' << spec.tvars[2] << ";\n";
    for (auto &[k, v] : spec.options) os << "option " << k << " = " << v << ";\n";
    for (auto &[n, e] : spec.lets) os << "let " << n << " = " << printExpr(e) << ";\n";
    if (spec.source) os << "source: " << printExpr(spec.source->lhs) << " = " << printExpr(spec.source->rhs) << ";\n";
    if (spec.hyperquadricSign) os << "target: hyperquadric " << (*spec.hyperquadricSign > 0 ? "+1" : "-1") << ";\n";
    if (spec.target) os << "target: " << printExpr(spec.target->lhs) << " = " << printExpr(spec.target->rhs) << ";\n";
    auto triple = [&](const std::array<ExprPtr, 3> &t) {
        os << '(' << printExpr(t[0]) << ", " << printExpr(t[1]) << ", " << printExpr(t[2]) << ')';
    };
    if (spec.map) {
        os << "map: ";
        triple(*spec.map);
        os << ";\n";
    }
    for (auto &f : spec.fields) {
        os << "field " << f.name << ": ";
        triple(f.components);
        os << ";\n";
    }
    if (!spec.command.empty()) os << "command: " << spec.command << ";\n";
    for (auto &[k, v] : spec.expect) os << "expect " << k << ": " << v << ";\n";
    return os.str();
}

Series evalHolomorphic(const ProblemSpec &spec, const ExprPtr &e, int order,
                       const std::map<std::string, std::string> &overrides) {
    rejectShadowing(spec);
    Constants c = evalConstants(spec, overrides);
    return truncateFinite(eval(*e, holomorphicRing(spec, c, order, "a holomorphic expression")), order);
}

Problem buildProblem(const ProblemSpec &spec, const BuildSettings &settings,
                     const std::map<std::string, std::string> &overrides) {
    rejectShadowing(spec);
    Constants c = evalConstants(spec, overrides);
    Problem P;
    if (spec.source) {
        P.source = buildSource(spec, c, settings.workOrder);
        P.hasSource = true;
        P.sourceChanged = !P.source.g.isZero();
    }
    if (spec.hyperquadricSign || spec.target) {
        P.target = buildTarget(spec, c, settings.workOrder);
        P.hasTarget = true;
    }
    if (spec.map) {
        P.inputMap = MapGerm{evalTriple(spec, *spec.map, c, settings.mapOrder, "map")};
        P.map = P.sourceChanged ? mapInNormalCoordinates(P.inputMap, P.source, settings.mapOrder) : P.inputMap;
        P.hasMap = true;
    }
    for (auto &f : spec.fields) {
        MapGerm a{evalTriple(spec, f.components, c, settings.fieldOrder, "field " + f.name)};
        if (P.sourceChanged) a = mapInNormalCoordinates(a, P.source, settings.fieldOrder);
        P.fields.push_back({{a[0], a[1], a[2]}, f.name});
    }
    return P;
}

} // namespace crr
