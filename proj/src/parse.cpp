#include "rwsos/parse.hpp"

#include <cctype>
#include <charconv>
#include <regex>

namespace rwsos::parse {

namespace {

struct Token {
    enum class Kind { Ident, Int, Sym, End };
    Kind kind = Kind::End;
    std::string text;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

    bool is_sym(const char* s) const { return tok_.kind == Token::Kind::Sym && tok_.text == s; }
    bool is_ident(const char* s) const { return tok_.kind == Token::Kind::Ident && tok_.text == s; }

    bool accept_sym(const char* s) {
        if (!is_sym(s)) return false;
        advance();
        return true;
    }

    void expect_sym(const char* s) {
        if (!accept_sym(s)) fail("'" + std::string(s) + "'");
    }

    void expect_ident(const char* s) {
        if (!is_ident(s)) fail("'" + std::string(s) + "'");
        advance();
    }

    std::int64_t expect_int() {
        if (tok_.kind != Token::Kind::Int) fail("integer");
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), v);
        if (ec != std::errc()) fail("integer in the 64-bit range");
        advance();
        return v;
    }

    // integer with optional leading '-'
    std::int64_t expect_signed() {
        if (accept_sym("-")) {
            if (tok_.kind != Token::Kind::Int) fail("integer");
            std::int64_t v = 0;
            std::string t = "-" + tok_.text;
            auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc()) fail("integer in the 64-bit range");
            advance();
            return v;
        }
        return expect_int();
    }

    std::string expect_name() {
        if (tok_.kind != Token::Kind::Ident) fail("identifier");
        return next().text;
    }

    void expect_end() {
        if (tok_.kind != Token::Kind::End) fail("end of input");
    }

    [[noreturn]] void fail(const std::string& expected) const { throw ParseError(tok_.line, tok_.col, expected); }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) bump();
        tok_ = Token{};
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) return;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            std::size_t b = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                                          src_[pos_] == '~' || src_[pos_] == '$'))
                bump();
            tok_.kind = Token::Kind::Ident;
            tok_.text = src_.substr(b, pos_ - b);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t b = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
            tok_.kind = Token::Kind::Int;
            tok_.text = src_.substr(b, pos_ - b);
            return;
        }
        tok_.kind = Token::Kind::Sym;
        for (const char* m : {":=", "(+)", "(-)", "\xC2\xB7"}) {
            std::size_t n = std::char_traits<char>::length(m);
            if (src_.compare(pos_, n, m) == 0) {
                tok_.text = m;
                for (std::size_t i = 0; i < n; ++i) bump();
                if (tok_.text == "\xC2\xB7") --col_;  // one column for the two-byte dot
                return;
            }
        }
        tok_.text = std::string(1, c);
        bump();
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

// ---- tiny terms ----

Term term(Lexer& lx, bool allowVars) {
    static const std::regex var("[xy][0-9]+");
    std::string name = lx.expect_name();
    if (allowVars && std::regex_match(name, var)) return Term::var(name);
    std::vector<Term> kids;
    if (lx.accept_sym("(")) {
        if (!lx.is_sym(")")) {
            kids.push_back(term(lx, allowVars));
            while (lx.accept_sym(",")) kids.push_back(term(lx, allowVars));
        }
        lx.expect_sym(")");
    }
    return Term::op(name, std::move(kids));
}

// ---- Imp ----

ImpExpr iexpr(Lexer& lx);

ImpExpr iatom(Lexer& lx) {
    const Token& t = lx.peek();
    if (t.kind == Token::Kind::Int || lx.is_sym("-")) return ImpExpr::constant(lx.expect_signed());
    if (t.kind == Token::Kind::Ident) {
        if (t.text == "skip" || t.text == "while") lx.fail("expression");
        return ImpExpr::var(lx.next().text);
    }
    if (lx.accept_sym("(")) {
        ImpExpr e = iexpr(lx);
        lx.expect_sym(")");
        return e;
    }
    lx.fail("expression");
}

ImpExpr iterm(Lexer& lx) {
    ImpExpr e = iatom(lx);
    while (lx.accept_sym("*")) e = e * iatom(lx);
    return e;
}

ImpExpr iexpr(Lexer& lx) {
    ImpExpr e = iterm(lx);
    while (true) {
        if (lx.accept_sym("+")) e = e + iterm(lx);
        else if (lx.accept_sym("-")) e = e - iterm(lx);
        else return e;
    }
}

imp::Prog iprog(Lexer& lx);

imp::Prog istmt(Lexer& lx) {
    using imp::Prog;
    if (lx.is_ident("skip")) {
        lx.next();
        return Prog::skip();
    }
    if (lx.is_ident("while")) {
        lx.next();
        ImpExpr g = iexpr(lx);
        lx.expect_sym("{");
        Prog body = iprog(lx);
        lx.expect_sym("}");
        return Prog::while_(g, body);
    }
    if (lx.accept_sym("(")) {
        Prog p = iprog(lx);
        lx.expect_sym(")");
        return p;
    }
    if (lx.peek().kind == Token::Kind::Ident) {
        std::string x = lx.next().text;
        lx.expect_sym(":=");
        return Prog::assign(x, iexpr(lx));
    }
    lx.fail("statement");
}

imp::Prog iprog(Lexer& lx) {
    imp::Prog p = istmt(lx);
    if (lx.accept_sym(";")) return imp::Prog::seq(p, iprog(lx));
    return p;
}

VarStore varstore_body(Lexer& lx, const char* close) {
    VarStore s;
    if (close && lx.is_sym(close)) return s;
    if (!close && lx.peek().kind == Token::Kind::End) return s;
    do {
        std::string x = lx.expect_name();
        lx.expect_sym("=");
        s.put(x, lx.expect_signed());
    } while (lx.accept_sym(","));
    return s;
}

VarStore varstore(Lexer& lx) {
    lx.expect_sym("{");
    VarStore s = varstore_body(lx, "}");
    lx.expect_sym("}");
    return s;
}

imp2::Writer iwriter(Lexer& lx);

imp2::Writer iwtight(Lexer& lx) {
    using imp2::Writer;
    if (lx.accept_sym("[")) {
        imp::Prog p = iprog(lx);
        lx.expect_sym("]");
        lx.expect_sym("@");
        return Writer::run(p, varstore(lx));
    }
    if (lx.is_ident("ret")) {
        lx.next();
        lx.expect_sym("@");
        return Writer::ret(varstore(lx));
    }
    if (lx.is_sym("{")) {
        VarStore s = varstore(lx);
        lx.expect_sym(".");
        return Writer::emit(s, iwtight(lx));
    }
    if (lx.accept_sym("(")) {
        Writer w = iwriter(lx);
        lx.expect_sym(")");
        return w;
    }
    lx.fail("writer");
}

imp2::Writer iwriter(Lexer& lx) {
    imp2::Writer w = iwtight(lx);
    while (lx.accept_sym(";")) w = imp2::Writer::seq(w, istmt(lx));
    return w;
}

// ---- Ref² ----

using ref2::Expr;
using ref2::Reader;
using ref2::Store;
using ref2::Value;

bool starts_expr(const Lexer& lx) {
    return lx.peek().kind == Token::Kind::Int || lx.is_sym("#") || lx.is_sym("!") || lx.is_sym("-");
}

Expr rexpr(Lexer& lx);

Expr runary(Lexer& lx) {
    if (lx.accept_sym("!")) return Expr::deref(runary(lx));
    if (lx.accept_sym("#")) return Expr::loc(lx.expect_int());
    if (lx.peek().kind == Token::Kind::Int || lx.is_sym("-")) return Expr::integer(lx.expect_signed());
    if (lx.accept_sym("(")) {
        Expr e = rexpr(lx);
        lx.expect_sym(")");
        return e;
    }
    lx.fail("expression");
}

Expr rexpr(Lexer& lx) {
    Expr e = runary(lx);
    while (true) {
        if (lx.accept_sym("(+)")) e = Expr::add(e, runary(lx));
        else if (lx.accept_sym("(-)")) e = Expr::sub(e, runary(lx));
        else return e;
    }
}

Reader rreader(Lexer& lx);

Reader rtight(Lexer& lx) {
    if (lx.is_ident("skip")) {
        lx.next();
        return Reader::skip();
    }
    if (lx.is_ident("while")) {
        lx.next();
        Expr e = rexpr(lx);
        lx.expect_sym("{");
        Reader p = rreader(lx);
        lx.expect_sym("}");
        return Reader::while_(e, p);
    }
    if (lx.is_ident("if")) {
        lx.next();
        Expr e = rexpr(lx);
        lx.expect_sym("{");
        Reader p = rreader(lx);
        lx.expect_sym("}");
        lx.expect_ident("else");
        lx.expect_sym("{");
        Reader q = rreader(lx);
        lx.expect_sym("}");
        return Reader::if_(e, p, q);
    }
    if (lx.is_ident("expr")) {
        lx.next();
        return Reader::expr(rexpr(lx));
    }
    if (lx.is_ident("proc")) {
        lx.next();
        if (lx.accept_sym("{")) {
            Reader p = rreader(lx);
            lx.expect_sym("}");
            return Reader::proc(p);
        }
        return Reader::proc(rtight(lx));
    }
    if (lx.accept_sym("&")) return Reader::alloc(rtight(lx));
    if (lx.accept_sym("\xC2\xB7")) return Reader::hole();
    if (lx.accept_sym("(")) {
        Reader p = rreader(lx);
        lx.expect_sym(")");
        return p;
    }
    if (starts_expr(lx)) {
        Expr e = rexpr(lx);
        lx.expect_sym(":=");
        // a bare expression on the right abbreviates `expr e`
        if (starts_expr(lx)) return Reader::assign(e, Reader::expr(rexpr(lx)));
        return Reader::assign(e, rtight(lx));
    }
    lx.fail("reader");
}

Reader rreader(Lexer& lx) {
    Reader p = rtight(lx);
    if (lx.accept_sym(";")) return Reader::seq(p, rreader(lx));
    return p;
}

Value rvalue(Lexer& lx) {
    if (lx.accept_sym("#")) return Value::loc(lx.expect_int());
    if (lx.accept_sym("{")) {
        Reader p = rreader(lx);
        lx.expect_sym("}");
        return Value::reader(p);
    }
    if (lx.peek().kind == Token::Kind::Int || lx.is_sym("-")) return Value::integer(lx.expect_signed());
    lx.fail("value");
}

Store rstore_body(Lexer& lx, const char* close) {
    Store s;
    if (close && lx.is_sym(close)) return s;
    if (!close && lx.peek().kind == Token::Kind::End) return s;
    do {
        lx.accept_sym("#");
        std::int64_t l = lx.expect_int();
        lx.expect_sym("=");
        s = s.set(l, rvalue(lx));
    } while (lx.accept_sym(","));
    return s;
}

Store rstore(Lexer& lx) {
    lx.expect_sym("{");
    Store s = rstore_body(lx, "}");
    lx.expect_sym("}");
    return s;
}

ref2::Writer rwriter(Lexer& lx);

ref2::Writer rwtight(Lexer& lx) {
    using ref2::Writer;
    if (lx.accept_sym("[")) {
        Reader p = rreader(lx);
        lx.expect_sym("]");
        lx.expect_sym("@");
        return Writer::run(p, rstore(lx));
    }
    if (lx.is_ident("ret")) {
        lx.next();
        if (lx.accept_sym("(")) {
            Value v = rvalue(lx);
            lx.expect_sym(")");
            lx.expect_sym("@");
            return Writer::ret_val(v, rstore(lx));
        }
        lx.expect_sym("@");
        return Writer::ret(rstore(lx));
    }
    if (lx.is_sym("{")) {
        Store s = rstore(lx);
        lx.expect_sym(".");
        return Writer::emit(s, rwtight(lx));
    }
    if (lx.accept_sym("&")) return Writer::alloc(rwtight(lx));
    if (lx.accept_sym("(")) {
        Writer w = rwriter(lx);
        lx.expect_sym(")");
        return w;
    }
    if (starts_expr(lx)) {
        Expr e = rexpr(lx);
        lx.expect_sym(":=");
        return Writer::assign(e, rwtight(lx));
    }
    lx.fail("writer");
}

ref2::Writer rwriter(Lexer& lx) {
    ref2::Writer w = rwtight(lx);
    while (lx.accept_sym(";")) w = ref2::Writer::seq(w, rtight(lx));
    return w;
}

template <class F>
auto whole(const std::string& text, F&& f) {
    Lexer lx(text);
    auto v = f(lx);
    lx.expect_end();
    return v;
}

}  // namespace

Term tiny_term(const std::string& text, bool allow_vars) {
    return whole(text, [&](Lexer& lx) { return term(lx, allow_vars); });
}

ImpExpr imp_expr(const std::string& text) { return whole(text, iexpr); }
imp::Prog imp_program(const std::string& text) { return whole(text, iprog); }
imp2::Writer imp2_writer(const std::string& text) { return whole(text, iwriter); }

VarStore var_store(const std::string& text) {
    return whole(text, [](Lexer& lx) {
        if (lx.is_sym("{")) return varstore(lx);
        return varstore_body(lx, nullptr);
    });
}

std::pair<std::string, std::int64_t> binding(const std::string& text) {
    return whole(text, [](Lexer& lx) {
        std::string x = lx.expect_name();
        lx.expect_sym("=");
        return std::make_pair(x, lx.expect_signed());
    });
}

ref2::Expr ref2_expr(const std::string& text) { return whole(text, rexpr); }
ref2::Reader ref2_reader(const std::string& text) { return whole(text, rreader); }
ref2::Writer ref2_writer(const std::string& text) { return whole(text, rwriter); }
ref2::Value ref2_value(const std::string& text) { return whole(text, rvalue); }

ref2::Store ref2_store(const std::string& text) {
    return whole(text, [](Lexer& lx) {
        if (lx.is_sym("{")) return rstore(lx);
        return rstore_body(lx, nullptr);
    });
}

}  // namespace rwsos::parse
