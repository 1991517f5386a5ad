#include "sfj/taskc/parser.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "sfj/errors.hpp"

namespace sfj::taskc {

const char* to_string(BinOp op) {
    switch (op) {
        case BinOp::add: return "add";
        case BinOp::sub: return "sub";
        case BinOp::mul: return "mul";
        case BinOp::div: return "div";
        case BinOp::mod: return "mod";
        case BinOp::shl: return "shl";
        case BinOp::shr: return "shr";
        case BinOp::lt: return "lt";
        case BinOp::le: return "le";
        case BinOp::gt: return "gt";
        case BinOp::ge: return "ge";
        case BinOp::eq: return "eq";
        case BinOp::ne: return "ne";
        case BinOp::band: return "and";
        case BinOp::bor: return "or";
        case BinOp::bxor: return "xor";
        case BinOp::land: return "land";
        case BinOp::lor: return "lor";
    }
    return "?";
}

const char* to_string(UnOp op) {
    switch (op) {
        case UnOp::neg: return "neg";
        case UnOp::lnot: return "not";
        case UnOp::bnot: return "bnot";
    }
    return "?";
}

const char* to_string(Builtin b) {
    switch (b) {
        case Builtin::load: return "load";
        case Builtin::store: return "store";
        case Builtin::atomic_add: return "atomic_add";
        case Builtin::len: return "len";
        case Builtin::min: return "min";
        case Builtin::max: return "max";
        case Builtin::lcg_next: return "lcg_next";
    }
    return "?";
}

int Program::find_function(const std::string& name) const {
    for (std::size_t i = 0; i < functions.size(); ++i) {
        if (functions[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

int Program::find_buffer(const std::string& name) const {
    for (std::size_t i = 0; i < buffers.size(); ++i) {
        if (buffers[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

enum class Tok { ident, number, punct, end };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    Loc loc;
    std::uint64_t number = 0;
};

[[noreturn]] void fail(Loc loc, std::string msg) {
    throw CompileError({Diagnostic{loc.line, loc.column, std::move(msg)}});
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    static const char* const two_char[] = {"<=", ">=", "==", "!=", "&&", "||", "<<", ">>"};
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            Loc start{line, col};
            advance(2);
            while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
            if (i + 1 >= src.size()) fail(start, "unterminated comment");
            advance(2);
            continue;
        }
        Token t;
        t.loc = {line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            t.kind = Tok::ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            int base = 10;
            if (c == '0' && i + 1 < src.size() && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
                base = 16;
                j += 2;
            }
            const std::size_t digits = j;
            while (j < src.size() && std::isalnum(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Tok::number;
            t.text = std::string(src.substr(i, j - i));
            auto [p, ec] = std::from_chars(src.data() + digits, src.data() + j, t.number, base);
            if (ec != std::errc{} || p != src.data() + j || digits == j) {
                fail(t.loc, "invalid integer literal '" + t.text + "'");
            }
            advance(j - i);
        } else {
            t.kind = Tok::punct;
            t.text = std::string(1, c);
            for (const char* tc : two_char) {
                if (src.substr(i, 2) == tc) t.text = tc;
            }
            static const std::string singles = "+-*/%<>=!~&|^?:;,(){}";
            if (t.text.size() == 1 && singles.find(c) == std::string::npos) {
                fail(t.loc, std::string("unexpected character '") + c + "'");
            }
            advance(t.text.size());
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::end;
    end.loc = {line, col};
    out.push_back(end);
    return out;
}

bool is_keyword(const std::string& s) {
    static const char* const kws[] = {"task",  "fn",   "spawn", "taskwait", "queue",
                                      "buffer", "return", "if", "else",     "while",
                                      "let",   "const", "true", "false"};
    for (const char* k : kws) {
        if (s == k) return true;
    }
    return false;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Program program() {
        Program p;
        while (!at_end()) {
            if (accept_kw("buffer")) {
                BufferDecl b;
                b.loc = prev().loc;
                b.name = ident("buffer name");
                expect(";");
                p.buffers.push_back(std::move(b));
            } else if (accept_kw("const")) {
                ConstDecl c;
                c.loc = prev().loc;
                c.name = ident("constant name");
                expect("=");
                const bool neg = accept("-");
                if (peek().kind != Tok::number) fail(peek().loc, "expected integer constant");
                c.value = static_cast<Value>(next().number);
                if (neg) c.value = static_cast<Value>(0ULL - static_cast<std::uint64_t>(c.value));
                expect(";");
                p.consts.push_back(std::move(c));
            } else if (peek_kw("task") || peek_kw("fn")) {
                p.functions.push_back(function());
            } else {
                fail(peek().loc, "expected 'task', 'fn', 'buffer' or 'const' at top level");
            }
        }
        return p;
    }

private:
    Function function() {
        Function f;
        f.loc = peek().loc;
        f.is_task = next().text == "task";
        f.name = ident("function name");
        expect("(");
        if (!accept(")")) {
            do {
                VarInfo v;
                v.loc = peek().loc;
                v.name = ident("parameter name");
                v.is_param = true;
                f.params.push_back(static_cast<int>(f.vars.size()));
                f.vars.push_back(std::move(v));
            } while (accept(","));
            expect(")");
        }
        f.body = block();
        return f;
    }

    std::vector<StmtPtr> block() {
        expect("{");
        std::vector<StmtPtr> body;
        while (!accept("}")) {
            if (at_end()) fail(peek().loc, "expected '}'");
            body.push_back(statement());
        }
        return body;
    }

    // Body of if/else/while: a braced block or a single statement.
    std::vector<StmtPtr> arm() {
        if (peek().kind == Tok::punct && peek().text == "{") return block();
        std::vector<StmtPtr> one;
        one.push_back(statement());
        return one;
    }

    StmtPtr statement() {
        auto s = std::make_unique<Stmt>();
        s->loc = peek().loc;
        if (accept_kw("let")) {
            s->kind = Stmt::Kind::let;
            s->name = ident("variable name");
            expect("=");
            s->expr = expression();
            expect(";");
        } else if (accept_kw("if")) {
            s->kind = Stmt::Kind::if_;
            expect("(");
            s->expr = expression();
            expect(")");
            s->body = arm();
            if (accept_kw("else")) s->else_body = arm();
        } else if (accept_kw("while")) {
            s->kind = Stmt::Kind::while_;
            expect("(");
            s->expr = expression();
            expect(")");
            s->body = arm();
        } else if (accept_kw("return")) {
            s->kind = Stmt::Kind::return_;
            if (!accept(";")) {
                s->expr = expression();
                expect(";");
            }
        } else if (accept_kw("spawn")) {
            s->kind = Stmt::Kind::spawn;
            if (peek().kind == Tok::ident && !is_keyword(peek().text) && peek(1).text == "=") {
                s->name = next().text;
                next();
            }
            const Loc at = peek().loc;
            if (peek().kind == Tok::punct && peek().text == "{") {
                fail(at,
                     "spawn must be immediately followed by a call to a task function "
                     "(statement blocks are not supported)");
            }
            s->expr = expression();
            if (s->expr->kind != Expr::Kind::call) {
                fail(at,
                     "spawn must be immediately followed by a call to a task function "
                     "(statement blocks are not supported)");
            }
            if (accept_kw("queue")) s->queue = paren_expr();
            expect(";");
        } else if (accept_kw("taskwait")) {
            s->kind = Stmt::Kind::taskwait;
            if (accept_kw("queue")) s->queue = paren_expr();
            expect(";");
        } else if (peek().text == "{" && peek().kind == Tok::punct) {
            s->kind = Stmt::Kind::block;
            s->body = block();
        } else if (peek().kind == Tok::ident && !is_keyword(peek().text) &&
                   peek(1).text == "=" && peek(1).kind == Tok::punct) {
            s->kind = Stmt::Kind::assign;
            s->name = next().text;
            next();
            s->expr = expression();
            expect(";");
        } else {
            s->kind = Stmt::Kind::expr;
            s->expr = expression();
            expect(";");
        }
        return s;
    }

    ExprPtr paren_expr() {
        expect("(");
        ExprPtr e = expression();
        expect(")");
        return e;
    }

    ExprPtr expression() { return ternary(); }

    ExprPtr ternary() {
        ExprPtr cond = binary(0);
        if (!accept("?")) return cond;
        auto e = make(Expr::Kind::ternary, prev().loc);
        e->args.push_back(std::move(cond));
        e->args.push_back(expression());
        expect(":");
        e->args.push_back(expression());
        return e;
    }

    struct Level {
        const char* ops[4];
        BinOp bins[4];
    };

    static const std::vector<Level>& levels() {
        static const std::vector<Level> lv = {
            {{"||"}, {BinOp::lor}},
            {{"&&"}, {BinOp::land}},
            {{"|"}, {BinOp::bor}},
            {{"^"}, {BinOp::bxor}},
            {{"&"}, {BinOp::band}},
            {{"==", "!="}, {BinOp::eq, BinOp::ne}},
            {{"<", "<=", ">", ">="}, {BinOp::lt, BinOp::le, BinOp::gt, BinOp::ge}},
            {{"<<", ">>"}, {BinOp::shl, BinOp::shr}},
            {{"+", "-"}, {BinOp::add, BinOp::sub}},
            {{"*", "/", "%"}, {BinOp::mul, BinOp::div, BinOp::mod}},
        };
        return lv;
    }

    ExprPtr binary(std::size_t level) {
        if (level == levels().size()) return unary();
        ExprPtr lhs = binary(level + 1);
        for (;;) {
            const Level& lv = levels()[level];
            int hit = -1;
            for (int k = 0; k < 4 && lv.ops[k]; ++k) {
                if (peek().kind == Tok::punct && peek().text == lv.ops[k]) hit = k;
            }
            if (hit < 0) return lhs;
            auto e = make(Expr::Kind::binary, next().loc);
            e->bin = lv.bins[hit];
            e->args.push_back(std::move(lhs));
            e->args.push_back(binary(level + 1));
            lhs = std::move(e);
        }
    }

    ExprPtr unary() {
        if (peek().kind == Tok::punct) {
            const std::string& t = peek().text;
            if (t == "-" || t == "!" || t == "~") {
                auto e = make(Expr::Kind::unary, next().loc);
                e->un = t == "-" ? UnOp::neg : t == "!" ? UnOp::lnot : UnOp::bnot;
                e->args.push_back(unary());
                return e;
            }
        }
        return primary();
    }

    ExprPtr primary() {
        const Token& t = peek();
        if (t.kind == Tok::number) {
            auto e = make(Expr::Kind::literal, t.loc);
            e->value = static_cast<Value>(next().number);
            return e;
        }
        if (t.kind == Tok::ident && (t.text == "true" || t.text == "false")) {
            auto e = make(Expr::Kind::literal, t.loc);
            e->value = next().text == "true" ? 1 : 0;
            return e;
        }
        if (t.kind == Tok::ident && !is_keyword(t.text)) {
            const Token id = next();
            if (accept("(")) {
                auto e = make(Expr::Kind::call, id.loc);
                e->name = id.text;
                if (!accept(")")) {
                    do {
                        e->args.push_back(expression());
                    } while (accept(","));
                    expect(")");
                }
                return e;
            }
            auto e = make(Expr::Kind::var, id.loc);
            e->name = id.text;
            return e;
        }
        if (accept("(")) {
            ExprPtr e = expression();
            expect(")");
            return e;
        }
        fail(t.loc, t.kind == Tok::end ? "unexpected end of input"
                                       : "unexpected '" + t.text + "' in expression");
    }

    static ExprPtr make(Expr::Kind k, Loc loc) {
        auto e = std::make_unique<Expr>();
        e->kind = k;
        e->loc = loc;
        return e;
    }

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& prev() const { return toks_[pos_ - 1]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_end() const { return peek().kind == Tok::end; }

    bool accept(const char* p) {
        if (peek().kind == Tok::punct && peek().text == p) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool peek_kw(const char* k) const { return peek().kind == Tok::ident && peek().text == k; }
    bool accept_kw(const char* k) {
        if (!peek_kw(k)) return false;
        ++pos_;
        return true;
    }
    void expect(const char* p) {
        if (!accept(p)) {
            const Token& t = peek();
            fail(t.loc, std::string("expected '") + p + "'" +
                            (t.kind == Tok::end ? " before end of input"
                                                : " but found '" + t.text + "'"));
        }
    }
    std::string ident(const char* what) {
        const Token& t = peek();
        if (t.kind != Tok::ident || is_keyword(t.text)) {
            fail(t.loc, std::string("expected ") + what);
        }
        return next().text;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Program parse(std::string_view source) { return Parser(lex(source)).program(); }

}  // namespace sfj::taskc
