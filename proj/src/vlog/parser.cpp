#include "rtlforge/vlog/parser.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "rtlforge/vlog/lexer.hpp"
#include "rtlforge/vlog/preproc.hpp"

namespace rtlforge::vlog {

namespace {

struct ParseError {
    std::uint32_t line;
    std::string message;
};

class Parser {
public:
    Parser(std::vector<Token> toks, std::string file)
        : toks_(std::move(toks)), file_(std::move(file)) {}

    ParseResult run() {
        ParseResult result;
        while (!at_end()) {
            if (is_kw("module") || is_kw("macromodule")) {
                try {
                    result.modules.push_back(parse_module());
                } catch (const ParseError& e) {
                    diag(e.line, e.message);
                    recover_to_next_module();
                }
            } else if (is_kw("primitive")) {
                diag(peek().line, "user-defined primitives are not supported");
                skip_until_kw("endprimitive");
            } else {
                diag(peek().line, "expected 'module', found '" + peek().text + "'");
                recover_to_next_module();
            }
        }
        result.diags = std::move(diags_);
        return result;
    }

    std::vector<Diagnostic> take_diags() { return std::move(diags_); }

private:
    std::vector<Token> toks_;
    std::string file_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic> diags_;

    static const Token& eof_token() {
        static Token tok{TokKind::Punct, "", 0, 0};
        return tok;
    }

    const Token& peek(std::size_t k = 0) const {
        return pos_ + k < toks_.size() ? toks_[pos_ + k] : eof_token();
    }
    bool at_end() const { return pos_ >= toks_.size(); }
    const Token& advance() {
        const Token& t = peek();
        if (pos_ < toks_.size()) ++pos_;
        return t;
    }

    bool is_text(std::string_view text, std::size_t k = 0) const { return peek(k).text == text; }
    bool is_kw(std::string_view text, std::size_t k = 0) const {
        return peek(k).kind == TokKind::Keyword && peek(k).text == text;
    }
    bool is_ident(std::size_t k = 0) const { return peek(k).kind == TokKind::Identifier; }

    bool accept(std::string_view text) {
        if (is_text(text)) {
            advance();
            return true;
        }
        return false;
    }
    void expect(std::string_view text) {
        if (!accept(text)) fail("expected '" + std::string(text) + "', found '" + describe() + "'");
    }
    std::string expect_ident() {
        if (!is_ident()) fail("expected identifier, found '" + describe() + "'");
        return advance().text;
    }

    std::string describe() const {
        if (at_end()) return "<end of file>";
        return peek().text;
    }

    [[noreturn]] void fail(std::string msg) const { throw ParseError{peek().line, std::move(msg)}; }
    void diag(std::uint32_t line, std::string msg) {
        diags_.push_back(Diagnostic{file_, line, std::move(msg)});
    }

    void recover_to_next_module() {
        while (!at_end() && !is_kw("module") && !is_kw("macromodule")) {
            if (is_kw("endmodule")) {
                advance();
                return;
            }
            advance();
        }
    }

    void skip_until_kw(std::string_view kw) {
        while (!at_end() && !is_kw(kw)) advance();
        if (!at_end()) advance();
    }

    // ---- expressions ----

    ExprPtr make(Expr::Kind kind) {
        auto e = std::make_shared<Expr>();
        e->kind = kind;
        e->line = peek().line;
        return e;
    }

    ExprPtr parse_number(const Token& tok) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Literal;
        e->line = tok.line;
        if (auto v = Value::parse_literal(tok.text)) {
            e->literal = *v;
        } else if (tok.text.find('.') != std::string::npos ||
                   tok.text.find('e') != std::string::npos ||
                   tok.text.find('E') != std::string::npos) {
            // real literal: truncated to an integer value (delays are the
            // only supported context)
            double d = std::strtod(tok.text.c_str(), nullptr);
            e->literal = Value::from_uint(static_cast<std::uint64_t>(d), 64);
        } else {
            fail("malformed number literal '" + tok.text + "'");
        }
        return e;
    }

    static std::string unescape(std::string_view raw) {
        // raw includes the surrounding quotes
        std::string out;
        if (raw.size() < 2) return out;
        std::string_view body = raw.substr(1, raw.size() - 2);
        for (std::size_t i = 0; i < body.size(); ++i) {
            char c = body[i];
            if (c != '\\' || i + 1 >= body.size()) {
                out += c;
                continue;
            }
            char n = body[++i];
            switch (n) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '\\': out += '\\'; break;
                case '"': out += '"'; break;
                default:
                    if (n >= '0' && n <= '7') {
                        int v = n - '0';
                        while (v < 32 && i + 1 < body.size() && body[i + 1] >= '0' &&
                               body[i + 1] <= '7')
                            v = v * 8 + (body[++i] - '0');
                        out += static_cast<char>(v);
                    } else {
                        out += n;
                    }
            }
        }
        return out;
    }

    ExprPtr parse_primary() {
        const Token& tok = peek();
        if (tok.kind == TokKind::Number) {
            advance();
            return parse_postfix(parse_number(tok));
        }
        if (tok.kind == TokKind::String) {
            auto e = make(Expr::Kind::StringLit);
            e->text = unescape(tok.text);
            advance();
            return e;
        }
        if (accept("(")) {
            ExprPtr inner = parse_expr();
            expect(")");
            return parse_postfix(inner);
        }
        if (is_text("{")) return parse_postfix(parse_concat());
        if (tok.kind == TokKind::Identifier) {
            std::string name = advance().text;
            // hierarchical name a.b.c
            while (is_text(".") && is_ident(1)) {
                advance();
                name += "." + advance().text;
            }
            if (is_text("(")) {
                auto e = make(Expr::Kind::Call);
                e->text = name;
                e->line = tok.line;
                advance();
                if (!is_text(")")) {
                    e->items.push_back(parse_expr());
                    while (accept(",")) e->items.push_back(parse_expr());
                }
                expect(")");
                return parse_postfix(e);
            }
            auto e = make(Expr::Kind::Ident);
            e->text = name;
            e->line = tok.line;
            return parse_postfix(e);
        }
        fail("expected expression, found '" + describe() + "'");
    }

    ExprPtr parse_concat() {
        expect("{");
        ExprPtr first = parse_expr();
        if (is_text("{") && first->kind == Expr::Kind::Literal) {
            // replication {N{...}}
            auto e = make(Expr::Kind::Repl);
            e->a = first;
            advance();
            e->items.push_back(parse_expr());
            while (accept(",")) e->items.push_back(parse_expr());
            expect("}");
            expect("}");
            return e;
        }
        if (is_text("{")) {
            // {expr{...}} with non-literal count (parameter)
            auto e = make(Expr::Kind::Repl);
            e->a = first;
            advance();
            e->items.push_back(parse_expr());
            while (accept(",")) e->items.push_back(parse_expr());
            expect("}");
            expect("}");
            return e;
        }
        auto e = make(Expr::Kind::Concat);
        e->items.push_back(first);
        while (accept(",")) e->items.push_back(parse_expr());
        expect("}");
        return e;
    }

    ExprPtr parse_postfix(ExprPtr base) {
        while (is_text("[")) {
            advance();
            ExprPtr first = parse_expr();
            auto sel = make(Expr::Kind::Select);
            sel->a = base;
            if (accept(":")) {
                sel->select_mode = ':';
                sel->b = first;
                sel->c = parse_expr();
            } else if (accept("+:")) {
                sel->select_mode = '+';
                sel->b = first;
                sel->c = parse_expr();
            } else if (accept("-:")) {
                sel->select_mode = '-';
                sel->b = first;
                sel->c = parse_expr();
            } else {
                sel->select_mode = 0;
                sel->b = first;
            }
            expect("]");
            base = sel;
        }
        return base;
    }

    ExprPtr parse_unary() {
        const Token& tok = peek();
        if (tok.kind == TokKind::Operator) {
            const std::string& op = tok.text;
            if (op == "!" || op == "~" || op == "-" || op == "+" || op == "&" || op == "|" ||
                op == "^" || op == "~&" || op == "~|" || op == "~^" || op == "^~") {
                advance();
                auto e = make(Expr::Kind::Unary);
                e->text = op;
                e->line = tok.line;
                e->a = parse_unary();
                return e;
            }
        }
        return parse_primary();
    }

    static int binary_prec(const std::string& op) {
        if (op == "**") return 11;
        if (op == "*" || op == "/" || op == "%") return 10;
        if (op == "+" || op == "-") return 9;
        if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>") return 8;
        if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
        if (op == "==" || op == "!=" || op == "===" || op == "!==") return 6;
        if (op == "&") return 5;
        if (op == "^" || op == "^~" || op == "~^") return 4;
        if (op == "|") return 3;
        if (op == "&&") return 2;
        if (op == "||") return 1;
        return -1;
    }

    ExprPtr parse_binary(int min_prec) {
        ExprPtr lhs = parse_unary();
        while (peek().kind == TokKind::Operator) {
            int prec = binary_prec(peek().text);
            if (prec < min_prec) break;
            std::string op = advance().text;
            ExprPtr rhs = parse_binary(prec + 1);
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Binary;
            e->line = lhs->line;
            e->text = op;
            e->a = lhs;
            e->b = rhs;
            lhs = e;
        }
        return lhs;
    }

    ExprPtr parse_expr() {
        ExprPtr cond = parse_binary(1);
        if (is_text("?")) {
            advance();
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Ternary;
            e->line = cond->line;
            e->a = cond;
            e->b = parse_expr();
            expect(":");
            e->c = parse_expr();
            return e;
        }
        return cond;
    }

    ExprPtr parse_lvalue() {
        if (is_text("{")) return parse_concat();
        if (!is_ident()) fail("expected lvalue, found '" + describe() + "'");
        auto e = make(Expr::Kind::Ident);
        e->text = advance().text;
        while (is_text(".") && is_ident(1)) {
            advance();
            e->text += "." + advance().text;
        }
        return parse_postfix(e);
    }

    // ---- statements ----

    StmtPtr make_stmt(Stmt::Kind kind) {
        auto s = std::make_shared<Stmt>();
        s->kind = kind;
        s->line = peek().line;
        return s;
    }

    StmtPtr parse_stmt() {
        if (accept(";")) {
            auto s = std::make_shared<Stmt>();
            s->kind = Stmt::Kind::Null;
            return s;
        }
        if (is_kw("begin")) return parse_block();
        if (is_kw("if")) return parse_if();
        if (is_kw("case") || is_kw("casez") || is_kw("casex")) return parse_case();
        if (is_kw("for")) return parse_for();
        if (is_kw("while")) {
            auto s = make_stmt(Stmt::Kind::While);
            advance();
            expect("(");
            s->cond = parse_expr();
            expect(")");
            s->body = parse_stmt();
            return s;
        }
        if (is_kw("repeat")) {
            auto s = make_stmt(Stmt::Kind::Repeat);
            advance();
            expect("(");
            s->cond = parse_expr();
            expect(")");
            s->body = parse_stmt();
            return s;
        }
        if (is_kw("forever")) {
            auto s = make_stmt(Stmt::Kind::Forever);
            advance();
            s->body = parse_stmt();
            return s;
        }
        if (is_kw("wait")) {
            auto s = make_stmt(Stmt::Kind::Wait);
            advance();
            expect("(");
            s->cond = parse_expr();
            expect(")");
            s->body = accept(";") ? nullptr : parse_stmt();
            return s;
        }
        if (is_kw("disable")) {
            auto s = make_stmt(Stmt::Kind::Disable);
            advance();
            s->name = expect_ident();
            expect(";");
            return s;
        }
        if (is_text("#")) {
            auto s = make_stmt(Stmt::Kind::Delay);
            advance();
            s->delay = parse_delay_value();
            s->body = accept(";") ? nullptr : parse_stmt();
            return s;
        }
        if (is_text("@")) {
            auto s = make_stmt(Stmt::Kind::Event);
            advance();
            parse_sensitivity(*s);
            s->body = accept(";") ? nullptr : parse_stmt();
            return s;
        }
        if (is_kw("fork")) fail("fork/join is not supported");
        if (is_kw("force") || is_kw("release") || is_kw("deassign"))
            fail("'" + peek().text + "' is not supported");
        if (is_kw("assign")) {
            // procedural continuous assign
            fail("procedural 'assign' is not supported");
        }

        // system task, task call, or assignment
        if (peek().kind == TokKind::Identifier && peek().text[0] == '$') {
            auto s = make_stmt(Stmt::Kind::SysTask);
            s->name = advance().text;
            if (accept("(")) {
                if (!is_text(")")) {
                    s->args.push_back(parse_expr());
                    while (accept(",")) s->args.push_back(parse_expr());
                }
                expect(")");
            }
            expect(";");
            return s;
        }
        if (is_text("{")) return parse_assignment(true);  // concat lvalue
        if (is_ident()) {
            // lookahead: plain identifier followed by '(' or ';' is a task call
            if (is_text("(", 1) || is_text(";", 1)) {
                std::size_t save = pos_;
                std::string name = advance().text;
                if (accept(";")) {
                    auto s = std::make_shared<Stmt>();
                    s->kind = Stmt::Kind::TaskCall;
                    s->line = toks_[save].line;
                    s->name = name;
                    return s;
                }
                if (accept("(")) {
                    auto s = std::make_shared<Stmt>();
                    s->kind = Stmt::Kind::TaskCall;
                    s->line = toks_[save].line;
                    s->name = name;
                    if (!is_text(")")) {
                        s->args.push_back(parse_expr());
                        while (accept(",")) s->args.push_back(parse_expr());
                    }
                    expect(")");
                    expect(";");
                    return s;
                }
                pos_ = save;
            }
            return parse_assignment(true);
        }
        fail("expected statement, found '" + describe() + "'");
    }

    ExprPtr parse_delay_value() {
        if (accept("(")) {
            ExprPtr e = parse_expr();
            expect(")");
            return e;
        }
        if (peek().kind == TokKind::Number) {
            const Token& tok = advance();
            return parse_number(tok);
        }
        if (is_ident()) {
            auto e = make(Expr::Kind::Ident);
            e->text = advance().text;
            return e;
        }
        fail("expected delay value");
    }

    StmtPtr parse_assignment(bool need_semi) {
        auto s = make_stmt(Stmt::Kind::Assign);
        s->lhs = parse_lvalue();
        if (accept("=")) {
            s->kind = Stmt::Kind::Assign;
        } else if (accept("<=")) {
            s->kind = Stmt::Kind::NbAssign;
        } else {
            fail("expected '=' or '<=', found '" + describe() + "'");
        }
        if (accept("#")) s->delay = parse_delay_value();
        s->rhs = parse_expr();
        if (need_semi) expect(";");
        return s;
    }

    StmtPtr parse_block() {
        auto s = make_stmt(Stmt::Kind::Block);
        expect("begin");
        if (accept(":")) s->label = expect_ident();
        while (!is_kw("end")) {
            if (at_end()) fail("unterminated begin/end block");
            // local declarations inside named blocks: tolerated for integers/regs
            if (is_kw("integer") || is_kw("reg")) {
                diag(peek().line, "declarations inside blocks are not supported; move to module scope");
                skip_past_semi();
                continue;
            }
            s->stmts.push_back(parse_stmt());
        }
        expect("end");
        return s;
    }

    void skip_past_semi() {
        while (!at_end() && !is_text(";")) advance();
        accept(";");
    }

    StmtPtr parse_if() {
        auto s = make_stmt(Stmt::Kind::If);
        expect("if");
        expect("(");
        s->cond = parse_expr();
        expect(")");
        s->then_branch = parse_stmt();
        if (is_kw("else")) {
            advance();
            s->else_branch = parse_stmt();
        }
        return s;
    }

    StmtPtr parse_case() {
        auto s = make_stmt(Stmt::Kind::Case);
        if (is_kw("casez")) s->case_variant = 1;
        if (is_kw("casex")) s->case_variant = 2;
        advance();
        expect("(");
        s->subject = parse_expr();
        expect(")");
        while (!is_kw("endcase")) {
            if (at_end()) fail("unterminated case");
            CaseItem item;
            if (is_kw("default")) {
                advance();
                item.is_default = true;
                accept(":");
            } else {
                item.labels.push_back(parse_expr());
                while (accept(",")) item.labels.push_back(parse_expr());
                expect(":");
            }
            item.body = parse_stmt();
            s->items.push_back(std::move(item));
        }
        expect("endcase");
        return s;
    }

    StmtPtr parse_for() {
        auto s = make_stmt(Stmt::Kind::For);
        expect("for");
        expect("(");
        s->init = parse_assignment(false);
        expect(";");
        s->cond = parse_expr();
        expect(";");
        s->step = parse_assignment(false);
        expect(")");
        s->body = parse_stmt();
        return s;
    }

    void parse_sensitivity(Stmt& s) {
        if (accept("*")) {
            s.sens_star = true;
            return;
        }
        expect("(");
        if (accept("*")) {
            s.sens_star = true;
            expect(")");
            return;
        }
        while (true) {
            SensTerm term;
            if (is_kw("posedge")) {
                advance();
                term.edge = SensTerm::Edge::Pos;
            } else if (is_kw("negedge")) {
                advance();
                term.edge = SensTerm::Edge::Neg;
            }
            term.expr = parse_expr();
            s.sens.push_back(std::move(term));
            if (is_kw("or")) {
                advance();
                continue;
            }
            if (accept(",")) continue;
            break;
        }
        expect(")");
    }

    // ---- declarations ----

    std::optional<Range> parse_opt_range() {
        if (!is_text("[")) return std::nullopt;
        advance();
        Range r;
        r.msb = parse_expr();
        expect(":");
        r.lsb = parse_expr();
        expect("]");
        return r;
    }

    NetDecl parse_net_decl() {
        NetDecl decl;
        decl.line = peek().line;
        const std::string& kw = peek().text;
        if (kw == "reg") decl.net = NetDecl::Net::Reg;
        else if (kw == "integer") decl.net = NetDecl::Net::Integer;
        else if (kw == "time") decl.net = NetDecl::Net::Time;
        else if (kw == "genvar") decl.net = NetDecl::Net::Genvar;
        else if (kw == "supply0") decl.net = NetDecl::Net::Supply0;
        else if (kw == "supply1") decl.net = NetDecl::Net::Supply1;
        else decl.net = NetDecl::Net::Wire;  // wire tri tri0 tri1 wand wor uwire
        advance();
        if (is_kw("signed")) {
            advance();
            decl.is_signed = true;
        }
        if (decl.net == NetDecl::Net::Integer || decl.net == NetDecl::Net::Time)
            decl.is_signed = decl.net == NetDecl::Net::Integer;
        decl.range = parse_opt_range();
        while (true) {
            NetDecl::Item item;
            item.name = expect_ident();
            item.array = parse_opt_range();
            if (accept("=")) item.init = parse_expr();
            decl.items.push_back(std::move(item));
            if (!accept(",")) break;
        }
        expect(";");
        return decl;
    }

    ParamDecl parse_param_decl() {
        ParamDecl decl;
        decl.line = peek().line;
        decl.local = is_kw("localparam");
        advance();
        if (is_kw("signed")) {
            advance();
            decl.is_signed = true;
        }
        if (is_kw("integer")) advance();
        decl.range = parse_opt_range();
        while (true) {
            std::string name = expect_ident();
            expect("=");
            decl.items.emplace_back(name, parse_expr());
            if (!accept(",")) break;
        }
        expect(";");
        return decl;
    }

    PortDecl parse_port_decl_header() {
        PortDecl decl;
        decl.line = peek().line;
        if (is_kw("input")) decl.dir = PortDecl::Dir::Input;
        else if (is_kw("output")) decl.dir = PortDecl::Dir::Output;
        else decl.dir = PortDecl::Dir::Inout;
        advance();
        if (is_kw("wire") || is_kw("tri")) advance();
        if (is_kw("reg")) {
            advance();
            decl.is_reg = true;
        }
        if (is_kw("integer")) {
            advance();
            decl.is_reg = true;
            decl.is_signed = true;
        }
        if (is_kw("signed")) {
            advance();
            decl.is_signed = true;
        }
        decl.range = parse_opt_range();
        decl.names.push_back(expect_ident());
        return decl;
    }

    Module parse_module() {
        Module mod;
        mod.line = peek().line;
        advance();  // module
        mod.name = expect_ident();

        if (accept("#")) {
            expect("(");
            while (!is_text(")")) {
                ParamDecl decl;
                decl.line = peek().line;
                if (is_kw("parameter") || is_kw("localparam")) {
                    decl.local = is_kw("localparam");
                    advance();
                }
                if (is_kw("signed")) {
                    advance();
                    decl.is_signed = true;
                }
                if (is_kw("integer")) advance();
                decl.range = parse_opt_range();
                std::string name = expect_ident();
                expect("=");
                decl.items.emplace_back(name, parse_expr());
                mod.items.push_back(std::move(decl));
                if (!accept(",")) break;
            }
            expect(")");
        }

        if (accept("(")) {
            if (!is_text(")")) {
                if (is_kw("input") || is_kw("output") || is_kw("inout")) {
                    // ANSI port list
                    PortDecl current = parse_port_decl_header();
                    while (accept(",")) {
                        if (is_kw("input") || is_kw("output") || is_kw("inout")) {
                            mod.header_ports.insert(mod.header_ports.end(), current.names.begin(),
                                                    current.names.end());
                            mod.items.push_back(current);
                            current = parse_port_decl_header();
                        } else {
                            current.names.push_back(expect_ident());
                        }
                    }
                    mod.header_ports.insert(mod.header_ports.end(), current.names.begin(),
                                            current.names.end());
                    mod.items.push_back(current);
                } else {
                    // non-ANSI port name list
                    mod.header_ports.push_back(expect_ident());
                    while (accept(",")) mod.header_ports.push_back(expect_ident());
                }
            }
            expect(")");
        }
        expect(";");

        while (!is_kw("endmodule")) {
            if (at_end()) fail("missing 'endmodule'");
            parse_module_item(mod);
        }
        expect("endmodule");
        return mod;
    }

    void parse_module_item(Module& mod) {
        if (accept(";")) return;
        const Token& tok = peek();
        if (is_kw("input") || is_kw("output") || is_kw("inout")) {
            PortDecl decl = parse_port_decl_header();
            while (accept(",")) decl.names.push_back(expect_ident());
            expect(";");
            mod.items.push_back(std::move(decl));
            return;
        }
        if (is_kw("wire") || is_kw("reg") || is_kw("integer") || is_kw("time") ||
            is_kw("genvar") || is_kw("supply0") || is_kw("supply1") || is_kw("tri") ||
            is_kw("tri0") || is_kw("tri1") || is_kw("wand") || is_kw("wor") || is_kw("uwire")) {
            mod.items.push_back(parse_net_decl());
            return;
        }
        if (is_kw("real") || is_kw("realtime")) fail("real variables are not supported");
        if (is_kw("parameter") || is_kw("localparam")) {
            mod.items.push_back(parse_param_decl());
            return;
        }
        if (is_kw("assign")) {
            advance();
            ExprPtr delay;
            if (accept("#")) delay = parse_delay_value();
            while (true) {
                ContAssign ca;
                ca.line = tok.line;
                ca.delay = delay;
                ca.lhs = parse_lvalue();
                expect("=");
                ca.rhs = parse_expr();
                mod.items.push_back(std::move(ca));
                if (!accept(",")) break;
            }
            expect(";");
            return;
        }
        if (is_kw("always")) {
            ProcBlock block;
            block.line = tok.line;
            block.is_initial = false;
            advance();
            block.body = parse_stmt();
            mod.items.push_back(std::move(block));
            return;
        }
        if (is_kw("initial")) {
            ProcBlock block;
            block.line = tok.line;
            block.is_initial = true;
            advance();
            block.body = parse_stmt();
            mod.items.push_back(std::move(block));
            return;
        }
        if (is_kw("function")) {
            mod.items.push_back(parse_function());
            return;
        }
        if (is_kw("task")) {
            mod.items.push_back(parse_task());
            return;
        }
        if (is_kw("and") || is_kw("or") || is_kw("nand") || is_kw("nor") || is_kw("xor") ||
            is_kw("xnor") || is_kw("not") || is_kw("buf")) {
            std::string gate = advance().text;
            while (true) {
                GateInst inst;
                inst.line = tok.line;
                inst.gate = gate;
                if (is_ident()) inst.name = advance().text;
                expect("(");
                inst.conns.push_back(parse_expr());
                while (accept(",")) inst.conns.push_back(parse_expr());
                expect(")");
                mod.items.push_back(std::move(inst));
                if (!accept(",")) break;
            }
            expect(";");
            return;
        }
        if (is_kw("specify")) {
            skip_until_kw("endspecify");
            return;
        }
        if (is_kw("generate")) fail("generate blocks are not supported");
        if (is_kw("defparam")) fail("defparam is not supported");
        if (is_kw("event")) fail("named events are not supported");
        if (tok.kind == TokKind::Identifier) {
            mod.items.push_back(parse_instance());
            return;
        }
        fail("unexpected '" + describe() + "' in module body");
    }

    ModuleInst parse_instance() {
        ModuleInst inst;
        inst.line = peek().line;
        inst.module_name = expect_ident();
        if (accept("#")) {
            expect("(");
            if (!is_text(")")) parse_conn_list(inst.params);
            expect(")");
        }
        while (true) {
            ModuleInst::One one;
            one.inst_name = expect_ident();
            if (is_text("[")) {
                // instance arrays are not supported
                fail("instance arrays are not supported");
            }
            expect("(");
            if (!is_text(")")) parse_conn_list(one.conns);
            expect(")");
            inst.insts.push_back(std::move(one));
            if (!accept(",")) break;
        }
        expect(";");
        return inst;
    }

    void parse_conn_list(std::vector<std::pair<std::string, ExprPtr>>& conns) {
        bool named = is_text(".");
        while (true) {
            if (named) {
                expect(".");
                std::string name = expect_ident();
                expect("(");
                ExprPtr e;
                if (!is_text(")")) e = parse_expr();
                expect(")");
                conns.emplace_back(name, e);
            } else {
                if (is_text(",") || is_text(")")) {
                    conns.emplace_back("", nullptr);  // skipped positional connection
                } else {
                    conns.emplace_back("", parse_expr());
                }
            }
            if (!accept(",")) break;
        }
    }

    FunctionDecl parse_function() {
        FunctionDecl fn;
        fn.line = peek().line;
        expect("function");
        if (is_kw("automatic")) advance();
        if (is_kw("integer")) {
            advance();
            fn.is_integer = true;
            fn.is_signed = true;
        }
        if (is_kw("signed")) {
            advance();
            fn.is_signed = true;
        }
        fn.range = parse_opt_range();
        fn.name = expect_ident();
        parse_task_fn_tail(fn.args, fn.locals, "endfunction", fn.body);
        return fn;
    }

    TaskDecl parse_task() {
        TaskDecl task;
        task.line = peek().line;
        expect("task");
        if (is_kw("automatic")) advance();
        task.name = expect_ident();
        parse_task_fn_tail(task.args, task.locals, "endtask", task.body);
        return task;
    }

    void parse_task_fn_tail(std::vector<PortDecl>& args, std::vector<NetDecl>& locals,
                            std::string_view end_kw, StmtPtr& body) {
        if (accept("(")) {
            if (!is_text(")")) {
                PortDecl current = parse_port_decl_header();
                while (accept(",")) {
                    if (is_kw("input") || is_kw("output") || is_kw("inout")) {
                        args.push_back(current);
                        current = parse_port_decl_header();
                    } else {
                        current.names.push_back(expect_ident());
                    }
                }
                args.push_back(current);
            }
            expect(")");
        }
        expect(";");
        while (is_kw("input") || is_kw("output") || is_kw("inout") || is_kw("reg") ||
               is_kw("integer") || is_kw("time")) {
            if (is_kw("input") || is_kw("output") || is_kw("inout")) {
                PortDecl decl = parse_port_decl_header();
                while (accept(",")) decl.names.push_back(expect_ident());
                expect(";");
                args.push_back(std::move(decl));
            } else {
                locals.push_back(parse_net_decl());
            }
        }
        body = parse_stmt();
        while (!is_kw(end_kw)) {
            if (at_end()) fail(std::string("missing '") + std::string(end_kw) + "'");
            // multiple statements without begin/end are illegal; be strict
            fail("expected '" + std::string(end_kw) + "', found '" + describe() + "'");
        }
        advance();
    }
};

}  // namespace

ParseResult parse_source(std::string_view source, const std::string& filename,
                         const std::vector<std::filesystem::path>& include_dirs) {
    PreprocResult pp = preprocess(source, filename, include_dirs);
    Parser parser(lex(pp.text), filename);
    ParseResult result = parser.run();
    // preprocessor diagnostics come first
    result.diags.insert(result.diags.begin(), pp.diags.begin(), pp.diags.end());
    return result;
}

std::vector<Diagnostic> check_source(std::string_view source, const std::string& filename) {
    return parse_source(source, filename).diags;
}

std::string format_diags(const std::vector<Diagnostic>& diags) {
    std::ostringstream out;
    for (const auto& d : diags) {
        out << d.file << ":" << d.line << ": " << d.message << "\n";
    }
    return out.str();
}

}  // namespace rtlforge::vlog
