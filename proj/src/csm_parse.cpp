#include <cctype>
#include <charconv>
#include <cstdlib>

#include "jade/csm.hpp"

namespace jade {

namespace {

enum class Tok {
    End, Ident, Number,
    LBrace, RBrace, LParen, RParen, Semi, Comma, Arrow,
    Lt, Le, Gt, Ge, EqEq, Ne, AndAnd, OrOr, Not,
    Plus, Minus, Star, Slash,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0;
    int line = 1, col = 1;
};

class Lexer {
public:
    Lexer(const std::string& text, Diagnostics& diags) : text_(text), diags_(diags) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        skip_ws();
        tok_ = Token{};
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= text_.size()) {
            tok_.kind = Tok::End;
            return;
        }
        char c = text_[pos_];
        if (std::isalpha((unsigned char)c) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum((unsigned char)text_[pos_]) || text_[pos_] == '_'))
                bump();
            tok_.kind = Tok::Ident;
            tok_.text = text_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit((unsigned char)c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) bump();
            if (pos_ < text_.size() && text_[pos_] == '.') {
                bump();
                while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) bump();
            }
            if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                bump();
                if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) bump();
                while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) bump();
            }
            tok_.kind = Tok::Number;
            tok_.text = text_.substr(start, pos_ - start);
            tok_.number = std::strtod(tok_.text.c_str(), nullptr);
            return;
        }
        auto two = [&](char second, Tok yes, Tok no) {
            bump();
            if (pos_ < text_.size() && text_[pos_] == second) {
                bump();
                tok_.kind = yes;
            } else {
                tok_.kind = no;
            }
        };
        switch (c) {
            case '{': bump(); tok_.kind = Tok::LBrace; return;
            case '}': bump(); tok_.kind = Tok::RBrace; return;
            case '(': bump(); tok_.kind = Tok::LParen; return;
            case ')': bump(); tok_.kind = Tok::RParen; return;
            case ';': bump(); tok_.kind = Tok::Semi; return;
            case ',': bump(); tok_.kind = Tok::Comma; return;
            case '<': two('=', Tok::Le, Tok::Lt); return;
            case '>': two('=', Tok::Ge, Tok::Gt); return;
            case '=': two('=', Tok::EqEq, Tok::End);
                if (tok_.kind == Tok::End) error("expected '==' ", tok_.line, tok_.col);
                return;
            case '!': two('=', Tok::Ne, Tok::Not); return;
            case '&': two('&', Tok::AndAnd, Tok::End);
                if (tok_.kind == Tok::End) error("expected '&&'", tok_.line, tok_.col);
                return;
            case '|': two('|', Tok::OrOr, Tok::End);
                if (tok_.kind == Tok::End) error("expected '||'", tok_.line, tok_.col);
                return;
            case '+': bump(); tok_.kind = Tok::Plus; return;
            case '*': bump(); tok_.kind = Tok::Star; return;
            case '/': bump(); tok_.kind = Tok::Slash; return;
            case '-':
                bump();
                if (pos_ < text_.size() && text_[pos_] == '>') {
                    bump();
                    tok_.kind = Tok::Arrow;
                } else {
                    tok_.kind = Tok::Minus;
                }
                return;
            default:
                error(std::string("unexpected character '") + c + "'", line_, col_);
                bump();
                tok_.kind = Tok::End;
                return;
        }
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') bump();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void error(const std::string& msg, int line, int col) {
        diags_.push_back({Severity::Error, "parse-error", msg, line, col});
    }

    const std::string& text_;
    Diagnostics& diags_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

class Parser {
public:
    Parser(const std::string& text, Diagnostics& diags) : lex_(text, diags), diags_(diags) {}

    std::vector<CsmMachine> parse_document() {
        std::vector<CsmMachine> machines;
        while (lex_.peek().kind != Tok::End && !failed_) {
            if (!expect_keyword("machine")) break;
            CsmMachine m = parse_machine();
            if (failed_) break;
            for (const auto& prev : machines)
                if (prev.name == m.name)
                    diags_.push_back({Severity::Error, "duplicate-machine",
                                      "machine '" + m.name + "' already defined", m_line_, m_col_});
            machines.push_back(std::move(m));
        }
        return machines;
    }

    bool failed() const { return failed_; }

private:
    CsmMachine parse_machine() {
        CsmMachine m;
        Token name = expect(Tok::Ident, "machine name");
        m_line_ = name.line;
        m_col_ = name.col;
        m.name = name.text;
        expect(Tok::LBrace, "'{'");
        bool saw_initial = false;
        if (peek_keyword("initial")) {
            lex_.take();
            Token init = expect(Tok::Ident, "initial state name");
            m.initial = init.text;
            expect(Tok::Semi, "';'");
            saw_initial = true;
        }
        while (peek_keyword("state") && !failed_) parse_state(m);
        expect(Tok::RBrace, "'}'");
        if (failed_) return m;

        if (!saw_initial)
            diags_.push_back({Severity::Error, "missing-initial",
                              "machine '" + m.name + "' declares no initial state", m_line_,
                              m_col_});
        for (std::size_t i = 0; i < m.states.size(); ++i)
            for (std::size_t j = i + 1; j < m.states.size(); ++j)
                if (m.states[i] == m.states[j])
                    diags_.push_back({Severity::Error, "duplicate-state",
                                      "state '" + m.states[i] + "' declared twice in machine '" +
                                          m.name + "'",
                                      m.state_locs[j].first, m.state_locs[j].second});
        auto declared = [&](const std::string& s) {
            for (const auto& st : m.states)
                if (st == s) return true;
            return false;
        };
        if (saw_initial && !declared(m.initial))
            diags_.push_back({Severity::Error, "unknown-state",
                              "initial state '" + m.initial + "' is not declared", m_line_,
                              m_col_});
        for (const auto& t : m.transitions)
            if (!declared(t.target))
                diags_.push_back({Severity::Error, "unknown-state",
                                  "transition targets undeclared state '" + t.target + "'",
                                  t.line, t.col});
        m.reset();
        return m;
    }

    void parse_state(CsmMachine& m) {
        lex_.take();  // 'state'
        Token name = expect(Tok::Ident, "state name");
        m.states.push_back(name.text);
        m.state_locs.emplace_back(name.line, name.col);
        expect(Tok::LBrace, "'{'");
        while (peek_keyword("on") && !failed_) parse_transition(m, name.text);
        expect(Tok::RBrace, "'}'");
    }

    void parse_transition(CsmMachine& m, const std::string& source) {
        Token on = lex_.take();
        Transition t;
        t.source = source;
        t.line = on.line;
        t.col = on.col;
        t.trigger = expect(Tok::Ident, "event name").text;
        if (peek_keyword("if")) {
            lex_.take();
            t.guard = parse_expr();
        }
        expect(Tok::Arrow, "'->'");
        t.target = expect(Tok::Ident, "target state").text;
        if (peek_keyword("do")) {
            lex_.take();
            t.actions.push_back(parse_action());
            while (lex_.peek().kind == Tok::Comma && !failed_) {
                lex_.take();
                t.actions.push_back(parse_action());
            }
        }
        expect(Tok::Semi, "';'");
        if (!failed_) m.transitions.push_back(std::move(t));
    }

    ActionDecl parse_action() {
        ActionDecl a;
        Token name = expect(Tok::Ident, "action");
        if (name.text == "pick") {
            a.kind = ActionKind::Pick;
            return a;
        }
        if (name.text == "drop") {
            a.kind = ActionKind::Drop;
            return a;
        }
        if (name.text == "set_wheels") {
            a.kind = ActionKind::SetWheels;
            expect(Tok::LParen, "'('");
            a.args.push_back(parse_expr());
            expect(Tok::Comma, "','");
            a.args.push_back(parse_expr());
            expect(Tok::RParen, "')'");
            return a;
        }
        if (name.text == "assign" || name.text == "send") {
            a.kind = name.text == "assign" ? ActionKind::Assign : ActionKind::Send;
            expect(Tok::LParen, "'('");
            a.target = expect(Tok::Ident, "name").text;
            expect(Tok::Comma, "','");
            a.args.push_back(parse_expr());
            expect(Tok::RParen, "')'");
            return a;
        }
        if (name.text == "emit") {
            a.kind = ActionKind::Emit;
            expect(Tok::LParen, "'('");
            a.target = expect(Tok::Ident, "event name").text;
            expect(Tok::RParen, "')'");
            return a;
        }
        fail("unknown action '" + name.text + "'", name.line, name.col);
        return a;
    }

    // Expression precedence, loosest first: || , && , == != , < <= > >= , + - , * / , unary.
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr left = parse_and();
        while (lex_.peek().kind == Tok::OrOr && !failed_) {
            Token op = lex_.take();
            left = binary(Expr::Op::Or, left, parse_and(), op);
        }
        return left;
    }

    ExprPtr parse_and() {
        ExprPtr left = parse_equality();
        while (lex_.peek().kind == Tok::AndAnd && !failed_) {
            Token op = lex_.take();
            left = binary(Expr::Op::And, left, parse_equality(), op);
        }
        return left;
    }

    ExprPtr parse_equality() {
        ExprPtr left = parse_relational();
        while ((lex_.peek().kind == Tok::EqEq || lex_.peek().kind == Tok::Ne) && !failed_) {
            Token op = lex_.take();
            left = binary(op.kind == Tok::EqEq ? Expr::Op::Eq : Expr::Op::Ne, left,
                          parse_relational(), op);
        }
        return left;
    }

    ExprPtr parse_relational() {
        ExprPtr left = parse_additive();
        while (!failed_) {
            Tok k = lex_.peek().kind;
            Expr::Op op;
            if (k == Tok::Lt) op = Expr::Op::Lt;
            else if (k == Tok::Le) op = Expr::Op::Le;
            else if (k == Tok::Gt) op = Expr::Op::Gt;
            else if (k == Tok::Ge) op = Expr::Op::Ge;
            else break;
            Token t = lex_.take();
            left = binary(op, left, parse_additive(), t);
        }
        return left;
    }

    ExprPtr parse_additive() {
        ExprPtr left = parse_multiplicative();
        while ((lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) && !failed_) {
            Token op = lex_.take();
            left = binary(op.kind == Tok::Plus ? Expr::Op::Add : Expr::Op::Sub, left,
                          parse_multiplicative(), op);
        }
        return left;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr left = parse_unary();
        while ((lex_.peek().kind == Tok::Star || lex_.peek().kind == Tok::Slash) && !failed_) {
            Token op = lex_.take();
            left = binary(op.kind == Tok::Star ? Expr::Op::Mul : Expr::Op::Div, left,
                          parse_unary(), op);
        }
        return left;
    }

    ExprPtr parse_unary() {
        if (lex_.peek().kind == Tok::Minus) {
            Token op = lex_.take();
            return unary(Expr::Op::Neg, parse_unary(), op);
        }
        if (lex_.peek().kind == Tok::Not) {
            Token op = lex_.take();
            return unary(Expr::Op::Not, parse_unary(), op);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        Token t = lex_.peek();
        if (t.kind == Tok::Number) {
            lex_.take();
            auto e = std::make_shared<Expr>();
            e->op = Expr::Op::Num;
            e->num = t.number;
            e->line = t.line;
            e->col = t.col;
            return e;
        }
        if (t.kind == Tok::LParen) {
            lex_.take();
            ExprPtr inner = parse_expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (t.kind == Tok::Ident) {
            lex_.take();
            if (t.text == "min" || t.text == "max" || t.text == "abs") {
                auto e = std::make_shared<Expr>();
                e->op = t.text == "min"   ? Expr::Op::Min
                        : t.text == "max" ? Expr::Op::Max
                                          : Expr::Op::Abs;
                e->line = t.line;
                e->col = t.col;
                expect(Tok::LParen, "'('");
                e->a = parse_expr();
                if (e->op != Expr::Op::Abs) {
                    expect(Tok::Comma, "','");
                    e->b = parse_expr();
                }
                expect(Tok::RParen, "')'");
                return e;
            }
            auto e = std::make_shared<Expr>();
            e->line = t.line;
            e->col = t.col;
            if (t.text == "payload") e->op = Expr::Op::Payload;
            else if (t.text == "payload_x") e->op = Expr::Op::PayloadX;
            else if (t.text == "payload_y") e->op = Expr::Op::PayloadY;
            else {
                e->op = Expr::Op::Var;
                e->var = t.text;
            }
            return e;
        }
        fail("expected expression", t.line, t.col);
        auto e = std::make_shared<Expr>();
        return e;
    }

    ExprPtr binary(Expr::Op op, ExprPtr a, ExprPtr b, const Token& at) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->a = std::move(a);
        e->b = std::move(b);
        e->line = at.line;
        e->col = at.col;
        return e;
    }

    ExprPtr unary(Expr::Op op, ExprPtr a, const Token& at) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->a = std::move(a);
        e->line = at.line;
        e->col = at.col;
        return e;
    }

    bool peek_keyword(const char* kw) const {
        return lex_.peek().kind == Tok::Ident && lex_.peek().text == kw;
    }

    bool expect_keyword(const char* kw) {
        if (peek_keyword(kw)) {
            lex_.take();
            return true;
        }
        fail(std::string("expected '") + kw + "'", lex_.peek().line, lex_.peek().col);
        return false;
    }

    Token expect(Tok kind, const char* what) {
        if (lex_.peek().kind == kind) return lex_.take();
        fail(std::string("expected ") + what, lex_.peek().line, lex_.peek().col);
        return Token{};
    }

    void fail(const std::string& msg, int line, int col) {
        if (!failed_)
            diags_.push_back({Severity::Error, "parse-error", msg, line, col});
        failed_ = true;
    }

    Lexer lex_;
    Diagnostics& diags_;
    bool failed_ = false;
    int m_line_ = 0, m_col_ = 0;
};

int precedence(Expr::Op op) {
    switch (op) {
        case Expr::Op::Or: return 1;
        case Expr::Op::And: return 2;
        case Expr::Op::Eq:
        case Expr::Op::Ne: return 3;
        case Expr::Op::Lt:
        case Expr::Op::Le:
        case Expr::Op::Gt:
        case Expr::Op::Ge: return 4;
        case Expr::Op::Add:
        case Expr::Op::Sub: return 5;
        case Expr::Op::Mul:
        case Expr::Op::Div: return 6;
        case Expr::Op::Neg:
        case Expr::Op::Not: return 7;
        default: return 8;
    }
}

std::string format_number(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void print_expr_prec(const Expr& e, int parent, std::string& out) {
    int prec = precedence(e.op);
    bool parens = prec < parent;
    if (parens) out += '(';
    auto bin = [&](const char* op) {
        print_expr_prec(*e.a, prec, out);
        out += ' ';
        out += op;
        out += ' ';
        print_expr_prec(*e.b, prec + 1, out);
    };
    switch (e.op) {
        case Expr::Op::Num: out += format_number(e.num); break;
        case Expr::Op::Var: out += e.var; break;
        case Expr::Op::Payload: out += "payload"; break;
        case Expr::Op::PayloadX: out += "payload_x"; break;
        case Expr::Op::PayloadY: out += "payload_y"; break;
        case Expr::Op::Add: bin("+"); break;
        case Expr::Op::Sub: bin("-"); break;
        case Expr::Op::Mul: bin("*"); break;
        case Expr::Op::Div: bin("/"); break;
        case Expr::Op::Lt: bin("<"); break;
        case Expr::Op::Le: bin("<="); break;
        case Expr::Op::Gt: bin(">"); break;
        case Expr::Op::Ge: bin(">="); break;
        case Expr::Op::Eq: bin("=="); break;
        case Expr::Op::Ne: bin("!="); break;
        case Expr::Op::And: bin("&&"); break;
        case Expr::Op::Or: bin("||"); break;
        case Expr::Op::Neg:
            out += '-';
            print_expr_prec(*e.a, prec, out);
            break;
        case Expr::Op::Not:
            out += '!';
            print_expr_prec(*e.a, prec, out);
            break;
        case Expr::Op::Min:
        case Expr::Op::Max:
            out += e.op == Expr::Op::Min ? "min(" : "max(";
            print_expr_prec(*e.a, 0, out);
            out += ", ";
            print_expr_prec(*e.b, 0, out);
            out += ')';
            break;
        case Expr::Op::Abs:
            out += "abs(";
            print_expr_prec(*e.a, 0, out);
            out += ')';
            break;
    }
    if (parens) out += ')';
}

void print_action(const ActionDecl& a, std::string& out) {
    switch (a.kind) {
        case ActionKind::SetWheels:
            out += "set_wheels(";
            print_expr_prec(*a.args[0], 0, out);
            out += ", ";
            print_expr_prec(*a.args[1], 0, out);
            out += ')';
            break;
        case ActionKind::Assign:
            out += "assign(" + a.target + ", ";
            print_expr_prec(*a.args[0], 0, out);
            out += ')';
            break;
        case ActionKind::Emit: out += "emit(" + a.target + ")"; break;
        case ActionKind::Send:
            out += "send(" + a.target + ", ";
            print_expr_prec(*a.args[0], 0, out);
            out += ')';
            break;
        case ActionKind::Pick: out += "pick"; break;
        case ActionKind::Drop: out += "drop"; break;
    }
}

}  // namespace

CsmParseResult parse_csm(const std::string& text) {
    CsmParseResult result;
    Parser parser(text, result.diags);
    auto machines = parser.parse_document();
    if (!has_errors(result.diags)) result.machines = std::move(machines);
    return result;
}

std::string print_expr(const Expr& e) {
    std::string out;
    print_expr_prec(e, 0, out);
    return out;
}

std::string print_csm(const std::vector<CsmMachine>& machines) {
    std::string out;
    for (std::size_t mi = 0; mi < machines.size(); ++mi) {
        const auto& m = machines[mi];
        if (mi > 0) out += '\n';
        out += "machine " + m.name + " {\n";
        out += "  initial " + m.initial + ";\n";
        for (const auto& state : m.states) {
            out += "  state " + state + " {\n";
            for (const auto& t : m.transitions) {
                if (t.source != state) continue;
                out += "    on " + t.trigger;
                if (t.guard) {
                    out += " if ";
                    print_expr_prec(*t.guard, 0, out);
                }
                out += " -> " + t.target;
                if (!t.actions.empty()) {
                    out += " do ";
                    for (std::size_t i = 0; i < t.actions.size(); ++i) {
                        if (i > 0) out += ", ";
                        print_action(t.actions[i], out);
                    }
                }
                out += ";\n";
            }
            out += "  }\n";
        }
        out += "}\n";
    }
    return out;
}

}  // namespace jade
