#include "jade/xml.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

namespace jade::xml {

const std::string* Node::attr(const std::string& key) const {
    for (const auto& [k, v] : attrs)
        if (k == key) return &v;
    return nullptr;
}

std::vector<const Node*> Node::children_named(const std::string& n) const {
    std::vector<const Node*> out;
    for (const auto& c : children)
        if (c.name == n) out.push_back(&c);
    return out;
}

const Node* Node::first_child(const std::string& n) const {
    for (const auto& c : children)
        if (c.name == n) return &c;
    return nullptr;
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    ParseResult run() {
        ParseResult result;
        skip_misc();
        if (eof()) {
            error("empty-document", "no root element");
            result.diags = diags_;
            return result;
        }
        Node root;
        if (parse_element(root)) {
            skip_misc();
            if (!eof()) error("trailing-content", "content after root element");
            result.root = std::move(root);
        }
        result.diags = diags_;
        return result;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Diagnostics diags_;

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    bool starts_with(const char* s) const { return text_.compare(pos_, std::strlen(s), s) == 0; }

    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void advance_n(std::size_t n) {
        for (std::size_t i = 0; i < n && !eof(); ++i) advance();
    }

    void error(const std::string& code, const std::string& msg) {
        diags_.push_back({Severity::Error, code, msg, line_, col_});
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    // Whitespace, comments, processing instructions / XML declaration.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                advance_n(4);
                while (!eof() && !starts_with("-->")) advance();
                if (eof()) {
                    error("unterminated-comment", "comment not closed");
                    return;
                }
                advance_n(3);
            } else if (starts_with("<?")) {
                advance_n(2);
                while (!eof() && !starts_with("?>")) advance();
                if (eof()) {
                    error("unterminated-pi", "processing instruction not closed");
                    return;
                }
                advance_n(2);
            } else {
                return;
            }
        }
    }

    static bool is_name_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
    }
    static bool is_name_char(char c) {
        return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
    }

    std::string parse_name() {
        std::string out;
        if (eof() || !is_name_start(peek())) {
            error("expected-name", "expected a name");
            return out;
        }
        while (!eof() && is_name_char(peek())) out += advance();
        return out;
    }

    bool decode_entity(std::string& out) {
        // positioned on '&'
        advance();
        std::string ent;
        while (!eof() && peek() != ';' && ent.size() < 12) ent += advance();
        if (eof() || peek() != ';') {
            error("bad-entity", "unterminated entity reference");
            return false;
        }
        advance();
        if (ent == "amp") out += '&';
        else if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "quot") out += '"';
        else if (ent == "apos") out += '\'';
        else if (!ent.empty() && ent[0] == '#') {
            long code = std::strtol(ent.c_str() + (ent[1] == 'x' ? 2 : 1), nullptr,
                                    ent[1] == 'x' ? 16 : 10);
            if (code > 0 && code < 128) out += static_cast<char>(code);
            else {
                error("bad-entity", "unsupported character reference &" + ent + ";");
                return false;
            }
        } else {
            error("bad-entity", "unknown entity &" + ent + ";");
            return false;
        }
        return true;
    }

    bool parse_attr_value(std::string& out) {
        if (eof() || (peek() != '"' && peek() != '\'')) {
            error("expected-quote", "attribute value must be quoted");
            return false;
        }
        char quote = advance();
        while (!eof() && peek() != quote) {
            if (peek() == '&') {
                if (!decode_entity(out)) return false;
            } else if (peek() == '<') {
                error("bad-attr", "'<' in attribute value");
                return false;
            } else {
                out += advance();
            }
        }
        if (eof()) {
            error("unterminated-attr", "attribute value not closed");
            return false;
        }
        advance();
        return true;
    }

    bool parse_element(Node& node) {
        if (eof() || peek() != '<') {
            error("expected-element", "expected '<'");
            return false;
        }
        node.line = line_;
        node.col = col_;
        advance();
        node.name = parse_name();
        if (node.name.empty()) return false;

        for (;;) {
            skip_ws();
            if (eof()) {
                error("unterminated-tag", "tag not closed");
                return false;
            }
            if (peek() == '>') {
                advance();
                break;
            }
            if (starts_with("/>")) {
                advance_n(2);
                return true;
            }
            std::string key = parse_name();
            if (key.empty()) return false;
            skip_ws();
            if (eof() || peek() != '=') {
                error("expected-equals", "expected '=' after attribute name");
                return false;
            }
            advance();
            skip_ws();
            std::string value;
            if (!parse_attr_value(value)) return false;
            for (const auto& [k, v] : node.attrs) {
                (void)v;
                if (k == key) error("duplicate-attribute", "attribute '" + key + "' repeated");
            }
            node.attrs.emplace_back(std::move(key), std::move(value));
        }

        // content
        for (;;) {
            if (eof()) {
                error("unterminated-element", "missing </" + node.name + ">");
                return false;
            }
            if (starts_with("<!--")) {
                skip_misc();
                continue;
            }
            if (starts_with("</")) {
                advance_n(2);
                std::string close = parse_name();
                if (close != node.name)
                    error("mismatched-tag",
                          "expected </" + node.name + ">, found </" + close + ">");
                skip_ws();
                if (!eof() && peek() == '>') advance();
                else error("unterminated-tag", "closing tag not terminated");
                return true;
            }
            if (peek() == '<') {
                Node child;
                if (!parse_element(child)) return false;
                node.children.push_back(std::move(child));
                continue;
            }
            if (peek() == '&') {
                if (!decode_entity(node.text)) return false;
                continue;
            }
            node.text += advance();
        }
    }
};

}  // namespace

ParseResult parse(const std::string& text) { return Parser(text).run(); }

ParseResult parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult r;
        r.diags.push_back({Severity::Error, "io-error", "cannot open " + path, 0, 0});
        return r;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace jade::xml
