#include "stepprove/formula.hpp"

#include <cctype>
#include <utility>

namespace stepprove {

struct Formula::Node {
    Kind kind;
    std::string atom;                  // Atom only
    std::shared_ptr<const Node> l, r;  // connectives only
};

Formula Formula::atom(std::string name) {
    if (name.empty()) throw std::invalid_argument("atom name must be non-empty");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Atom;
    n->atom = std::move(name);
    return Formula(std::move(n));
}

Formula Formula::binary(Kind k, Formula lhs, Formula rhs) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->l = std::move(lhs.node_);
    n->r = std::move(rhs.node_);
    return Formula(std::move(n));
}

Formula Formula::top() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Top;
    return Formula(std::move(n));
}

Formula Formula::bottom() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Bottom;
    return Formula(std::move(n));
}

Formula::Kind Formula::kind() const { return node_->kind; }

const std::string& Formula::atom_name() const {
    if (node_->kind != Kind::Atom) throw std::logic_error("atom_name on non-atom");
    return node_->atom;
}

Formula Formula::lhs() const {
    if (!node_->l) throw std::logic_error("lhs on leaf formula");
    return Formula(node_->l);
}

Formula Formula::rhs() const {
    if (!node_->r) throw std::logic_error("rhs on leaf formula");
    return Formula(node_->r);
}

bool Formula::operator==(const Formula& other) const {
    const Node* a = node_.get();
    const Node* b = other.node_.get();
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Kind::Atom: return a->atom == b->atom;
        case Kind::Top:
        case Kind::Bottom: return true;
        default:
            return Formula(a->l) == Formula(b->l) && Formula(a->r) == Formula(b->r);
    }
}

// ---------- printing ----------

namespace {

// precedence levels: -> is 1, \/ is 2, /\ is 3, leaves are 4
int precedence(Formula::Kind k) {
    switch (k) {
        case Formula::Kind::Implies: return 1;
        case Formula::Kind::Or: return 2;
        case Formula::Kind::And: return 3;
        default: return 4;
    }
}

const char* op_text(Formula::Kind k) {
    switch (k) {
        case Formula::Kind::Implies: return " -> ";
        case Formula::Kind::Or: return " \\/ ";
        case Formula::Kind::And: return " /\\ ";
        default: return "";
    }
}

void print_rec(const Formula& f, int min_prec, std::string& out) {
    switch (f.kind()) {
        case Formula::Kind::Atom: out += f.atom_name(); return;
        case Formula::Kind::Top: out += "⊤"; return;
        case Formula::Kind::Bottom: out += "⊥"; return;
        default: break;
    }
    int p = precedence(f.kind());
    bool parens = p < min_prec;
    if (parens) out += '(';
    // right-associative: the left operand needs strictly higher precedence
    print_rec(f.lhs(), p + 1, out);
    out += op_text(f.kind());
    print_rec(f.rhs(), p, out);
    if (parens) out += ')';
}

}  // namespace

std::string Formula::to_string() const {
    std::string out;
    print_rec(*this, 0, out);
    return out;
}

// ---------- parsing ----------

namespace {

struct Token {
    enum class Type { Ident, Top, Bottom, Arrow, AndOp, OrOp, LParen, RParen, End };
    Type type;
    std::string text;
    std::size_t pos;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::size_t start = pos_;
        if (pos_ >= text_.size()) return {Token::Type::End, "", start};
        char c = text_[pos_];
        if (c == '(') { ++pos_; return {Token::Type::LParen, "(", start}; }
        if (c == ')') { ++pos_; return {Token::Type::RParen, ")", start}; }
        if (c == '-') {
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                pos_ += 2;
                return {Token::Type::Arrow, "->", start};
            }
            throw ParseError("expected '->'", start);
        }
        if (c == '/') {
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\\') {
                pos_ += 2;
                return {Token::Type::AndOp, "/\\", start};
            }
            throw ParseError("expected '/\\'", start);
        }
        if (c == '\\') {
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                pos_ += 2;
                return {Token::Type::OrOp, "\\/", start};
            }
            throw ParseError("expected '\\/'", start);
        }
        // UTF-8: ⊤ = e2 8a a4, ⊥ = e2 8a a5
        if (static_cast<unsigned char>(c) == 0xe2 && pos_ + 2 < text_.size() &&
            static_cast<unsigned char>(text_[pos_ + 1]) == 0x8a) {
            unsigned char third = static_cast<unsigned char>(text_[pos_ + 2]);
            if (third == 0xa4) { pos_ += 3; return {Token::Type::Top, "⊤", start}; }
            if (third == 0xa5) { pos_ += 3; return {Token::Type::Bottom, "⊥", start}; }
        }
        if (is_ident_start(c)) {
            std::size_t end = pos_;
            while (end < text_.size() && is_ident_char(text_[end])) ++end;
            std::string ident(text_.substr(pos_, end - pos_));
            pos_ = end;
            return {Token::Type::Ident, std::move(ident), start};
        }
        throw ParseError("unexpected character", start);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { advance(); }

    Formula parse() {
        Formula f = parse_implies();
        if (tok_.type != Token::Type::End)
            throw ParseError("trailing input after formula", tok_.pos);
        return f;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    Formula parse_implies() {
        Formula lhs = parse_or();
        if (tok_.type == Token::Type::Arrow) {
            advance();
            return Formula::implies(std::move(lhs), parse_implies());
        }
        return lhs;
    }

    Formula parse_or() {
        Formula lhs = parse_and();
        if (tok_.type == Token::Type::OrOp) {
            advance();
            return Formula::disj(std::move(lhs), parse_or());
        }
        return lhs;
    }

    Formula parse_and() {
        Formula lhs = parse_primary();
        if (tok_.type == Token::Type::AndOp) {
            advance();
            return Formula::conj(std::move(lhs), parse_and());
        }
        return lhs;
    }

    Formula parse_primary() {
        switch (tok_.type) {
            case Token::Type::Ident: {
                Formula f = Formula::atom(tok_.text);
                advance();
                return f;
            }
            case Token::Type::Top: advance(); return Formula::top();
            case Token::Type::Bottom: advance(); return Formula::bottom();
            case Token::Type::LParen: {
                advance();
                Formula f = parse_implies();
                if (tok_.type != Token::Type::RParen)
                    throw ParseError("expected ')'", tok_.pos);
                advance();
                return f;
            }
            case Token::Type::End: throw ParseError("unexpected end of input", tok_.pos);
            default: throw ParseError("expected a formula", tok_.pos);
        }
    }

    Lexer lexer_;
    Token tok_{Token::Type::End, "", 0};
};

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

}  // namespace stepprove
