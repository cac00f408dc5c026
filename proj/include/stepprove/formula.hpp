#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stepprove {

// Propositional formula over ->, /\, \/, ⊤, ⊥ and named atoms.
// Immutable; copies share structure.
class Formula {
public:
    enum class Kind { Atom, Implies, And, Or, Top, Bottom };

    static Formula atom(std::string name);
    static Formula implies(Formula lhs, Formula rhs) { return binary(Kind::Implies, std::move(lhs), std::move(rhs)); }
    static Formula conj(Formula lhs, Formula rhs) { return binary(Kind::And, std::move(lhs), std::move(rhs)); }
    static Formula disj(Formula lhs, Formula rhs) { return binary(Kind::Or, std::move(lhs), std::move(rhs)); }
    static Formula top();
    static Formula bottom();

    Kind kind() const;
    bool is(Kind k) const { return kind() == k; }
    const std::string& atom_name() const;  // Atom only
    Formula lhs() const;                   // connectives only
    Formula rhs() const;

    bool operator==(const Formula& other) const;
    bool operator!=(const Formula& other) const { return !(*this == other); }

    std::string to_string() const;

private:
    struct Node;
    static Formula binary(Kind k, Formula lhs, Formula rhs);
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct ParseError : std::runtime_error {
    ParseError(std::string msg, std::size_t pos)
        : std::runtime_error(std::move(msg)), position(pos) {}
    std::size_t position;  // byte offset into the input
};

// Grammar: F ::= ident | "⊤" | "⊥" | F "->" F | F "/\" F | F "\/" F | "(" F ")"
// Precedence /\ > \/ > ->, all right-associative. Throws ParseError.
Formula parse_formula(std::string_view text);

}  // namespace stepprove
