#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace austere {

// Reserved prefix for atoms introduced by the translations. User programs
// must not declare atoms starting with this prefix.
inline constexpr const char* kAuxPrefix = "__aux_";

inline bool is_aux_name(const std::string& name) {
    return name.rfind(kAuxPrefix, 0) == 0;
}

/// Propositional formula over a set of atoms.
///
/// Nodes are immutable and shared; copying a Formula is cheap. The only
/// primitive connectives are conjunction, disjunction and implication;
/// negation, truth and equivalence are derived forms and normalize
/// structurally (neg(f) compares equal to implies(f, bottom())).
class Formula {
public:
    enum class Kind { Atom, Bottom, And, Or, Implies };

    Formula() : Formula(bottom()) {}

    static Formula atom(std::string name) {
        return Formula(std::make_shared<const Node>(Kind::Atom, std::move(name), nullptr, nullptr));
    }
    static Formula bottom() {
        return Formula(std::make_shared<const Node>(Kind::Bottom, std::string(), nullptr, nullptr));
    }
    static Formula conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
    static Formula disj(Formula a, Formula b) { return binary(Kind::Or, std::move(a), std::move(b)); }
    static Formula implies(Formula a, Formula b) { return binary(Kind::Implies, std::move(a), std::move(b)); }

    static Formula neg(Formula a) { return implies(std::move(a), bottom()); }
    static Formula top() { return neg(bottom()); }
    static Formula iff(const Formula& a, const Formula& b) {
        return conj(implies(a, b), implies(b, a));
    }

    Kind kind() const { return node_->kind; }
    const std::string& atom_name() const { return node_->name; }
    Formula lhs() const { return Formula(node_->lhs); }
    Formula rhs() const { return Formula(node_->rhs); }

    bool is_negation() const {
        return kind() == Kind::Implies && node_->rhs->kind == Kind::Bottom;
    }

    friend bool operator==(const Formula& a, const Formula& b) {
        return a.node_ == b.node_ || structurally_equal(*a.node_, *b.node_);
    }
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

    // Total order via the canonical serialization; used to keep sets of
    // formulas deterministic.
    friend bool operator<(const Formula& a, const Formula& b) {
        return a.to_string() < b.to_string();
    }

    /// Canonical fully parenthesized serialization. Stable across runs;
    /// feeds the auxiliary-atom naming scheme.
    std::string to_string() const {
        std::string out;
        print(*node_, out);
        return out;
    }

    std::set<std::string> atoms() const {
        std::set<std::string> out;
        collect_atoms(*node_, out);
        return out;
    }

    /// Uniform substitution of all occurrences of `target` by `replacement`.
    Formula substitute(const Formula& target, const Formula& replacement) const {
        if (*this == target) return replacement;
        switch (kind()) {
            case Kind::Atom:
            case Kind::Bottom: return *this;
            default:
                return binary(kind(), lhs().substitute(target, replacement),
                              rhs().substitute(target, replacement));
        }
    }

    std::size_t node_count() const { return count(*node_); }

private:
    struct Node {
        Kind kind;
        std::string name;
        std::shared_ptr<const Node> lhs, rhs;
        Node(Kind k, std::string n, std::shared_ptr<const Node> l, std::shared_ptr<const Node> r)
            : kind(k), name(std::move(n)), lhs(std::move(l)), rhs(std::move(r)) {}
    };

    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Formula binary(Kind k, Formula a, Formula b) {
        return Formula(std::make_shared<const Node>(k, std::string(), a.node_, b.node_));
    }

    static bool structurally_equal(const Node& a, const Node& b) {
        if (a.kind != b.kind) return false;
        switch (a.kind) {
            case Kind::Atom: return a.name == b.name;
            case Kind::Bottom: return true;
            default:
                return (a.lhs == b.lhs || structurally_equal(*a.lhs, *b.lhs)) &&
                       (a.rhs == b.rhs || structurally_equal(*a.rhs, *b.rhs));
        }
    }

    static void collect_atoms(const Node& n, std::set<std::string>& out) {
        switch (n.kind) {
            case Kind::Atom: out.insert(n.name); break;
            case Kind::Bottom: break;
            default:
                collect_atoms(*n.lhs, out);
                collect_atoms(*n.rhs, out);
        }
    }

    static std::size_t count(const Node& n) {
        switch (n.kind) {
            case Kind::Atom:
            case Kind::Bottom: return 1;
            default: return 1 + count(*n.lhs) + count(*n.rhs);
        }
    }

    static void print(const Node& n, std::string& out) {
        switch (n.kind) {
            case Kind::Atom: out += n.name; return;
            case Kind::Bottom: out += "#false"; return;
            case Kind::Implies:
                if (n.rhs->kind == Kind::Bottom) {  // render derived negation
                    out += "not ";
                    print(*n.lhs, out);
                    return;
                }
                break;
            default: break;
        }
        out += '(';
        print(*n.lhs, out);
        switch (n.kind) {
            case Kind::And: out += " & "; break;
            case Kind::Or: out += " | "; break;
            case Kind::Implies: out += " -> "; break;
            default: break;
        }
        print(*n.rhs, out);
        out += ')';
    }

    std::shared_ptr<const Node> node_;
};

namespace detail {
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}
}  // namespace detail

/// Deterministic name of the auxiliary atom standing for a formula.
/// Negations of a single atom get a readable name (__aux_not_a); everything
/// else gets a hash of the canonical serialization.
inline std::string aux_name_for(const Formula& base) {
    if (base.is_negation() && base.lhs().kind() == Formula::Kind::Atom) {
        return std::string(kAuxPrefix) + "not_" + base.lhs().atom_name();
    }
    std::uint64_t h = detail::fnv1a64(base.to_string());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(kAuxPrefix) + buf;
}

}  // namespace austere
