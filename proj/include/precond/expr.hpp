// Assertion expression AST: the closed boolean language used for action
// preconditions. Syntax and evaluation live in exec.hpp; this header is the
// pure tree plus serialization, size and structural equality.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace precond {

enum class TermKind {
    StateVar,   // named state variable
    Param,      // function parameter reference
    Literal,    // quoted string literal
    BoolTrue,
    BoolFalse,
    None,
};

struct Term {
    TermKind kind = TermKind::Literal;
    std::string text;  // var/param name or literal payload; empty for keywords

    friend bool operator==(const Term& a, const Term& b) {
        return a.kind == b.kind && a.text == b.text;
    }
};

inline Term var_term(std::string name) { return {TermKind::StateVar, std::move(name)}; }
inline Term param_term(std::string name) { return {TermKind::Param, std::move(name)}; }
inline Term lit_term(std::string text) { return {TermKind::Literal, std::move(text)}; }
inline Term true_term() { return {TermKind::BoolTrue, {}}; }
inline Term false_term() { return {TermKind::BoolFalse, {}}; }
inline Term none_term() { return {TermKind::None, {}}; }

enum class ExprKind {
    True,
    Not,
    And,
    Or,
    Flag,    // bare boolean flag variable
    Lookup,  // map lookup: var[key] or var[(k1,k2)]
    Cmp,     // term == term / term != term
    Member,  // 'literal' in param  (substring containment)
    InSet,   // term in string-set variable
};

enum class CmpOp { Eq, Ne };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind = ExprKind::True;

    ExprPtr lhs;  // Not/And/Or
    ExprPtr rhs;  // And/Or

    std::string var;         // Flag/Lookup/InSet target variable
    std::vector<Term> keys;  // Lookup keys (1 for BoolMap, 2 for PropMap)

    Term a, b;               // Cmp operands; InSet uses `a` as the element term
    CmpOp op = CmpOp::Eq;

    std::string lit;    // Member literal
    std::string param;  // Member parameter name
};

inline ExprPtr make_true() {
    static const ExprPtr t = std::make_shared<Expr>();
    return t;
}

inline ExprPtr make_not(ExprPtr e) {
    auto n = std::make_shared<Expr>();
    n->kind = ExprKind::Not;
    n->lhs = std::move(e);
    return n;
}

inline ExprPtr make_and(ExprPtr l, ExprPtr r) {
    auto n = std::make_shared<Expr>();
    n->kind = ExprKind::And;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

inline ExprPtr make_or(ExprPtr l, ExprPtr r) {
    auto n = std::make_shared<Expr>();
    n->kind = ExprKind::Or;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

inline ExprPtr make_flag(std::string var) {
    auto n = std::make_shared<Expr>();
    n->kind = ExprKind::Flag;
    n->var = std::move(var);
    return n;
}

inline ExprPtr make_lookup(std::string var, std::vector<Term> keys) {
    auto n = std::make_shared<Expr>();
    n->kind = ExprKind::Lookup;
    n->var = std::move(var);
    n->keys = std::move(keys);
    return n;
}

inline ExprPtr make_cmp(Term a, CmpOp op, Term b) {
    auto n = std::make_shared<Expr>();
    n->kind = ExprKind::Cmp;
    n->a = std::move(a);
    n->b = std::move(b);
    n->op = op;
    return n;
}

inline ExprPtr make_member(std::string lit, std::string param) {
    auto n = std::make_shared<Expr>();
    n->kind = ExprKind::Member;
    n->lit = std::move(lit);
    n->param = std::move(param);
    return n;
}

inline ExprPtr make_in_set(Term element, std::string set_var) {
    auto n = std::make_shared<Expr>();
    n->kind = ExprKind::InSet;
    n->a = std::move(element);
    n->var = std::move(set_var);
    return n;
}

/// AST node count, used for deterministic representative selection.
inline int expr_size(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Not: return 1 + expr_size(*e.lhs);
        case ExprKind::And:
        case ExprKind::Or: return 1 + expr_size(*e.lhs) + expr_size(*e.rhs);
        default: return 1;
    }
}

inline int expr_size(const ExprPtr& e) { return expr_size(*e); }

inline bool expr_equal(const Expr& x, const Expr& y) {
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case ExprKind::True: return true;
        case ExprKind::Not: return expr_equal(*x.lhs, *y.lhs);
        case ExprKind::And:
        case ExprKind::Or:
            return expr_equal(*x.lhs, *y.lhs) && expr_equal(*x.rhs, *y.rhs);
        case ExprKind::Flag: return x.var == y.var;
        case ExprKind::Lookup: return x.var == y.var && x.keys == y.keys;
        case ExprKind::Cmp: return x.op == y.op && x.a == y.a && x.b == y.b;
        case ExprKind::Member: return x.lit == y.lit && x.param == y.param;
        case ExprKind::InSet: return x.var == y.var && x.a == y.a;
    }
    return false;
}

inline bool expr_equal(const ExprPtr& x, const ExprPtr& y) { return expr_equal(*x, *y); }

namespace detail {

inline void render_term(const Term& t, std::string& out) {
    switch (t.kind) {
        case TermKind::StateVar:
        case TermKind::Param: out += t.text; break;
        case TermKind::Literal:
            out += '\'';
            out += t.text;
            out += '\'';
            break;
        case TermKind::BoolTrue: out += "true"; break;
        case TermKind::BoolFalse: out += "false"; break;
        case TermKind::None: out += "none"; break;
    }
}

// Precedence: or < and < not < atom.
inline void render(const Expr& e, std::string& out, int parent_prec) {
    const auto wrap = [&](int prec, auto&& body) {
        const bool need = prec < parent_prec;
        if (need) out += '(';
        body();
        if (need) out += ')';
    };
    switch (e.kind) {
        case ExprKind::True: out += "true"; break;
        case ExprKind::Not:
            wrap(2, [&] {
                out += "not ";
                render(*e.lhs, out, 3);
            });
            break;
        case ExprKind::And:
            wrap(1, [&] {
                render(*e.lhs, out, 1);
                out += " and ";
                render(*e.rhs, out, 2);
            });
            break;
        case ExprKind::Or:
            wrap(0, [&] {
                render(*e.lhs, out, 0);
                out += " or ";
                render(*e.rhs, out, 1);
            });
            break;
        case ExprKind::Flag: out += e.var; break;
        case ExprKind::Lookup:
            out += e.var;
            out += '[';
            if (e.keys.size() == 2) {
                out += '(';
                render_term(e.keys[0], out);
                out += ", ";
                render_term(e.keys[1], out);
                out += ')';
            } else {
                render_term(e.keys[0], out);
            }
            out += ']';
            break;
        case ExprKind::Cmp:
            render_term(e.a, out);
            out += (e.op == CmpOp::Eq) ? " == " : " != ";
            render_term(e.b, out);
            break;
        case ExprKind::Member:
            out += '\'';
            out += e.lit;
            out += "' in ";
            out += e.param;
            break;
        case ExprKind::InSet:
            render_term(e.a, out);
            out += " in ";
            out += e.var;
            break;
    }
}

}  // namespace detail

/// Canonical text form; reparsing under the same (schema, function) context
/// yields an equal AST.
inline std::string to_text(const Expr& e) {
    std::string out;
    detail::render(e, out, 0);
    return out;
}

inline std::string to_text(const ExprPtr& e) { return to_text(*e); }

}  // namespace precond
