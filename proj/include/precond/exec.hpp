// State-machine executor and assertion evaluator. Replays trajectory
// prefixes by applying observation effect rules, evaluates boolean
// expressions against the resulting state, and runs whole trajectories
// with a candidate precondition installed on one action.
//
// Expression text grammar ('and' binds tighter than 'or'):
//   expr  := or
//   or    := and ('or' and)*
//   and   := unary ('and' unary)*
//   unary := 'not' unary | 'true' | '(' expr ')' | atom
//   atom  := var '[' key ']' | var '[' '(' key ',' key ')' ']'
//          | flagvar | term ('==' | '!=') term | term 'in' rhs
//   term  := ident | 'literal' | true | false | none
//
// Identifiers resolve against the (schema, function) pair at parse time:
// parameters shadow nothing (names are disjoint by validation), `ident in x`
// resolves to substring containment when x is a parameter and to set
// membership when x is a StringSet variable.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "precond/expr.hpp"
#include "precond/schema.hpp"
#include "precond/trajectory.hpp"

namespace precond {

struct ExprError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ExprParseError : ExprError {
    using ExprError::ExprError;
};
struct ExprTypeError : ExprError {
    using ExprError::ExprError;
};
struct ReplayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TriState : uint8_t { Unset, True, False };

struct State {
    std::map<std::string, bool> flags;
    std::map<std::string, std::map<std::string, bool>> bool_maps;
    std::map<std::string, TriState> tristates;
    std::map<std::string, std::set<std::string>> string_sets;
    std::map<std::string, std::optional<std::string>> opt_strings;
    std::map<std::string, std::map<std::pair<std::string, std::string>, bool>> prop_maps;

    friend bool operator==(const State& a, const State& b) {
        return a.flags == b.flags && a.bool_maps == b.bool_maps && a.tristates == b.tristates &&
               a.string_sets == b.string_sets && a.opt_strings == b.opt_strings &&
               a.prop_maps == b.prop_maps;
    }
};

/// All variables at their defaults: false / empty / unset / none.
inline State initial_state(const DomainSchema& schema) {
    State s;
    for (const auto& v : schema.state_vars) {
        switch (v.kind) {
            case StateVarKind::BoolFlag: s.flags[v.name] = false; break;
            case StateVarKind::BoolMap: s.bool_maps[v.name]; break;
            case StateVarKind::TriState: s.tristates[v.name] = TriState::Unset; break;
            case StateVarKind::StringSet: s.string_sets[v.name]; break;
            case StateVarKind::OptString: s.opt_strings[v.name] = std::nullopt; break;
            case StateVarKind::PropMap: s.prop_maps[v.name]; break;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Expression parsing (schema- and function-contextual)

namespace detail {

struct Lexer {
    const std::string& src;
    size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= src.size();
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool consume_op(const std::string& op) {
        skip_ws();
        if (src.compare(pos, op.size(), op) == 0) {
            pos += op.size();
            return true;
        }
        return false;
    }
    // Peeks a word without consuming; words are maximal ident runs.
    std::string peek_word() {
        skip_ws();
        size_t i = pos;
        while (i < src.size() && (isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
            ++i;
        return src.substr(pos, i - pos);
    }
    std::string take_word() {
        std::string w = peek_word();
        pos += w.size();
        return w;
    }
    std::string take_string_literal() {
        skip_ws();
        if (pos >= src.size() || src[pos] != '\'')
            throw ExprParseError("expected string literal in '" + src + "'");
        size_t end = src.find('\'', pos + 1);
        if (end == std::string::npos)
            throw ExprParseError("unterminated string literal in '" + src + "'");
        std::string out = src.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        return out;
    }
};

struct ExprParser {
    Lexer lex;
    const DomainSchema& schema;
    const FunctionDecl& fn;

    ExprParser(const std::string& text, const DomainSchema& s, const FunctionDecl& f)
        : lex{text}, schema(s), fn(f) {}

    [[noreturn]] void fail(const std::string& msg) {
        throw ExprParseError(msg + " in '" + lex.src + "'");
    }

    ExprPtr parse() {
        ExprPtr e = parse_or();
        if (!lex.eof()) fail("trailing tokens");
        return e;
    }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while (lex.peek_word() == "or") {
            lex.take_word();
            e = make_or(e, parse_and());
        }
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_unary();
        while (lex.peek_word() == "and") {
            lex.take_word();
            e = make_and(e, parse_unary());
        }
        return e;
    }

    ExprPtr parse_unary() {
        if (lex.peek_word() == "not") {
            lex.take_word();
            return make_not(parse_unary());
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        if (lex.consume('(')) {
            ExprPtr e = parse_or();
            if (!lex.consume(')')) fail("expected ')'");
            return maybe_binary_tail(e);
        }
        return parse_atom();
    }

    // A parenthesized term can still be the left side of a comparison in
    // python-normalized input; here only full expressions are grouped, so a
    // closing paren is final.
    ExprPtr maybe_binary_tail(ExprPtr e) { return e; }

    ExprPtr parse_atom() {
        lex.skip_ws();
        if (lex.peek() == '\'') {
            Term t = lit_term(lex.take_string_literal());
            return parse_atom_tail(std::move(t));
        }
        std::string word = lex.take_word();
        if (word.empty()) fail("expected expression");
        if (word == "true" && !starts_binary()) return make_true();
        return parse_atom_tail(resolve_word(word));
    }

    bool starts_binary() {
        lex.skip_ws();
        if (lex.peek() == '=' || lex.peek() == '!') return true;
        return lex.peek_word() == "in";
    }

    Term resolve_word(const std::string& word) {
        if (word == "true") return true_term();
        if (word == "false") return false_term();
        if (word == "none") return none_term();
        if (fn.find_param(word)) return param_term(word);
        if (schema.find_var(word)) return var_term(word);
        fail("unknown identifier '" + word + "'");
    }

    ExprPtr parse_atom_tail(Term t) {
        lex.skip_ws();
        if (lex.peek() == '[') {
            if (t.kind != TermKind::StateVar) fail("subscript on non-variable");
            return parse_lookup(t.text);
        }
        if (lex.consume_op("==")) return finish_cmp(std::move(t), CmpOp::Eq);
        if (lex.consume_op("!=")) return finish_cmp(std::move(t), CmpOp::Ne);
        if (lex.peek_word() == "in") {
            lex.take_word();
            return finish_in(std::move(t));
        }
        // Bare identifier: boolean flag atom.
        if (t.kind == TermKind::StateVar) {
            const auto* decl = schema.find_var(t.text);
            if (decl->kind != StateVarKind::BoolFlag)
                fail("variable '" + t.text + "' of kind " + to_string(decl->kind) +
                     " cannot stand alone");
            return make_flag(t.text);
        }
        fail("dangling term");
    }

    Term parse_key_term() {
        lex.skip_ws();
        if (lex.peek() == '\'') return lit_term(lex.take_string_literal());
        std::string word = lex.take_word();
        if (word.empty()) fail("expected key");
        if (!fn.find_param(word)) fail("map key '" + word + "' is not a parameter");
        return param_term(word);
    }

    ExprPtr parse_lookup(const std::string& var) {
        const auto* decl = schema.find_var(var);
        if (!lex.consume('[')) fail("expected '['");
        std::vector<Term> keys;
        if (lex.consume('(')) {
            keys.push_back(parse_key_term());
            if (!lex.consume(',')) fail("expected ',' in pair key");
            keys.push_back(parse_key_term());
            if (!lex.consume(')')) fail("expected ')' in pair key");
        } else {
            keys.push_back(parse_key_term());
        }
        if (!lex.consume(']')) fail("expected ']'");
        if (decl->kind == StateVarKind::BoolMap && keys.size() != 1)
            fail("bool map '" + var + "' takes one key");
        if (decl->kind == StateVarKind::PropMap && keys.size() != 2)
            fail("prop map '" + var + "' takes a key pair");
        if (decl->kind != StateVarKind::BoolMap && decl->kind != StateVarKind::PropMap)
            fail("variable '" + var + "' is not a map");
        return make_lookup(var, std::move(keys));
    }

    Term parse_rhs_term() {
        lex.skip_ws();
        if (lex.peek() == '\'') return lit_term(lex.take_string_literal());
        std::string word = lex.take_word();
        if (word.empty()) fail("expected term");
        return resolve_word(word);
    }

    ExprPtr finish_cmp(Term a, CmpOp op) {
        Term b = parse_rhs_term();
        ExprPtr e = make_cmp(std::move(a), op, std::move(b));
        type_check_node(*e);
        return e;
    }

    ExprPtr finish_in(Term element) {
        lex.skip_ws();
        std::string word = lex.take_word();
        if (word.empty()) fail("expected container after 'in'");
        const auto* decl = schema.find_var(word);
        if (decl && decl->kind == StateVarKind::StringSet) {
            ExprPtr e = make_in_set(std::move(element), word);
            type_check_node(*e);
            return e;
        }
        if (fn.find_param(word)) {
            if (element.kind != TermKind::Literal)
                fail("substring containment requires a literal left side");
            return make_member(element.text, word);
        }
        fail("'in' target '" + word + "' is neither a parameter nor a string set");
    }

    void type_check_node(const Expr& e);
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Static type checking

namespace detail {

enum class ValueFamily { BoolLike, StringLike, NoneOnly };

inline ValueFamily term_family(const Term& t, const DomainSchema& schema,
                               const FunctionDecl& fn) {
    switch (t.kind) {
        case TermKind::Param:
            if (!fn.find_param(t.text))
                throw ExprTypeError("'" + t.text + "' is not a parameter of " + fn.name);
            return ValueFamily::StringLike;
        case TermKind::Literal: return ValueFamily::StringLike;
        case TermKind::BoolTrue:
        case TermKind::BoolFalse: return ValueFamily::BoolLike;
        case TermKind::None: return ValueFamily::NoneOnly;
        case TermKind::StateVar: {
            const auto* decl = schema.find_var(t.text);
            if (!decl) throw ExprTypeError("undeclared variable '" + t.text + "'");
            switch (decl->kind) {
                case StateVarKind::BoolFlag:
                case StateVarKind::TriState: return ValueFamily::BoolLike;
                case StateVarKind::OptString: return ValueFamily::StringLike;
                default:
                    throw ExprTypeError("variable '" + t.text + "' of kind " +
                                        to_string(decl->kind) + " is not a comparable value");
            }
        }
    }
    throw ExprTypeError("bad term");
}

inline bool families_comparable(ValueFamily a, ValueFamily b) {
    if (a == ValueFamily::NoneOnly || b == ValueFamily::NoneOnly) return true;
    return a == b;
}

}  // namespace detail

/// Checks an expression against a (schema, function) pair. Every variable
/// reference must be declared, parameter references must name params of the
/// function, lookups must target map kinds, and comparison operands must come
/// from compatible value families. Throws ExprTypeError.
inline void type_check(const Expr& e, const DomainSchema& schema, const FunctionDecl& fn) {
    switch (e.kind) {
        case ExprKind::True: return;
        case ExprKind::Not: type_check(*e.lhs, schema, fn); return;
        case ExprKind::And:
        case ExprKind::Or:
            type_check(*e.lhs, schema, fn);
            type_check(*e.rhs, schema, fn);
            return;
        case ExprKind::Flag: {
            const auto* decl = schema.find_var(e.var);
            if (!decl) throw ExprTypeError("undeclared variable '" + e.var + "'");
            if (decl->kind != StateVarKind::BoolFlag)
                throw ExprTypeError("flag atom on non-flag variable '" + e.var + "'");
            return;
        }
        case ExprKind::Lookup: {
            const auto* decl = schema.find_var(e.var);
            if (!decl) throw ExprTypeError("undeclared variable '" + e.var + "'");
            const size_t want = decl->kind == StateVarKind::BoolMap   ? 1
                                : decl->kind == StateVarKind::PropMap ? 2
                                                                      : 0;
            if (want == 0)
                throw ExprTypeError("lookup on non-map variable '" + e.var + "'");
            if (e.keys.size() != want)
                throw ExprTypeError("lookup on '" + e.var + "' has wrong key arity");
            for (const auto& k : e.keys) {
                if (k.kind == TermKind::Param) {
                    if (!fn.find_param(k.text))
                        throw ExprTypeError("'" + k.text + "' is not a parameter of " + fn.name);
                } else if (k.kind != TermKind::Literal) {
                    throw ExprTypeError("map keys must be parameters or literals");
                }
            }
            return;
        }
        case ExprKind::Cmp: {
            const auto fa = detail::term_family(e.a, schema, fn);
            const auto fb = detail::term_family(e.b, schema, fn);
            if (!detail::families_comparable(fa, fb))
                throw ExprTypeError("incomparable operands in '" + to_text(e) + "'");
            return;
        }
        case ExprKind::Member: {
            if (!fn.find_param(e.param))
                throw ExprTypeError("'" + e.param + "' is not a parameter of " + fn.name);
            return;
        }
        case ExprKind::InSet: {
            const auto* decl = schema.find_var(e.var);
            if (!decl) throw ExprTypeError("undeclared variable '" + e.var + "'");
            if (decl->kind != StateVarKind::StringSet)
                throw ExprTypeError("'in' membership on non-set variable '" + e.var + "'");
            if (e.a.kind == TermKind::StateVar) {
                const auto* lv = schema.find_var(e.a.text);
                if (!lv || lv->kind != StateVarKind::OptString)
                    throw ExprTypeError("set membership element must be a parameter, literal "
                                        "or optional-string variable");
            } else if (e.a.kind == TermKind::Param) {
                if (!fn.find_param(e.a.text))
                    throw ExprTypeError("'" + e.a.text + "' is not a parameter of " + fn.name);
            } else if (e.a.kind != TermKind::Literal) {
                throw ExprTypeError("set membership element must be string-valued");
            }
            return;
        }
    }
}

inline void type_check(const ExprPtr& e, const DomainSchema& schema, const FunctionDecl& fn) {
    type_check(*e, schema, fn);
}

namespace detail {
inline void ExprParser::type_check_node(const Expr& e) { precond::type_check(e, schema, fn); }
}  // namespace detail

/// Parses expression text in the context of (schema, function).
/// Throws ExprParseError / ExprTypeError.
inline ExprPtr parse_expr(const std::string& text, const DomainSchema& schema,
                          const FunctionDecl& fn) {
    detail::ExprParser p(text, schema, fn);
    ExprPtr e = p.parse();
    type_check(*e, schema, fn);
    return e;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Name -> value view of one call's arguments.
struct BindingView {
    const FunctionDecl* fn = nullptr;
    const std::vector<std::string>* values = nullptr;

    const std::string& value_of(const std::string& param) const {
        for (size_t i = 0; i < fn->params.size(); ++i)
            if (fn->params[i].name == param) {
                if (!values || i >= values->size())
                    throw ExprTypeError("binding has no value for parameter '" + param + "'");
                return (*values)[i];
            }
        throw ExprTypeError("unknown parameter '" + param + "'");
    }
};

namespace detail {

struct Value {
    enum class Kind { Bool, Tri, Str, OptStr, None } kind;
    bool b = false;
    TriState tri = TriState::Unset;
    std::string str;
    std::optional<std::string> opt;
};

inline Value term_value(const Term& t, const State& state, const BindingView& binding) {
    Value v{};
    switch (t.kind) {
        case TermKind::Param:
            v.kind = Value::Kind::Str;
            v.str = binding.value_of(t.text);
            return v;
        case TermKind::Literal:
            v.kind = Value::Kind::Str;
            v.str = t.text;
            return v;
        case TermKind::BoolTrue:
            v.kind = Value::Kind::Bool;
            v.b = true;
            return v;
        case TermKind::BoolFalse:
            v.kind = Value::Kind::Bool;
            v.b = false;
            return v;
        case TermKind::None: v.kind = Value::Kind::None; return v;
        case TermKind::StateVar: {
            if (auto it = state.flags.find(t.text); it != state.flags.end()) {
                v.kind = Value::Kind::Bool;
                v.b = it->second;
                return v;
            }
            if (auto it = state.tristates.find(t.text); it != state.tristates.end()) {
                v.kind = Value::Kind::Tri;
                v.tri = it->second;
                return v;
            }
            if (auto it = state.opt_strings.find(t.text); it != state.opt_strings.end()) {
                v.kind = Value::Kind::OptStr;
                v.opt = it->second;
                return v;
            }
            throw ExprTypeError("variable '" + t.text + "' is not a comparable value");
        }
    }
    throw ExprTypeError("bad term");
}

// Equality across value kinds. TriState compares against booleans with
// unset unequal to both, and equal only to none. Optional strings compare
// against strings and none.
inline bool values_equal(const Value& x, const Value& y) {
    using K = Value::Kind;
    if (x.kind == K::None && y.kind == K::None) return true;
    if (x.kind == K::None || y.kind == K::None) {
        const Value& other = x.kind == K::None ? y : x;
        if (other.kind == K::Tri) return other.tri == TriState::Unset;
        if (other.kind == K::OptStr) return !other.opt.has_value();
        return false;  // plain bools and strings are never none
    }
    if (x.kind == K::Tri || y.kind == K::Tri) {
        const Value& tri = x.kind == K::Tri ? x : y;
        const Value& other = x.kind == K::Tri ? y : x;
        if (other.kind == K::Bool)
            return tri.tri == (other.b ? TriState::True : TriState::False);
        if (other.kind == K::Tri) return tri.tri == other.tri;
        throw ExprTypeError("comparison between tri-state and string");
    }
    if (x.kind == K::OptStr || y.kind == K::OptStr) {
        const Value& o = x.kind == K::OptStr ? x : y;
        const Value& other = x.kind == K::OptStr ? y : x;
        if (other.kind == K::Str) return o.opt.has_value() && *o.opt == other.str;
        if (other.kind == K::OptStr) return o.opt == other.opt;
        throw ExprTypeError("comparison between optional string and boolean");
    }
    if (x.kind == K::Bool && y.kind == K::Bool) return x.b == y.b;
    if (x.kind == K::Str && y.kind == K::Str) return x.str == y.str;
    throw ExprTypeError("comparison between string and boolean");
}

}  // namespace detail

/// Standard boolean semantics over the state. Map lookups of absent keys
/// read false; substring containment checks the literal against the bound
/// argument value. Type errors throw, never silently evaluate false.
inline bool eval_expr(const Expr& e, const State& state, const BindingView& binding) {
    switch (e.kind) {
        case ExprKind::True: return true;
        case ExprKind::Not: return !eval_expr(*e.lhs, state, binding);
        case ExprKind::And:
            return eval_expr(*e.lhs, state, binding) && eval_expr(*e.rhs, state, binding);
        case ExprKind::Or:
            return eval_expr(*e.lhs, state, binding) || eval_expr(*e.rhs, state, binding);
        case ExprKind::Flag: {
            auto it = state.flags.find(e.var);
            if (it == state.flags.end())
                throw ExprTypeError("flag atom on non-flag variable '" + e.var + "'");
            return it->second;
        }
        case ExprKind::Lookup: {
            const auto key_text = [&](const Term& t) -> std::string {
                if (t.kind == TermKind::Param) return binding.value_of(t.text);
                return t.text;
            };
            if (auto it = state.bool_maps.find(e.var); it != state.bool_maps.end()) {
                auto kv = it->second.find(key_text(e.keys.at(0)));
                return kv != it->second.end() && kv->second;
            }
            if (auto it = state.prop_maps.find(e.var); it != state.prop_maps.end()) {
                auto kv = it->second.find({key_text(e.keys.at(0)), key_text(e.keys.at(1))});
                return kv != it->second.end() && kv->second;
            }
            throw ExprTypeError("lookup on non-map variable '" + e.var + "'");
        }
        case ExprKind::Cmp: {
            const bool eq = detail::values_equal(detail::term_value(e.a, state, binding),
                                                 detail::term_value(e.b, state, binding));
            return e.op == CmpOp::Eq ? eq : !eq;
        }
        case ExprKind::Member: {
            const std::string& bound = binding.value_of(e.param);
            return bound.find(e.lit) != std::string::npos;
        }
        case ExprKind::InSet: {
            auto it = state.string_sets.find(e.var);
            if (it == state.string_sets.end())
                throw ExprTypeError("'in' membership on non-set variable '" + e.var + "'");
            std::string element;
            if (e.a.kind == TermKind::Param) {
                element = binding.value_of(e.a.text);
            } else if (e.a.kind == TermKind::Literal) {
                element = e.a.text;
            } else if (e.a.kind == TermKind::StateVar) {
                auto ov = state.opt_strings.find(e.a.text);
                if (ov == state.opt_strings.end())
                    throw ExprTypeError("set element '" + e.a.text + "' is not string-valued");
                if (!ov->second) return false;
                element = *ov->second;
            } else {
                throw ExprTypeError("set element must be string-valued");
            }
            return it->second.count(element) > 0;
        }
    }
    throw ExprTypeError("bad expression node");
}

inline bool eval_expr(const ExprPtr& e, const State& state, const BindingView& binding) {
    return eval_expr(*e, state, binding);
}

// ---------------------------------------------------------------------------
// Replay

namespace detail {

inline std::string effect_term_value(const EffectTerm& t, const FunctionDecl& fn,
                                     const Call& call) {
    if (t.is_literal) return t.text;
    for (size_t i = 0; i < fn.params.size(); ++i)
        if (fn.params[i].name == t.text) {
            if (i >= call.args.size())
                throw ReplayError("call to '" + call.fn + "' missing argument for param '" +
                                  t.text + "'");
            return call.args[i];
        }
    throw ReplayError("effect references unknown param '" + t.text + "'");
}

inline bool parse_bool_literal(const std::string& s, const std::string& ctx) {
    if (s == "True" || s == "true") return true;
    if (s == "False" || s == "false") return false;
    throw ReplayError("expected boolean value in " + ctx + ", got '" + s + "'");
}

inline void apply_effect(State& state, const EffectRule& rule, const FunctionDecl& fn,
                         const Call& call, const DomainSchema& schema) {
    const auto* decl = schema.find_var(rule.target);
    if (!decl) throw ReplayError("effect targets undeclared variable '" + rule.target + "'");

    const auto resolved_value = [&]() -> std::string {
        return effect_term_value(*rule.value, fn, call);
    };

    switch (decl->kind) {
        case StateVarKind::BoolFlag: {
            bool v = rule.op == EffectOp::SetTrue    ? true
                     : rule.op == EffectOp::SetFalse ? false
                                                     : parse_bool_literal(resolved_value(), rule.target);
            state.flags[rule.target] = v;
            return;
        }
        case StateVarKind::BoolMap: {
            const std::string key = effect_term_value(rule.key.at(0), fn, call);
            bool v = rule.op == EffectOp::SetTrue    ? true
                     : rule.op == EffectOp::SetFalse ? false
                                                     : parse_bool_literal(resolved_value(), rule.target);
            state.bool_maps[rule.target][key] = v;
            return;
        }
        case StateVarKind::PropMap: {
            const std::string k1 = effect_term_value(rule.key.at(0), fn, call);
            const std::string k2 = effect_term_value(rule.key.at(1), fn, call);
            bool v = rule.op == EffectOp::SetTrue    ? true
                     : rule.op == EffectOp::SetFalse ? false
                                                     : parse_bool_literal(resolved_value(), rule.target);
            state.prop_maps[rule.target][{k1, k2}] = v;
            return;
        }
        case StateVarKind::TriState: {
            if (rule.op == EffectOp::Clear) {
                state.tristates[rule.target] = TriState::Unset;
            } else if (rule.op == EffectOp::SetTrue) {
                state.tristates[rule.target] = TriState::True;
            } else if (rule.op == EffectOp::SetFalse) {
                state.tristates[rule.target] = TriState::False;
            } else {
                state.tristates[rule.target] =
                    parse_bool_literal(resolved_value(), rule.target) ? TriState::True
                                                                      : TriState::False;
            }
            return;
        }
        case StateVarKind::StringSet: {
            if (rule.op == EffectOp::Clear) {
                state.string_sets[rule.target].clear();
                return;
            }
            for (const auto& a : rule.args) {
                if (!a.is_literal && a.text == "*") {
                    for (const auto& arg : call.args) state.string_sets[rule.target].insert(arg);
                } else {
                    state.string_sets[rule.target].insert(effect_term_value(a, fn, call));
                }
            }
            return;
        }
        case StateVarKind::OptString: {
            if (rule.op == EffectOp::Clear)
                state.opt_strings[rule.target] = std::nullopt;
            else
                state.opt_strings[rule.target] = resolved_value();
            return;
        }
    }
}

}  // namespace detail

/// Applies, in order, the effect rules of every observation call among the
/// first `upto` calls. Action calls apply no effects.
inline State replay(const DomainSchema& schema, const Trajectory& traj, size_t upto) {
    if (upto > traj.calls.size())
        throw ReplayError("replay index " + std::to_string(upto) + " out of range");
    State state = initial_state(schema);
    for (size_t i = 0; i < upto; ++i) {
        const Call& call = traj.calls[i];
        const auto* fn = schema.find_function(call.fn);
        if (!fn) throw ReplayError("unknown function '" + call.fn + "'");
        if (fn->is_action()) continue;
        for (const auto& rule : fn->effects) detail::apply_effect(state, rule, *fn, call, schema);
    }
    return state;
}

/// Per-trajectory replay snapshots: states[j] is the state after j calls.
/// Built once per corpus and shared read-only across candidate evaluations.
struct ReplayTable {
    const DomainSchema* schema = nullptr;
    std::vector<std::vector<State>> states;  // [trajectory][step 0..len]

    static ReplayTable build(const DomainSchema& schema, const Corpus& corpus) {
        ReplayTable t;
        t.schema = &schema;
        t.states.reserve(corpus.trajectories.size());
        for (const auto& traj : corpus.trajectories) {
            std::vector<State> snaps;
            snaps.reserve(traj.calls.size() + 1);
            State s = initial_state(schema);
            snaps.push_back(s);
            for (size_t i = 0; i < traj.calls.size(); ++i) {
                const Call& call = traj.calls[i];
                const auto* fn = schema.find_function(call.fn);
                if (!fn) throw ReplayError("unknown function '" + call.fn + "'");
                if (!fn->is_action())
                    for (const auto& rule : fn->effects)
                        detail::apply_effect(s, rule, *fn, call, schema);
                snaps.push_back(s);
            }
            t.states.push_back(std::move(snaps));
        }
        return t;
    }
};

// ---------------------------------------------------------------------------
// Whole-trajectory execution with an installed precondition

struct ExecOutcome {
    enum class Status { Ok, AssertionFailed, RuntimeError } status = Status::Ok;
    size_t at_step = 0;       // failing call index when not ok
    std::string detail;       // failing expression text or error message
    std::optional<State> final_state;  // populated only when ok

    bool ok() const { return status == Status::Ok; }
};

/// Replays `traj`, evaluating `expr` at every call to `action` under that
/// call's argument binding. Stops at the first false assertion; runtime and
/// type errors are captured in the outcome, never thrown past it.
inline ExecOutcome execute_with_precondition(const DomainSchema& schema, const Trajectory& traj,
                                             const std::string& action, const ExprPtr& expr) {
    const auto* target = schema.find_function(action);
    if (!target || !target->is_action()) {
        ExecOutcome out;
        out.status = ExecOutcome::Status::RuntimeError;
        out.detail = "'" + action + "' is not an action function";
        return out;
    }
    State state = initial_state(schema);
    for (size_t i = 0; i < traj.calls.size(); ++i) {
        const Call& call = traj.calls[i];
        const auto* fn = schema.find_function(call.fn);
        if (!fn) {
            ExecOutcome out;
            out.status = ExecOutcome::Status::RuntimeError;
            out.at_step = i;
            out.detail = "unknown function '" + call.fn + "'";
            return out;
        }
        if (call.fn == action) {
            try {
                BindingView binding{fn, &call.args};
                if (!eval_expr(*expr, state, binding)) {
                    ExecOutcome out;
                    out.status = ExecOutcome::Status::AssertionFailed;
                    out.at_step = i;
                    out.detail = to_text(*expr);
                    return out;
                }
            } catch (const std::exception& ex) {
                ExecOutcome out;
                out.status = ExecOutcome::Status::RuntimeError;
                out.at_step = i;
                out.detail = ex.what();
                return out;
            }
        }
        if (!fn->is_action()) {
            try {
                for (const auto& rule : fn->effects)
                    detail::apply_effect(state, rule, *fn, call, schema);
            } catch (const std::exception& ex) {
                ExecOutcome out;
                out.status = ExecOutcome::Status::RuntimeError;
                out.at_step = i;
                out.detail = ex.what();
                return out;
            }
        }
    }
    ExecOutcome out;
    out.final_state = std::move(state);
    return out;
}

}  // namespace precond
