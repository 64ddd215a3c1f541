// Domain schema: state variable declarations, observation/action function
// signatures with effect rules, and argument vocabularies. A schema is
// immutable after construction and shared freely across pipeline workers.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "precond/expr.hpp"

namespace precond {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StateVarKind {
    BoolFlag,   // bool, default false
    BoolMap,    // string -> bool, absent keys read false
    TriState,   // unset / true / false
    StringSet,  // set of strings, default empty
    OptString,  // optional string, default none
    PropMap,    // (string, string) -> bool, absent keys read false
};

inline const char* to_string(StateVarKind k) {
    switch (k) {
        case StateVarKind::BoolFlag: return "bool_flag";
        case StateVarKind::BoolMap: return "bool_map";
        case StateVarKind::TriState: return "tri_state";
        case StateVarKind::StringSet: return "string_set";
        case StateVarKind::OptString: return "opt_string";
        case StateVarKind::PropMap: return "prop_map";
    }
    return "?";
}

inline StateVarKind state_var_kind_from(const std::string& s) {
    if (s == "bool_flag") return StateVarKind::BoolFlag;
    if (s == "bool_map") return StateVarKind::BoolMap;
    if (s == "tri_state") return StateVarKind::TriState;
    if (s == "string_set") return StateVarKind::StringSet;
    if (s == "opt_string") return StateVarKind::OptString;
    if (s == "prop_map") return StateVarKind::PropMap;
    throw SchemaError("unknown state variable kind '" + s + "'");
}

struct StateVarDecl {
    std::string name;
    StateVarKind kind = StateVarKind::BoolFlag;
    // Surface prefix used when rendering prompts in source style
    // (e.g. "self.user." so informed_slot renders as self.user.informed_slot).
    std::string render_prefix = "self.";

    friend bool operator==(const StateVarDecl& a, const StateVarDecl& b) {
        return a.name == b.name && a.kind == b.kind && a.render_prefix == b.render_prefix;
    }
};

enum class EffectOp { SetTrue, SetFalse, SetValue, Insert, Clear };

inline const char* to_string(EffectOp op) {
    switch (op) {
        case EffectOp::SetTrue: return "set_true";
        case EffectOp::SetFalse: return "set_false";
        case EffectOp::SetValue: return "set_value";
        case EffectOp::Insert: return "insert";
        case EffectOp::Clear: return "clear";
    }
    return "?";
}

inline EffectOp effect_op_from(const std::string& s) {
    if (s == "set_true") return EffectOp::SetTrue;
    if (s == "set_false") return EffectOp::SetFalse;
    if (s == "set_value") return EffectOp::SetValue;
    if (s == "insert") return EffectOp::Insert;
    if (s == "clear") return EffectOp::Clear;
    throw SchemaError("unknown effect op '" + s + "'");
}

// Key/value terms in effect rules are either parameter references or string
// literals. "*" as an insert argument means "all call arguments".
struct EffectTerm {
    bool is_literal = false;
    std::string text;

    friend bool operator==(const EffectTerm& a, const EffectTerm& b) {
        return a.is_literal == b.is_literal && a.text == b.text;
    }
};

struct EffectRule {
    std::string target;
    EffectOp op = EffectOp::SetTrue;
    std::vector<EffectTerm> key;    // map/prop targets: 1 or 2 key terms
    std::optional<EffectTerm> value;  // set_value payload
    std::vector<EffectTerm> args;   // insert payload

    friend bool operator==(const EffectRule& a, const EffectRule& b) {
        return a.target == b.target && a.op == b.op && a.key == b.key &&
               a.value == b.value && a.args == b.args;
    }
};

enum class FunctionKind { Observation, Action };

struct ParamDecl {
    std::string name;
    std::string vocab;
    bool variadic = false;  // observation-only; accepts any number of args

    friend bool operator==(const ParamDecl& a, const ParamDecl& b) {
        return a.name == b.name && a.vocab == b.vocab && a.variadic == b.variadic;
    }
};

struct FunctionDecl {
    std::string name;  // qualified, e.g. "system.INFORM" or "agent.take"
    FunctionKind kind = FunctionKind::Observation;
    std::vector<ParamDecl> params;
    std::vector<EffectRule> effects;       // observation functions only
    ExprPtr gt_precondition;               // evaluation-only; may be null
    std::string gt_precondition_text;      // as written in the schema file

    bool is_action() const { return kind == FunctionKind::Action; }

    const ParamDecl* find_param(const std::string& n) const {
        for (const auto& p : params)
            if (p.name == n) return &p;
        return nullptr;
    }
};

struct DomainSchema {
    std::string name;
    std::vector<StateVarDecl> state_vars;
    std::vector<FunctionDecl> functions;
    std::map<std::string, std::vector<std::string>> vocabularies;

    const StateVarDecl* find_var(const std::string& n) const {
        for (const auto& v : state_vars)
            if (v.name == n) return &v;
        return nullptr;
    }

    const FunctionDecl* find_function(const std::string& n) const {
        for (const auto& f : functions)
            if (f.name == n) return &f;
        return nullptr;
    }

    const std::vector<std::string>& vocab(const std::string& id) const {
        auto it = vocabularies.find(id);
        if (it == vocabularies.end()) throw SchemaError("unknown vocabulary '" + id + "'");
        return it->second;
    }

    std::vector<const FunctionDecl*> actions() const {
        std::vector<const FunctionDecl*> out;
        for (const auto& f : functions)
            if (f.is_action()) out.push_back(&f);
        return out;
    }

    std::vector<const FunctionDecl*> observations() const {
        std::vector<const FunctionDecl*> out;
        for (const auto& f : functions)
            if (!f.is_action()) out.push_back(&f);
        return out;
    }
};

namespace detail {

inline bool effect_op_fits(EffectOp op, StateVarKind kind) {
    switch (kind) {
        case StateVarKind::BoolFlag:
        case StateVarKind::BoolMap:
        case StateVarKind::PropMap:
            return op == EffectOp::SetTrue || op == EffectOp::SetFalse ||
                   op == EffectOp::SetValue;
        case StateVarKind::TriState:
            return op == EffectOp::SetValue || op == EffectOp::Clear ||
                   op == EffectOp::SetTrue || op == EffectOp::SetFalse;
        case StateVarKind::StringSet:
            return op == EffectOp::Insert || op == EffectOp::Clear;
        case StateVarKind::OptString:
            return op == EffectOp::SetValue || op == EffectOp::Clear;
    }
    return false;
}

inline size_t keys_required(StateVarKind kind) {
    switch (kind) {
        case StateVarKind::BoolMap: return 1;
        case StateVarKind::PropMap: return 2;
        default: return 0;
    }
}

}  // namespace detail

/// Structural validation: unique names, resolvable vocabularies, effect ops
/// compatible with their target kinds, actions effect-free, at least one
/// action. Ground-truth expressions are type-checked by the loader after
/// parsing (see exec.hpp).
inline void validate_schema(const DomainSchema& s) {
    if (s.name.empty()) throw SchemaError("schema has no name");

    std::vector<std::string> seen;
    for (const auto& v : s.state_vars) {
        if (std::find(seen.begin(), seen.end(), v.name) != seen.end())
            throw SchemaError("duplicate state variable '" + v.name + "'");
        seen.push_back(v.name);
    }

    seen.clear();
    bool any_action = false;
    for (const auto& f : s.functions) {
        if (std::find(seen.begin(), seen.end(), f.name) != seen.end())
            throw SchemaError("duplicate function '" + f.name + "'");
        seen.push_back(f.name);
        any_action |= f.is_action();

        for (const auto& p : f.params) {
            if (!s.vocabularies.count(p.vocab))
                throw SchemaError("function '" + f.name + "' param '" + p.name +
                                  "' references undeclared vocabulary '" + p.vocab + "'");
            if (p.variadic && f.is_action())
                throw SchemaError("action '" + f.name + "' declares a variadic param");
        }

        if (f.is_action() && !f.effects.empty())
            throw SchemaError("action '" + f.name + "' declares effects");

        for (const auto& e : f.effects) {
            const auto* target = s.find_var(e.target);
            if (!target)
                throw SchemaError("function '" + f.name + "' effect targets undeclared variable '" +
                                  e.target + "'");
            if (!detail::effect_op_fits(e.op, target->kind))
                throw SchemaError("function '" + f.name + "' effect op " +
                                  std::string(to_string(e.op)) + " incompatible with " +
                                  to_string(target->kind) + " variable '" + e.target + "'");
            if (e.key.size() != detail::keys_required(target->kind))
                throw SchemaError("function '" + f.name + "' effect on '" + e.target +
                                  "' has wrong key arity");
            for (const auto& k : e.key)
                if (!k.is_literal && !f.find_param(k.text))
                    throw SchemaError("function '" + f.name + "' effect key references unknown param '" +
                                      k.text + "'");
            if (e.op == EffectOp::SetValue) {
                if (!e.value)
                    throw SchemaError("function '" + f.name + "' set_value effect lacks a value");
                if (!e.value->is_literal && !f.find_param(e.value->text))
                    throw SchemaError("function '" + f.name + "' effect value references unknown param '" +
                                      e.value->text + "'");
            }
            for (const auto& a : e.args)
                if (!a.is_literal && a.text != "*" && !f.find_param(a.text))
                    throw SchemaError("function '" + f.name + "' insert references unknown param '" +
                                      a.text + "'");
        }
    }
    if (!any_action) throw SchemaError("schema '" + s.name + "' declares no action functions");
}

/// One argument binding: values aligned with the function's parameter list.
using ArgBinding = std::vector<std::string>;

/// Cartesian product of the declared vocabularies of fn's params.
/// Empty-param functions yield exactly one empty binding.
inline std::vector<ArgBinding> action_groundings(const DomainSchema& schema,
                                                 const FunctionDecl& fn) {
    if (!fn.is_action()) throw SchemaError("action_groundings on non-action '" + fn.name + "'");
    std::vector<ArgBinding> out{{}};
    for (const auto& p : fn.params) {
        const auto& vocab = schema.vocab(p.vocab);
        std::vector<ArgBinding> next;
        next.reserve(out.size() * vocab.size());
        for (const auto& partial : out) {
            for (const auto& value : vocab) {
                ArgBinding b = partial;
                b.push_back(value);
                next.push_back(std::move(b));
            }
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace precond
