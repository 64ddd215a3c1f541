// Candidate pool generation: an enumerative grammar synthesizer (the
// reproducible default) and an HTTP text-completion client matching the
// original pipeline's generator. Both produce CandidatePool values that the
// mining stages consume.

#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "precond/exec.hpp"
#include "precond/schema.hpp"
#include "precond/trajectory.hpp"

namespace precond {

struct GeneratorConfig {
    int max_depth = 2;        // 0: TRUE only; 1: atoms + negations; 2: + pairs
    size_t max_pool = 4096;   // cap applied after deterministic ordering
    std::string model_endpoint;  // empty: enumerative generator only
    std::string auth_token;
    int samples_per_demo = 5;
    double temperature = 0.8;
    int max_tokens = 64;
};

struct CandidateEntry {
    ExprPtr expr;         // null when unparseable
    std::string source;   // "enumerated" | "model" | "file"
    std::string raw;      // original text (model completion or file entry)

    bool unparseable() const { return expr == nullptr; }
};

struct CandidatePool {
    std::string action;
    std::vector<CandidateEntry> candidates;

    size_t typed_count() const {
        size_t n = 0;
        for (const auto& c : candidates)
            if (!c.unparseable()) ++n;
        return n;
    }
};

// ---------------------------------------------------------------------------
// Enumerative generator

namespace detail {

inline std::vector<std::string> all_vocab_literals(const DomainSchema& schema) {
    std::set<std::string> lits;
    for (const auto& [id, words] : schema.vocabularies)
        for (const auto& w : words) lits.insert(w);
    return {lits.begin(), lits.end()};
}

// Literals of vocabularies no parameter draws from. Such vocabularies exist
// to hold substring tokens (receptacle types like "sink"), which is the one
// place the grammar's containment atom is needed.
inline std::vector<std::string> token_vocab_literals(const DomainSchema& schema) {
    std::set<std::string> used;
    for (const auto& f : schema.functions)
        for (const auto& p : f.params) used.insert(p.vocab);
    std::set<std::string> lits;
    for (const auto& [id, words] : schema.vocabularies)
        if (!used.count(id))
            for (const auto& w : words) lits.insert(w);
    return {lits.begin(), lits.end()};
}

inline std::vector<ExprPtr> atom_universe(const DomainSchema& schema, const FunctionDecl& fn) {
    std::vector<ExprPtr> atoms;
    const auto lits = all_vocab_literals(schema);

    for (const auto& v : schema.state_vars) {
        switch (v.kind) {
            case StateVarKind::BoolFlag: atoms.push_back(make_flag(v.name)); break;
            case StateVarKind::BoolMap: {
                for (const auto& p : fn.params)
                    atoms.push_back(make_lookup(v.name, {param_term(p.name)}));
                for (const auto& lit : lits)
                    atoms.push_back(make_lookup(v.name, {lit_term(lit)}));
                break;
            }
            case StateVarKind::PropMap: {
                for (const auto& p : fn.params) {
                    for (const auto& lit : lits) {
                        atoms.push_back(
                            make_lookup(v.name, {param_term(p.name), lit_term(lit)}));
                        atoms.push_back(
                            make_lookup(v.name, {lit_term(lit), param_term(p.name)}));
                    }
                    for (const auto& q : fn.params)
                        if (p.name != q.name)
                            atoms.push_back(
                                make_lookup(v.name, {param_term(p.name), param_term(q.name)}));
                }
                break;
            }
            case StateVarKind::TriState: {
                atoms.push_back(make_cmp(var_term(v.name), CmpOp::Eq, true_term()));
                atoms.push_back(make_cmp(var_term(v.name), CmpOp::Eq, false_term()));
                atoms.push_back(make_cmp(var_term(v.name), CmpOp::Eq, none_term()));
                break;
            }
            case StateVarKind::OptString: {
                for (const auto& p : fn.params)
                    atoms.push_back(make_cmp(var_term(v.name), CmpOp::Eq, param_term(p.name)));
                atoms.push_back(make_cmp(var_term(v.name), CmpOp::Eq, none_term()));
                break;
            }
            case StateVarKind::StringSet: {
                for (const auto& p : fn.params)
                    atoms.push_back(make_in_set(param_term(p.name), v.name));
                break;
            }
        }
    }
    // Substring atoms: type tokens against each parameter. Needed for
    // receptacle-type conditions like 'sink' in recep.
    for (const auto& lit : token_vocab_literals(schema))
        for (const auto& p : fn.params) atoms.push_back(make_member(lit, p.name));
    return atoms;
}

struct OrderedCandidate {
    int size;
    std::string text;
    ExprPtr expr;

    friend bool operator<(const OrderedCandidate& a, const OrderedCandidate& b) {
        if (a.size != b.size) return a.size < b.size;
        return a.text < b.text;
    }
};

}  // namespace detail

/// All well-typed expressions over the grammar up to the configured depth:
/// TRUE, then atoms and their single negations, then conjunctions or
/// disjunctions of two distinct positive atoms. Deterministic order (TRUE,
/// then size-ascending with lexicographic ties within each layer), duplicates
/// removed, capped at max_pool so truncation never drops small candidates.
inline CandidatePool enumerate_candidates(const DomainSchema& schema, const FunctionDecl& fn,
                                          const GeneratorConfig& cfg) {
    if (!fn.is_action()) throw SchemaError("enumerate_candidates on non-action '" + fn.name + "'");
    CandidatePool pool;
    pool.action = fn.name;

    std::set<std::string> seen;
    const auto push = [&](const ExprPtr& e) {
        if (pool.candidates.size() >= cfg.max_pool) return;
        std::string text = to_text(e);
        if (!seen.insert(text).second) return;
        pool.candidates.push_back({e, "enumerated", std::move(text)});
    };

    push(make_true());
    if (cfg.max_depth < 1) return pool;

    auto atoms = detail::atom_universe(schema, fn);
    std::vector<detail::OrderedCandidate> layer1;
    layer1.reserve(atoms.size() * 2);
    for (const auto& a : atoms) layer1.push_back({expr_size(a), to_text(a), a});
    for (const auto& a : atoms) {
        auto n = make_not(a);
        layer1.push_back({expr_size(n), to_text(n), n});
    }
    std::sort(layer1.begin(), layer1.end());
    for (const auto& c : layer1) push(c.expr);

    if (cfg.max_depth < 2) return pool;

    // Pairs combine positive atoms in universe order; i < j avoids the
    // commutative duplicates.
    std::vector<detail::OrderedCandidate> ordered_atoms;
    ordered_atoms.reserve(atoms.size());
    for (const auto& a : atoms) ordered_atoms.push_back({expr_size(a), to_text(a), a});
    std::sort(ordered_atoms.begin(), ordered_atoms.end());

    std::vector<detail::OrderedCandidate> layer2;
    for (size_t i = 0; i < ordered_atoms.size(); ++i) {
        for (size_t j = i + 1; j < ordered_atoms.size(); ++j) {
            auto a = make_and(ordered_atoms[i].expr, ordered_atoms[j].expr);
            layer2.push_back({expr_size(a), to_text(a), a});
            auto o = make_or(ordered_atoms[i].expr, ordered_atoms[j].expr);
            layer2.push_back({expr_size(o), to_text(o), o});
        }
    }
    std::sort(layer2.begin(), layer2.end());
    for (const auto& c : layer2) {
        if (pool.candidates.size() >= cfg.max_pool) break;
        push(c.expr);
    }
    return pool;
}

// ---------------------------------------------------------------------------
// Source-style assertion normalizer

namespace detail {

struct PyToken {
    enum class Kind { Ident, Str, Op, End } kind = Kind::End;
    std::string text;
};

inline std::optional<std::vector<PyToken>> py_tokenize(const std::string& src) {
    std::vector<PyToken> out;
    size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        if (c == '\'' || c == '"') {
            size_t end = src.find(c, i + 1);
            if (end == std::string::npos) return std::nullopt;
            out.push_back({PyToken::Kind::Str, src.substr(i + 1, end - i - 1)});
            i = end + 1;
            continue;
        }
        if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t s = i;
            while (i < src.size() && (isalnum(static_cast<unsigned char>(src[i])) ||
                                      src[i] == '_' || src[i] == '.'))
                ++i;
            out.push_back({PyToken::Kind::Ident, src.substr(s, i - s)});
            continue;
        }
        if (src.compare(i, 2, "==") == 0 || src.compare(i, 2, "!=") == 0) {
            out.push_back({PyToken::Kind::Op, src.substr(i, 2)});
            i += 2;
            continue;
        }
        if (c == '(' || c == ')' || c == '[' || c == ']' || c == ',') {
            out.push_back({PyToken::Kind::Op, std::string(1, c)});
            ++i;
            continue;
        }
        return std::nullopt;  // unsupported character
    }
    return out;
}

inline std::string strip_self_prefix(std::string ident) {
    for (const char* prefix : {"self.user.", "self.env.", "self.agent.", "self."}) {
        const size_t n = std::string(prefix).size();
        if (ident.rfind(prefix, 0) == 0) {
            ident = ident.substr(n);
            break;
        }
    }
    return ident;
}

}  // namespace detail

/// Rewrites a source-style assertion body (the shape code models emit) into
/// the expression grammar, then parses it. Handles self-prefixes, is/is not,
/// True/False/None, tuple membership over booleans, isinstance(param, str)
/// tautologies and bare truthiness of tri-state / optional-string variables.
/// Returns std::nullopt for anything outside the closed grammar (assert
/// messages, .keys(), hasattr, reflective calls, ...).
inline std::optional<ExprPtr> normalize_source_assertion(const std::string& raw,
                                                         const DomainSchema& schema,
                                                         const FunctionDecl& fn,
                                                         std::string* normalized_out = nullptr) {
    using detail::PyToken;
    auto toks_opt = detail::py_tokenize(raw);
    if (!toks_opt) return std::nullopt;
    auto& toks = *toks_opt;

    // Pass 1: identifier rewrites.
    for (auto& t : toks) {
        if (t.kind != PyToken::Kind::Ident) continue;
        t.text = detail::strip_self_prefix(t.text);
        if (t.text == "True") t.text = "true";
        else if (t.text == "False") t.text = "false";
        else if (t.text == "None") t.text = "none";
    }

    // isinstance(<param>, str) is a tautology here: every argument is a string.
    {
        std::vector<PyToken> out;
        for (size_t i = 0; i < toks.size();) {
            if (toks[i].kind == PyToken::Kind::Ident && toks[i].text == "isinstance" &&
                i + 5 < toks.size() && toks[i + 1].text == "(" &&
                toks[i + 2].kind == PyToken::Kind::Ident && toks[i + 3].text == "," &&
                toks[i + 4].kind == PyToken::Kind::Ident && toks[i + 4].text == "str" &&
                toks[i + 5].text == ")") {
                if (!fn.find_param(toks[i + 2].text)) return std::nullopt;
                out.push_back({PyToken::Kind::Ident, "true"});
                i += 6;
                continue;
            }
            out.push_back(toks[i]);
            ++i;
        }
        toks = std::move(out);
    }

    // `X not in Y` -> `not X in Y` (single-token left side).
    {
        std::vector<PyToken> out;
        for (size_t i = 0; i < toks.size();) {
            if (i + 2 < toks.size() && toks[i + 1].text == "not" && toks[i + 2].text == "in" &&
                (toks[i].kind == PyToken::Kind::Ident || toks[i].kind == PyToken::Kind::Str)) {
                out.push_back({PyToken::Kind::Ident, "not"});
                out.push_back(toks[i]);
                out.push_back({PyToken::Kind::Ident, "in"});
                i += 3;
                continue;
            }
            out.push_back(toks[i]);
            ++i;
        }
        toks = std::move(out);
    }

    // is / is not.
    {
        std::vector<PyToken> out;
        for (size_t i = 0; i < toks.size();) {
            if (toks[i].text == "is" && toks[i].kind == PyToken::Kind::Ident) {
                if (i + 1 < toks.size() && toks[i + 1].text == "not") {
                    out.push_back({PyToken::Kind::Op, "!="});
                    i += 2;
                } else {
                    out.push_back({PyToken::Kind::Op, "=="});
                    ++i;
                }
                continue;
            }
            out.push_back(toks[i]);
            ++i;
        }
        toks = std::move(out);
    }

    // `X in (a, b)` over keyword terms -> `(X == a or X == b)`.
    {
        std::vector<PyToken> out;
        for (size_t i = 0; i < toks.size();) {
            const bool lhs_ok =
                toks[i].kind == PyToken::Kind::Ident || toks[i].kind == PyToken::Kind::Str;
            if (lhs_ok && i + 5 < toks.size() && toks[i + 1].text == "in" &&
                toks[i + 2].text == "(" && toks[i + 4].text == "," &&
                toks[i + 3].kind == PyToken::Kind::Ident &&
                toks[i + 5].kind == PyToken::Kind::Ident && i + 6 < toks.size() &&
                toks[i + 6].text == ")") {
                out.push_back({PyToken::Kind::Op, "("});
                out.push_back(toks[i]);
                out.push_back({PyToken::Kind::Op, "=="});
                out.push_back(toks[i + 3]);
                out.push_back({PyToken::Kind::Ident, "or"});
                out.push_back(toks[i]);
                out.push_back({PyToken::Kind::Op, "=="});
                out.push_back(toks[i + 5]);
                out.push_back({PyToken::Kind::Op, ")"});
                i += 7;
                continue;
            }
            out.push_back(toks[i]);
            ++i;
        }
        toks = std::move(out);
    }

    // Reject leftovers the grammar has no analogue for: dotted identifiers
    // and top-level commas (assert messages, tuples).
    int depth = 0;
    for (const auto& t : toks) {
        if (t.kind == PyToken::Kind::Ident && t.text.find('.') != std::string::npos)
            return std::nullopt;
        if (t.text == "(" || t.text == "[") ++depth;
        if (t.text == ")" || t.text == "]") --depth;
        if (t.text == "," && depth == 0) return std::nullopt;
    }

    // Bare truthiness of tri-state / optional-string variables in expression
    // position (start, or after not/and/or/'('; not followed by an operator).
    {
        std::vector<PyToken> out;
        for (size_t i = 0; i < toks.size(); ++i) {
            const auto& t = toks[i];
            const bool expr_pos =
                out.empty() || out.back().text == "(" || out.back().text == "not" ||
                out.back().text == "and" || out.back().text == "or";
            const std::string next = i + 1 < toks.size() ? toks[i + 1].text : "";
            const bool followed_by_op =
                next == "==" || next == "!=" || next == "in" || next == "[";
            if (t.kind == PyToken::Kind::Ident && expr_pos && !followed_by_op) {
                if (const auto* decl = schema.find_var(t.text)) {
                    if (decl->kind == StateVarKind::TriState) {
                        out.push_back({PyToken::Kind::Op, "("});
                        out.push_back(t);
                        out.push_back({PyToken::Kind::Op, "=="});
                        out.push_back({PyToken::Kind::Ident, "true"});
                        out.push_back({PyToken::Kind::Op, ")"});
                        continue;
                    }
                    if (decl->kind == StateVarKind::OptString) {
                        out.push_back({PyToken::Kind::Op, "("});
                        out.push_back(t);
                        out.push_back({PyToken::Kind::Op, "!="});
                        out.push_back({PyToken::Kind::Ident, "none"});
                        out.push_back({PyToken::Kind::Op, ")"});
                        continue;
                    }
                }
            }
            out.push_back(t);
        }
        toks = std::move(out);
    }

    // Rebuild text and parse strictly.
    std::string text;
    for (const auto& t : toks) {
        if (!text.empty()) text += ' ';
        if (t.kind == PyToken::Kind::Str)
            text += "'" + t.text + "'";
        else
            text += t.text;
    }
    try {
        ExprPtr e = parse_expr(text, schema, fn);
        if (normalized_out) *normalized_out = to_text(e);
        return e;
    } catch (const ExprError&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Prompt rendering (source style, matching the program listings)

namespace detail {

inline std::string class_name_for(const std::string& ns) {
    if (ns == "user") return "USER";
    if (ns == "system") return "SYSTEM";
    if (ns == "agent") return "Agent";
    if (ns == "env") return "Environment";
    std::string out = ns;
    if (!out.empty()) out[0] = static_cast<char>(toupper(out[0]));
    return out;
}

inline std::pair<std::string, std::string> split_ns(const std::string& qualified) {
    const auto dot = qualified.find('.');
    if (dot == std::string::npos) return {"", qualified};
    return {qualified.substr(0, dot), qualified.substr(dot + 1)};
}

inline std::string py_term(const Term& t, const DomainSchema& schema,
                           const std::string& in_class) {
    switch (t.kind) {
        case TermKind::Param: return t.text;
        case TermKind::Literal: return "'" + t.text + "'";
        case TermKind::BoolTrue: return "True";
        case TermKind::BoolFalse: return "False";
        case TermKind::None: return "None";
        case TermKind::StateVar: {
            const auto* v = schema.find_var(t.text);
            std::string prefix = v ? v->render_prefix : "self.";
            if (!in_class.empty() && prefix == "self." + in_class + ".") prefix = "self.";
            return prefix + t.text;
        }
    }
    return t.text;
}

}  // namespace detail

/// Renders an expression in source style (self-prefixed names, True/None
/// capitalization) for prompts and readable reports.
inline std::string py_render(const Expr& e, const DomainSchema& schema,
                             const std::string& in_class = "", int parent_prec = 0) {
    const auto term = [&](const Term& t) { return detail::py_term(t, schema, in_class); };
    const auto wrap = [&](int prec, const std::string& body) {
        return prec < parent_prec ? "(" + body + ")" : body;
    };
    switch (e.kind) {
        case ExprKind::True: return "True";
        case ExprKind::Not: return wrap(2, "not " + py_render(*e.lhs, schema, in_class, 3));
        case ExprKind::And:
            return wrap(1, py_render(*e.lhs, schema, in_class, 1) + " and " +
                               py_render(*e.rhs, schema, in_class, 2));
        case ExprKind::Or:
            return wrap(0, py_render(*e.lhs, schema, in_class, 0) + " or " +
                               py_render(*e.rhs, schema, in_class, 1));
        case ExprKind::Flag: return term(var_term(e.var));
        case ExprKind::Lookup: {
            std::string out = term(var_term(e.var));
            out += '[';
            if (e.keys.size() == 2)
                out += "(" + term(e.keys[0]) + ", " + term(e.keys[1]) + ")";
            else
                out += term(e.keys[0]);
            out += ']';
            return out;
        }
        case ExprKind::Cmp:
            return term(e.a) + (e.op == CmpOp::Eq ? " == " : " != ") + term(e.b);
        case ExprKind::Member: return "'" + e.lit + "' in " + e.param;
        case ExprKind::InSet: return term(e.a) + " in " + term(var_term(e.var));
    }
    return "";
}

/// The three prompt parts: observation function definitions, one rendered
/// demonstration program, and the target action's definition with a bare
/// assert awaiting completion. `preconditions` optionally inserts known
/// assertions into the other action bodies.
inline std::string render_completion_prompt(
    const DomainSchema& schema, const Trajectory& demo, const FunctionDecl& action,
    const std::map<std::string, ExprPtr>* preconditions = nullptr) {
    std::string out;

    // Group function definitions by namespace, observations with their
    // effects, actions with known assertions when provided.
    std::vector<std::string> namespaces;
    for (const auto& f : schema.functions) {
        const auto ns = detail::split_ns(f.name).first;
        if (std::find(namespaces.begin(), namespaces.end(), ns) == namespaces.end())
            namespaces.push_back(ns);
    }
    for (const auto& ns : namespaces) {
        out += "class " + detail::class_name_for(ns) + ":\n";
        for (const auto& f : schema.functions) {
            const auto [fns, base] = detail::split_ns(f.name);
            if (fns != ns) continue;
            if (f.name == action.name) continue;  // the stub comes last
            out += "  def " + base + "(self";
            for (const auto& p : f.params) out += ", " + p.name;
            out += "):\n";
            bool wrote = false;
            if (!f.is_action()) {
                for (const auto& rule : f.effects) {
                    const auto* v = schema.find_var(rule.target);
                    std::string prefix = v->render_prefix;
                    if (prefix == "self." + ns + ".") prefix = "self.";
                    std::string line = "    " + prefix + rule.target;
                    const auto key_text = [&](const EffectTerm& t) {
                        return t.is_literal ? "'" + t.text + "'" : t.text;
                    };
                    if (rule.key.size() == 1) line += "[" + key_text(rule.key[0]) + "]";
                    if (rule.key.size() == 2)
                        line += "[(" + key_text(rule.key[0]) + ", " + key_text(rule.key[1]) + ")]";
                    switch (rule.op) {
                        case EffectOp::SetTrue: line += " = True"; break;
                        case EffectOp::SetFalse: line += " = False"; break;
                        case EffectOp::SetValue: line += " = " + key_text(*rule.value); break;
                        case EffectOp::Clear: line += " = None"; break;
                        case EffectOp::Insert: {
                            line += ".update(";
                            for (size_t i = 0; i < rule.args.size(); ++i) {
                                if (i) line += ", ";
                                line += rule.args[i].text == "*" ? "list(args)"
                                                                 : key_text(rule.args[i]);
                            }
                            line += ")";
                            break;
                        }
                    }
                    out += line + "\n";
                    wrote = true;
                }
            } else if (preconditions) {
                auto it = preconditions->find(f.name);
                if (it != preconditions->end() && it->second) {
                    out += "    assert " + py_render(*it->second, schema, ns) + "\n";
                    wrote = true;
                }
            }
            if (!wrote) out += "    pass\n";
            out += "\n";
        }
    }

    out += "\n";
    out += serialize_trajectory(demo);
    out += "\n";

    const auto [ans, abase] = detail::split_ns(action.name);
    out += "def " + abase + "(self";
    for (const auto& p : action.params) out += ", " + p.name;
    out += "):\n    assert";
    return out;
}

// ---------------------------------------------------------------------------
// Pool files: a flat JSON list of {action, expr_text, source, raw}

inline nlohmann::ordered_json pools_to_json(const std::vector<CandidatePool>& pools) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& pool : pools) {
        for (const auto& c : pool.candidates) {
            nlohmann::ordered_json je;
            je["action"] = pool.action;
            if (c.expr)
                je["expr_text"] = to_text(c.expr);
            else
                je["expr_text"] = nullptr;
            je["source"] = c.source;
            je["raw"] = c.raw;
            j.push_back(je);
        }
    }
    return j;
}

/// Loads pools grouped by action. Entries are taken verbatim, in file order:
/// an explicit expr_text is parsed strictly, otherwise the raw text goes
/// through the source-style normalizer. Anything unparseable stays flagged.
inline std::vector<CandidatePool> pools_from_json(const nlohmann::ordered_json& j,
                                                  const DomainSchema& schema) {
    std::vector<CandidatePool> pools;
    const auto pool_for = [&](const std::string& action) -> CandidatePool& {
        for (auto& p : pools)
            if (p.action == action) return p;
        pools.push_back({action, {}});
        return pools.back();
    };
    for (const auto& je : j) {
        const std::string action = je.at("action").get<std::string>();
        const auto* fn = schema.find_function(action);
        if (!fn || !fn->is_action())
            throw SchemaError("pool entry references unknown action '" + action + "'");
        CandidateEntry entry;
        entry.source = je.value("source", std::string("file"));
        entry.raw = je.value("raw", std::string());
        if (je.contains("expr_text") && !je.at("expr_text").is_null()) {
            try {
                entry.expr = parse_expr(je.at("expr_text").get<std::string>(), schema, *fn);
            } catch (const ExprError&) {
                entry.expr = nullptr;
            }
            if (entry.raw.empty()) entry.raw = je.at("expr_text").get<std::string>();
        } else if (!entry.raw.empty()) {
            auto e = normalize_source_assertion(entry.raw, schema, *fn);
            entry.expr = e ? *e : nullptr;
        }
        pool_for(action).candidates.push_back(std::move(entry));
    }
    return pools;
}

inline std::vector<CandidatePool> load_pools(const std::string& path,
                                             const DomainSchema& schema) {
    std::ifstream f(path);
    if (!f) throw SchemaError("cannot open pool file '" + path + "'");
    nlohmann::ordered_json j;
    f >> j;
    return pools_from_json(j, schema);
}

inline void save_pools(const std::vector<CandidatePool>& pools, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw SchemaError("cannot write pool file '" + path + "'");
    f << pools_to_json(pools).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Model client

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One text completion request/response against the configured endpoint.
/// POST {prompt, max_tokens, temperature, stop:["\n"]} -> {text}.
/// Split into an interface so tests can stub the transport.
struct CompletionClient {
    virtual ~CompletionClient() = default;
    virtual std::string complete(const std::string& prompt, int max_tokens,
                                 double temperature) = 0;
};

/// Samples candidates for one action by prompting the completion endpoint
/// once per demonstration per sample. Completions that normalize into the
/// grammar become typed candidates; the rest are kept flagged for audit.
inline CandidatePool sample_candidates_via_model(const DomainSchema& schema,
                                                 const FunctionDecl& action,
                                                 const Corpus& demos,
                                                 const GeneratorConfig& cfg,
                                                 CompletionClient& client) {
    CandidatePool pool;
    pool.action = action.name;
    std::set<std::string> seen;
    for (const auto& demo : demos.trajectories) {
        const std::string prompt = render_completion_prompt(schema, demo, action);
        for (int k = 0; k < cfg.samples_per_demo; ++k) {
            std::string text = client.complete(prompt, cfg.max_tokens, cfg.temperature);
            // Strip to the first line; the stop sequence usually has already.
            const auto nl = text.find('\n');
            if (nl != std::string::npos) text = text.substr(0, nl);
            while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
                text.erase(text.begin());
            while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.pop_back();
            if (text.empty()) continue;  // empty completion: skipped

            std::string normalized;
            auto expr = normalize_source_assertion(text, schema, action, &normalized);
            const std::string key = expr ? "t:" + normalized : "r:" + text;
            if (!seen.insert(key).second) continue;
            pool.candidates.push_back({expr ? *expr : nullptr, "model", text});
        }
    }
    return pool;
}

}  // namespace precond
