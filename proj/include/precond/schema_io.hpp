// Schema file I/O. JSON layout:
//   { "name": ..., "state_vars": [...], "vocabularies": {...}, "functions": [...] }
// Effect key/value terms are strings; a leading single quote marks a literal
// ("'open'"), a bare word references a parameter, and "*" in insert args
// means all call arguments. Ground-truth preconditions are expression
// strings in the grammar of exec.hpp, or null.

#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "precond/exec.hpp"
#include "precond/schema.hpp"

namespace precond {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline EffectTerm effect_term_from_string(const std::string& s) {
    if (s.size() >= 2 && s.front() == '\'' && s.back() == '\'')
        return {true, s.substr(1, s.size() - 2)};
    return {false, s};
}

inline std::string effect_term_to_string(const EffectTerm& t) {
    return t.is_literal ? "'" + t.text + "'" : t.text;
}

}  // namespace detail

inline ordered_json schema_to_json(const DomainSchema& s) {
    ordered_json j;
    j["name"] = s.name;
    j["state_vars"] = ordered_json::array();
    for (const auto& v : s.state_vars) {
        ordered_json jv;
        jv["name"] = v.name;
        jv["kind"] = to_string(v.kind);
        jv["render_prefix"] = v.render_prefix;
        j["state_vars"].push_back(jv);
    }
    j["vocabularies"] = ordered_json::object();
    for (const auto& [id, words] : s.vocabularies) j["vocabularies"][id] = words;
    j["functions"] = ordered_json::array();
    for (const auto& f : s.functions) {
        ordered_json jf;
        jf["name"] = f.name;
        jf["kind"] = f.is_action() ? "action" : "observation";
        jf["params"] = ordered_json::array();
        for (const auto& p : f.params) {
            ordered_json jp;
            jp["name"] = p.name;
            jp["vocab"] = p.vocab;
            if (p.variadic) jp["variadic"] = true;
            jf["params"].push_back(jp);
        }
        jf["effects"] = ordered_json::array();
        for (const auto& e : f.effects) {
            ordered_json je;
            je["target"] = e.target;
            je["op"] = to_string(e.op);
            if (!e.key.empty()) {
                je["key"] = ordered_json::array();
                for (const auto& k : e.key) je["key"].push_back(detail::effect_term_to_string(k));
            }
            if (e.value) je["value"] = detail::effect_term_to_string(*e.value);
            if (!e.args.empty()) {
                je["args"] = ordered_json::array();
                for (const auto& a : e.args) je["args"].push_back(detail::effect_term_to_string(a));
            }
            jf["effects"].push_back(je);
        }
        if (f.gt_precondition)
            jf["gt_precondition"] = f.gt_precondition_text;
        else
            jf["gt_precondition"] = nullptr;
        j["functions"].push_back(jf);
    }
    return j;
}

inline DomainSchema schema_from_json(const ordered_json& j) {
    DomainSchema s;
    try {
        s.name = j.at("name").get<std::string>();
        for (const auto& jv : j.at("state_vars")) {
            StateVarDecl v;
            v.name = jv.at("name").get<std::string>();
            v.kind = state_var_kind_from(jv.at("kind").get<std::string>());
            if (jv.contains("render_prefix")) v.render_prefix = jv.at("render_prefix").get<std::string>();
            s.state_vars.push_back(std::move(v));
        }
        for (const auto& [id, words] : j.at("vocabularies").items())
            s.vocabularies[id] = words.get<std::vector<std::string>>();
        for (const auto& jf : j.at("functions")) {
            FunctionDecl f;
            f.name = jf.at("name").get<std::string>();
            const std::string kind = jf.at("kind").get<std::string>();
            if (kind == "action")
                f.kind = FunctionKind::Action;
            else if (kind == "observation")
                f.kind = FunctionKind::Observation;
            else
                throw SchemaError("function '" + f.name + "' has unknown kind '" + kind + "'");
            for (const auto& jp : jf.value("params", ordered_json::array())) {
                ParamDecl p;
                p.name = jp.at("name").get<std::string>();
                p.vocab = jp.at("vocab").get<std::string>();
                p.variadic = jp.value("variadic", false);
                f.params.push_back(std::move(p));
            }
            for (const auto& je : jf.value("effects", ordered_json::array())) {
                EffectRule e;
                e.target = je.at("target").get<std::string>();
                e.op = effect_op_from(je.at("op").get<std::string>());
                for (const auto& k : je.value("key", ordered_json::array()))
                    e.key.push_back(detail::effect_term_from_string(k.get<std::string>()));
                if (je.contains("value") && !je.at("value").is_null())
                    e.value = detail::effect_term_from_string(je.at("value").get<std::string>());
                for (const auto& a : je.value("args", ordered_json::array()))
                    e.args.push_back(detail::effect_term_from_string(a.get<std::string>()));
                f.effects.push_back(std::move(e));
            }
            if (jf.contains("gt_precondition") && !jf.at("gt_precondition").is_null())
                f.gt_precondition_text = jf.at("gt_precondition").get<std::string>();
            s.functions.push_back(std::move(f));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw SchemaError(std::string("malformed schema json: ") + ex.what());
    }

    validate_schema(s);

    // Parse and type-check ground truths once the structure is known valid.
    for (auto& f : s.functions) {
        if (f.gt_precondition_text.empty()) continue;
        try {
            f.gt_precondition = parse_expr(f.gt_precondition_text, s, f);
        } catch (const ExprError& ex) {
            throw SchemaError("gt_precondition of '" + f.name + "': " + ex.what());
        }
    }
    return s;
}

inline DomainSchema load_schema(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SchemaError("cannot open schema file '" + path + "'");
    ordered_json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw SchemaError("schema file '" + path + "' does not parse: " + ex.what());
    }
    return schema_from_json(j);
}

inline void save_schema(const DomainSchema& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw SchemaError("cannot write schema file '" + path + "'");
    f << schema_to_json(s).dump(2) << "\n";
}

}  // namespace precond
