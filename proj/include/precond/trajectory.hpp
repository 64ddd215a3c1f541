// Trajectory programs: ordered sequences of function calls with literal
// arguments, plus the line-oriented corpus file format.
//
// One call per line, `qualified.name(arg1, arg2)`, string arguments
// single-quoted. The bare tokens True/False/None are accepted and re-emitted
// unquoted so serialized programs match their source listings.

#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "precond/schema.hpp"

namespace precond {

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Call {
    std::string fn;
    std::vector<std::string> args;

    friend bool operator==(const Call& a, const Call& b) {
        return a.fn == b.fn && a.args == b.args;
    }
};

struct Trajectory {
    std::string id;
    std::vector<Call> calls;
    std::optional<std::string> goal;

    size_t size() const { return calls.size(); }

    friend bool operator==(const Trajectory& a, const Trajectory& b) {
        return a.id == b.id && a.calls == b.calls && a.goal == b.goal;
    }
};

struct Corpus {
    std::string schema_name;
    std::vector<Trajectory> trajectories;

    friend bool operator==(const Corpus& a, const Corpus& b) {
        return a.schema_name == b.schema_name && a.trajectories == b.trajectories;
    }
};

namespace detail {

inline bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.';
}

inline std::string render_call(const Call& c) {
    std::string out = c.fn;
    out += '(';
    for (size_t i = 0; i < c.args.size(); ++i) {
        if (i) out += ", ";
        const auto& a = c.args[i];
        if (a == "True" || a == "False" || a == "None") {
            out += a;
        } else {
            out += '\'';
            out += a;
            out += '\'';
        }
    }
    out += ')';
    return out;
}

}  // namespace detail

/// Parses one `name(arg, ...)` line. `where` seeds error messages.
inline Call parse_call(const std::string& line, const std::string& where = {}) {
    const auto fail = [&](const std::string& msg) {
        throw CorpusError((where.empty() ? "" : where + ": ") + msg + " in '" + line + "'");
    };
    size_t i = 0;
    const auto skip_ws = [&] { while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i; };
    skip_ws();
    size_t start = i;
    while (i < line.size() && detail::is_ident_char(line[i])) ++i;
    if (i == start) fail("expected function name");
    Call call;
    call.fn = line.substr(start, i - start);
    skip_ws();
    if (i >= line.size() || line[i] != '(') fail("expected '('");
    ++i;
    skip_ws();
    if (i < line.size() && line[i] == ')') {
        ++i;
    } else {
        while (true) {
            skip_ws();
            if (i >= line.size()) fail("unterminated argument list");
            if (line[i] == '\'') {
                size_t end = line.find('\'', i + 1);
                if (end == std::string::npos) fail("unterminated string literal");
                call.args.push_back(line.substr(i + 1, end - i - 1));
                i = end + 1;
            } else {
                size_t s = i;
                while (i < line.size() && detail::is_ident_char(line[i])) ++i;
                if (i == s) fail("expected argument");
                std::string tok = line.substr(s, i - s);
                if (tok != "True" && tok != "False" && tok != "None")
                    fail("unquoted argument '" + tok + "'");
                call.args.push_back(std::move(tok));
            }
            skip_ws();
            if (i < line.size() && line[i] == ',') {
                ++i;
                continue;
            }
            if (i < line.size() && line[i] == ')') {
                ++i;
                break;
            }
            fail("expected ',' or ')'");
        }
    }
    skip_ws();
    if (i != line.size()) fail("trailing characters");
    return call;
}

/// Validates a call against the schema: known function, arity, vocabulary.
inline void check_call(const DomainSchema& schema, const Call& call,
                       const std::string& where = {}) {
    const auto fail = [&](const std::string& msg) {
        throw CorpusError((where.empty() ? "" : where + ": ") + msg);
    };
    const auto* fn = schema.find_function(call.fn);
    if (!fn) fail("unknown function '" + call.fn + "'");
    const bool variadic = !fn->params.empty() && fn->params.back().variadic;
    if (variadic) {
        const size_t fixed = fn->params.size() - 1;
        if (call.args.size() < fixed)
            fail("call to '" + call.fn + "' has " + std::to_string(call.args.size()) +
                 " args, expected at least " + std::to_string(fixed));
    } else if (call.args.size() != fn->params.size()) {
        fail("call to '" + call.fn + "' has " + std::to_string(call.args.size()) +
             " args, expected " + std::to_string(fn->params.size()));
    }
    for (size_t i = 0; i < call.args.size(); ++i) {
        const auto& p = fn->params[std::min(i, fn->params.size() - 1)];
        const auto& vocab = schema.vocab(p.vocab);
        if (std::find(vocab.begin(), vocab.end(), call.args[i]) == vocab.end())
            fail("argument '" + call.args[i] + "' of '" + call.fn +
                 "' not in vocabulary '" + p.vocab + "'");
    }
}

/// First t calls. The returned id is the base id annotated with the cut
/// point, so re-prefixing remains idempotent: prefix(prefix(t,a),b) equals
/// prefix(t,b) for b <= a. t == size() returns the trajectory unchanged.
inline Trajectory prefix(const Trajectory& traj, size_t t) {
    if (t > traj.calls.size())
        throw CorpusError("prefix index " + std::to_string(t) + " out of range for '" +
                          traj.id + "' (" + std::to_string(traj.calls.size()) + " calls)");
    if (t == traj.calls.size()) return traj;
    Trajectory out;
    const auto at = traj.id.find('@');
    out.id = traj.id.substr(0, at) + "@" + std::to_string(t);
    out.goal = traj.goal;
    out.calls.assign(traj.calls.begin(), traj.calls.begin() + static_cast<long>(t));
    return out;
}

inline std::string serialize_corpus(const Corpus& corpus) {
    std::string out = "#schema " + corpus.schema_name + "\n";
    for (const auto& t : corpus.trajectories) {
        out += "\n#trajectory " + t.id;
        if (t.goal) out += " goal: " + *t.goal;
        out += '\n';
        for (const auto& c : t.calls) {
            out += detail::render_call(c);
            out += '\n';
        }
    }
    return out;
}

inline std::string serialize_trajectory(const Trajectory& t) {
    std::string out;
    for (const auto& c : t.calls) {
        out += detail::render_call(c);
        out += '\n';
    }
    return out;
}

inline Corpus parse_corpus_text(const std::string& text, const DomainSchema& schema,
                                const std::string& source = "<corpus>") {
    Corpus corpus;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    Trajectory* current = nullptr;
    bool saw_schema = false;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string where = source + ":" + std::to_string(lineno);
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty()) continue;

        if (trimmed.rfind("#schema ", 0) == 0) {
            corpus.schema_name = trimmed.substr(8);
            if (corpus.schema_name != schema.name)
                throw CorpusError(where + ": corpus schema '" + corpus.schema_name +
                                  "' does not match '" + schema.name + "'");
            saw_schema = true;
            continue;
        }
        if (trimmed.rfind("#trajectory ", 0) == 0) {
            std::string rest = trimmed.substr(12);
            Trajectory t;
            const auto goal_at = rest.find(" goal: ");
            if (goal_at != std::string::npos) {
                t.id = rest.substr(0, goal_at);
                t.goal = rest.substr(goal_at + 7);
            } else {
                t.id = rest;
            }
            if (t.id.empty()) throw CorpusError(where + ": trajectory without id");
            for (const auto& prev : corpus.trajectories)
                if (prev.id == t.id)
                    throw CorpusError(where + ": duplicate trajectory id '" + t.id + "'");
            corpus.trajectories.push_back(std::move(t));
            current = &corpus.trajectories.back();
            continue;
        }
        if (trimmed[0] == '#') throw CorpusError(where + ": unknown directive");
        if (!saw_schema) throw CorpusError(where + ": call before #schema header");
        if (!current) throw CorpusError(where + ": call outside a #trajectory block");

        Call call = parse_call(trimmed, where);
        check_call(schema, call, where);
        current->calls.push_back(std::move(call));
    }

    if (!saw_schema) throw CorpusError(source + ": missing #schema header");
    for (const auto& t : corpus.trajectories)
        if (t.calls.empty())
            throw CorpusError(source + ": trajectory '" + t.id + "' has no calls");
    return corpus;
}

inline Corpus parse_corpus(const std::string& path, const DomainSchema& schema) {
    std::ifstream f(path);
    if (!f) throw CorpusError("cannot open corpus file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_corpus_text(ss.str(), schema, path);
}

inline void write_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw CorpusError("cannot write corpus file '" + path + "'");
    f << serialize_corpus(corpus);
}

}  // namespace precond
