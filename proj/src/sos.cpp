#include "rwsos/sos.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "rwsos/parse.hpp"

namespace rwsos::sos {

using nlohmann::json;

bool TriggerSchema::matches(const Trigger& t) const {
    if (s >= 0 && s != t.s) return false;
    for (std::size_t i = 0; i < membership.size(); ++i) {
        const bool inW = (t.W >> i) & 1u;
        if (membership[i] == 'w' && !inW) return false;
        if (membership[i] == 'b' && inW) return false;
        if (succ[i] >= 0 && succ[i] != t.succ[i]) return false;
    }
    return true;
}

int StatefulSpec::state_id(const std::string& name) const {
    auto it = stateIndex_.find(name);
    if (it == stateIndex_.end()) throw SpecError("unknown state " + name);
    return it->second;
}

int StatefulSpec::op_index(const std::string& name) const {
    auto it = opIndex_.find(name);
    return it == opIndex_.end() ? -1 : it->second;
}

Signature StatefulSpec::signature() const {
    std::vector<std::pair<std::string, int>> v;
    for (const auto& o : ops) v.emplace_back(o.name, o.arity);
    return Signature::single_sorted(v);
}

int StatefulSpec::add_state(const std::string& name) {
    if (name.empty() || name[0] == '$' || name == "*") throw SpecError("invalid state name '" + name + "'");
    if (stateIndex_.count(name)) throw SpecError("duplicate state " + name);
    stateIndex_[name] = static_cast<int>(states.size());
    states.push_back(name);
    return static_cast<int>(states.size()) - 1;
}

namespace {
bool valid_ident(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// x3 -> ('x', 3); anything else -> ('\0', 0)
std::pair<char, int> rule_var(const std::string& v) {
    if (v.size() < 2 || (v[0] != 'x' && v[0] != 'y')) return {'\0', 0};
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(v[i]))) return {'\0', 0};
    return {v[0], std::stoi(v.substr(1))};
}

bool has_y(const Term& t) {
    for (const auto& v : variables(t))
        if (rule_var(v).first == 'y') return true;
    return false;
}
}  // namespace

int StatefulSpec::add_op(const std::string& name, int arity) {
    if (!valid_ident(name)) throw SpecError("invalid operator name '" + name + "'");
    if (arity < 0 || arity > 8) throw SpecError("operator " + name + ": arity out of range");
    if (opIndex_.count(name)) throw SpecError("duplicate operator " + name);
    opIndex_[name] = static_cast<int>(ops.size());
    ops.push_back({name, arity, {}});
    return static_cast<int>(ops.size()) - 1;
}

void StatefulSpec::add_rule(Rule r) {
    const int idx = static_cast<int>(rules.size());
    if (r.op < 0 || r.op >= static_cast<int>(ops.size())) throw SpecError("rule for unknown operator");
    const int n = ops[static_cast<std::size_t>(r.op)].arity;
    if (static_cast<int>(r.trigger.membership.size()) != n || static_cast<int>(r.trigger.succ.size()) != n)
        throw SpecError("rule " + std::to_string(idx) + ": trigger width differs from arity of " +
                        ops[static_cast<std::size_t>(r.op)].name);
    const auto& st = r.conclusion.state;
    if (st.kind == StateRef::Kind::Succ && (st.value < 1 || st.value > n))
        throw SpecError("rule " + std::to_string(idx) + ": state reference $s" + std::to_string(st.value) +
                        " out of range");
    if (r.conclusion.step) {
        if (!r.conclusion.term.valid()) throw SpecError("rule " + std::to_string(idx) + ": step without a term");
        if (auto err = validate_term(signature(), r.conclusion.term, true))
            throw SpecError("rule " + std::to_string(idx) + ": " + err->what());
        for (const auto& v : variables(r.conclusion.term)) {
            auto [kind, k] = rule_var(v);
            if (!kind) throw VariableDisciplineError(idx, v, "is not of the form xi or yi");
            if (k < 1 || k > n) throw VariableDisciplineError(idx, v, "exceeds the arity");
            if (kind == 'y' && r.trigger.membership[static_cast<std::size_t>(k - 1)] != 'w')
                throw VariableDisciplineError(idx, v, "is bound only when position " + std::to_string(k) + " is in W");
        }
    }
    ops[static_cast<std::size_t>(r.op)].rules.push_back(idx);
    rules.push_back(std::move(r));
}

std::string StatefulSpec::trigger_str(int op, const Trigger& t) const {
    const int n = ops[static_cast<std::size_t>(op)].arity;
    std::string out = "(W={";
    bool first = true;
    for (int i = 1; i <= n; ++i)
        if (t.in_W(i)) {
            out += (first ? "" : ",") + std::to_string(i);
            first = false;
        }
    out += "}, s=" + states[static_cast<std::size_t>(t.s)];
    for (int i = 0; i < n; ++i) out += ", s" + std::to_string(i + 1) + "=" + states[static_cast<std::size_t>(t.succ[static_cast<std::size_t>(i)])];
    return out + ")";
}

Conclusion StatefulSpec::resolve(int op, const Trigger& t) const {
    for (int ri : ops[static_cast<std::size_t>(op)].rules) {
        const Rule& r = rules[static_cast<std::size_t>(ri)];
        if (!r.trigger.matches(t)) continue;
        Conclusion c;
        c.step = r.conclusion.step;
        c.term = r.conclusion.term;
        switch (r.conclusion.state.kind) {
            case StateRef::Kind::Literal: c.state = r.conclusion.state.value; break;
            case StateRef::Kind::Source: c.state = t.s; break;
            case StateRef::Kind::Succ: c.state = t.succ[static_cast<std::size_t>(r.conclusion.state.value - 1)]; break;
        }
        return c;
    }
    throw CoverageError(ops[static_cast<std::size_t>(op)].name, trigger_str(op, t));
}

void StatefulSpec::validate() const {
    if (states.empty()) throw SpecError("a specification needs at least one state");
    for (int op = 0; op < static_cast<int>(ops.size()); ++op) {
        const auto& info = ops[static_cast<std::size_t>(op)];
        for (std::size_t a = 0; a < info.rules.size(); ++a)
            for (std::size_t b = a + 1; b < info.rules.size(); ++b) {
                const Rule& ra = rules[static_cast<std::size_t>(info.rules[a])];
                const Rule& rb = rules[static_cast<std::size_t>(info.rules[b])];
                if (!(ra.trigger == rb.trigger)) continue;
                const auto& ca = ra.conclusion;
                const auto& cb = rb.conclusion;
                bool same = ca.step == cb.step && ca.state == cb.state && (!ca.step || ca.term == cb.term);
                if (!same) throw OverlapError(info.name, info.rules[a], info.rules[b]);
            }
        double count = std::pow(2.0, info.arity) * std::pow(static_cast<double>(states.size()), info.arity + 1);
        if (count > 8e6) throw SpecError("operator " + info.name + " has too many triggers to validate");
        for_each_trigger(op, [&](const Trigger& t) { (void)resolve(op, t); });
    }
}

// ---- JSON ----

namespace {
StateRef parse_state_ref(const StatefulSpec& spec, const std::string& s) {
    if (s == "$s") return {StateRef::Kind::Source, 0};
    if (s.size() > 2 && s[0] == '$' && s[1] == 's') {
        for (std::size_t i = 2; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw SpecError("bad state reference " + s);
        return {StateRef::Kind::Succ, std::stoi(s.substr(2))};
    }
    return {StateRef::Kind::Literal, spec.state_id(s)};
}

std::string state_ref_str(const StatefulSpec& spec, const StateRef& r) {
    switch (r.kind) {
        case StateRef::Kind::Source: return "$s";
        case StateRef::Kind::Succ: return "$s" + std::to_string(r.value);
        case StateRef::Kind::Literal: break;
    }
    return spec.states[static_cast<std::size_t>(r.value)];
}

const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw SpecError(std::string("missing key '") + key + "'");
    return j.at(key);
}
}  // namespace

StatefulSpec load_spec(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(1, static_cast<int>(e.byte), "well-formed JSON");
    }
    StatefulSpec spec;
    try {
        for (const auto& s : need(doc, "states")) spec.add_state(s.get<std::string>());
        for (const auto& o : need(doc, "operators")) spec.add_op(need(o, "name").get<std::string>(), need(o, "arity").get<int>());
        for (const auto& r : need(doc, "rules")) {
            Rule rule;
            const std::string opName = need(r, "op").get<std::string>();
            rule.op = spec.op_index(opName);
            if (rule.op < 0) throw SpecError("rule for undeclared operator " + opName);
            const int n = spec.ops[static_cast<std::size_t>(rule.op)].arity;
            const json& trig = need(r, "trigger");
            const json& W = need(trig, "W");
            rule.trigger.membership.assign(static_cast<std::size_t>(n), 'b');
            auto position = [&](const json& v) {
                int k = v.get<int>();
                if (k < 1 || k > n) throw SpecError("trigger position " + std::to_string(k) + " out of range for " + opName);
                return static_cast<std::size_t>(k - 1);
            };
            if (W.is_string()) {
                if (W.get<std::string>() != "*") throw SpecError("W must be an array or \"*\"");
                rule.trigger.membership.assign(static_cast<std::size_t>(n), '*');
            } else {
                for (const auto& k : W) rule.trigger.membership[position(k)] = 'w';
            }
            if (trig.contains("Wany"))
                for (const auto& k : trig.at("Wany")) rule.trigger.membership[position(k)] = '*';
            const std::string s = trig.contains("s") ? trig.at("s").get<std::string>() : "*";
            rule.trigger.s = s == "*" ? -1 : spec.state_id(s);
            rule.trigger.succ.assign(static_cast<std::size_t>(n), -1);
            if (trig.contains("succ")) {
                const json& succ = trig.at("succ");
                if (static_cast<int>(succ.size()) != n) throw SpecError("succ of a rule for " + opName + " has the wrong length");
                for (int i = 0; i < n; ++i) {
                    std::string v = succ[static_cast<std::size_t>(i)].get<std::string>();
                    rule.trigger.succ[static_cast<std::size_t>(i)] = v == "*" ? -1 : spec.state_id(v);
                }
            }
            const json& concl = need(r, "conclusion");
            const std::string kind = need(concl, "kind").get<std::string>();
            if (kind != "step" && kind != "stop") throw SpecError("conclusion kind must be step or stop");
            rule.conclusion.step = kind == "step";
            rule.conclusion.state = parse_state_ref(spec, need(concl, "state").get<std::string>());
            if (rule.conclusion.step) rule.conclusion.term = parse::tiny_term(need(concl, "term").get<std::string>(), true);
            spec.add_rule(std::move(rule));
        }
    } catch (const json::exception& e) {
        throw SpecError(std::string("malformed specification: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string spec_to_json(const StatefulSpec& spec) {
    json doc;
    doc["states"] = spec.states;
    doc["operators"] = json::array();
    for (const auto& o : spec.ops) doc["operators"].push_back({{"name", o.name}, {"arity", o.arity}});
    doc["rules"] = json::array();
    for (const auto& r : spec.rules) {
        json trig;
        json W = json::array(), any = json::array(), succ = json::array();
        bool allAny = !r.trigger.membership.empty() &&
                      std::all_of(r.trigger.membership.begin(), r.trigger.membership.end(), [](char c) { return c == '*'; });
        for (std::size_t i = 0; i < r.trigger.membership.size(); ++i) {
            if (r.trigger.membership[i] == 'w') W.push_back(i + 1);
            if (r.trigger.membership[i] == '*') any.push_back(i + 1);
            succ.push_back(r.trigger.succ[i] < 0 ? "*" : spec.states[static_cast<std::size_t>(r.trigger.succ[i])]);
        }
        if (allAny)
            trig["W"] = "*";
        else {
            trig["W"] = W;
            if (!any.empty()) trig["Wany"] = any;
        }
        trig["s"] = r.trigger.s < 0 ? "*" : spec.states[static_cast<std::size_t>(r.trigger.s)];
        trig["succ"] = succ;
        json concl;
        concl["kind"] = r.conclusion.step ? "step" : "stop";
        if (r.conclusion.step) concl["term"] = rw_str(r.conclusion.term);
        concl["state"] = state_ref_str(spec, r.conclusion.state);
        doc["rules"].push_back({{"op", spec.ops[static_cast<std::size_t>(r.op)].name}, {"trigger", trig}, {"conclusion", concl}});
    }
    return doc.dump(2);
}

// ---- operational model ----

namespace {
std::map<std::string, Term> x_bindings(const std::vector<Term>& kids, int skip = 0) {
    std::map<std::string, Term> m;
    for (std::size_t i = 0; i < kids.size(); ++i)
        if (static_cast<int>(i) + 1 != skip) m["x" + std::to_string(i + 1)] = kids[i];
    return m;
}
}  // namespace

LResult l_step(const StatefulSpec& spec, const Term& p, StateId s) {
    const int op = spec.op_index(p.head());
    if (op < 0) throw SpecError("unknown operator " + p.head());
    const auto& kids = p.kids();
    Trigger t;
    t.s = s;
    t.succ.resize(kids.size());
    std::map<std::string, Term> sub = x_bindings(kids);
    for (std::size_t i = 0; i < kids.size(); ++i) {
        LResult r = l_step(spec, kids[i], s);
        t.succ[i] = r.state;
        if (!r.done) {
            t.W |= 1u << i;
            sub["y" + std::to_string(i + 1)] = std::move(r.next);
        }
    }
    Conclusion c = spec.resolve(op, t);
    if (!c.step) return {true, Term{}, c.state};
    return {false, substitute(c.term, sub), c.state};
}

StateTrace l_trace(const StatefulSpec& spec, const Term& p, StateId s, std::size_t fuel) {
    StateTrace tr;
    Term cur = p;
    while (tr.steps < fuel) {
        LResult r = l_step(spec, cur, s);
        ++tr.steps;
        if (r.done) {
            tr.finished = true;
            tr.final = r.state;
            return tr;
        }
        tr.emitted.push_back(r.state);
        cur = std::move(r.next);
        s = r.state;
    }
    return tr;
}

std::string StateTrace::str(const StatefulSpec& spec) const {
    std::string out = finished ? "Finished([" : stalled ? "Stalled([" : "Cut([";
    for (std::size_t i = 0; i < emitted.size(); ++i) out += (i ? "," : "") + spec.states[static_cast<std::size_t>(emitted[i])];
    out += "]";
    if (finished) out += ", " + spec.states[static_cast<std::size_t>(final)];
    return out + ")";
}

// ---- cool format ----

std::string to_string(CoolReason r) {
    switch (r) {
        case CoolReason::PatienceMissing: return "missing patience rule for the receiving position";
        case CoolReason::MentionsReceiving: return "conclusion term mentions the receiving operand";
        case CoolReason::MentionsY: return "conclusion term mentions a successor variable";
        case CoolReason::DependsOnSource: return "conclusion depends on the source state, not only on the terminal state";
        case CoolReason::DependsOnPremise: return "conclusion depends on premises other than the receiving one";
    }
    return "?";
}

namespace {
Term patience_term(const OpInfo& info, int j) {
    std::vector<Term> kids;
    for (int i = 1; i <= info.arity; ++i) kids.push_back(Term::var((i == j ? "y" : "x") + std::to_string(i)));
    return Term::op(info.name, std::move(kids));
}

bool passive_op(const StatefulSpec& spec, int op) {
    std::vector<std::optional<Conclusion>> rep(spec.states.size());
    bool ok = true;
    spec.for_each_trigger(op, [&](const Trigger& t) {
        if (!ok) return;
        Conclusion c = spec.resolve(op, t);
        if (c.step && has_y(c.term)) ok = false;
        auto& r = rep[static_cast<std::size_t>(t.s)];
        if (!r)
            r = c;
        else if (!(*r == c))
            ok = false;
    });
    return ok;
}

std::vector<CoolViolation> active_violations(const StatefulSpec& spec, int op, int j, std::size_t& total) {
    const OpInfo& info = spec.ops[static_cast<std::size_t>(op)];
    const Term patience = patience_term(info, j);
    const std::string xj = "x" + std::to_string(j);
    std::vector<CoolViolation> out;
    total = 0;
    auto flag = [&](const Trigger& t, CoolReason why, std::string detail) {
        ++total;
        if (out.size() < 32) out.push_back({info.name, j, t, why, std::move(detail)});
    };
    // group keys: (W, succ) for dependence on s; succ_j for everything else
    std::optional<Conclusion> bySource;
    Trigger sourceKey;
    std::vector<std::optional<Conclusion>> byTerminal(spec.states.size());
    spec.for_each_trigger(op, [&](const Trigger& t) {
        Conclusion c = spec.resolve(op, t);
        if (t.in_W(j)) {
            if (!(c.step && c.term == patience && c.state == t.succ[static_cast<std::size_t>(j - 1)]))
                flag(t, CoolReason::PatienceMissing, c.step ? "concludes " + rw_str(c.term) : "terminates");
            return;
        }
        if (c.step) {
            auto vars = variables(c.term);
            if (vars.count(xj)) flag(t, CoolReason::MentionsReceiving, rw_str(c.term));
            if (has_y(c.term)) flag(t, CoolReason::MentionsY, rw_str(c.term));
        }
        if (t.s == 0) {
            bySource = c;
            sourceKey = t;
        } else if (bySource && sourceKey.W == t.W && sourceKey.succ == t.succ && !(*bySource == c)) {
            flag(t, CoolReason::DependsOnSource, "differs from the rule at source state " + spec.states[0]);
            return;
        }
        auto& rep = byTerminal[static_cast<std::size_t>(t.succ[static_cast<std::size_t>(j - 1)])];
        if (!rep)
            rep = c;
        else if (!(*rep == c))
            flag(t, CoolReason::DependsOnPremise, "differs from another rule with the same terminal state");
    });
    return out;
}
}  // namespace

CoolReport check_cool(const StatefulSpec& spec) {
    CoolReport rep;
    for (int op = 0; op < static_cast<int>(spec.ops.size()); ++op) {
        const OpInfo& info = spec.ops[static_cast<std::size_t>(op)];
        if (passive_op(spec, op)) {
            rep.passive.insert(info.name);
            continue;
        }
        int best = 0;
        std::size_t bestTotal = 0;
        std::vector<CoolViolation> bestViol;
        for (int j = 1; j <= info.arity; ++j) {
            std::size_t total = 0;
            auto v = active_violations(spec, op, j, total);
            if (best == 0 || total < bestTotal) {
                best = j;
                bestTotal = total;
                bestViol = std::move(v);
            }
        }
        rep.active[info.name] = best;
        if (bestTotal > 0) {
            rep.cool = false;
            for (auto& v : bestViol) rep.violations.push_back(std::move(v));
        }
    }
    return rep;
}

bool naive_cool_recheck(const StatefulSpec& spec, const CoolReport& report) {
    if (!report.cool) return false;
    for (int op = 0; op < static_cast<int>(spec.ops.size()); ++op) {
        const OpInfo& info = spec.ops[static_cast<std::size_t>(op)];
        std::vector<std::pair<Trigger, Conclusion>> all;
        spec.for_each_trigger(op, [&](const Trigger& t) { all.emplace_back(t, spec.resolve(op, t)); });
        if (report.passive.count(info.name)) {
            for (const auto& [t1, c1] : all) {
                if (c1.step && has_y(c1.term)) return false;
                for (const auto& [t2, c2] : all)
                    if (t1.s == t2.s && !(c1 == c2)) return false;
            }
            continue;
        }
        auto it = report.active.find(info.name);
        if (it == report.active.end()) return false;
        const int j = it->second;
        const auto jj = static_cast<std::size_t>(j - 1);
        for (const auto& [t1, c1] : all) {
            if (t1.in_W(j)) {
                if (!c1.step || c1.state != t1.succ[jj]) return false;
                const auto& k = c1.term.kids();
                if (c1.term.head() != info.name || static_cast<int>(k.size()) != info.arity) return false;
                for (int i = 1; i <= info.arity; ++i) {
                    const Term& ki = k[static_cast<std::size_t>(i - 1)];
                    if (!ki.is_var() || ki.head() != (i == j ? "y" : "x") + std::to_string(i)) return false;
                }
                continue;
            }
            if (c1.step) {
                for (const auto& v : variables(c1.term)) {
                    auto [kind, k] = rule_var(v);
                    if (kind == 'y' || k == j) return false;
                }
            }
            for (const auto& [t2, c2] : all)
                if (!t2.in_W(j) && t1.succ[jj] == t2.succ[jj] && !(c1 == c2)) return false;
        }
    }
    return true;
}

// ---- reader-writer extension ----

NotCool::NotCool(CoolReport r)
    : Error("specification is not cool" +
            (r.violations.empty() ? std::string() : ": " + r.violations.front().op + ", " + to_string(r.violations.front().reason))),
      report(std::move(r)) {}

RWSpec derive_rw(const StatefulSpec& spec) {
    CoolReport rep = check_cool(spec);
    if (!rep.cool) throw NotCool(std::move(rep));
    RWSpec rw;
    rw.spec = std::make_shared<const StatefulSpec>(spec);
    rw.sigma = spec.signature();
    rw.sigma.literalKinds.insert(LiteralKind::State);
    rw.sigma.add({"$run", {Sort::Reader}, Sort::Writer, true});
    rw.sigma.add({"$ret", {}, Sort::Writer, true});
    rw.sigma.add({"$emit", {Sort::Writer}, Sort::Writer, true});
    const auto S = spec.states.size();
    rw.receiving.assign(spec.ops.size(), 0);
    rw.passiveOut.resize(spec.ops.size());
    rw.activeOut.resize(spec.ops.size());
    for (int op = 0; op < static_cast<int>(spec.ops.size()); ++op) {
        const OpInfo& info = spec.ops[static_cast<std::size_t>(op)];
        Trigger t;
        t.succ.assign(static_cast<std::size_t>(info.arity), 0);
        if (rep.passive.count(info.name)) {
            for (std::size_t s = 0; s < S; ++s) {
                t.s = static_cast<StateId>(s);
                rw.passiveOut[static_cast<std::size_t>(op)].push_back(spec.resolve(op, t));
            }
            continue;
        }
        const int j = rep.active.at(info.name);
        rw.receiving[static_cast<std::size_t>(op)] = j;
        std::vector<Sort> args(static_cast<std::size_t>(info.arity), Sort::Reader);
        args[static_cast<std::size_t>(j - 1)] = Sort::Writer;
        rw.sigma.add({info.name + "~", args, Sort::Writer});
        for (std::size_t s2 = 0; s2 < S; ++s2) {
            t.s = 0;
            t.succ[static_cast<std::size_t>(j - 1)] = static_cast<StateId>(s2);
            rw.activeOut[static_cast<std::size_t>(op)].push_back(spec.resolve(op, t));
        }
    }
    return rw;
}

std::string rw_to_json(const RWSpec& rw) {
    const StatefulSpec& spec = *rw.spec;
    json doc;
    json sig = json::array();
    for (const auto& o : rw.sigma.ops()) {
        json args = json::array();
        for (Sort s : o.args) args.push_back(to_string(s));
        sig.push_back({{"name", o.name}, {"args", args}, {"result", to_string(o.result)}, {"stateIndexed", o.labelled}});
    }
    doc["signature"] = sig;
    auto concl = [&](const Conclusion& c) {
        json j;
        j["kind"] = c.step ? "step" : "stop";
        if (c.step) j["term"] = rw_str(c.term);
        j["state"] = spec.states[static_cast<std::size_t>(c.state)];
        return j;
    };
    json passive = json::array(), active = json::array();
    for (std::size_t op = 0; op < spec.ops.size(); ++op) {
        const std::string& name = spec.ops[op].name;
        if (rw.receiving[op] == 0) {
            for (std::size_t s = 0; s < spec.states.size(); ++s)
                passive.push_back({{"op", name}, {"s", spec.states[s]}, {"o", concl(rw.passiveOut[op][s])}});
        } else {
            for (std::size_t s = 0; s < spec.states.size(); ++s)
                for (std::size_t s2 = 0; s2 < spec.states.size(); ++s2)
                    active.push_back({{"op", name},
                                      {"j", rw.receiving[op]},
                                      {"s", spec.states[s]},
                                      {"s'", spec.states[s2]},
                                      {"o", concl(rw.activeOut[op][s2])}});
        }
    }
    doc["passive"] = passive;
    doc["active"] = active;
    return doc.dump(2);
}

Term rw_run(const RWSpec& rw, const Term& p, StateId s) { return Term::op("$run", {p}, Sort::Writer, rw.state_name(s)); }
Term rw_ret(const RWSpec& rw, StateId s) { return Term::op("$ret", {}, Sort::Writer, rw.state_name(s)); }
Term rw_emit(const RWSpec& rw, StateId s, const Term& c) { return Term::op("$emit", {c}, Sort::Writer, rw.state_name(s)); }

std::string rw_str(const Term& t) {
    if (t.is_var()) return t.head();
    if (t.head() == "$run") return "[" + rw_str(t.kids()[0]) + "]@" + t.label();
    if (t.head() == "$ret") return "ret@" + t.label();
    if (t.head() == "$emit") return t.label() + "." + rw_str(t.kids()[0]);
    std::string out = t.head();
    if (!t.label().empty()) out += "@" + t.label();
    if (!t.kids().empty()) {
        out += "(";
        for (std::size_t i = 0; i < t.kids().size(); ++i) out += (i ? ", " : "") + rw_str(t.kids()[i]);
        out += ")";
    }
    return out;
}

Term rw_reader_step(const RWSpec& rw, const Term& p, StateId s) {
    const int op = rw.spec->op_index(p.head());
    if (op < 0) throw SpecError("unknown reader operator " + p.head());
    const int j = rw.receiving[static_cast<std::size_t>(op)];
    if (j == 0) {
        const Conclusion& o = rw.passiveOut[static_cast<std::size_t>(op)][static_cast<std::size_t>(s)];
        if (!o.step) return rw_ret(rw, o.state);
        return rw_emit(rw, o.state, rw_run(rw, substitute(o.term, x_bindings(p.kids())), o.state));
    }
    std::vector<Term> kids = p.kids();
    kids[static_cast<std::size_t>(j - 1)] = rw_run(rw, kids[static_cast<std::size_t>(j - 1)], s);
    return Term::op(p.head() + "~", std::move(kids), Sort::Writer);
}

RWStep rw_writer_step(const RWSpec& rw, const Term& c) {
    const std::string& h = c.head();
    if (h == "$run") return RWStep::silent(rw_reader_step(rw, c.kids()[0], rw.spec->state_id(c.label())));
    if (h == "$ret") return RWStep::done(rw.spec->state_id(c.label()));
    if (h == "$emit") return RWStep::output(c.kids()[0], rw.spec->state_id(c.label()));
    if (h.empty() || h.back() != '~') throw SpecError("not a writer: " + rw_str(c));
    const int op = rw.spec->op_index(h.substr(0, h.size() - 1));
    const int j = op < 0 ? 0 : rw.receiving[static_cast<std::size_t>(op)];
    if (j == 0) throw SpecError("not a writer: " + rw_str(c));
    const auto jj = static_cast<std::size_t>(j - 1);
    RWStep inner = rw_writer_step(rw, c.kids()[jj]);
    if (inner.kind != StepKind::Done) {
        std::vector<Term> kids = c.kids();
        kids[jj] = std::move(inner.next);
        Term next = c.with_kids(std::move(kids));
        return inner.kind == StepKind::Silent ? RWStep::silent(std::move(next)) : RWStep::output(std::move(next), inner.state);
    }
    const Conclusion& o = rw.activeOut[static_cast<std::size_t>(op)][static_cast<std::size_t>(inner.state)];
    if (!o.step) return RWStep::done(o.state);
    Term t = substitute(o.term, x_bindings(c.kids(), j));
    return RWStep::output(rw_run(rw, t, o.state), o.state);
}

WeakClosure<Term, StateId> rw_weak_closure(const RWSpec& rw, const Term& c, std::size_t fuel, Level mode) {
    return weak_closure<Term, StateId, TermHash>(c, fuel, mode,
                                                 [&](const Term& w) { return std::vector<RWStep>{rw_writer_step(rw, w)}; });
}

StateTrace rw_trace(const RWSpec& rw, const Term& c, std::size_t fuel, std::size_t silentCap) {
    StateTrace tr;
    Term cur = c;
    std::size_t silent = 0;
    while (tr.emitted.size() < fuel) {
        RWStep st = rw_writer_step(rw, cur);
        ++tr.steps;
        switch (st.kind) {
            case StepKind::Silent:
                if (++silent > silentCap) {
                    tr.stalled = true;
                    return tr;
                }
                cur = std::move(st.next);
                break;
            case StepKind::Output:
                silent = 0;
                tr.emitted.push_back(st.state);
                cur = std::move(st.next);
                break;
            case StepKind::Done:
                tr.finished = true;
                tr.final = st.state;
                return tr;
        }
    }
    return tr;
}

StateTrace rw_trace(const RWSpec& rw, const Term& p, StateId s, std::size_t fuel, std::size_t silentCap) {
    return rw_trace(rw, rw_reader_step(rw, p, s), fuel, silentCap);
}

PreservationReport verify_preservation(const StatefulSpec& spec, const std::vector<Term>& terms,
                                       const std::vector<StateId>& states, std::size_t fuel, Exec exec) {
    const RWSpec rw = derive_rw(spec);
    PreservationReport rep;
    const std::size_t ns = states.size();
    const std::size_t total = terms.size() * ns;
    rep.checked = total;
    if (total == 0) return rep;
    // 0 agree finished, 1 agree cut, 2 mismatch
    std::vector<std::uint8_t> verdict(total);
    auto one = [&](std::size_t i) {
        const Term& p = terms[i / ns];
        const StateId s = states[i % ns];
        StateTrace a = l_trace(spec, p, s, fuel);
        StateTrace b = rw_trace(rw, p, s, fuel);
        if (a.finished && b.finished && a == b)
            verdict[i] = 0;
        else if (!a.finished && !b.finished && !b.stalled && a.emitted == b.emitted)
            verdict[i] = 1;
        else
            verdict[i] = 2;
    };
    if (exec == Exec::Parallel) {
        const long long n = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic, 16)
        for (long long i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < total; ++i) one(i);
    }
    for (std::size_t i = 0; i < total; ++i) {
        if (verdict[i] == 0)
            ++rep.agreeFinished;
        else if (verdict[i] == 1)
            ++rep.agreeCut;
        else {
            const Term& p = terms[i / ns];
            const StateId s = states[i % ns];
            rep.mismatches.push_back({p, s, l_trace(spec, p, s, fuel), rw_trace(rw, p, s, fuel)});
        }
    }
    return rep;
}

// ---- generators ----

namespace {
int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Linear in its variables: each variable from `pool` is used at most once,
// which keeps runs of generated specs from growing terms exponentially.
Term random_conclusion_term(std::mt19937_64& rng, const StatefulSpec& spec, std::vector<std::string>& pool, int depth) {
    std::vector<int> constants;
    for (int i = 0; i < static_cast<int>(spec.ops.size()); ++i)
        if (spec.ops[static_cast<std::size_t>(i)].arity == 0) constants.push_back(i);
    bool leaf = depth <= 1 || uniform(rng, 0, 2) == 0;
    if (leaf) {
        if (!pool.empty() && uniform(rng, 0, 2) > 0) {
            std::size_t k = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pool.size()) - 1));
            std::string v = pool[k];
            pool.erase(pool.begin() + static_cast<long>(k));
            return Term::var(v);
        }
        const auto& c = spec.ops[static_cast<std::size_t>(constants[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(constants.size()) - 1))])];
        return Term::op(c.name);
    }
    const auto& f = spec.ops[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(spec.ops.size()) - 1))];
    std::vector<Term> kids;
    for (int i = 0; i < f.arity; ++i) kids.push_back(random_conclusion_term(rng, spec, pool, depth - 1));
    return Term::op(f.name, std::move(kids));
}

ConclusionSchema random_conclusion(std::mt19937_64& rng, const StatefulSpec& spec, std::vector<std::string> pool, int depth) {
    ConclusionSchema c;
    c.step = uniform(rng, 0, 1) == 1;
    c.state = {StateRef::Kind::Literal, uniform(rng, 0, static_cast<int>(spec.states.size()) - 1)};
    if (c.step) c.term = random_conclusion_term(rng, spec, pool, depth);
    return c;
}
}  // namespace

StatefulSpec random_cool_spec(std::mt19937_64& rng, const RandomSpecConfig& cfg) {
    StatefulSpec spec;
    const int S = uniform(rng, 1, std::max(1, cfg.maxStates));
    for (int i = 0; i < S; ++i) spec.add_state("s" + std::to_string(i));
    const int nOps = uniform(rng, 2, std::max(2, cfg.maxOps));
    for (int i = 0; i < nOps; ++i) {
        int arity = i == 0 ? 0 : uniform(rng, 0, cfg.maxArity);
        spec.add_op((arity == 0 ? "k" : "f") + std::to_string(i), arity);
    }
    for (int op = 0; op < nOps; ++op) {
        const int n = spec.ops[static_cast<std::size_t>(op)].arity;
        std::vector<std::string> xs;
        for (int i = 1; i <= n; ++i) xs.push_back("x" + std::to_string(i));
        const bool active = n > 0 && uniform(rng, 0, 1) == 1;
        if (!active) {
            for (int s = 0; s < S; ++s) {
                Rule r;
                r.op = op;
                r.trigger.membership.assign(static_cast<std::size_t>(n), '*');
                r.trigger.s = s;
                r.trigger.succ.assign(static_cast<std::size_t>(n), -1);
                r.conclusion = random_conclusion(rng, spec, xs, cfg.conclusionDepth);
                spec.add_rule(std::move(r));
            }
            continue;
        }
        const int j = uniform(rng, 1, n);
        Rule patience;
        patience.op = op;
        patience.trigger.membership.assign(static_cast<std::size_t>(n), '*');
        patience.trigger.membership[static_cast<std::size_t>(j - 1)] = 'w';
        patience.trigger.succ.assign(static_cast<std::size_t>(n), -1);
        patience.conclusion.step = true;
        patience.conclusion.term = patience_term(spec.ops[static_cast<std::size_t>(op)], j);
        patience.conclusion.state = {StateRef::Kind::Succ, j};
        spec.add_rule(std::move(patience));
        std::vector<std::string> others;
        for (int i = 1; i <= n; ++i)
            if (i != j) others.push_back("x" + std::to_string(i));
        for (int s2 = 0; s2 < S; ++s2) {
            Rule r;
            r.op = op;
            r.trigger.membership.assign(static_cast<std::size_t>(n), '*');
            r.trigger.membership[static_cast<std::size_t>(j - 1)] = 'b';
            r.trigger.succ.assign(static_cast<std::size_t>(n), -1);
            r.trigger.succ[static_cast<std::size_t>(j - 1)] = s2;
            r.conclusion = random_conclusion(rng, spec, others, cfg.conclusionDepth);
            spec.add_rule(std::move(r));
        }
    }
    spec.validate();
    return spec;
}

Term random_term(std::mt19937_64& rng, const StatefulSpec& spec, int maxDepth) {
    std::vector<std::string> none;
    std::vector<int> pick;
    for (int i = 0; i < static_cast<int>(spec.ops.size()); ++i)
        if (maxDepth > 1 || spec.ops[static_cast<std::size_t>(i)].arity == 0) pick.push_back(i);
    if (pick.empty()) throw SpecError("specification has no constants");
    const auto& f = spec.ops[static_cast<std::size_t>(pick[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pick.size()) - 1))])];
    std::vector<Term> kids;
    for (int i = 0; i < f.arity; ++i) kids.push_back(random_term(rng, spec, uniform(rng, 1, maxDepth - 1)));
    return Term::op(f.name, std::move(kids));
}

std::vector<Term> enumerate_terms(const StatefulSpec& spec, int maxDepth, std::size_t limit) {
    std::vector<Term> upto;  // all terms of depth <= d, grown level by level
    for (const auto& o : spec.ops)
        if (o.arity == 0) upto.push_back(Term::op(o.name));
    for (int d = 2; d <= maxDepth; ++d) {
        const std::vector<Term> prev = upto;
        for (const auto& o : spec.ops) {
            if (o.arity == 0) continue;
            std::vector<std::size_t> idx(static_cast<std::size_t>(o.arity), 0);
            if (prev.empty()) break;
            while (true) {
                std::vector<Term> kids;
                int deepest = 0;
                for (auto i : idx) {
                    kids.push_back(prev[i]);
                    deepest = std::max(deepest, prev[i].depth());
                }
                if (deepest == d - 1) {
                    upto.push_back(Term::op(o.name, std::move(kids)));
                    if (upto.size() > limit) throw SpecError("term enumeration exceeds the limit");
                }
                std::size_t k = 0;
                while (k < idx.size() && ++idx[k] == prev.size()) idx[k++] = 0;
                if (k == idx.size()) break;
            }
        }
    }
    return upto;
}

}  // namespace rwsos::sos
