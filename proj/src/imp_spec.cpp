#include "rwsos/imp_spec.hpp"

#include <cctype>
#include <deque>
#include <unordered_set>

namespace rwsos::impspec {

using sos::ConclusionSchema;
using sos::Rule;
using sos::StateId;
using sos::StateRef;
using sos::TriggerSchema;

namespace {

std::string state_name(const Config& cfg, const std::vector<int>& vals) {
    std::string out;
    for (std::size_t i = 0; i < cfg.vars.size(); ++i) {
        if (i) out += ",";
        out += cfg.vars[i] + "=" + std::to_string(vals[i]);
    }
    return out;
}

std::vector<std::vector<int>> all_valuations(const Config& cfg) {
    std::vector<std::vector<int>> out;
    std::vector<int> v(cfg.vars.size(), 0);
    while (true) {
        out.push_back(v);
        std::size_t i = v.size();
        while (i > 0 && ++v[i - 1] == cfg.domain) v[--i] = 0;
        if (i == 0) break;
    }
    return out;
}

Rule stop_rule(int op, int arity, StateId s, StateId target) {
    Rule r;
    r.op = op;
    r.trigger = TriggerSchema{std::string(static_cast<std::size_t>(arity), '*'), s, std::vector<StateId>(static_cast<std::size_t>(arity), -1)};
    r.conclusion.step = false;
    r.conclusion.state = {StateRef::Kind::Literal, target};
    return r;
}

VarStore parse_store(const std::string& name) {
    VarStore out;
    std::size_t pos = 0;
    while (pos < name.size()) {
        std::size_t eq = name.find('=', pos);
        std::size_t comma = name.find(',', eq);
        if (comma == std::string::npos) comma = name.size();
        out.put(name.substr(pos, eq - pos), std::stoll(name.substr(eq + 1, comma - eq - 1)));
        pos = comma + 1;
    }
    return out;
}

}  // namespace

ImpSpec imp_as_spec(const Config& cfg) {
    if (cfg.vars.empty() || cfg.domain < 1) throw Error("imp spec needs at least one variable and one value");
    for (const auto& x : cfg.vars)
        for (char c : x)
            if (!std::isalnum(static_cast<unsigned char>(c))) throw Error("variable names must be alphanumeric: " + x);
    ImpSpec is;
    is.cfg = cfg;
    auto& spec = is.spec;
    const auto vals = all_valuations(cfg);
    for (const auto& v : vals) spec.add_state(state_name(cfg, v));
    const int S = static_cast<int>(vals.size());
    auto index_of = [&](std::vector<int> v) { return spec.state_id(state_name(cfg, v)); };

    const int skip = spec.add_op("skip", 0);
    {
        Rule r = stop_rule(skip, 0, -1, 0);
        r.conclusion.state = {StateRef::Kind::Source, 0};
        spec.add_rule(std::move(r));
    }
    for (std::size_t xi = 0; xi < cfg.vars.size(); ++xi) {
        const std::string& x = cfg.vars[xi];
        for (int c = 0; c < cfg.domain; ++c) {
            int op = spec.add_op("asg_" + x + "_" + std::to_string(c), 0);
            for (int s = 0; s < S; ++s) {
                auto v = vals[static_cast<std::size_t>(s)];
                v[xi] = c;
                spec.add_rule(stop_rule(op, 0, s, index_of(v)));
            }
        }
        for (std::size_t yi = 0; yi < cfg.vars.size(); ++yi) {
            if (yi == xi) continue;
            int op = spec.add_op("asg_" + x + "_" + cfg.vars[yi], 0);
            for (int s = 0; s < S; ++s) {
                auto v = vals[static_cast<std::size_t>(s)];
                v[xi] = v[yi];
                spec.add_rule(stop_rule(op, 0, s, index_of(v)));
            }
        }
    }
    std::vector<int> whiles;
    for (const auto& x : cfg.vars) whiles.push_back(spec.add_op("while_" + x, 1));
    const int seq = spec.add_op("seq", 2);
    for (std::size_t xi = 0; xi < cfg.vars.size(); ++xi) {
        const int op = whiles[xi];
        const Term unfold = Term::op("seq", {Term::var("x1"), Term::op(spec.ops[static_cast<std::size_t>(op)].name, {Term::var("x1")})});
        for (int s = 0; s < S; ++s) {
            if (vals[static_cast<std::size_t>(s)][xi] == 0) {
                spec.add_rule(stop_rule(op, 1, s, s));
            } else {
                Rule r = stop_rule(op, 1, s, s);
                r.conclusion = ConclusionSchema{true, unfold, {StateRef::Kind::Source, 0}};
                spec.add_rule(std::move(r));
            }
        }
    }
    {
        Rule patience;
        patience.op = seq;
        patience.trigger = TriggerSchema{"w*", -1, {-1, -1}};
        patience.conclusion = ConclusionSchema{true, Term::op("seq", {Term::var("y1"), Term::var("x2")}), {StateRef::Kind::Succ, 1}};
        spec.add_rule(std::move(patience));
        Rule done;
        done.op = seq;
        done.trigger = TriggerSchema{"b*", -1, {-1, -1}};
        done.conclusion = ConclusionSchema{true, Term::var("x2"), {StateRef::Kind::Succ, 1}};
        spec.add_rule(std::move(done));
    }
    spec.validate();
    for (const auto& name : is.spec.states) is.stores.push_back(parse_store(name));
    return is;
}

StateId ImpSpec::state_of(const VarStore& s) const {
    std::vector<int> v;
    for (const auto& x : cfg.vars) {
        std::int64_t n = s.get(x);
        if (n < 0 || n >= cfg.domain) throw Error("value of " + x + " outside the finite domain");
        v.push_back(static_cast<int>(n));
    }
    return spec.state_id(state_name(cfg, v));
}

VarStore ImpSpec::store_of(StateId s) const {
    if (s < 0 || static_cast<std::size_t>(s) >= stores.size()) throw Error("no such state: " + std::to_string(s));
    return stores[static_cast<std::size_t>(s)];
}

std::vector<StateId> ImpSpec::all_states() const {
    std::vector<StateId> v;
    for (int i = 0; i < static_cast<int>(spec.states.size()); ++i) v.push_back(i);
    return v;
}

imp::Prog ImpSpec::to_imp(const Term& t) const {
    using imp::Prog;
    const std::string& h = t.head();
    if (h == "skip") return Prog::skip();
    if (h == "seq") return Prog::seq(to_imp(t.kids()[0]), to_imp(t.kids()[1]));
    if (h.rfind("while_", 0) == 0) return Prog::while_(ImpExpr::var(h.substr(6)), to_imp(t.kids()[0]));
    if (h.rfind("asg_", 0) == 0) {
        std::size_t us = h.find('_', 4);
        std::string x = h.substr(4, us - 4), rhs = h.substr(us + 1);
        if (std::isdigit(static_cast<unsigned char>(rhs[0]))) return Prog::assign(x, ImpExpr::constant(std::stoll(rhs)));
        return Prog::assign(x, ImpExpr::var(rhs));
    }
    throw Error("not a term of the imp specification: " + t.str());
}

Term ImpSpec::from_imp(const imp::Prog& p) const {
    using K = imp::Prog::Kind;
    auto known = [&](const std::string& name) {
        if (spec.op_index(name) < 0) throw Error("program outside the finite fragment: " + p.str());
        return name;
    };
    switch (p.kind()) {
        case K::Skip: return Term::op("skip");
        case K::Seq: return Term::op("seq", {from_imp(p.left()), from_imp(p.right())});
        case K::While:
            if (p.expr().kind() != ImpExpr::Kind::Var) break;
            return Term::op(known("while_" + p.expr().name()), {from_imp(p.body())});
        case K::Assign:
            if (p.expr().kind() == ImpExpr::Kind::Const)
                return Term::op(known("asg_" + p.var() + "_" + std::to_string(p.expr().value())));
            if (p.expr().kind() == ImpExpr::Kind::Var) return Term::op(known("asg_" + p.var() + "_" + p.expr().name()));
            break;
    }
    throw Error("program outside the finite fragment: " + p.str());
}

imp2::Writer ImpSpec::to_imp2(const Term& w) const {
    using imp2::Writer;
    const std::string& h = w.head();
    if (h == "$run") return Writer::run(to_imp(w.kids()[0]), store_of(spec.state_id(w.label())));
    if (h == "$ret") return Writer::ret(store_of(spec.state_id(w.label())));
    if (h == "$emit") return Writer::emit(store_of(spec.state_id(w.label())), to_imp2(w.kids()[0]));
    if (h == "seq~") return Writer::seq(to_imp2(w.kids()[0]), to_imp(w.kids()[1]));
    throw Error("not a writer of the derived imp semantics: " + sos::rw_str(w));
}

namespace {

struct RootResult {
    std::size_t readerSteps = 0, writerSteps = 0;
    bool truncated = false;
    std::vector<std::string> disagreements;
};

const char* kind_name(StepKind k) {
    switch (k) {
        case StepKind::Silent: return "silent";
        case StepKind::Output: return "output";
        case StepKind::Done: return "done";
    }
    return "?";
}

RootResult check_root(const ImpSpec& is, const sos::RWSpec& rw, const Term& p, StateId s, std::size_t cap) {
    RootResult r;
    const std::string where = p.str() + " from " + is.spec.states[static_cast<std::size_t>(s)];
    Term c = sos::rw_reader_step(rw, p, s);
    imp2::Writer hc = imp2::reader_step(is.to_imp(p), is.store_of(s));
    ++r.readerSteps;
    if (is.to_imp2(c) != hc) {
        r.disagreements.push_back(where + ": reader step gives " + sos::rw_str(c) + " vs " + hc.str());
        return r;
    }
    std::unordered_set<Term, TermHash> seen{c};
    std::deque<Term> todo{c};
    while (!todo.empty()) {
        if (r.writerSteps >= cap) {
            r.truncated = true;
            break;
        }
        Term w = todo.front();
        todo.pop_front();
        sos::RWStep st = sos::rw_writer_step(rw, w);
        imp2::WriterStep ht = imp2::writer_step(is.to_imp2(w));
        ++r.writerSteps;
        bool same = st.kind == ht.kind;
        if (same && st.kind != StepKind::Silent) same = is.store_of(st.state) == ht.state;
        if (same && st.kind != StepKind::Done) same = is.to_imp2(st.next) == ht.next;
        if (!same) {
            r.disagreements.push_back(where + ": writer " + sos::rw_str(w) + " steps " + kind_name(st.kind) +
                                      " in the derived semantics but " + kind_name(ht.kind) + " by hand");
            continue;
        }
        if (st.kind != StepKind::Done && seen.insert(st.next).second) todo.push_back(st.next);
    }
    return r;
}

}  // namespace

FidelityReport check_fidelity(const ImpSpec& is, const std::vector<Term>& terms, const std::vector<StateId>& states,
                              std::size_t capPerRoot, Exec exec) {
    const sos::RWSpec rw = sos::derive_rw(is.spec);
    const std::size_t ns = states.size();
    const std::size_t total = terms.size() * ns;
    std::vector<RootResult> results(total);
    auto one = [&](std::size_t i) { results[i] = check_root(is, rw, terms[i / ns], states[i % ns], capPerRoot); };
    if (exec == Exec::Parallel) {
        const long long n = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic, 64)
        for (long long i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < total; ++i) one(i);
    }
    FidelityReport rep;
    rep.roots = total;
    for (auto& r : results) {
        rep.readerSteps += r.readerSteps;
        rep.writerSteps += r.writerSteps;
        if (r.truncated) ++rep.truncatedRoots;
        for (auto& d : r.disagreements) rep.disagreements.push_back(std::move(d));
    }
    return rep;
}

}  // namespace rwsos::impspec
