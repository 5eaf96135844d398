// Acceptance run: one PASS/FAIL line per criterion, each under its time
// limit. Exit status 0 iff every criterion passes.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rwsos/equivalence.hpp"
#include "rwsos/imp2.hpp"
#include "rwsos/imp_spec.hpp"
#include "rwsos/parse.hpp"
#include "rwsos/ref2.hpp"
#include "rwsos/sos.hpp"

using namespace rwsos;

namespace {

struct Result {
    bool pass = true;
    std::string detail;
};

struct Fail {
    std::ostringstream os;
    bool any = false;
    template <class T>
    Fail& operator<<(const T& v) {
        any = true;
        os << v;
        return *this;
    }
};

// ---- 1: rule conformance ----

Result c1() {
    using imp::Prog;
    using imp2::Writer;
    using parse::imp2_writer;
    using parse::imp_program;
    using parse::var_store;
    int total = 0, ok = 0;
    std::string bad;
    auto check = [&](bool cond, const std::string& what) {
        ++total;
        if (cond) ++ok;
        else if (bad.empty()) bad = what;
    };
    auto imp_cont = [&](const char* p, const char* s, const char* p2, const char* s2) {
        auto r = imp::step(imp_program(p), var_store(s));
        check(!r.done && r.next == imp_program(p2) && r.store == var_store(s2), std::string("imp ") + p);
    };
    auto imp_done = [&](const char* p, const char* s, const char* s2) {
        auto r = imp::step(imp_program(p), var_store(s));
        check(r.done && r.store == var_store(s2), std::string("imp ") + p);
    };
    // the while language
    imp_done("skip", "x=1", "x=1");
    imp_done("x := x + 1", "x=1", "x=2");
    imp_done("y := x * 3 - 1", "x=2,y=7", "x=2,y=5");
    imp_done("while x { x := x - 1 }", "x=0,y=4", "y=4");
    imp_cont("while x { x := x - 1 }", "x=2", "x := x - 1 ; while x { x := x - 1 }", "x=2");
    imp_cont("x := 1 ; y := 2", "x=5", "y := 2", "x=1");
    imp_cont("(while x { x := x - 1 }) ; y := 2", "x=1", "(x := x - 1 ; while x { x := x - 1 }) ; y := 2", "x=1");
    imp_cont("skip ; skip", "y=3", "skip", "y=3");

    auto rd = [&](const char* p, const char* s, const char* c) {
        check(imp2::reader_step(imp_program(p), var_store(s)) == imp2_writer(c), std::string("reader ") + p);
    };
    rd("x := 1 ; y := 2", "x=0", "[x := 1]@{x=0} ; y := 2");
    rd("skip", "x=3", "ret@{x=3}");
    rd("x := x + 4", "x=1", "ret@{x=5}");
    rd("while x { x := x - 1 }", "y=1", "ret@{y=1}");
    rd("while x { x := x - 1 }", "x=2", "{x=2}.[x := x - 1 ; while x { x := x - 1 }]@{x=2}");

    using imp2::WriterStep;
    auto wr = [&](const char* c, const WriterStep& expect) {
        WriterStep got = imp2::writer_step(imp2_writer(c));
        bool same = got.kind == expect.kind && (got.kind == StepKind::Silent || got.state == expect.state) &&
                    (got.kind == StepKind::Done || got.next == expect.next);
        check(same, std::string("writer ") + c);
    };
    wr("[x := 1 ; y := 2]@{x=3}", WriterStep::silent(imp2_writer("[x := 1]@{x=3} ; y := 2")));
    wr("[skip]@{x=3}", WriterStep::silent(imp2_writer("ret@{x=3}")));
    wr("ret@{x=3}", WriterStep::done(var_store("x=3")));
    wr("{x=1}.ret@{x=2}", WriterStep::output(imp2_writer("ret@{x=2}"), var_store("x=1")));
    wr("({x=1}.ret@{x=2}) ; skip", WriterStep::output(imp2_writer("ret@{x=2} ; skip"), var_store("x=1")));
    wr("[skip]@{y=1} ; x := 1", WriterStep::silent(imp2_writer("ret@{y=1} ; x := 1")));
    wr("ret@{x=4} ; y := x", WriterStep::output(imp2_writer("[y := x]@{x=4}"), var_store("x=4")));
    wr("(ret@{x=4} ; skip) ; y := x", WriterStep::output(imp2_writer("[skip]@{x=4} ; y := x"), var_store("x=4")));
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " golden cases" + (bad.empty() ? "" : ", first miss: " + bad)};
}

// ---- 2: the flagship pair ----

std::vector<VarStore> seeded_stores(std::uint64_t seed, std::size_t n, std::int64_t lo, std::int64_t hi) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> val(lo, hi);
    std::vector<VarStore> out;
    for (std::size_t i = 0; i < n; ++i) {
        VarStore s;
        s.put("x", val(rng));
        s.put("y", val(rng));
        out.push_back(s);
    }
    return out;
}

Result c2() {
    auto p = parse::imp_program("x := 1 ; x := 2"), q = parse::imp_program("x := 1 ; x := x + 1");
    auto stores = seeded_stores(2, 100, -5, 5);
    std::size_t equal = 0;
    for (const auto& s : stores) {
        auto a = imp::trace(p, s, 1000), b = imp::trace(q, s, 1000);
        if (a.finished && b.finished && a == b) ++equal;
    }
    auto v = imp::check_resumption_bisim({{p, q}}, stores, 2);
    bool pass = equal == stores.size() && !v.holds && v.depth == 2;
    return {pass, "trace-equal on " + std::to_string(equal) + "/100 stores; resumption check " +
                      (v.holds ? std::string("held") : "fails at depth " + std::to_string(v.depth) + " with observer store " + v.store.str())};
}

// ---- 3: semantics preservation ----

Result c3() {
    imp::EnumConfig cfg;
    cfg.leaves = {parse::imp_program("skip"), parse::imp_program("x := x - 1"), parse::imp_program("y := x + 2")};
    cfg.guards = {ImpExpr::var("x"), ImpExpr::var("y")};
    cfg.maxDepth = 4;
    auto programs = imp::enumerate_programs(cfg);
    auto stores = seeded_stores(3, 20, 0, 2);
    auto t0 = std::chrono::steady_clock::now();
    auto rep = imp2::verify_embedding(programs, stores, 30);
    const double embedSecs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::mt19937_64 rng(3);
    std::size_t checked = 0, mism = 0, fin = 0;
    for (int i = 0; i < 200; ++i) {
        sos::RandomSpecConfig sc;
        sc.maxStates = 3;
        sc.maxArity = 2;
        auto spec = sos::random_cool_spec(rng, sc);
        std::vector<Term> terms;
        for (int k = 0; k < 50; ++k) terms.push_back(sos::random_term(rng, spec, 4));
        std::vector<sos::StateId> states;
        for (int s = 0; s < static_cast<int>(spec.states.size()); ++s) states.push_back(s);
        auto pr = sos::verify_preservation(spec, terms, states, 60);
        checked += pr.checked;
        fin += pr.agreeFinished;
        mism += pr.mismatches.size();
    }
    std::ostringstream d;
    d << programs.size() << " programs x 20 stores: " << rep.mismatches.size() << " mismatches (" << rep.agreeFinished
      << " finished, " << rep.agreeCut << " cut, " << rep.fuelAsymmetric << " fuel-asymmetric, " << rep.overflow
      << " overflow, " << static_cast<int>(embedSecs) << " s); 200 specs x 50 terms: " << checked << " runs, " << fin << " finished, " << mism << " mismatches";
    return {rep.mismatches.empty() && mism == 0, d.str()};
}

// ---- 4: congruence ----

struct Pools {
    std::vector<std::vector<imp::Prog>> groups;  // equal observations on the fingerprint stores
};

Pools imp_pools(std::mt19937_64& rng, equiv::Flavor flavor, const std::vector<VarStore>& stores) {
    imp::RandomConfig rc;
    rc.maxConst = 2;
    rc.exprDepth = 1;
    std::map<std::string, std::vector<imp::Prog>> byPrint;
    std::set<std::string> seen;
    for (int i = 0; i < 3000; ++i) {
        auto p = imp::random_program(rng, rc, 3);
        if (!seen.insert(p.str()).second) continue;
        std::string fp;
        bool ok = true;
        for (const auto& s : stores) {
            auto t = imp::trace(p, s, 200);
            if (!t.finished) {
                ok = false;
                break;
            }
            switch (flavor) {
                case equiv::Flavor::Trace: fp += t.str(); break;
                case equiv::Flavor::Cost: fp += std::to_string(t.emitted.size()) + t.final.str(); break;
                case equiv::Flavor::Termination: fp += t.final.str(); break;
            }
            fp += "|";
        }
        if (ok) byPrint[fp].push_back(p);
    }
    Pools out;
    for (auto& [k, v] : byPrint) out.groups.push_back(std::move(v));
    return out;
}

template <class T>
std::pair<T, T> pick_pair(std::mt19937_64& rng, const std::vector<std::vector<T>>& groups, std::size_t& distinct) {
    // prefer groups with two or more members
    std::vector<std::size_t> big;
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (groups[i].size() > 1) big.push_back(i);
    const bool useBig = !big.empty() && std::bernoulli_distribution(0.85)(rng);
    const auto& g = useBig ? groups[big[std::uniform_int_distribution<std::size_t>(0, big.size() - 1)(rng)]]
                           : groups[std::uniform_int_distribution<std::size_t>(0, groups.size() - 1)(rng)];
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    std::size_t i = pick(rng), j = pick(rng);
    if (g.size() > 1)
        while (j == i) j = pick(rng);
    if (i != j) ++distinct;
    return {g[i], g[j]};
}

Result c4() {
    const equiv::Flavor flavors[] = {equiv::Flavor::Trace, equiv::Flavor::Cost, equiv::Flavor::Termination};
    std::ostringstream d;
    bool pass = true;
    std::uint64_t seed = 4;
    for (auto flavor : flavors) {
        std::mt19937_64 rng(seed++);
        auto stores = seeded_stores(seed, 6, 0, 2);
        Pools pools = imp_pools(rng, flavor, stores);
        imp::RandomConfig rc;
        rc.maxConst = 2;
        rc.exprDepth = 1;
        std::size_t run = 0, skipped = 0, violations = 0, distinct = 0, attempts = 0;
        while (run < 1000 && attempts < 20000) {
            ++attempts;
            auto ctors = equiv::imp2_constructors(imp::random_program(rng, rc, 2), {"x", "y"});
            const auto& ctor = ctors[std::uniform_int_distribution<std::size_t>(0, ctors.size() - 1)(rng)];
            std::vector<std::pair<imp::Prog, imp::Prog>> comps;
            for (int k = 0; k < ctor.arity; ++k) comps.push_back(pick_pair(rng, pools.groups, distinct));
            auto r = equiv::congruence_trial(ctor, comps, stores, 300, flavor);
            if (r.status == equiv::TrialStatus::Skipped) {
                ++skipped;
                continue;
            }
            ++run;
            if (r.status == equiv::TrialStatus::Violation) {
                ++violations;
                if (pass) d << "[violation " << r.detail << "] ";
                pass = false;
            }
        }
        // stateful specifications, both semantics
        std::size_t srun = 0, sskipped = 0, sviol = 0, sdistinct = 0;
        attempts = 0;
        while (srun < 1000 && attempts < 20000) {
            sos::RandomSpecConfig sc;
            sc.maxStates = 3;
            sc.maxArity = 2;
            auto spec = sos::random_cool_spec(rng, sc);
            auto rw = sos::derive_rw(spec);
            std::map<std::string, std::vector<Term>> byPrint;
            std::set<std::string> seen;
            for (int i = 0; i < 60; ++i) {
                Term t = sos::random_term(rng, spec, 3);
                if (!seen.insert(t.str()).second) continue;
                std::string fp;
                bool ok = true;
                for (int s = 0; s < static_cast<int>(spec.states.size()) && ok; ++s) {
                    auto tr = sos::l_trace(spec, t, s, 60);
                    ok = tr.finished;
                    switch (flavor) {
                        case equiv::Flavor::Trace: fp += tr.str(spec); break;
                        case equiv::Flavor::Cost: fp += std::to_string(tr.emitted.size()) + ":" + std::to_string(tr.final); break;
                        case equiv::Flavor::Termination: fp += std::to_string(tr.final); break;
                    }
                    fp += "|";
                }
                if (ok) byPrint[fp].push_back(t);
            }
            std::vector<std::vector<Term>> groups;
            for (auto& [k, v] : byPrint) groups.push_back(std::move(v));
            if (groups.empty()) continue;
            for (int trial = 0; trial < 10 && srun < 1000; ++trial) {
                ++attempts;
                int op = std::uniform_int_distribution<int>(0, static_cast<int>(spec.ops.size()) - 1)(rng);
                std::vector<std::pair<Term, Term>> comps;
                for (int k = 0; k < spec.ops[static_cast<std::size_t>(op)].arity; ++k)
                    comps.push_back(pick_pair(rng, groups, sdistinct));
                auto sem = trial % 2 ? equiv::SpecSemantics::RW : equiv::SpecSemantics::L;
                auto r = equiv::congruence_trial(spec, &rw, sem, op, comps, 60, flavor);
                if (r.status == equiv::TrialStatus::Skipped) {
                    ++sskipped;
                    continue;
                }
                ++srun;
                if (r.status == equiv::TrialStatus::Violation) {
                    ++sviol;
                    if (pass) d << "[violation " << r.detail << "] ";
                    pass = false;
                }
            }
        }
        if (run < 1000 || srun < 1000) pass = false;
        d << equiv::to_string(flavor) << ": imp2 " << run << " trials (" << distinct << " distinct component pairs, " << skipped
          << " skipped, " << violations << " violations), specs " << srun << " trials (" << sdistinct << " distinct, "
          << sskipped << " skipped, " << sviol << " violations); ";
    }
    return {pass, d.str()};
}

// ---- 5: cool checker ----

sos::StatefulSpec rebuild(const sos::StatefulSpec& src, const std::function<bool(sos::Rule&)>& edit) {
    sos::StatefulSpec out;
    for (const auto& s : src.states) out.add_state(s);
    for (const auto& op : src.ops) out.add_op(op.name, op.arity);
    for (const auto& op : src.ops)
        for (int ri : op.rules) {
            sos::Rule r = src.rules[static_cast<std::size_t>(ri)];
            if (edit(r)) out.add_rule(std::move(r));
        }
    return out;
}

Result c5() {
    auto is = impspec::imp_as_spec();
    auto rep = sos::check_cool(is.spec);
    std::ostringstream d;
    bool pass = rep.cool && rep.active.size() == 1 && rep.active.count("seq") && rep.active.at("seq") == 1;
    d << "imp spec " << (rep.cool ? "cool" : "not cool") << " with seq at j=" << (rep.active.count("seq") ? rep.active.at("seq") : 0);
    const int seq = is.spec.op_index("seq");
    auto is_done_rule = [&](const sos::Rule& r) { return r.op == seq && r.trigger.membership == "b*"; };
    struct Mut {
        const char* name;
        sos::CoolReason expect;
        std::function<bool(sos::Rule&)> edit;
    };
    std::vector<Mut> muts = {
        {"conclusion mentions x1", sos::CoolReason::MentionsReceiving,
         [&](sos::Rule& r) {
             if (is_done_rule(r)) r.conclusion.term = Term::op("seq", {Term::var("x1"), Term::var("x2")});
             return true;
         }},
        {"state depends on the source", sos::CoolReason::DependsOnSource,
         [&](sos::Rule& r) {
             if (is_done_rule(r)) r.conclusion.state = {sos::StateRef::Kind::Source, 0};
             return true;
         }},
        {"patience rule missing", sos::CoolReason::PatienceMissing,
         [&](sos::Rule& r) {
             if (r.op == seq && r.trigger.membership == "w*") return false;
             if (is_done_rule(r)) r.trigger.membership = "**";
             return true;
         }},
    };
    for (const auto& m : muts) {
        auto spec = rebuild(is.spec, m.edit);
        auto r = sos::check_cool(spec);
        bool found = false;
        for (const auto& v : r.violations) found = found || (v.op == "seq" && v.reason == m.expect);
        bool ok = !r.cool && found;
        pass = pass && ok;
        d << "; " << m.name << ": " << (r.cool ? "accepted" : "rejected");
        if (!r.violations.empty()) d << " (" << sos::to_string(r.violations.front().reason) << ")";
    }
    return {pass, d.str()};
}

// ---- 6: derived reader-writer fidelity ----

Result c6() {
    impspec::Config cfg;
    cfg.vars = {"x", "y"};
    cfg.domain = 4;
    auto is = impspec::imp_as_spec(cfg);
    auto terms = sos::enumerate_terms(is.spec, 3);
    std::vector<sos::StateId> states = is.all_states();
    std::mt19937_64 rng(6);
    std::shuffle(states.begin(), states.end(), rng);
    states.resize(10);
    auto rep = impspec::check_fidelity(is, terms, states);
    std::ostringstream d;
    d << terms.size() << " terms x 10 states: " << rep.readerSteps << " reader steps, " << rep.writerSteps
      << " writer steps, " << rep.truncatedRoots << " truncated roots, " << rep.disagreements.size() << " disagreements";
    if (!rep.disagreements.empty()) d << " (first: " << rep.disagreements.front() << ")";
    return {rep.disagreements.empty() && rep.truncatedRoots == 0, d.str()};
}

// ---- 7: similarity oracles ----

Result c7() {
    using namespace equiv;
    std::mt19937_64 rng(7);
    std::size_t bad = 0, pairs = 0;
    std::string first;
    for (int i = 0; i < 300; ++i) {
        RandomSystemConfig cfg;
        cfg.maxWriters = 4;
        auto sys = random_system(rng, cfg);
        auto costs = cost_map(sys);
        auto ters = ter_map(sys);
        for (Flavor f : {Flavor::Trace, Flavor::Cost, Flavor::Termination}) {
            auto K = greatest_simulation(sys, f).kernel();
            auto wequal = [&](int a, int b) {
                switch (f) {
                    case Flavor::Trace: return trace_equiv_finite(sys, 'w', a, b).equal;
                    case Flavor::Cost: return costs[static_cast<std::size_t>(a)] == costs[static_cast<std::size_t>(b)];
                    case Flavor::Termination: return ters[static_cast<std::size_t>(a)] == ters[static_cast<std::size_t>(b)];
                }
                return false;
            };
            for (std::size_t a = 0; a < sys.nw(); ++a)
                for (std::size_t b = 0; b < sys.nw(); ++b) {
                    ++pairs;
                    if (K.w.get(a, b) != wequal(static_cast<int>(a), static_cast<int>(b))) {
                        ++bad;
                        if (first.empty()) first = "writers, flavour " + to_string(f);
                    }
                }
            for (std::size_t a = 0; a < sys.nr(); ++a)
                for (std::size_t b = 0; b < sys.nr(); ++b) {
                    bool eq = true;
                    for (std::size_t s = 0; s < sys.ns(); ++s)
                        eq = eq && wequal(sys.readerMap[a][s], sys.readerMap[b][s]);
                    ++pairs;
                    if (K.r.get(a, b) != eq) {
                        ++bad;
                        if (first.empty()) first = "readers, flavour " + to_string(f);
                    }
                }
        }
    }
    std::size_t bfBad = 0, bfSystems = 0;
    for (int i = 0; i < 300; ++i) {
        RandomSystemConfig cfg;
        cfg.maxWriters = 3;
        cfg.deterministic = i % 2 == 0;
        auto sys = random_system(rng, cfg);
        for (Flavor f : {Flavor::Trace, Flavor::Cost, Flavor::Termination}) {
            ++bfSystems;
            if (!(brute_force_similarity(sys, f, 3) == greatest_simulation(sys, f))) ++bfBad;
        }
    }
    std::ostringstream d;
    d << "300 systems: " << bad << " kernel/map disagreements over " << pairs << " pairs";
    if (!first.empty()) d << " (first in " << first << ")";
    d << "; brute force: " << bfBad << " disagreements over " << bfSystems << " system/flavour runs";
    return {bad == 0 && bfBad == 0, d.str()};
}

// ---- 8: weakening ----

Result c8() {
    using namespace equiv;
    std::mt19937_64 rng(8);
    std::size_t falses = 0, holding = 0;
    for (int i = 0; i < 500; ++i) {
        RandomSystemConfig cfg;
        cfg.deterministic = i % 3 == 0;
        cfg.maxWriters = 5;
        auto sys = random_system(rng, cfg);
        Flavor f = static_cast<Flavor>(i % 3);
        Relation2 R;
        switch (i % 4) {
            case 0: R = random_relation(rng, sys, 0.5); break;
            case 1: R = greatest_simulation(sys, f); break;
            case 2: R = Relation2::identity(sys); break;
            default: {
                // similarity with one extra writer pair
                R = greatest_simulation(sys, f);
                std::uniform_int_distribution<std::size_t> w(0, sys.nw() - 1);
                R.w.set(w(rng), w(rng));
            }
        }
        if (check_simulation(sys, R, f).holds) ++holding;
        if (!check_weakening_property(sys, R, f)) ++falses;
    }
    return {falses == 0, "500 triples: " + std::to_string(falses) + " falses (" + std::to_string(holding) +
                             " relations were simulations)"};
}

// ---- 9, 10: the higher-order store language ----

std::vector<ref2::Reader> never_stuck_readers() {
    std::vector<ref2::Reader> out;
    for (const char* t : {"skip", "#0 := 1", "#1 := 2 ; #0 := 3", "while 0 { skip }", "#0 := proc { skip }",
                          "#0 := &(expr 5)", "expr 1", "proc { #0 := 1 }", "if 1 { skip } else { #0 := 1 }"})
        out.push_back(parse::ref2_reader(t));
    return out;
}

ref2::Relation skipping(const std::vector<ref2::Reader>& ps, const std::vector<ref2::Store>& sample) {
    using namespace ref2;
    Relation T;
    for (const auto& p : ps) {
        T.add_reader(Reader::seq(Reader::skip(), p), p);
        for (const auto& s : sample) {
            Writer c = *reader_step(p, s).next;
            T.add_writer(Writer::seq(Writer::run(Reader::skip(), s), p), c);
            T.add_writer(Writer::seq(Writer::ret(s), p), c);
            T.add_writer(Writer::run(p, s), c);
        }
    }
    return T;
}

Result c9() {
    using namespace ref2;
    const auto sample = default_sample();
    std::ostringstream d;
    bool pass = true;
    const auto ps = never_stuck_readers();

    Relation T = skipping(ps, sample);
    auto v1 = check_ho_termination_sim(T, sample), v2 = check_ho_termination_sim(T.converse(), sample);
    bool tOk = v1.status == Status::Holds && v2.status == Status::Holds;
    pass = pass && tOk;
    d << "skip-prefixing: " << to_string(v1.status) << "/" << to_string(v2.status);

    Relation Q = T;
    const Expr l = Expr::loc(0);
    for (const auto& [p, q] : T.readers()) {
        Q.add_reader(Reader::assign(l, Reader::proc(p)), Reader::assign(l, Reader::proc(q)));
        for (const auto& s : sample) {
            Q.add_writer(Writer::assign(l, Writer::run(Reader::proc(p), s)), Writer::assign(l, Writer::run(Reader::proc(q), s)));
            Q.add_writer(Writer::assign(l, Writer::ret_val(Value::reader(p), s)),
                         Writer::assign(l, Writer::ret_val(Value::reader(q), s)));
        }
    }
    auto vq = check_ho_termination_sim(Q, sample);
    pass = pass && vq.status == Status::Holds;
    d << "; proc-assignment: " << to_string(vq.status);

    auto a = parse::ref2_reader("#0 := 2 ; #0 := expr (!#0 (+) 2)"), b = parse::ref2_reader("#0 := 2 ; #0 := expr (!#0 (+) !#0)");
    Store s0{{0, Value::integer(0)}};
    auto ra = run(a, s0, 1000), rb = run(b, s0, 1000);
    const Store want{{0, Value::integer(4)}};
    bool runs = ra.kind == Outcome::Kind::Store && rb.kind == Outcome::Kind::Store && ra.store == want && rb.store == want;
    auto cab = certify_pair(a, b, sample), cba = certify_pair(b, a, sample);
    bool dbl = runs && cab.status == Status::Holds && cba.status == Status::Holds;
    pass = pass && dbl;
    d << "; doubling: " << ra.str() << " / " << rb.str() << ", " << to_string(cab.status) << "/" << to_string(cba.status);

    auto lp = parse::ref2_reader("#0 := proc { expr !#0 } ; expr !#0"), lq = parse::ref2_reader("#0 := proc { while 1 { skip } } ; expr !#0");
    Relation L;
    L.add_reader(lp, lq);
    auto av = check_adequacy(L.symmetrized(), sample);
    bool landin = av.status == Status::Holds && av.certifiedDivergent == 2 * 2 * sample.size();
    pass = pass && landin;
    d << "; landin: " << to_string(av.status) << " with " << av.certifiedDivergent << " certified divergent runs";

    std::size_t tried = 0;
    bool ctxOk = true;
    for (std::size_t i = 0; i < 3; ++i) {
        auto r = ctx_refute(Reader::seq(Reader::skip(), ps[i]), ps[i], 4, sample);
        tried += r.contextsTried;
        ctxOk = ctxOk && !r.found && r.inconclusive == 0;
    }
    auto loop = ctx_refute(Reader::skip(), parse::ref2_reader("while 1 { skip }"), 4, sample);
    bool loopOk = loop.found && loop.context.str() == "·";
    pass = pass && ctxOk && loopOk;
    d << "; ctx: skip-prefixing " << (ctxOk ? "not refuted" : "REFUTED") << " (" << tried << " contexts), skip vs loop "
      << (loop.found ? "refuted by " + loop.context.str() : std::string("not refuted"));
    return {pass, d.str()};
}

Result c10() {
    using namespace ref2;
    const auto sample = default_sample();
    const std::vector<std::pair<const char*, const char*>> set = {
        {"skip ; skip", "skip"},
        {"skip ; #0 := 1", "#0 := 1"},
        {"#0 := 2 ; #0 := expr (!#0 (+) 2)", "#0 := 2 ; #0 := expr (!#0 (+) !#0)"},
        {"#0 := proc { expr !#0 } ; expr !#0", "#0 := proc { while 1 { skip } } ; expr !#0"},
        {"if 1 { skip } else { while 1 { skip } }", "skip"},
        {"while 0 { #0 := 5 }", "skip"},
        {"#0 := proc { skip ; skip }", "#0 := proc { skip }"},
        {"expr 1", "skip ; expr 1"},
        {"#1 := 1 ; #1 := 2", "#1 := 2"},
        {"skip", "while 1 { skip }"},
    };
    std::size_t certified = 0, refuted = 0, contexts = 0, inconclusive = 0;
    std::ostringstream d;
    for (const auto& [pt, qt] : set) {
        auto p = parse::ref2_reader(pt), q = parse::ref2_reader(qt);
        auto a = certify_pair(p, q, sample), b = certify_pair(q, p, sample);
        if (a.status != Status::Holds || b.status != Status::Holds) continue;
        ++certified;
        auto r = ctx_refute(p, q, 4, sample);
        contexts += r.contextsTried;
        inconclusive += r.inconclusive;
        if (r.found) {
            ++refuted;
            d << "[refuted " << pt << " vs " << qt << " by " << r.context.str() << "] ";
        }
    }
    d << certified << "/" << set.size() << " pairs certified both ways, " << refuted << " refutations over " << contexts
      << " contexts (" << inconclusive << " inconclusive halting checks)";
    return {refuted == 0 && certified >= 8, d.str()};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        double limit;
        Result (*fn)();
    };
    const Criterion all[] = {{1, 1, c1},   {2, 1, c2},   {3, 120, c3}, {4, 120, c4},  {5, 1, c5},
                             {6, 10, c6},  {7, 60, c7},  {8, 30, c8},  {9, 120, c9}, {10, 300, c10}};
    int failures = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = c.fn();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool inTime = secs < c.limit;
        bool ok = r.pass && inTime;
        if (!ok) ++failures;
        std::printf("criterion %d: %s (%.2f s, limit %.0f s%s) %s\n", c.id, ok ? "PASS" : "FAIL", secs, c.limit,
                    inTime ? "" : ", over time", r.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
