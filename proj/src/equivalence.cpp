#include "rwsos/equivalence.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include <json.hpp>

namespace rwsos::equiv {

using nlohmann::json;

std::string to_string(Flavor f) {
    switch (f) {
        case Flavor::Trace: return "trace";
        case Flavor::Cost: return "cost";
        case Flavor::Termination: return "ter";
    }
    return "?";
}

Flavor flavor_from_string(const std::string& s) {
    if (s == "trace" || s == "trc") return Flavor::Trace;
    if (s == "cost" || s == "cst") return Flavor::Cost;
    if (s == "ter" || s == "termination") return Flavor::Termination;
    throw Error("unknown flavour: " + s + " (expected trace, cost or ter)");
}

std::string to_string(TrialStatus s) {
    switch (s) {
        case TrialStatus::Pass: return "pass";
        case TrialStatus::Violation: return "violation";
        case TrialStatus::Skipped: return "skipped";
    }
    return "?";
}

// ---- systems ----

bool FiniteRWSystem::deterministic() const {
    for (const auto& steps : writerMap)
        if (steps.size() != 1) return false;
    return true;
}

void FiniteRWSystem::validate() const {
    auto inside = [](int v, std::size_t n) { return v >= 0 && static_cast<std::size_t>(v) < n; };
    if (readerMap.size() != nr()) throw CarrierError("reader map must have one row per reader");
    for (std::size_t p = 0; p < nr(); ++p) {
        if (readerMap[p].size() != ns()) throw CarrierError("reader " + readers[p] + " is not defined on every state");
        for (int w : readerMap[p])
            if (!inside(w, nw())) throw CarrierError("reader " + readers[p] + " maps to an unknown writer");
    }
    if (writerMap.size() != nw()) throw CarrierError("writer map must have one entry per writer");
    for (std::size_t c = 0; c < nw(); ++c)
        for (const auto& st : writerMap[c]) {
            if (st.kind != StepKind::Done && !inside(st.next, nw()))
                throw CarrierError("writer " + writers[c] + " steps to an unknown writer");
            if (st.kind != StepKind::Silent && !inside(st.state, ns()))
                throw CarrierError("writer " + writers[c] + " mentions an unknown state");
        }
}

namespace {
int find_name(const std::vector<std::string>& names, const std::string& n, const char* what) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) throw CarrierError(std::string("unknown ") + what + ": " + n);
    return static_cast<int>(it - names.begin());
}
}  // namespace

int FiniteRWSystem::reader_id(const std::string& n) const { return find_name(readers, n, "reader"); }
int FiniteRWSystem::writer_id(const std::string& n) const { return find_name(writers, n, "writer"); }
int FiniteRWSystem::state_id(const std::string& n) const { return find_name(states, n, "state"); }

std::string FiniteRWSystem::step_str(int w, const FStep& st) const {
    const std::string& c = writers[static_cast<std::size_t>(w)];
    switch (st.kind) {
        case StepKind::Silent: return c + " -> " + writers[static_cast<std::size_t>(st.next)];
        case StepKind::Output:
            return c + " -" + states[static_cast<std::size_t>(st.state)] + "-> " + writers[static_cast<std::size_t>(st.next)];
        case StepKind::Done: return c + " done " + states[static_cast<std::size_t>(st.state)];
    }
    return c;
}

// ---- relations ----

std::size_t BitRel::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool BitRel::subset_of(const BitRel& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] && !o.bits_[i]) return false;
    return true;
}

BitRel BitRel::converse() const {
    BitRel out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out.set(j, i, get(i, j));
    return out;
}

BitRel BitRel::meet(const BitRel& o) const {
    BitRel out(n_);
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] & o.bits_[i];
    return out;
}

Relation2 Relation2::empty(const FiniteRWSystem& sys) { return {BitRel(sys.nr()), BitRel(sys.nw())}; }
Relation2 Relation2::full(const FiniteRWSystem& sys) { return {BitRel(sys.nr(), true), BitRel(sys.nw(), true)}; }
Relation2 Relation2::identity(const FiniteRWSystem& sys) {
    Relation2 R = empty(sys);
    for (std::size_t i = 0; i < sys.nr(); ++i) R.r.set(i, i);
    for (std::size_t i = 0; i < sys.nw(); ++i) R.w.set(i, i);
    return R;
}

// ---- weak transitions ----

WeakTables weak_tables(const FiniteRWSystem& sys, Level level) {
    const std::size_t n = sys.nw();
    WeakTables t;
    t.level = level;
    t.reach.resize(n);
    t.outputs.resize(n);
    t.terminations.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<char> seen(n, 0);
        std::deque<int> work{static_cast<int>(c)};
        seen[c] = 1;
        std::set<std::pair<int, int>> outs;
        std::set<int> terms;
        while (!work.empty()) {
            int d = work.front();
            work.pop_front();
            t.reach[c].push_back(d);
            for (const auto& st : sys.writerMap[static_cast<std::size_t>(d)]) {
                if (st.kind == StepKind::Done) {
                    terms.insert(st.state);
                    continue;
                }
                if (st.kind == StepKind::Output) outs.insert({st.state, st.next});
                bool follow = st.kind == StepKind::Silent || level == Level::Two;
                if (follow && !seen[static_cast<std::size_t>(st.next)]) {
                    seen[static_cast<std::size_t>(st.next)] = 1;
                    work.push_back(st.next);
                }
            }
        }
        t.outputs[c].assign(outs.begin(), outs.end());
        t.terminations[c].assign(terms.begin(), terms.end());
    }
    return t;
}

namespace {

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

// One writer pair against the flavour's clauses. On failure fills the
// verdict and returns false.
bool writer_pair_ok(const FiniteRWSystem& sys, const BitRel& Rw, Flavor flavor, const WeakTables& T, LeftSide left,
                    int c, int d, Verdict* v) {
    const bool ter = flavor == Flavor::Termination;
    auto fail = [&](int clause, int state, std::string witness) {
        if (v) {
            v->holds = false;
            v->sort = 'w';
            v->left = c;
            v->right = d;
            v->clause = clause;
            v->state = state;
            v->witness = std::move(witness);
        }
        return false;
    };
    auto matched_silent = [&](int c2) {
        for (int d2 : T.reach[static_cast<std::size_t>(d)])
            if (Rw.get(static_cast<std::size_t>(c2), static_cast<std::size_t>(d2))) return true;
        return false;
    };
    auto matched_output = [&](int s, int c2) {
        for (const auto& [s2, d2] : T.outputs[static_cast<std::size_t>(d)])
            if ((flavor == Flavor::Cost || s2 == s) && Rw.get(static_cast<std::size_t>(c2), static_cast<std::size_t>(d2)))
                return true;
        return false;
    };
    auto matched_done = [&](int s) { return contains(T.terminations[static_cast<std::size_t>(d)], s); };
    const std::string& cn = sys.writers[static_cast<std::size_t>(c)];
    auto wn = [&](int x) { return sys.writers[static_cast<std::size_t>(x)]; };
    auto sn = [&](int x) { return sys.states[static_cast<std::size_t>(x)]; };

    if (left == LeftSide::Strong) {
        for (const auto& st : sys.writerMap[static_cast<std::size_t>(c)]) {
            switch (st.kind) {
                case StepKind::Silent:
                    if (!matched_silent(st.next)) return fail(2, -1, sys.step_str(c, st));
                    break;
                case StepKind::Output:
                    if (ter ? !matched_silent(st.next) : !matched_output(st.state, st.next))
                        return fail(ter ? 2 : 3, st.state, sys.step_str(c, st));
                    break;
                case StepKind::Done:
                    if (!matched_done(st.state)) return fail(ter ? 3 : 4, st.state, sys.step_str(c, st));
                    break;
            }
        }
        return true;
    }
    const char* arrow = ter ? " =2=> " : " =1=> ";
    for (int c2 : T.reach[static_cast<std::size_t>(c)])
        if (!matched_silent(c2)) return fail(2, -1, cn + arrow + wn(c2));
    if (!ter)
        for (const auto& [s, c2] : T.outputs[static_cast<std::size_t>(c)])
            if (!matched_output(s, c2)) return fail(3, s, cn + " =1," + sn(s) + "=> " + wn(c2));
    for (int s : T.terminations[static_cast<std::size_t>(c)])
        if (!matched_done(s)) return fail(ter ? 3 : 4, s, cn + " converges to " + sn(s));
    return true;
}

bool reader_pair_ok(const FiniteRWSystem& sys, const BitRel& Rw, int p, int q, Verdict* v) {
    for (std::size_t s = 0; s < sys.ns(); ++s) {
        int c = sys.readerMap[static_cast<std::size_t>(p)][s];
        int d = sys.readerMap[static_cast<std::size_t>(q)][s];
        if (!Rw.get(static_cast<std::size_t>(c), static_cast<std::size_t>(d))) {
            if (v) {
                v->holds = false;
                v->sort = 'r';
                v->left = p;
                v->right = q;
                v->clause = 1;
                v->state = static_cast<int>(s);
                v->witness = sys.readers[static_cast<std::size_t>(p)] + "," + sys.states[s] + " -> " +
                             sys.writers[static_cast<std::size_t>(c)];
            }
            return false;
        }
    }
    return true;
}

BitRel largest_reader_part(const FiniteRWSystem& sys, const BitRel& Rw) {
    BitRel Rr(sys.nr());
    for (std::size_t p = 0; p < sys.nr(); ++p)
        for (std::size_t q = 0; q < sys.nr(); ++q)
            Rr.set(p, q, reader_pair_ok(sys, Rw, static_cast<int>(p), static_cast<int>(q), nullptr));
    return Rr;
}

void check_carriers(const FiniteRWSystem& sys, const Relation2& R) {
    if (R.r.n() != sys.nr() || R.w.n() != sys.nw()) throw CarrierError("relation does not match the system's carriers");
}

}  // namespace

Verdict check_simulation(const FiniteRWSystem& sys, const Relation2& R, Flavor flavor, const WeakTables& T,
                         LeftSide left) {
    check_carriers(sys, R);
    Verdict v;
    for (std::size_t p = 0; p < sys.nr(); ++p)
        for (std::size_t q = 0; q < sys.nr(); ++q) {
            if (!R.r.get(p, q)) continue;
            ++v.pairsChecked;
            if (!reader_pair_ok(sys, R.w, static_cast<int>(p), static_cast<int>(q), &v)) return v;
        }
    for (std::size_t c = 0; c < sys.nw(); ++c)
        for (std::size_t d = 0; d < sys.nw(); ++d) {
            if (!R.w.get(c, d)) continue;
            ++v.pairsChecked;
            if (!writer_pair_ok(sys, R.w, flavor, T, left, static_cast<int>(c), static_cast<int>(d), &v)) return v;
        }
    return v;
}

Verdict check_simulation(const FiniteRWSystem& sys, const Relation2& R, Flavor flavor, LeftSide left) {
    return check_simulation(sys, R, flavor, weak_tables(sys, level_of(flavor)), left);
}

Relation2 greatest_simulation(const FiniteRWSystem& sys, Flavor flavor, Exec exec) {
    const WeakTables T = weak_tables(sys, level_of(flavor));
    const std::size_t n = sys.nw();
    BitRel Rw(n, true);
    if (exec == Exec::Serial) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d)
                    if (Rw.get(c, d) && !writer_pair_ok(sys, Rw, flavor, T, LeftSide::Strong, static_cast<int>(c),
                                                        static_cast<int>(d), nullptr)) {
                        Rw.set(c, d, false);
                        changed = true;
                    }
        }
    } else {
        bool changed = true;
        while (changed) {
            BitRel next = Rw;
            const long long rows = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
            for (long long c = 0; c < rows; ++c)
                for (std::size_t d = 0; d < n; ++d)
                    if (Rw.get(static_cast<std::size_t>(c), d) &&
                        !writer_pair_ok(sys, Rw, flavor, T, LeftSide::Strong, static_cast<int>(c), static_cast<int>(d),
                                        nullptr))
                        next.set(static_cast<std::size_t>(c), d, false);
            changed = !(next == Rw);
            Rw = std::move(next);
        }
    }
    return {largest_reader_part(sys, Rw), Rw};
}

Relation2 brute_force_similarity(const FiniteRWSystem& sys, Flavor flavor, std::size_t maxWriters) {
    const std::size_t n = sys.nw();
    if (n > maxWriters) throw Error("brute force similarity is limited to " + std::to_string(maxWriters) + " writers");
    const WeakTables T = weak_tables(sys, level_of(flavor));
    Relation2 uni = Relation2::empty(sys);
    const std::uint64_t total = std::uint64_t{1} << (n * n);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        BitRel Rw(n);
        for (std::size_t i = 0; i < n * n; ++i)
            if ((mask >> i) & 1u) Rw.set(i / n, i % n);
        bool ok = true;
        for (std::size_t c = 0; c < n && ok; ++c)
            for (std::size_t d = 0; d < n && ok; ++d)
                if (Rw.get(c, d))
                    ok = writer_pair_ok(sys, Rw, flavor, T, LeftSide::Strong, static_cast<int>(c), static_cast<int>(d),
                                        nullptr);
        if (!ok) continue;
        BitRel Rr = largest_reader_part(sys, Rw);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (Rw.get(i, j)) uni.w.set(i, j);
        for (std::size_t i = 0; i < sys.nr(); ++i)
            for (std::size_t j = 0; j < sys.nr(); ++j)
                if (Rr.get(i, j)) uni.r.set(i, j);
    }
    return uni;
}

bool check_weakening_property(const FiniteRWSystem& sys, const Relation2& R, Flavor flavor) {
    const WeakTables T = weak_tables(sys, level_of(flavor));
    return check_simulation(sys, R, flavor, T, LeftSide::Strong).holds ==
           check_simulation(sys, R, flavor, T, LeftSide::Weak).holds;
}

// ---- semantic maps ----

namespace {

struct Obs {
    enum class Kind : std::uint8_t { Emit, Done, Livelock };
    Kind kind;
    int state = -1;
    int next = -1;
};

void require_deterministic(const FiniteRWSystem& sys) {
    if (!sys.deterministic()) throw NondeterministicSystem("trace maps need exactly one step per writer");
}

// Skips silent steps; more than |W| in a row means a silent cycle.
Obs observe(const FiniteRWSystem& sys, int c) {
    for (std::size_t k = 0; k <= sys.nw(); ++k) {
        const FStep& st = sys.writerMap[static_cast<std::size_t>(c)][0];
        if (st.kind == StepKind::Output) return {Obs::Kind::Emit, st.state, st.next};
        if (st.kind == StepKind::Done) return {Obs::Kind::Done, st.state, -1};
        c = st.next;
    }
    return {Obs::Kind::Livelock, -1, -1};
}

std::string obs_str(const FiniteRWSystem& sys, const Obs& o) {
    switch (o.kind) {
        case Obs::Kind::Emit: return "emits " + sys.states[static_cast<std::size_t>(o.state)];
        case Obs::Kind::Done: return "terminates in " + sys.states[static_cast<std::size_t>(o.state)];
        case Obs::Kind::Livelock: return "livelocks";
    }
    return "?";
}

TraceEq writers_equal(const FiniteRWSystem& sys, int a, int b) {
    TraceEq out;
    std::set<std::pair<int, int>> seen;
    for (std::size_t pos = 1;; ++pos) {
        if (!seen.insert({a, b}).second) return out;
        Obs oa = observe(sys, a), ob = observe(sys, b);
        if (oa.kind != ob.kind || oa.state != ob.state) {
            out.equal = false;
            out.position = pos;
            out.detail = "observation " + std::to_string(pos) + ": left " + obs_str(sys, oa) + ", right " + obs_str(sys, ob);
            return out;
        }
        if (oa.kind != Obs::Kind::Emit) return out;
        a = oa.next;
        b = ob.next;
    }
}

}  // namespace

TraceEq trace_equiv_finite(const FiniteRWSystem& sys, char sort, int a, int b) {
    require_deterministic(sys);
    if (sort == 'w') return writers_equal(sys, a, b);
    if (sort != 'r') throw Error("sort must be 'r' or 'w'");
    for (std::size_t s = 0; s < sys.ns(); ++s) {
        TraceEq e = writers_equal(sys, sys.readerMap[static_cast<std::size_t>(a)][s], sys.readerMap[static_cast<std::size_t>(b)][s]);
        if (!e.equal) {
            e.state = static_cast<int>(s);
            e.detail = "from " + sys.states[s] + ", " + e.detail;
            return e;
        }
    }
    return {};
}

std::vector<CostObs> cost_map(const FiniteRWSystem& sys) {
    require_deterministic(sys);
    std::vector<CostObs> out(sys.nw());
    for (std::size_t c0 = 0; c0 < sys.nw(); ++c0) {
        std::vector<char> seen(sys.nw(), 0);
        int c = static_cast<int>(c0);
        CostObs& r = out[c0];
        while (true) {
            if (seen[static_cast<std::size_t>(c)]) {
                r = {CostObs::Kind::Infinite, 0, -1};
                break;
            }
            seen[static_cast<std::size_t>(c)] = 1;
            Obs o = observe(sys, c);
            if (o.kind == Obs::Kind::Done) {
                r.kind = CostObs::Kind::Done;
                r.final = o.state;
                break;
            }
            if (o.kind == Obs::Kind::Livelock) {
                r.kind = CostObs::Kind::Livelock;
                break;
            }
            ++r.n;
            c = o.next;
        }
    }
    return out;
}

std::vector<int> ter_map(const FiniteRWSystem& sys) {
    std::vector<int> out;
    for (const auto& c : cost_map(sys)) out.push_back(c.kind == CostObs::Kind::Done ? c.final : -1);
    return out;
}

std::vector<std::string> unroll(const FiniteRWSystem& sys, int w, std::size_t steps) {
    require_deterministic(sys);
    std::vector<std::string> out;
    for (std::size_t k = 0; k < steps; ++k) {
        Obs o = observe(sys, w);
        out.push_back(obs_str(sys, o));
        if (o.kind != Obs::Kind::Emit) break;
        w = o.next;
    }
    return out;
}

// ---- generators ----

FiniteRWSystem random_system(std::mt19937_64& rng, const RandomSystemConfig& cfg) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    FiniteRWSystem sys;
    const int nr = pick(1, cfg.maxReaders), nw = pick(1, cfg.maxWriters), ns = pick(1, cfg.maxStates);
    for (int i = 0; i < nr; ++i) sys.readers.push_back("p" + std::to_string(i));
    for (int i = 0; i < nw; ++i) sys.writers.push_back("c" + std::to_string(i));
    for (int i = 0; i < ns; ++i) sys.states.push_back("s" + std::to_string(i));
    sys.readerMap.assign(static_cast<std::size_t>(nr), std::vector<int>(static_cast<std::size_t>(ns)));
    for (auto& row : sys.readerMap)
        for (int& w : row) w = pick(0, nw - 1);
    auto random_step = [&]() {
        FStep st;
        switch (pick(0, 2)) {
            case 0: st = {StepKind::Silent, pick(0, nw - 1), -1}; break;
            case 1: st = {StepKind::Output, pick(0, nw - 1), pick(0, ns - 1)}; break;
            default: st = {StepKind::Done, -1, pick(0, ns - 1)}; break;
        }
        return st;
    };
    sys.writerMap.resize(static_cast<std::size_t>(nw));
    for (auto& steps : sys.writerMap) {
        const int k = cfg.deterministic ? 1 : pick(0, cfg.maxBranch);
        for (int i = 0; i < k; ++i) {
            FStep st = random_step();
            if (std::find(steps.begin(), steps.end(), st) == steps.end()) steps.push_back(st);
        }
    }
    return sys;
}

Relation2 random_relation(std::mt19937_64& rng, const FiniteRWSystem& sys, double density) {
    std::bernoulli_distribution coin(density);
    Relation2 R = Relation2::empty(sys);
    for (std::size_t i = 0; i < sys.nr(); ++i)
        for (std::size_t j = 0; j < sys.nr(); ++j) R.r.set(i, j, coin(rng));
    for (std::size_t i = 0; i < sys.nw(); ++i)
        for (std::size_t j = 0; j < sys.nw(); ++j) R.w.set(i, j, coin(rng));
    return R;
}

// ---- documents ----

namespace {

json parse_doc(const std::string& document) {
    try {
        return json::parse(document);
    } catch (const json::parse_error& e) {
        throw Error(std::string("malformed JSON: ") + e.what());
    }
}

std::vector<std::string> names(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_array()) throw CarrierError(std::string("missing array \"") + key + "\"");
    std::vector<std::string> out;
    for (const auto& n : doc[key]) {
        std::string s = n.get<std::string>();
        if (std::find(out.begin(), out.end(), s) != out.end()) throw CarrierError("duplicate name " + s);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

FiniteRWSystem load_system(const std::string& document) {
    const json doc = parse_doc(document);
    FiniteRWSystem sys;
    try {
        sys.readers = names(doc, "readers");
        sys.writers = names(doc, "writers");
        sys.states = names(doc, "states");
        sys.readerMap.assign(sys.nr(), std::vector<int>(sys.ns(), -1));
        for (const auto& e : doc.at("readerMap")) {
            int p = sys.reader_id(e.at(0).get<std::string>()), s = sys.state_id(e.at(1).get<std::string>());
            int& cell = sys.readerMap[static_cast<std::size_t>(p)][static_cast<std::size_t>(s)];
            if (cell >= 0) throw CarrierError("reader " + sys.readers[static_cast<std::size_t>(p)] + " mapped twice on " + sys.states[static_cast<std::size_t>(s)]);
            cell = sys.writer_id(e.at(2).get<std::string>());
        }
        sys.writerMap.assign(sys.nw(), {});
        for (const auto& e : doc.at("writerMap")) {
            int c = sys.writer_id(e.at(0).get<std::string>());
            const json& st = e.at(1);
            const std::string kind = st.at("kind").get<std::string>();
            FStep f;
            if (kind == "silent") {
                f = {StepKind::Silent, sys.writer_id(st.at("next").get<std::string>()), -1};
            } else if (kind == "output") {
                f = {StepKind::Output, sys.writer_id(st.at("next").get<std::string>()), sys.state_id(st.at("state").get<std::string>())};
            } else if (kind == "done") {
                f = {StepKind::Done, -1, sys.state_id(st.at("state").get<std::string>())};
            } else {
                throw CarrierError("unknown step kind " + kind);
            }
            auto& steps = sys.writerMap[static_cast<std::size_t>(c)];
            if (std::find(steps.begin(), steps.end(), f) == steps.end()) steps.push_back(f);
        }
    } catch (const json::exception& e) {
        throw CarrierError(std::string("malformed system document: ") + e.what());
    }
    sys.validate();
    return sys;
}

Relation2 load_relation(const FiniteRWSystem& sys, const std::string& document) {
    json doc = parse_doc(document);
    if (doc.contains("relation")) doc = doc["relation"];
    Relation2 R = Relation2::empty(sys);
    try {
        if (doc.contains("r"))
            for (const auto& pr : doc["r"])
                R.r.set(static_cast<std::size_t>(sys.reader_id(pr.at(0).get<std::string>())),
                        static_cast<std::size_t>(sys.reader_id(pr.at(1).get<std::string>())));
        if (doc.contains("w"))
            for (const auto& pr : doc["w"])
                R.w.set(static_cast<std::size_t>(sys.writer_id(pr.at(0).get<std::string>())),
                        static_cast<std::size_t>(sys.writer_id(pr.at(1).get<std::string>())));
    } catch (const json::exception& e) {
        throw CarrierError(std::string("malformed relation document: ") + e.what());
    }
    return R;
}

std::string system_to_json(const FiniteRWSystem& sys) {
    json doc;
    doc["readers"] = sys.readers;
    doc["writers"] = sys.writers;
    doc["states"] = sys.states;
    doc["readerMap"] = json::array();
    for (std::size_t p = 0; p < sys.nr(); ++p)
        for (std::size_t s = 0; s < sys.ns(); ++s)
            doc["readerMap"].push_back({sys.readers[p], sys.states[s], sys.writers[static_cast<std::size_t>(sys.readerMap[p][s])]});
    doc["writerMap"] = json::array();
    for (std::size_t c = 0; c < sys.nw(); ++c)
        for (const auto& st : sys.writerMap[c]) {
            json j;
            switch (st.kind) {
                case StepKind::Silent: j = {{"kind", "silent"}, {"next", sys.writers[static_cast<std::size_t>(st.next)]}}; break;
                case StepKind::Output:
                    j = {{"kind", "output"}, {"next", sys.writers[static_cast<std::size_t>(st.next)]}, {"state", sys.states[static_cast<std::size_t>(st.state)]}};
                    break;
                case StepKind::Done: j = {{"kind", "done"}, {"state", sys.states[static_cast<std::size_t>(st.state)]}}; break;
            }
            doc["writerMap"].push_back({sys.writers[c], j});
        }
    return doc.dump(2);
}

std::string relation_to_json(const FiniteRWSystem& sys, const Relation2& R) {
    json doc = {{"r", json::array()}, {"w", json::array()}};
    for (std::size_t i = 0; i < sys.nr(); ++i)
        for (std::size_t j = 0; j < sys.nr(); ++j)
            if (R.r.get(i, j)) doc["r"].push_back({sys.readers[i], sys.readers[j]});
    for (std::size_t i = 0; i < sys.nw(); ++i)
        for (std::size_t j = 0; j < sys.nw(); ++j)
            if (R.w.get(i, j)) doc["w"].push_back({sys.writers[i], sys.writers[j]});
    return doc.dump(2);
}

// ---- congruence trials ----

std::vector<Imp2Constructor> imp2_constructors(const imp::Prog& r, const std::vector<std::string>& guards) {
    using imp::Prog;
    using imp2::Writer;
    std::vector<Imp2Constructor> out;
    out.push_back({"seq", 2, [](const std::vector<Prog>& ps, const VarStore& s) {
                       return imp2::reader_step(Prog::seq(ps[0], ps[1]), s);
                   }});
    out.push_back({"seq_left", 1, [r](const std::vector<Prog>& ps, const VarStore& s) {
                       return imp2::reader_step(Prog::seq(ps[0], r), s);
                   }});
    out.push_back({"seq_right", 1, [r](const std::vector<Prog>& ps, const VarStore& s) {
                       return imp2::reader_step(Prog::seq(r, ps[0]), s);
                   }});
    for (const auto& x : guards)
        out.push_back({"while_" + x, 1, [x](const std::vector<Prog>& ps, const VarStore& s) {
                           return imp2::reader_step(Prog::while_(ImpExpr::var(x), ps[0]), s);
                       }});
    out.push_back({"emit", 1, [](const std::vector<Prog>& ps, const VarStore& s) {
                       return Writer::emit(s, Writer::run(ps[0], s));
                   }});
    out.push_back({"run_seq", 2, [](const std::vector<Prog>& ps, const VarStore& s) {
                       return Writer::seq(Writer::run(ps[0], s), ps[1]);
                   }});
    return out;
}

TrialResult congruence_trial(const Imp2Constructor& ctor, const std::vector<std::pair<imp::Prog, imp::Prog>>& pairs,
                             const std::vector<VarStore>& stores, std::size_t fuel, Flavor flavor) {
    if (pairs.size() != static_cast<std::size_t>(ctor.arity))
        throw Error(ctor.name + " takes " + std::to_string(ctor.arity) + " components");
    std::vector<imp::Prog> ps, qs;
    for (const auto& [p, q] : pairs) {
        ps.push_back(p);
        qs.push_back(q);
    }
    auto certified_at = [&](const VarStore& s, std::string& why) {
        for (const auto& [p, q] : pairs) {
            imp::TraceResult a = imp::trace(p, s, fuel), b = imp::trace(q, s, fuel);
            if (!a.finished || !b.finished || !imp::same_observation(a, b, flavor)) {
                why = p.str() + " and " + q.str() + " are not certified equivalent from " + s.str();
                return false;
            }
        }
        return true;
    };
    try {
        std::string why;
        for (const auto& s : stores)
            if (!certified_at(s, why)) return {TrialStatus::Skipped, why};
        std::set<VarStore> checked(stores.begin(), stores.end());
        for (const auto& s : stores) {
            imp::TraceResult a = imp2::trace(ctor.build(ps, s), fuel), b = imp2::trace(ctor.build(qs, s), fuel);
            if (!a.finished || !b.finished) return {TrialStatus::Skipped, ctor.name + " composite ran out of fuel from " + s.str()};
            for (const auto* t : {&a, &b}) {
                std::vector<VarStore> visited = t->emitted;
                visited.push_back(t->final);
                for (const auto& v : visited)
                    if (checked.insert(v).second && !certified_at(v, why)) return {TrialStatus::Skipped, why};
            }
            if (!imp::same_observation(a, b, flavor))
                return {TrialStatus::Violation, ctor.name + " from " + s.str() + ": " + a.str() + " vs " + b.str()};
        }
    } catch (const OverflowError& e) {
        return {TrialStatus::Skipped, e.what()};
    }
    return {TrialStatus::Pass, {}};
}

bool same_state_trace(const sos::StateTrace& a, const sos::StateTrace& b, Flavor flavor) {
    if (a.finished != b.finished) return false;
    if (!a.finished) return true;
    switch (flavor) {
        case Flavor::Trace: return a.emitted == b.emitted && a.final == b.final;
        case Flavor::Cost: return a.emitted.size() == b.emitted.size() && a.final == b.final;
        case Flavor::Termination: return a.final == b.final;
    }
    return false;
}

TrialResult congruence_trial(const sos::StatefulSpec& spec, const sos::RWSpec* rw, SpecSemantics sem, int op,
                             const std::vector<std::pair<Term, Term>>& pairs, std::size_t fuel, Flavor flavor) {
    if (sem == SpecSemantics::RW && !rw) throw Error("reader-writer trials need the derived specification");
    const auto& info = spec.ops.at(static_cast<std::size_t>(op));
    if (pairs.size() != static_cast<std::size_t>(info.arity))
        throw Error(info.name + " takes " + std::to_string(info.arity) + " components");
    auto run = [&](const Term& t, sos::StateId s) {
        return sem == SpecSemantics::L ? sos::l_trace(spec, t, s, fuel) : sos::rw_trace(*rw, t, s, fuel);
    };
    auto ok = [](const sos::StateTrace& t) { return t.finished && !t.stalled; };
    std::vector<Term> ps, qs;
    for (const auto& [p, q] : pairs) {
        ps.push_back(p);
        qs.push_back(q);
    }
    const Term lhs = Term::op(info.name, ps), rhs = Term::op(info.name, qs);
    for (sos::StateId s = 0; s < static_cast<sos::StateId>(spec.states.size()); ++s) {
        for (const auto& [p, q] : pairs) {
            sos::StateTrace a = run(p, s), b = run(q, s);
            if (!ok(a) || !ok(b) || !same_state_trace(a, b, flavor))
                return {TrialStatus::Skipped, p.str() + " and " + q.str() + " are not certified equivalent from " + spec.states[static_cast<std::size_t>(s)]};
        }
    }
    for (sos::StateId s = 0; s < static_cast<sos::StateId>(spec.states.size()); ++s) {
        sos::StateTrace a = run(lhs, s), b = run(rhs, s);
        if (!ok(a) || !ok(b)) return {TrialStatus::Skipped, "composite ran out of fuel from " + spec.states[static_cast<std::size_t>(s)]};
        if (!same_state_trace(a, b, flavor))
            return {TrialStatus::Violation, lhs.str() + " vs " + rhs.str() + " from " + spec.states[static_cast<std::size_t>(s)] +
                                                ": " + a.str(spec) + " vs " + b.str(spec)};
    }
    return {TrialStatus::Pass, {}};
}

}  // namespace rwsos::equiv
