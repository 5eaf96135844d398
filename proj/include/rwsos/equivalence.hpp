// Simulation checking on finite reader-writer systems for the trace, cost
// and termination flavours, similarity as a greatest fixpoint, exact trace
// comparison for deterministic systems, and congruence trials.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rwsos/imp2.hpp"
#include "rwsos/sos.hpp"
#include "rwsos/weak.hpp"

namespace rwsos::equiv {

using Flavor = imp::Semantics;
std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string& s);  // trace | cost | ter | termination

struct CarrierError : Error {
    using Error::Error;
};
struct NondeterministicSystem : Error {
    using Error::Error;
};

struct FStep {
    StepKind kind = StepKind::Silent;
    int next = -1;   // Silent, Output
    int state = -1;  // Output, Done
    friend bool operator==(const FStep&, const FStep&) = default;
};

// A finite two-sorted coalgebra: readers map each state to a writer, writers
// have a finite set of steps. Deterministic means one step per writer.
struct FiniteRWSystem {
    std::vector<std::string> readers, writers, states;
    std::vector<std::vector<int>> readerMap;    // [reader][state] -> writer
    std::vector<std::vector<FStep>> writerMap;  // [writer] -> steps

    std::size_t nr() const { return readers.size(); }
    std::size_t nw() const { return writers.size(); }
    std::size_t ns() const { return states.size(); }
    bool deterministic() const;
    void validate() const;  // throws CarrierError
    int reader_id(const std::string& name) const;
    int writer_id(const std::string& name) const;
    int state_id(const std::string& name) const;
    std::string step_str(int w, const FStep& st) const;
};

class BitRel {
public:
    BitRel() = default;
    explicit BitRel(std::size_t n, bool value = false) : n_(n), bits_(n * n, value ? 1 : 0) {}
    std::size_t n() const { return n_; }
    bool get(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool v = true) { bits_[i * n_ + j] = v ? 1 : 0; }
    std::size_t count() const;
    bool subset_of(const BitRel& o) const;
    BitRel converse() const;
    BitRel meet(const BitRel& o) const;
    friend bool operator==(const BitRel&, const BitRel&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct Relation2 {
    BitRel r, w;
    static Relation2 empty(const FiniteRWSystem& sys);
    static Relation2 full(const FiniteRWSystem& sys);
    static Relation2 identity(const FiniteRWSystem& sys);
    bool subset_of(const Relation2& o) const { return r.subset_of(o.r) && w.subset_of(o.w); }
    Relation2 kernel() const { return {r.meet(r.converse()), w.meet(w.converse())}; }
    friend bool operator==(const Relation2&, const Relation2&) = default;
};

// Exact weak transitions of every writer. Level one for trace and cost,
// level two for termination.
struct WeakTables {
    Level level = Level::One;
    std::vector<std::vector<int>> reach;                   // c => d
    std::vector<std::vector<std::pair<int, int>>> outputs;  // c =>^s d as (s, d)
    std::vector<std::vector<int>> terminations;            // c ⇓ s
};

WeakTables weak_tables(const FiniteRWSystem& sys, Level level);
inline Level level_of(Flavor f) { return f == Flavor::Termination ? Level::Two : Level::One; }

struct Verdict {
    bool holds = true;
    char sort = 0;      // 'r' or 'w'
    int left = -1, right = -1;
    int clause = 0;     // numbering of the flavour's definition
    int state = -1;     // reader clause: the state; writer clauses: the observed state if any
    std::string witness;  // the unmatched transition
    std::size_t pairsChecked = 0;
};

// Strong: left transitions are single steps. Weak: left transitions are the
// weakened ones. For every relation both checks must agree.
enum class LeftSide { Strong, Weak };

Verdict check_simulation(const FiniteRWSystem& sys, const Relation2& R, Flavor flavor,
                         LeftSide left = LeftSide::Strong);
Verdict check_simulation(const FiniteRWSystem& sys, const Relation2& R, Flavor flavor, const WeakTables& tables,
                         LeftSide left = LeftSide::Strong);

// Greatest simulation by pruning from the full relation. Serial updates in
// place; Parallel recomputes every pair from the previous round.
Relation2 greatest_simulation(const FiniteRWSystem& sys, Flavor flavor, Exec exec = Exec::Parallel);

// Union of all simulations, by enumerating every writer relation. The reader
// part of each candidate is the largest one its writer part admits, which
// loses nothing because the writer clauses never mention readers.
Relation2 brute_force_similarity(const FiniteRWSystem& sys, Flavor flavor, std::size_t maxWriters = 4);

bool check_weakening_property(const FiniteRWSystem& sys, const Relation2& R, Flavor flavor);

// ---- semantic maps of deterministic systems ----

// Observation of one writer run. Livelock is an endless silent run after the
// prefix; it is observable and distinct from termination and from an
// infinite emission stream.
struct TraceEq {
    bool equal = true;
    std::size_t position = 0;  // 1-based index of the first differing observation
    int state = -1;            // reader sort: the state on which they differ
    std::string detail;
};

// Exact, by running the pair synchronously: at most |W|^2 + 1 emissions are
// compared, since a repeated pair of writers repeats everything after it.
// Silent runs longer than |W| are livelocks.
TraceEq trace_equiv_finite(const FiniteRWSystem& sys, char sort, int a, int b);

struct CostObs {
    enum class Kind : std::uint8_t { Done, Livelock, Infinite };
    Kind kind = Kind::Done;
    std::size_t n = 0;  // emissions before Done or Livelock
    int final = -1;
    friend bool operator==(const CostObs& a, const CostObs& b) {
        return a.kind == b.kind && (a.kind == Kind::Infinite || a.n == b.n) && a.final == b.final;
    }
};

std::vector<CostObs> cost_map(const FiniteRWSystem& sys);  // per writer
std::vector<int> ter_map(const FiniteRWSystem& sys);       // per writer, -1 is divergence

// The first `steps` steps as a string of events, for unrolling oracles.
std::vector<std::string> unroll(const FiniteRWSystem& sys, int w, std::size_t steps);

// ---- generators and documents ----

struct RandomSystemConfig {
    int maxReaders = 3;
    int maxWriters = 4;
    int maxStates = 3;
    bool deterministic = true;
    int maxBranch = 2;  // nondeterministic systems only
};

FiniteRWSystem random_system(std::mt19937_64& rng, const RandomSystemConfig& cfg = {});
Relation2 random_relation(std::mt19937_64& rng, const FiniteRWSystem& sys, double density = 0.5);

FiniteRWSystem load_system(const std::string& document);
// Accepts {"r": pairs, "w": pairs} or a document with a "relation" key.
Relation2 load_relation(const FiniteRWSystem& sys, const std::string& document);
std::string system_to_json(const FiniteRWSystem& sys);
std::string relation_to_json(const FiniteRWSystem& sys, const Relation2& R);

// ---- congruence trials ----

enum class TrialStatus { Pass, Violation, Skipped };
std::string to_string(TrialStatus s);

struct TrialResult {
    TrialStatus status = TrialStatus::Pass;
    std::string detail;
};

// Builds the composite writer a trial runs from store s.
struct Imp2Constructor {
    std::string name;
    int arity = 1;
    std::function<imp2::Writer(const std::vector<imp::Prog>&, const VarStore&)> build;
};

// seq, seq_right (fixed left r), while_<x> over a guard, emit and run_seq.
std::vector<Imp2Constructor> imp2_constructors(const imp::Prog& r, const std::vector<std::string>& guards);

// Components count as equivalent only where both sides finish with equal
// observations. They are checked on the given stores and on every store the
// composites pass through, so a component is never trusted on a store it
// was not run from. A component or composite that runs out of fuel skips
// the trial.
TrialResult congruence_trial(const Imp2Constructor& ctor, const std::vector<std::pair<imp::Prog, imp::Prog>>& pairs,
                             const std::vector<VarStore>& stores, std::size_t fuel, Flavor flavor);

// Spec trials compare f(p1..pn) with f(q1..qn) from every state, under the
// original semantics or the derived reader-writer one.
enum class SpecSemantics { L, RW };

TrialResult congruence_trial(const sos::StatefulSpec& spec, const sos::RWSpec* rw, SpecSemantics sem, int op,
                             const std::vector<std::pair<Term, Term>>& pairs, std::size_t fuel, Flavor flavor);

bool same_state_trace(const sos::StateTrace& a, const sos::StateTrace& b, Flavor flavor);

}  // namespace rwsos::equiv
