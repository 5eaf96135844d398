// Stateful SOS specifications over a finite state alphabet, the cool format
// check, the operational model, and the derived reader-writer extension.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rwsos/core_syntax.hpp"
#include "rwsos/weak.hpp"

namespace rwsos::sos {

using StateId = int;

// A concrete trigger (W, s, s1..sn). Bit i-1 of W is set when operand i
// continues; succ[i-1] is its successor or terminal state.
struct Trigger {
    std::uint32_t W = 0;
    StateId s = 0;
    std::vector<StateId> succ;

    bool in_W(int pos) const { return (W >> (pos - 1)) & 1u; }
    friend bool operator==(const Trigger&, const Trigger&) = default;
};

// Where a conclusion's state comes from.
struct StateRef {
    enum class Kind : std::uint8_t { Literal, Source, Succ };
    Kind kind = Kind::Literal;
    int value = 0;  // state id, or 1-based position for Succ
    friend bool operator==(const StateRef&, const StateRef&) = default;
};

// Per position: 'w' in W, 'b' terminated, '*' unconstrained.
struct TriggerSchema {
    std::string membership;
    StateId s = -1;               // -1 matches any state
    std::vector<StateId> succ;    // -1 matches any state
    bool matches(const Trigger& t) const;
    friend bool operator==(const TriggerSchema&, const TriggerSchema&) = default;
};

struct ConclusionSchema {
    bool step = false;
    Term term;  // open over x1..xn, y_i; only for steps
    StateRef state;
};

struct Rule {
    int op = 0;
    TriggerSchema trigger;
    ConclusionSchema conclusion;
};

// A rule instance after resolving state references.
struct Conclusion {
    bool step = false;
    Term term;
    StateId state = 0;
    friend bool operator==(const Conclusion& a, const Conclusion& b) {
        return a.step == b.step && a.state == b.state && (!a.step || a.term == b.term);
    }
};

struct OpInfo {
    std::string name;
    int arity = 0;
    std::vector<int> rules;  // indices into rules, in priority order
};

struct SpecError : Error {
    using Error::Error;
};
struct CoverageError : SpecError {
    std::string op, trigger;
    CoverageError(std::string o, std::string t)
        : SpecError("operator " + o + " has no rule for trigger " + t), op(std::move(o)), trigger(std::move(t)) {}
};
struct OverlapError : SpecError {
    std::string op;
    int first, second;
    OverlapError(std::string o, int a, int b)
        : SpecError("operator " + o + ": rules " + std::to_string(a) + " and " + std::to_string(b) +
                    " share a trigger schema but conclude differently"),
          op(std::move(o)), first(a), second(b) {}
};
struct VariableDisciplineError : SpecError {
    int rule;
    std::string variable;
    VariableDisciplineError(int r, std::string v, const std::string& why)
        : SpecError("rule " + std::to_string(r) + ": variable " + v + " " + why), rule(r), variable(std::move(v)) {}
};

class StatefulSpec {
public:
    std::vector<std::string> states;
    std::vector<OpInfo> ops;
    std::vector<Rule> rules;

    int state_id(const std::string& name) const;  // throws SpecError
    int op_index(const std::string& name) const;   // -1 if absent
    Signature signature() const;

    // Builders. add_rule checks the variable discipline immediately.
    int add_state(const std::string& name);
    int add_op(const std::string& name, int arity);
    void add_rule(Rule r);

    // Totality and uniqueness over every trigger; throws on failure.
    void validate() const;

    // First-match resolution. Throws CoverageError if nothing matches.
    Conclusion resolve(int op, const Trigger& t) const;

    std::string trigger_str(int op, const Trigger& t) const;

    // Calls f(trigger) for every trigger of op, W outermost, then succ, then s.
    template <class F>
    void for_each_trigger(int op, F&& f) const;

private:
    std::map<std::string, int> stateIndex_, opIndex_;
};

// JSON document <-> spec. load_spec validates.
StatefulSpec load_spec(const std::string& document);
std::string spec_to_json(const StatefulSpec& spec);

// ---- operational model of L ----

struct LResult {
    bool done = false;
    Term next;
    StateId state = 0;
};

LResult l_step(const StatefulSpec& spec, const Term& p, StateId s);

struct StateTrace {
    bool finished = false;
    std::vector<StateId> emitted;
    StateId final = -1;
    std::size_t steps = 0;
    bool stalled = false;  // reader-writer runs only: silent cap reached

    friend bool operator==(const StateTrace& a, const StateTrace& b) {
        return a.finished == b.finished && a.stalled == b.stalled && a.emitted == b.emitted &&
               (!a.finished || a.final == b.final);
    }
    std::string str(const StatefulSpec& spec) const;
};

StateTrace l_trace(const StatefulSpec& spec, const Term& p, StateId s, std::size_t fuel);

// ---- cool format ----

enum class CoolReason { PatienceMissing, MentionsReceiving, MentionsY, DependsOnSource, DependsOnPremise };
std::string to_string(CoolReason r);

struct CoolViolation {
    std::string op;
    int position = 0;  // candidate receiving position (1-based)
    Trigger trigger;
    CoolReason reason;
    std::string detail;
};

struct CoolReport {
    bool cool = true;
    std::set<std::string> passive;
    std::map<std::string, int> active;  // receiving position, 1-based
    std::vector<CoolViolation> violations;
};

CoolReport check_cool(const StatefulSpec& spec);

// Independent pairwise re-check of the side conditions for the positions the
// report chose; used to cross-validate check_cool on small specs.
bool naive_cool_recheck(const StatefulSpec& spec, const CoolReport& report);

// ---- reader-writer extension ----

struct NotCool : Error {
    CoolReport report;
    explicit NotCool(CoolReport r);
};

// Writers are terms over Sigma with heads "$run" (labelled by a state,
// one reader kid), "$ret" (labelled), "$emit" (labelled, one writer kid) and
// "f~" for the barred version of an active f.
struct RWSpec {
    std::shared_ptr<const StatefulSpec> spec;
    Signature sigma;
    std::vector<int> receiving;                    // per op: 0 passive, j active
    std::vector<std::vector<Conclusion>> passiveOut;  // o(f,s), [op][s]
    std::vector<std::vector<Conclusion>> activeOut;   // o(f,s,s') for any s, [op][s']

    const std::string& state_name(StateId s) const { return spec->states[static_cast<std::size_t>(s)]; }
};

RWSpec derive_rw(const StatefulSpec& spec);
std::string rw_to_json(const RWSpec& rw);

Term rw_run(const RWSpec& rw, const Term& p, StateId s);
Term rw_ret(const RWSpec& rw, StateId s);
Term rw_emit(const RWSpec& rw, StateId s, const Term& c);
std::string rw_str(const Term& t);

using RWStep = Step<Term, StateId>;

Term rw_reader_step(const RWSpec& rw, const Term& p, StateId s);
RWStep rw_writer_step(const RWSpec& rw, const Term& c);

WeakClosure<Term, StateId> rw_weak_closure(const RWSpec& rw, const Term& c, std::size_t fuel, Level mode);

// `fuel` bounds observable events (emissions and termination); at most
// `silentCap` consecutive silent steps are allowed before the run is
// reported as stalled.
StateTrace rw_trace(const RWSpec& rw, const Term& c, std::size_t fuel, std::size_t silentCap = 4096);
StateTrace rw_trace(const RWSpec& rw, const Term& p, StateId s, std::size_t fuel, std::size_t silentCap = 4096);

struct PreservationMismatch {
    Term term;
    StateId state;
    StateTrace l, l2;
};

struct PreservationReport {
    std::size_t checked = 0, agreeFinished = 0, agreeCut = 0;
    std::vector<PreservationMismatch> mismatches;
};

PreservationReport verify_preservation(const StatefulSpec& spec, const std::vector<Term>& terms,
                                       const std::vector<StateId>& states, std::size_t fuel,
                                       Exec exec = Exec::Parallel);

// ---- generators ----

struct RandomSpecConfig {
    int maxStates = 3;
    int maxOps = 4;
    int maxArity = 2;
    int conclusionDepth = 2;
};

// Cool by construction; always contains at least one constant.
StatefulSpec random_cool_spec(std::mt19937_64& rng, const RandomSpecConfig& cfg = {});

Term random_term(std::mt19937_64& rng, const StatefulSpec& spec, int maxDepth);

// All closed terms of depth <= maxDepth in a fixed order. Throws SpecError
// when more than `limit` would be produced.
std::vector<Term> enumerate_terms(const StatefulSpec& spec, int maxDepth, std::size_t limit = 2000000);

// ---- template implementation ----

template <class F>
void StatefulSpec::for_each_trigger(int op, F&& f) const {
    const int n = ops[static_cast<std::size_t>(op)].arity;
    const int S = static_cast<int>(states.size());
    Trigger t;
    t.succ.assign(static_cast<std::size_t>(n), 0);
    for (std::uint32_t W = 0; W < (1u << n); ++W) {
        t.W = W;
        std::fill(t.succ.begin(), t.succ.end(), 0);
        while (true) {
            for (int s = 0; s < S; ++s) {
                t.s = s;
                f(static_cast<const Trigger&>(t));
            }
            int i = 0;
            while (i < n && ++t.succ[static_cast<std::size_t>(i)] == S) t.succ[static_cast<std::size_t>(i++)] = 0;
            if (i == n) break;
        }
    }
}

}  // namespace rwsos::sos
