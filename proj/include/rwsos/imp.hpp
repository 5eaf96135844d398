// The single-sorted while language: small-step semantics and the semantic
// maps derived from it.
#pragma once

#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rwsos/core_syntax.hpp"

namespace rwsos::imp {

class Prog {
public:
    enum class Kind : std::uint8_t { Skip, Assign, While, Seq };

    Prog() = default;
    static Prog skip();
    static Prog assign(std::string x, ImpExpr e);
    static Prog while_(ImpExpr guard, Prog body);
    static Prog seq(Prog p, Prog q);

    bool valid() const { return n_ != nullptr; }
    Kind kind() const;
    const std::string& var() const;
    const ImpExpr& expr() const;  // assigned value or loop guard
    const Prog& body() const;  // while body
    const Prog& left() const;
    const Prog& right() const;
    std::size_t hash() const;
    int depth() const;
    std::string str() const;

    // Generic view over signature(): skip, asg (labelled "x:=e"),
    // while (labelled with the guard), seq.
    Term to_term() const;
    static Signature signature();

    friend bool operator==(const Prog& a, const Prog& b);
    friend bool operator!=(const Prog& a, const Prog& b) { return !(a == b); }

private:
    struct Node;
    std::shared_ptr<const Node> n_;
};

struct Prog::Node {
    Kind kind;
    std::string var;
    ImpExpr e;
    Prog a, b;
    std::size_t hash;
    int depth;
};

inline Prog::Kind Prog::kind() const { return n_->kind; }
inline const std::string& Prog::var() const { return n_->var; }
inline const ImpExpr& Prog::expr() const { return n_->e; }
inline std::size_t Prog::hash() const { return n_->hash; }
inline int Prog::depth() const { return n_->depth; }
inline const Prog& Prog::body() const { return n_->a; }
inline const Prog& Prog::left() const { return n_->a; }
inline const Prog& Prog::right() const { return n_->b; }

struct ProgHash {
    std::size_t operator()(const Prog& p) const { return p.hash(); }
};

struct StepResult {
    bool done = false;
    Prog next;  // valid iff !done
    VarStore store;

    static StepResult Continue(Prog p, VarStore s) { return {false, std::move(p), std::move(s)}; }
    static StepResult Done(VarStore s) { return {true, Prog{}, std::move(s)}; }
};

StepResult step(const Prog& p, const VarStore& s);

// Finished: emitted s1..sn plus the final store. Cut: fuel ran out, emitted
// holds the prefix seen so far.
struct TraceResult {
    bool finished = false;
    std::vector<VarStore> emitted;
    VarStore final;
    std::size_t steps = 0;  // fuel consumed

    std::string str() const;
    // steps is bookkeeping and does not take part in equality
    friend bool operator==(const TraceResult& a, const TraceResult& b) {
        return a.finished == b.finished && a.emitted == b.emitted && (!a.finished || a.final == b.final);
    }
    friend bool operator!=(const TraceResult& a, const TraceResult& b) { return !(a == b); }
};

struct CostResult {
    bool finished = false;
    std::size_t n = 0;
    VarStore final;
    friend bool operator==(const CostResult& a, const CostResult& b) {
        return a.finished == b.finished && (!a.finished || (a.n == b.n && a.final == b.final));
    }
};

struct TerResult {
    bool finished = false;
    VarStore final;
    friend bool operator==(const TerResult& a, const TerResult& b) {
        return a.finished == b.finished && (!a.finished || a.final == b.final);
    }
};

TraceResult trace(const Prog& p, const VarStore& s, std::size_t fuel);
CostResult cost_of_trace(const TraceResult& t);
TerResult ter_of_trace(const TraceResult& t);

enum class Semantics { Trace, Cost, Termination };

// Equality of the chosen observation. Cut on either side compares the
// prefixes only, so callers that need certainty must check finished.
bool same_observation(const TraceResult& a, const TraceResult& b, Semantics sem);

struct BisimVerdict {
    bool holds = true;
    std::string note;  // confirmations hold up to the store sample
    Prog p, q;         // failing pair
    VarStore store;    // store the observer supplied
    char clause = 0;   // 'a'..'d'
    int depth = 0;     // level at which the failure surfaced, 1-based
    std::string detail;
};

// Checks the resumption bisimulation clauses for every pair reachable
// within `depth` levels. At each level the observer may replace the store by
// any store of the sample, which is how a perturbation schedule is modelled.
BisimVerdict check_resumption_bisim(const std::vector<std::pair<Prog, Prog>>& R,
                                    const std::vector<VarStore>& stores, int depth);

struct EnumConfig {
    std::vector<Prog> leaves;      // depth-1 statements
    std::vector<ImpExpr> guards;   // loop guards
    int maxDepth = 3;
};

// All programs of depth <= maxDepth, leaves at depth 1, in a fixed order.
std::vector<Prog> enumerate_programs(const EnumConfig& cfg);

struct RandomConfig {
    std::vector<std::string> vars{"x", "y"};
    std::int64_t maxConst = 2;
    int maxDepth = 4;
    int exprDepth = 2;
};

ImpExpr random_expr(std::mt19937_64& rng, const RandomConfig& cfg, int depth);
Prog random_program(std::mt19937_64& rng, const RandomConfig& cfg, int depth);

}  // namespace rwsos::imp
