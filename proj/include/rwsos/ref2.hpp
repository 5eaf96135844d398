// The reader-writer language with higher-order store: partial expression
// evaluation, small-step semantics with fresh allocation, weak transitions,
// higher-order termination simulation, adequacy and context search.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "rwsos/common.hpp"

namespace rwsos::ref2 {

using Loc = std::int64_t;

class Expr {
public:
    enum class Kind : std::uint8_t { Loc, Int, Deref, Add, Sub };

    Expr() = default;
    static Expr loc(Loc l);
    static Expr integer(std::int64_t n);
    static Expr deref(Expr e);
    static Expr add(Expr a, Expr b);
    static Expr sub(Expr a, Expr b);

    bool valid() const { return n_ != nullptr; }
    Kind kind() const;
    std::int64_t value() const;  // Loc and Int
    const Expr& lhs() const;     // Deref operand, binary left
    const Expr& rhs() const;
    std::size_t hash() const;
    std::string str() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    std::shared_ptr<const Node> n_;
};

struct Expr::Node {
    Kind kind;
    std::int64_t value = 0;
    Expr a, b;
    std::size_t hash;
};

inline Expr::Kind Expr::kind() const { return n_->kind; }
inline std::int64_t Expr::value() const { return n_->value; }
inline const Expr& Expr::lhs() const { return n_->a; }
inline const Expr& Expr::rhs() const { return n_->b; }
inline std::size_t Expr::hash() const { return n_->hash; }

// Readers. Hole only occurs inside contexts.
class Reader {
public:
    enum class Kind : std::uint8_t { Skip, While, Assign, If, Seq, Alloc, ExprR, Proc, Hole };

    Reader() = default;
    static Reader skip();
    static Reader while_(Expr e, Reader p);
    static Reader assign(Expr e, Reader p);
    static Reader if_(Expr e, Reader p, Reader q);
    static Reader seq(Reader p, Reader q);
    static Reader alloc(Reader p);
    static Reader expr(Expr e);
    static Reader proc(Reader p);
    static Reader hole();

    bool valid() const { return n_ != nullptr; }
    Kind kind() const;
    const Expr& expr() const;     // While, Assign, If, ExprR
    const Reader& first() const;  // body / rhs / then / left / operand
    const Reader& second() const; // else / right
    std::size_t hash() const;
    std::size_t size() const;     // node count, expressions count 1
    bool has_hole() const;
    std::string str() const;

    friend bool operator==(const Reader& a, const Reader& b);
    friend bool operator!=(const Reader& a, const Reader& b) { return !(a == b); }

private:
    struct Node;
    std::shared_ptr<const Node> n_;
};

struct ReaderHash {
    std::size_t operator()(const Reader& r) const { return r.hash(); }
};

struct Value {
    enum class Kind : std::uint8_t { Loc, Int, Reader };
    Kind kind = Kind::Int;
    std::int64_t n = 0;
    ref2::Reader p;

    static Value loc(Loc l) { return {Kind::Loc, l, {}}; }
    static Value integer(std::int64_t v) { return {Kind::Int, v, {}}; }
    static Value reader(ref2::Reader r) { return {Kind::Reader, 0, std::move(r)}; }

    std::size_t hash() const;
    std::string str() const;
    friend bool operator==(const Value& a, const Value& b) {
        return a.kind == b.kind && (a.kind == Kind::Reader ? a.p == b.p : a.n == b.n);
    }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
};

// Partial finite map Loc -> Value; cheap to copy.
class Store {
public:
    Store() = default;
    Store(std::initializer_list<std::pair<const Loc, Value>> init);

    const Value* get(Loc l) const;
    Store set(Loc l, Value v) const;
    bool contains(Loc l) const { return get(l) != nullptr; }
    std::vector<Loc> dom() const;
    std::size_t size() const { return m_ ? m_->size() : 0; }
    const std::map<Loc, Value>& cells() const;
    Loc min_unused() const;
    std::size_t hash() const;
    std::string str() const;

    friend bool operator==(const Store& a, const Store& b);
    friend bool operator!=(const Store& a, const Store& b) { return !(a == b); }

private:
    std::shared_ptr<const std::map<Loc, Value>> m_;
};

class Writer {
public:
    enum class Kind : std::uint8_t { Assign, Seq, Alloc, Emit, Run, RetVal, Ret };

    Writer() = default;
    static Writer assign(Expr e, Writer c);
    static Writer seq(Writer c, Reader q);
    static Writer alloc(Writer c);
    static Writer emit(Store s, Writer c);
    static Writer run(Reader p, Store s);
    static Writer ret_val(Value v, Store s);
    static Writer ret(Store s);

    bool valid() const { return n_ != nullptr; }
    Kind kind() const;
    const Expr& expr() const;      // Assign
    const Writer& inner() const;   // Assign, Seq, Alloc, Emit
    const Reader& reader() const;  // Seq (q), Run (p)
    const Store& store() const;    // Emit, Run, RetVal, Ret
    const Value& value() const;    // RetVal
    std::size_t hash() const;
    std::size_t size() const;
    bool has_hole() const;
    std::string str() const;

    friend bool operator==(const Writer& a, const Writer& b);
    friend bool operator!=(const Writer& a, const Writer& b) { return !(a == b); }

private:
    struct Node;
    std::shared_ptr<const Node> n_;
};

struct WriterHash {
    std::size_t operator()(const Writer& w) const { return w.hash(); }
};

// ---- semantics ----

// Partial evaluation; nullopt is the undefined outcome.
std::optional<Value> eev(const Expr& e, const Store& s);

struct ReaderStep {
    std::optional<Writer> next;
    std::string stuck;  // failing premise when next is empty
};

ReaderStep reader_step(const Reader& p, const Store& s);

enum class StepKind : std::uint8_t { Silent, Output, DoneStore, DoneVal };

struct RefStep {
    StepKind kind = StepKind::Silent;
    Writer next;   // Silent, Output
    Store store;   // Output, DoneStore, DoneVal
    Value value;   // DoneVal
    bool fresh = false;  // DoneVal of an allocation: the location is one choice of a family

    std::string str() const;
};

// Canonical: the fresh location is min-unused(dom(s)). Exhaustive: one
// representative per location the configuration mentions (outside dom(s))
// plus one location it does not mention; every fresh choice is equivalent
// to one of these up to renaming of unmentioned locations.
enum class Alloc { Canonical, Exhaustive };

std::vector<RefStep> writer_steps(const Writer& c, Alloc mode = Alloc::Canonical);

struct Outcome {
    enum class Kind { Value, Store, Stuck, Cut };
    Kind kind = Kind::Cut;
    Value value;
    Store store;
    std::string stuck;
    std::size_t steps = 0;
    std::string str() const;
};

Outcome run(const Writer& c, std::size_t fuel);
Outcome run(const Reader& p, const Store& s, std::size_t fuel);

struct Closure {
    std::vector<Writer> reach;                      // c => d, including c
    std::vector<Store> terminationsStore;           // c ⇓ s
    std::vector<std::pair<Value, Store>> terminationsVal;  // c ⇓ v,s
    bool truncated = false;
    std::size_t expansions = 0;
};

// Absorbs silent and emitting steps alike. `fuel` bounds expansions.
Closure weak_closure(const Writer& c, std::size_t fuel, Alloc mode = Alloc::Canonical);

enum class Halting { Terminates, Diverges, Unknown };
std::string to_string(Halting h);

struct HaltVerdict {
    Halting halting = Halting::Unknown;
    std::size_t explored = 0;
};

// Terminates: some run reaches a terminal judgment. Diverges: the complete
// configuration graph under exhaustive allocation was explored (at most
// `cap` configurations) and has no terminal judgment; stuck runs count
// here. Unknown otherwise.
HaltVerdict halts(const Writer& c, std::size_t cap);
HaltVerdict halts(const Reader& p, const Store& s, std::size_t cap);

// ---- relations ----

class Relation {
public:
    bool diagonal = true;

    void add_reader(const Reader& p, const Reader& q);
    void add_writer(const Writer& c, const Writer& d);
    bool has_reader(const Reader& p, const Reader& q) const;
    bool has_writer(const Writer& c, const Writer& d) const;
    const std::vector<std::pair<Reader, Reader>>& readers() const { return readers_; }
    const std::vector<std::pair<Writer, Writer>>& writers() const { return writers_; }
    Relation converse() const;
    Relation symmetrized() const;

private:
    struct PairHash {
        template <class T>
        std::size_t operator()(const std::pair<T, T>& p) const {
            std::size_t h = p.first.hash();
            hash_mix(h, p.second.hash());
            return h;
        }
    };
    std::vector<std::pair<Reader, Reader>> readers_;
    std::vector<std::pair<Writer, Writer>> writers_;
    std::unordered_set<std::pair<Reader, Reader>, PairHash> rset_;
    std::unordered_set<std::pair<Writer, Writer>, PairHash> wset_;
};

struct KindMismatch : Error {
    using Error::Error;
};

bool value_related(const Relation& R, const Value& a, const Value& b);
bool store_related(const Relation& R, const Store& a, const Store& b);
using ValueOrStore = std::variant<Value, Store>;
// Throws KindMismatch when one side is a value and the other a store.
bool value_store_related(const Relation& R, const ValueOrStore& a, const ValueOrStore& b);

enum class Status { Holds, Fails, Inconclusive };
std::string to_string(Status s);

struct SimOptions {
    std::size_t fuel = 5000;     // expansions per weak closure
    bool stuckMustMatch = true;  // reader stuck on the left needs a stuck right side
};

struct SimVerdict {
    Status status = Status::Holds;
    char sort = 0;   // 'r' or 'w'
    int clause = 0;  // 1..4
    std::string left, right, store, witness;
    std::size_t pairsChecked = 0;
};

SimVerdict check_ho_termination_sim(const Relation& R, const std::vector<Store>& sample, const SimOptions& opt = {});

struct CertifyResult {
    Status status = Status::Inconclusive;
    std::size_t readers = 0, writers = 0, pairs = 0;  // explored universe
    std::string detail;
    Relation relation;  // the surviving pairs when Holds
};

// Greatest simulation on the fragment demanded by (p, q): starting from
// (p, q), pairs are added as the clauses require them, then pruned to the
// greatest fixpoint. Holds means (p, q) survived (up to the sample and
// canonical allocation).
CertifyResult certify_pair(const Reader& p, const Reader& q, const std::vector<Store>& sample,
                           const SimOptions& opt = {}, std::size_t maxPairs = 200000);

struct AdequacyVerdict {
    Status status = Status::Holds;
    std::string left, right, store, detail;
    std::size_t certifiedDivergent = 0, certifiedTerminating = 0, inconclusive = 0;
};

AdequacyVerdict check_adequacy(const Relation& R, const std::vector<Store>& sample, std::size_t cap = 20000);

// ---- contexts ----

struct Context {
    bool writer = false;  // output sort
    Reader r;             // with one Hole
    Writer w;
    std::size_t size = 0;
    std::string str() const;
};

Reader plug(const Reader& ctx, const Reader& p);
Writer plug(const Writer& ctx, const Reader& p);
Store plug(const Store& ctx, const Reader& p);

struct ContextPools {
    std::vector<Expr> exprs;  // default: 0, 1, 2, #0, #1, !#0, !#1
    std::vector<Loc> holeLocs{0, 1};
    static ContextPools standard();
};

std::vector<Context> enumerate_contexts(std::size_t maxSize, const std::vector<Store>& sample,
                                        const ContextPools& pools = ContextPools::standard());

struct CtxResult {
    bool found = false;
    Context context;
    std::string store;  // reader contexts: the distinguishing store
    Halting left = Halting::Unknown, right = Halting::Unknown;
    std::size_t contextsTried = 0, inconclusive = 0;
};

CtxResult ctx_refute(const Reader& p, const Reader& q, std::size_t maxSize, const std::vector<Store>& sample,
                     std::size_t cap = 4000, Exec exec = Exec::Parallel);

// A few stores used as the default sample by tools and tests.
std::vector<Store> default_sample();

}  // namespace rwsos::ref2
