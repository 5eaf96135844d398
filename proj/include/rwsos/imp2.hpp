// The two-sorted reader-writer refinement of the while language.
#pragma once

#include <vector>

#include "rwsos/imp.hpp"
#include "rwsos/weak.hpp"

namespace rwsos::imp2 {

using imp::Prog;
using imp::TraceResult;

// Writers: [p]_s, ret_s, s.c and c;q. Readers are plain programs.
class Writer {
public:
    enum class Kind : std::uint8_t { Run, Ret, Emit, Seq };

    Writer() = default;
    static Writer run(Prog p, VarStore s);
    static Writer ret(VarStore s);
    static Writer emit(VarStore s, Writer c);
    static Writer seq(Writer c, Prog q);

    bool valid() const { return n_ != nullptr; }
    Kind kind() const;
    const Prog& reader() const;  // Run: p, Seq: q
    const VarStore& store() const;
    const Writer& inner() const;  // Emit and Seq
    std::size_t hash() const;
    std::string str() const;

    Term to_term() const;
    static Signature signature();

    friend bool operator==(const Writer& a, const Writer& b);
    friend bool operator!=(const Writer& a, const Writer& b) { return !(a == b); }

private:
    struct Node;
    std::shared_ptr<const Node> n_;
};

struct Writer::Node {
    Kind kind;
    Prog p;
    VarStore s;
    Writer c;
    std::size_t hash;
};

inline Writer::Kind Writer::kind() const { return n_->kind; }
inline const VarStore& Writer::store() const { return n_->s; }
inline std::size_t Writer::hash() const { return n_->hash; }
inline const Prog& Writer::reader() const { return n_->p; }
inline const Writer& Writer::inner() const { return n_->c; }

struct WriterHash {
    std::size_t operator()(const Writer& w) const { return w.hash(); }
};

using WriterStep = Step<Writer, VarStore>;

Writer reader_step(const Prog& p, const VarStore& s);
WriterStep writer_step(const Writer& c);

WeakClosure<Writer, VarStore> weak_closure(const Writer& c, std::size_t fuel, Level mode);

// fuel counts writer steps; the initial reader step is free.
TraceResult trace(const Prog& p, const VarStore& s, std::size_t fuel);
TraceResult trace(const Writer& c, std::size_t fuel);

struct EmbeddingMismatch {
    Prog program;
    VarStore store;
    TraceResult source, target;
};

struct EmbeddingReport {
    std::size_t checked = 0;
    std::size_t agreeFinished = 0;
    std::size_t agreeCut = 0;         // both cut, prefixes consistent
    std::size_t fuelAsymmetric = 0;   // source cut, target finished with a consistent prefix
    std::size_t overflow = 0;         // arithmetic left the 64-bit range
    std::vector<EmbeddingMismatch> mismatches;
    std::size_t fuel = 0, targetFuel = 0;
};

inline std::size_t embedding_fuel(std::size_t fuel) { return 4 * fuel + 4; }

// Compares the source trace at `fuel` with the reader-writer trace at
// embedding_fuel(fuel) for every (program, store) pair.
EmbeddingReport verify_embedding(const std::vector<Prog>& programs, const std::vector<VarStore>& stores,
                                 std::size_t fuel, Exec exec = Exec::Parallel);

}  // namespace rwsos::imp2
