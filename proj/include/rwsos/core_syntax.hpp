// Signatures, sorted terms, variable stores and arithmetic expressions.
#pragma once

#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rwsos/common.hpp"

namespace rwsos {

enum class Sort : std::uint8_t { Reader, Writer };
std::string to_string(Sort s);

enum class LiteralKind { VarName, Expr, State, Value };

struct OpDecl {
    std::string name;
    std::vector<Sort> args;
    Sort result = Sort::Reader;
    bool labelled = false;  // node carries a literal label (a state, say)
};

class Signature {
public:
    void add(OpDecl op);
    const OpDecl* find(const std::string& name) const;
    const std::vector<OpDecl>& ops() const { return ops_; }
    std::set<LiteralKind> literalKinds;

    // Every operator reader-sorted, arities as given.
    static Signature single_sorted(const std::vector<std::pair<std::string, int>>& ops);

private:
    std::vector<OpDecl> ops_;
    std::map<std::string, std::size_t> index_;
};

// Immutable first-order term. Var leaves make it an open term.
class Term {
public:
    enum class Kind : std::uint8_t { Op, Var };

    Term() = default;
    static Term op(std::string head, std::vector<Term> kids = {}, Sort sort = Sort::Reader,
                   std::string label = {});
    static Term var(std::string name, Sort sort = Sort::Reader);

    bool valid() const { return n_ != nullptr; }
    Kind kind() const { return n_->kind; }
    bool is_var() const { return n_->kind == Kind::Var; }
    const std::string& head() const { return n_->head; }
    const std::string& label() const { return n_->label; }
    Sort sort() const { return n_->sort; }
    const std::vector<Term>& kids() const { return n_->kids; }
    std::size_t hash() const { return n_->hash; }
    std::size_t size() const { return n_->size; }
    int depth() const { return n_->depth; }
    bool closed() const { return n_->closed; }

    // Same node, different children.
    Term with_kids(std::vector<Term> kids) const;

    std::string str() const;

    friend bool operator==(const Term& a, const Term& b);
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
    friend bool operator<(const Term& a, const Term& b);

private:
    struct Node {
        Kind kind;
        Sort sort;
        std::string head, label;
        std::vector<Term> kids;
        std::size_t hash, size;
        int depth;
        bool closed;
    };
    std::shared_ptr<const Node> n_;
};

struct TermHash {
    std::size_t operator()(const Term& t) const { return t.hash(); }
};

struct SortError : Error {
    std::vector<std::size_t> path;  // child indices from the root
    std::string expected, found;
    SortError(std::vector<std::size_t> p, std::string exp, std::string fnd);
};

struct MissingBinding : Error {
    std::string variable;
    explicit MissingBinding(std::string v) : Error("no binding for variable " + v), variable(std::move(v)) {}
};

// nullopt when t respects the signature; otherwise the first violation in
// preorder. Variables are accepted only when allow_vars is set.
std::optional<SortError> validate_term(const Signature& sig, const Term& t, bool allow_vars = false);

// Simultaneous replacement of variable leaves. Throws MissingBinding or
// SortError (binding of the wrong sort).
Term substitute(const Term& t, const std::map<std::string, Term>& assignment);

std::set<std::string> variables(const Term& t);

// Total store over identifiers, default 0. Only non-zero bindings are kept
// so equality and hashing are canonical.
class VarStore {
public:
    VarStore() = default;
    VarStore(std::initializer_list<std::pair<const std::string, std::int64_t>> init);

    std::int64_t get(const std::string& x) const;
    void put(const std::string& x, std::int64_t v);
    VarStore set(const std::string& x, std::int64_t v) const;
    const std::map<std::string, std::int64_t>& bindings() const;
    std::size_t hash() const { return d_ ? d_->hash : kEmptyHash; }
    std::string str() const;

    friend bool operator==(const VarStore& a, const VarStore& b) {
        return a.d_ == b.d_ || (a.hash() == b.hash() && a.bindings() == b.bindings());
    }
    friend bool operator!=(const VarStore& a, const VarStore& b) { return !(a == b); }
    friend bool operator<(const VarStore& a, const VarStore& b) { return a.bindings() < b.bindings(); }

private:
    // Immutable once shared; copies are pointer copies. Empty stores have
    // no data at all.
    struct Data {
        std::map<std::string, std::int64_t> m;
        std::size_t hash;
    };
    static constexpr std::size_t kEmptyHash = 0x811c9dc5u;
    std::shared_ptr<const Data> d_;
};

struct VarStoreHash {
    std::size_t operator()(const VarStore& s) const { return s.hash(); }
};

class ImpExpr {
public:
    enum class Kind : std::uint8_t { Const, Var, Add, Sub, Mul };

    ImpExpr() = default;
    static ImpExpr constant(std::int64_t n);
    static ImpExpr var(std::string x);
    static ImpExpr bin(Kind k, ImpExpr a, ImpExpr b);

    bool valid() const { return n_ != nullptr; }
    Kind kind() const;
    std::int64_t value() const;
    const std::string& name() const;
    const ImpExpr& lhs() const;
    const ImpExpr& rhs() const;
    std::size_t hash() const;
    int depth() const;
    std::string str() const;

    friend bool operator==(const ImpExpr& a, const ImpExpr& b);
    friend bool operator!=(const ImpExpr& a, const ImpExpr& b) { return !(a == b); }

private:
    struct Node;
    std::shared_ptr<const Node> n_;
};

struct ImpExpr::Node {
    Kind kind;
    std::int64_t value = 0;
    std::string name;
    ImpExpr a, b;
    std::size_t hash;
};

inline ImpExpr::Kind ImpExpr::kind() const { return n_->kind; }
inline std::int64_t ImpExpr::value() const { return n_->value; }
inline const std::string& ImpExpr::name() const { return n_->name; }
inline const ImpExpr& ImpExpr::lhs() const { return n_->a; }
inline const ImpExpr& ImpExpr::rhs() const { return n_->b; }
inline std::size_t ImpExpr::hash() const { return n_->hash; }

inline ImpExpr operator+(ImpExpr a, ImpExpr b) { return ImpExpr::bin(ImpExpr::Kind::Add, a, b); }
inline ImpExpr operator-(ImpExpr a, ImpExpr b) { return ImpExpr::bin(ImpExpr::Kind::Sub, a, b); }
inline ImpExpr operator*(ImpExpr a, ImpExpr b) { return ImpExpr::bin(ImpExpr::Kind::Mul, a, b); }

// Throws OverflowError when a 64-bit bound is exceeded.
std::int64_t eev(const ImpExpr& e, const VarStore& s);

}  // namespace rwsos
