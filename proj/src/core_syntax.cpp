#include "rwsos/core_syntax.hpp"

#include <sstream>

namespace rwsos {

std::string to_string(Sort s) { return s == Sort::Reader ? "r" : "w"; }

void Signature::add(OpDecl op) {
    if (index_.count(op.name)) throw Error("duplicate operator " + op.name);
    index_[op.name] = ops_.size();
    ops_.push_back(std::move(op));
}

const OpDecl* Signature::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &ops_[it->second];
}

Signature Signature::single_sorted(const std::vector<std::pair<std::string, int>>& ops) {
    Signature sig;
    for (const auto& [name, n] : ops)
        sig.add(OpDecl{name, std::vector<Sort>(static_cast<std::size_t>(n), Sort::Reader), Sort::Reader});
    return sig;
}

Term Term::op(std::string head, std::vector<Term> kids, Sort sort, std::string label) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Op;
    n->sort = sort;
    n->head = std::move(head);
    n->label = std::move(label);
    n->kids = std::move(kids);
    std::size_t h = std::hash<std::string>{}(n->head);
    hash_mix(h, std::hash<std::string>{}(n->label));
    hash_mix(h, static_cast<std::size_t>(sort));
    n->size = 1;
    n->depth = 1;
    n->closed = true;
    for (const auto& k : n->kids) {
        hash_mix(h, k.hash());
        n->size += k.size();
        n->depth = std::max(n->depth, k.depth() + 1);
        n->closed = n->closed && k.closed();
    }
    n->hash = h;
    Term t;
    t.n_ = std::move(n);
    return t;
}

Term Term::var(std::string name, Sort sort) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->sort = sort;
    n->head = std::move(name);
    n->hash = std::hash<std::string>{}(n->head) ^ 0x5bd1e995u;
    n->size = 1;
    n->depth = 1;
    n->closed = false;
    Term t;
    t.n_ = std::move(n);
    return t;
}

Term Term::with_kids(std::vector<Term> kids) const { return op(head(), std::move(kids), sort(), label()); }

bool operator==(const Term& a, const Term& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_) return false;
    if (a.n_->hash != b.n_->hash || a.n_->kind != b.n_->kind || a.n_->sort != b.n_->sort ||
        a.n_->head != b.n_->head || a.n_->label != b.n_->label || a.n_->kids.size() != b.n_->kids.size())
        return false;
    for (std::size_t i = 0; i < a.n_->kids.size(); ++i)
        if (!(a.n_->kids[i] == b.n_->kids[i])) return false;
    return true;
}

bool operator<(const Term& a, const Term& b) { return a.str() < b.str(); }

std::string Term::str() const {
    if (!n_) return "<null>";
    std::string out = n_->head;
    if (!n_->label.empty()) out += "@" + n_->label;
    if (!n_->kids.empty()) {
        out += "(";
        for (std::size_t i = 0; i < n_->kids.size(); ++i) {
            if (i) out += ",";
            out += n_->kids[i].str();
        }
        out += ")";
    }
    return out;
}

SortError::SortError(std::vector<std::size_t> p, std::string exp, std::string fnd)
    : Error("sort error: expected " + exp + ", found " + fnd), path(std::move(p)), expected(std::move(exp)),
      found(std::move(fnd)) {}

namespace {

std::optional<SortError> validate_at(const Signature& sig, const Term& t, bool allow_vars,
                                     std::vector<std::size_t>& path) {
    if (t.is_var()) {
        if (!allow_vars) return SortError(path, "closed term", "variable " + t.head());
        return std::nullopt;
    }
    const OpDecl* d = sig.find(t.head());
    if (!d) return SortError(path, "declared operator", "unknown operator " + t.head());
    if (d->result != t.sort())
        return SortError(path, "sort " + to_string(d->result), "sort " + to_string(t.sort()));
    if (d->args.size() != t.kids().size())
        return SortError(path, "arity " + std::to_string(d->args.size()), "arity " + std::to_string(t.kids().size()));
    for (std::size_t i = 0; i < t.kids().size(); ++i) {
        path.push_back(i);
        const Term& k = t.kids()[i];
        if (k.sort() != d->args[i]) return SortError(path, "sort " + to_string(d->args[i]), "sort " + to_string(k.sort()));
        if (auto e = validate_at(sig, k, allow_vars, path)) return e;
        path.pop_back();
    }
    return std::nullopt;
}

}  // namespace

std::optional<SortError> validate_term(const Signature& sig, const Term& t, bool allow_vars) {
    std::vector<std::size_t> path;
    return validate_at(sig, t, allow_vars, path);
}

Term substitute(const Term& t, const std::map<std::string, Term>& assignment) {
    if (t.is_var()) {
        auto it = assignment.find(t.head());
        if (it == assignment.end()) throw MissingBinding(t.head());
        if (it->second.sort() != t.sort())
            throw SortError({}, "sort " + to_string(t.sort()) + " for " + t.head(), "sort " + to_string(it->second.sort()));
        return it->second;
    }
    if (t.closed()) return t;
    std::vector<Term> kids;
    kids.reserve(t.kids().size());
    for (const auto& k : t.kids()) kids.push_back(substitute(k, assignment));
    return t.with_kids(std::move(kids));
}

std::set<std::string> variables(const Term& t) {
    std::set<std::string> out;
    if (t.is_var()) {
        out.insert(t.head());
        return out;
    }
    for (const auto& k : t.kids())
        for (auto& v : variables(k)) out.insert(v);
    return out;
}

VarStore::VarStore(std::initializer_list<std::pair<const std::string, std::int64_t>> init) {
    for (const auto& [k, v] : init) put(k, v);
}

std::int64_t VarStore::get(const std::string& x) const {
    if (!d_) return 0;
    auto it = d_->m.find(x);
    return it == d_->m.end() ? 0 : it->second;
}

const std::map<std::string, std::int64_t>& VarStore::bindings() const {
    static const std::map<std::string, std::int64_t> empty;
    return d_ ? d_->m : empty;
}

void VarStore::put(const std::string& x, std::int64_t v) {
    if (get(x) == v) return;
    auto m = bindings();
    if (v == 0)
        m.erase(x);
    else
        m[x] = v;
    if (m.empty()) {
        d_.reset();
        return;
    }
    std::size_t h = kEmptyHash;
    for (const auto& [k, val] : m) {
        hash_mix(h, std::hash<std::string>{}(k));
        hash_mix(h, std::hash<std::int64_t>{}(val));
    }
    d_ = std::make_shared<const Data>(Data{std::move(m), h});
}

VarStore VarStore::set(const std::string& x, std::int64_t v) const {
    VarStore r = *this;
    r.put(x, v);
    return r;
}

std::string VarStore::str() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : bindings()) {
        if (!first) out += ",";
        first = false;
        out += k + "=" + std::to_string(v);
    }
    return out + "}";
}

ImpExpr ImpExpr::constant(std::int64_t n) {
    auto p = std::make_shared<Node>();
    p->kind = Kind::Const;
    p->value = n;
    p->hash = std::hash<std::int64_t>{}(n) * 31u + 1u;
    ImpExpr e;
    e.n_ = std::move(p);
    return e;
}

ImpExpr ImpExpr::var(std::string x) {
    auto p = std::make_shared<Node>();
    p->kind = Kind::Var;
    p->name = std::move(x);
    p->hash = std::hash<std::string>{}(p->name) * 31u + 2u;
    ImpExpr e;
    e.n_ = std::move(p);
    return e;
}

ImpExpr ImpExpr::bin(Kind k, ImpExpr a, ImpExpr b) {
    auto p = std::make_shared<Node>();
    p->kind = k;
    std::size_t h = static_cast<std::size_t>(k) + 7u;
    hash_mix(h, a.hash());
    hash_mix(h, b.hash());
    p->hash = h;
    p->a = std::move(a);
    p->b = std::move(b);
    ImpExpr e;
    e.n_ = std::move(p);
    return e;
}

int ImpExpr::depth() const {
    if (kind() == Kind::Const || kind() == Kind::Var) return 1;
    return 1 + std::max(lhs().depth(), rhs().depth());
}

bool operator==(const ImpExpr& a, const ImpExpr& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_) return false;
    if (a.n_->hash != b.n_->hash || a.n_->kind != b.n_->kind) return false;
    switch (a.n_->kind) {
        case ImpExpr::Kind::Const: return a.n_->value == b.n_->value;
        case ImpExpr::Kind::Var: return a.n_->name == b.n_->name;
        default: return a.n_->a == b.n_->a && a.n_->b == b.n_->b;
    }
}

namespace {
int prec(ImpExpr::Kind k) {
    switch (k) {
        case ImpExpr::Kind::Add:
        case ImpExpr::Kind::Sub: return 1;
        case ImpExpr::Kind::Mul: return 2;
        default: return 3;
    }
}

std::string show(const ImpExpr& e, int ctx) {
    switch (e.kind()) {
        case ImpExpr::Kind::Const:
            return e.value() < 0 && ctx > 0 ? "(" + std::to_string(e.value()) + ")" : std::to_string(e.value());
        case ImpExpr::Kind::Var: return e.name();
        default: break;
    }
    int p = prec(e.kind());
    const char* op = e.kind() == ImpExpr::Kind::Add ? " + " : e.kind() == ImpExpr::Kind::Sub ? " - " : " * ";
    // left-associative: the right operand needs strictly higher precedence
    std::string s = show(e.lhs(), p) + op + show(e.rhs(), p + 1);
    return p < ctx ? "(" + s + ")" : s;
}
}  // namespace

std::string ImpExpr::str() const { return show(*this, 0); }

std::int64_t eev(const ImpExpr& e, const VarStore& s) {
    switch (e.kind()) {
        case ImpExpr::Kind::Const: return e.value();
        case ImpExpr::Kind::Var: return s.get(e.name());
        case ImpExpr::Kind::Add: return checked_add(eev(e.lhs(), s), eev(e.rhs(), s));
        case ImpExpr::Kind::Sub: return checked_sub(eev(e.lhs(), s), eev(e.rhs(), s));
        case ImpExpr::Kind::Mul: return checked_mul(eev(e.lhs(), s), eev(e.rhs(), s));
    }
    return 0;
}

}  // namespace rwsos
