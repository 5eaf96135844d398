#include "rwsos/ref2.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <unordered_map>

namespace rwsos::ref2 {

namespace {
std::size_t hint(std::int64_t v) { return std::hash<std::int64_t>{}(v); }
}  // namespace

// ---------------------------------------------------------------- Expr

Expr Expr::loc(Loc l) {
    Expr e;
    std::size_t h = 101;
    hash_mix(h, hint(l));
    e.n_ = std::make_shared<const Node>(Node{Kind::Loc, l, {}, {}, h});
    return e;
}

Expr Expr::integer(std::int64_t n) {
    Expr e;
    std::size_t h = 103;
    hash_mix(h, hint(n));
    e.n_ = std::make_shared<const Node>(Node{Kind::Int, n, {}, {}, h});
    return e;
}

Expr Expr::deref(Expr a) {
    Expr e;
    std::size_t h = 107;
    hash_mix(h, a.hash());
    e.n_ = std::make_shared<const Node>(Node{Kind::Deref, 0, std::move(a), {}, h});
    return e;
}

Expr Expr::add(Expr a, Expr b) {
    Expr e;
    std::size_t h = 109;
    hash_mix(h, a.hash());
    hash_mix(h, b.hash());
    e.n_ = std::make_shared<const Node>(Node{Kind::Add, 0, std::move(a), std::move(b), h});
    return e;
}

Expr Expr::sub(Expr a, Expr b) {
    Expr e;
    std::size_t h = 113;
    hash_mix(h, a.hash());
    hash_mix(h, b.hash());
    e.n_ = std::make_shared<const Node>(Node{Kind::Sub, 0, std::move(a), std::move(b), h});
    return e;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_ || a.hash() != b.hash() || a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Expr::Kind::Loc:
        case Expr::Kind::Int: return a.value() == b.value();
        case Expr::Kind::Deref: return a.lhs() == b.lhs();
        default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
}

std::string Expr::str() const {
    auto atom = [](const Expr& e) {
        bool bin = e.kind() == Kind::Add || e.kind() == Kind::Sub;
        return bin ? "(" + e.str() + ")" : e.str();
    };
    switch (kind()) {
        case Kind::Loc: return "#" + std::to_string(value());
        case Kind::Int: return std::to_string(value());
        case Kind::Deref: return "!" + atom(lhs());
        case Kind::Add: return lhs().str() + " (+) " + atom(rhs());
        case Kind::Sub: return lhs().str() + " (-) " + atom(rhs());
    }
    return {};
}

// ---------------------------------------------------------------- Reader

struct Reader::Node {
    Kind kind;
    Expr e;
    Reader a, b;
    std::size_t hash, size;
    bool hole;
};

namespace {
std::size_t reader_size(const Reader& r) { return r.valid() ? r.size() : 0; }
}  // namespace

#define RWSOS_MAKE_READER(K, E, A, B, EXTRA)                                              \
    Reader r;                                                                              \
    std::size_t h = 200 + static_cast<std::size_t>(K);                                    \
    if ((E).valid()) hash_mix(h, (E).hash());                                              \
    if ((A).valid()) hash_mix(h, (A).hash());                                              \
    if ((B).valid()) hash_mix(h, (B).hash());                                              \
    std::size_t sz = 1 + ((E).valid() ? 1 : 0) + reader_size(A) + reader_size(B) + (EXTRA); \
    bool hole = ((A).valid() && (A).has_hole()) || ((B).valid() && (B).has_hole());        \
    r.n_ = std::make_shared<const Node>(Node{K, E, A, B, h, sz, hole});                    \
    return r;

Reader Reader::skip() {
    static const Reader s = [] {
        Expr e;
        Reader a, b;
        RWSOS_MAKE_READER(Kind::Skip, e, a, b, 0)
    }();
    return s;
}
Reader Reader::while_(Expr e, Reader p) {
    Reader b;
    RWSOS_MAKE_READER(Kind::While, e, p, b, 0)
}
Reader Reader::assign(Expr e, Reader p) {
    Reader b;
    RWSOS_MAKE_READER(Kind::Assign, e, p, b, 0)
}
Reader Reader::if_(Expr e, Reader p, Reader q) { RWSOS_MAKE_READER(Kind::If, e, p, q, 0) }
Reader Reader::seq(Reader p, Reader q) {
    Expr e;
    RWSOS_MAKE_READER(Kind::Seq, e, p, q, 0)
}
Reader Reader::alloc(Reader p) {
    Expr e;
    Reader b;
    RWSOS_MAKE_READER(Kind::Alloc, e, p, b, 0)
}
Reader Reader::expr(Expr e) {
    Reader a, b;
    RWSOS_MAKE_READER(Kind::ExprR, e, a, b, 0)
}
Reader Reader::proc(Reader p) {
    Expr e;
    Reader b;
    RWSOS_MAKE_READER(Kind::Proc, e, p, b, 0)
}
Reader Reader::hole() {
    Reader r;
    r.n_ = std::make_shared<const Node>(Node{Kind::Hole, {}, {}, {}, 299, 1, true});
    return r;
}

#undef RWSOS_MAKE_READER

Reader::Kind Reader::kind() const { return n_->kind; }
const Expr& Reader::expr() const { return n_->e; }
const Reader& Reader::first() const { return n_->a; }
const Reader& Reader::second() const { return n_->b; }
std::size_t Reader::hash() const { return n_->hash; }
std::size_t Reader::size() const { return n_->size; }
bool Reader::has_hole() const { return n_->hole; }

bool operator==(const Reader& a, const Reader& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_) return false;
    if (a.hash() != b.hash() || a.kind() != b.kind() || a.size() != b.size()) return false;
    if (a.n_->e.valid() != b.n_->e.valid() || (a.n_->e.valid() && !(a.n_->e == b.n_->e))) return false;
    if (a.n_->a.valid() != b.n_->a.valid() || (a.n_->a.valid() && a.n_->a != b.n_->a)) return false;
    if (a.n_->b.valid() != b.n_->b.valid() || (a.n_->b.valid() && a.n_->b != b.n_->b)) return false;
    return true;
}

std::string Reader::str() const {
    // `;` is right-associative; assignment right-hand sides and & operands
    // bind tighter than `;`.
    auto tight = [](const Reader& r) {
        return r.kind() == Kind::Seq ? "(" + r.str() + ")" : r.str();
    };
    switch (kind()) {
        case Kind::Skip: return "skip";
        case Kind::While: return "while " + expr().str() + " { " + first().str() + " }";
        case Kind::Assign: {
            if (first().kind() == Kind::ExprR) return expr().str() + " := " + first().expr().str();
            return expr().str() + " := " + tight(first());
        }
        case Kind::If:
            return "if " + expr().str() + " { " + first().str() + " } else { " + second().str() + " }";
        case Kind::Seq: return tight(first()) + " ; " + second().str();
        case Kind::Alloc: return "&" + tight(first());
        case Kind::ExprR: return "expr " + expr().str();
        case Kind::Proc: return "proc { " + first().str() + " }";
        case Kind::Hole: return "·";
    }
    return {};
}

// ---------------------------------------------------------------- Value, Store

std::size_t Value::hash() const {
    std::size_t h = 300 + static_cast<std::size_t>(kind);
    hash_mix(h, kind == Kind::Reader ? p.hash() : hint(n));
    return h;
}

std::string Value::str() const {
    switch (kind) {
        case Kind::Loc: return "#" + std::to_string(n);
        case Kind::Int: return std::to_string(n);
        case Kind::Reader: return "{" + p.str() + "}";
    }
    return {};
}

Store::Store(std::initializer_list<std::pair<const Loc, Value>> init)
    : m_(std::make_shared<const std::map<Loc, Value>>(init)) {}

const Value* Store::get(Loc l) const {
    if (!m_) return nullptr;
    auto it = m_->find(l);
    return it == m_->end() ? nullptr : &it->second;
}

Store Store::set(Loc l, Value v) const {
    auto m = m_ ? std::make_shared<std::map<Loc, Value>>(*m_) : std::make_shared<std::map<Loc, Value>>();
    (*m)[l] = std::move(v);
    Store s;
    s.m_ = std::move(m);
    return s;
}

std::vector<Loc> Store::dom() const {
    std::vector<Loc> d;
    if (m_)
        for (const auto& [l, v] : *m_) d.push_back(l);
    return d;
}

const std::map<Loc, Value>& Store::cells() const {
    static const std::map<Loc, Value> empty;
    return m_ ? *m_ : empty;
}

Loc Store::min_unused() const {
    Loc l = 0;
    if (m_)
        for (const auto& [k, v] : *m_) {
            if (k == l) ++l;
            else if (k > l) break;
        }
    return l;
}

std::size_t Store::hash() const {
    std::size_t h = 401;
    if (m_)
        for (const auto& [l, v] : *m_) {
            hash_mix(h, hint(l));
            hash_mix(h, v.hash());
        }
    return h;
}

std::string Store::str() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [l, v] : cells()) {
        if (!first) out += ", ";
        first = false;
        out += "#" + std::to_string(l) + "=" + v.str();
    }
    return out + "}";
}

bool operator==(const Store& a, const Store& b) {
    if (a.m_ == b.m_) return true;
    return a.cells() == b.cells();
}

namespace {
bool store_has_hole(const Store& s) {
    for (const auto& [l, v] : s.cells())
        if (v.kind == Value::Kind::Reader && v.p.has_hole()) return true;
    return false;
}
std::size_t store_cost(const Store& s) {
    std::size_t n = 0;
    for (const auto& [l, v] : s.cells())
        if (v.kind == Value::Kind::Reader && v.p.kind() == Reader::Kind::Hole) ++n;
    return n;
}
}  // namespace

// ---------------------------------------------------------------- Writer

struct Writer::Node {
    Kind kind;
    Expr e;
    Writer c;
    Reader p;
    Store s;
    Value v;
    std::size_t hash, size;
    bool hole;
};

namespace {
struct WriterParts {
    Expr e;
    Writer c;
    Reader p;
    Store s;
    Value v;
};
}  // namespace

#define RWSOS_MAKE_WRITER(K, PARTS)                                                                   \
    Writer w;                                                                                          \
    const WriterParts& x = (PARTS);                                                                    \
    std::size_t h = 500 + static_cast<std::size_t>(K);                                                \
    std::size_t sz = 1;                                                                                \
    bool hole = false;                                                                                 \
    if (x.e.valid()) { hash_mix(h, x.e.hash()); sz += 1; }                                            \
    if (x.c.valid()) { hash_mix(h, x.c.hash()); sz += x.c.size(); hole = hole || x.c.has_hole(); }   \
    if (x.p.valid()) { hash_mix(h, x.p.hash()); sz += x.p.size(); hole = hole || x.p.has_hole(); }   \
    hash_mix(h, x.s.hash());                                                                           \
    sz += store_cost(x.s);                                                                             \
    hole = hole || store_has_hole(x.s);                                                                \
    if ((K) == Kind::RetVal) {                                                                         \
        hash_mix(h, x.v.hash());                                                                       \
        if (x.v.kind == Value::Kind::Reader && x.v.p.has_hole()) { sz += x.v.p.size(); hole = true; } \
        else sz += 1;                                                                                  \
    }                                                                                                  \
    w.n_ = std::make_shared<const Node>(Node{K, x.e, x.c, x.p, x.s, x.v, h, sz, hole});               \
    return w;

Writer Writer::assign(Expr e, Writer c) { RWSOS_MAKE_WRITER(Kind::Assign, (WriterParts{std::move(e), std::move(c), {}, {}, {}})) }
Writer Writer::seq(Writer c, Reader q) { RWSOS_MAKE_WRITER(Kind::Seq, (WriterParts{{}, std::move(c), std::move(q), {}, {}})) }
Writer Writer::alloc(Writer c) { RWSOS_MAKE_WRITER(Kind::Alloc, (WriterParts{{}, std::move(c), {}, {}, {}})) }
Writer Writer::emit(Store s, Writer c) { RWSOS_MAKE_WRITER(Kind::Emit, (WriterParts{{}, std::move(c), {}, std::move(s), {}})) }
Writer Writer::run(Reader p, Store s) { RWSOS_MAKE_WRITER(Kind::Run, (WriterParts{{}, {}, std::move(p), std::move(s), {}})) }
Writer Writer::ret_val(Value v, Store s) { RWSOS_MAKE_WRITER(Kind::RetVal, (WriterParts{{}, {}, {}, std::move(s), std::move(v)})) }
Writer Writer::ret(Store s) { RWSOS_MAKE_WRITER(Kind::Ret, (WriterParts{{}, {}, {}, std::move(s), {}})) }

#undef RWSOS_MAKE_WRITER

Writer::Kind Writer::kind() const { return n_->kind; }
const Expr& Writer::expr() const { return n_->e; }
const Writer& Writer::inner() const { return n_->c; }
const Reader& Writer::reader() const { return n_->p; }
const Store& Writer::store() const { return n_->s; }
const Value& Writer::value() const { return n_->v; }
std::size_t Writer::hash() const { return n_->hash; }
std::size_t Writer::size() const { return n_->size; }
bool Writer::has_hole() const { return n_->hole; }

bool operator==(const Writer& a, const Writer& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_) return false;
    if (a.hash() != b.hash() || a.kind() != b.kind() || a.size() != b.size()) return false;
    const auto& x = *a.n_;
    const auto& y = *b.n_;
    if (x.e.valid() != y.e.valid() || (x.e.valid() && !(x.e == y.e))) return false;
    if (x.c.valid() != y.c.valid() || (x.c.valid() && x.c != y.c)) return false;
    if (x.p.valid() != y.p.valid() || (x.p.valid() && x.p != y.p)) return false;
    if (x.s != y.s) return false;
    return x.kind != Writer::Kind::RetVal || x.v == y.v;
}

std::string Writer::str() const {
    auto tight = [](const Writer& w) {
        return w.kind() == Kind::Seq ? "(" + w.str() + ")" : w.str();
    };
    switch (kind()) {
        case Kind::Assign: return expr().str() + " := " + tight(inner());
        case Kind::Seq: {
            const Reader& q = reader();
            return tight(inner()) + " ; " + (q.kind() == Reader::Kind::Seq ? "(" + q.str() + ")" : q.str());
        }
        case Kind::Alloc: return "&" + tight(inner());
        case Kind::Emit: return store().str() + "." + tight(inner());
        case Kind::Run: return "[" + reader().str() + "]@" + store().str();
        case Kind::RetVal: return "ret(" + value().str() + ")@" + store().str();
        case Kind::Ret: return "ret@" + store().str();
    }
    return {};
}

// ---------------------------------------------------------------- semantics

std::optional<Value> eev(const Expr& e, const Store& s) {
    switch (e.kind()) {
        case Expr::Kind::Loc: return Value::loc(e.value());
        case Expr::Kind::Int: return Value::integer(e.value());
        case Expr::Kind::Deref: {
            auto v = eev(e.lhs(), s);
            if (!v || v->kind != Value::Kind::Loc) return std::nullopt;
            const Value* cell = s.get(v->n);
            if (!cell) return std::nullopt;
            return *cell;
        }
        case Expr::Kind::Add:
        case Expr::Kind::Sub: {
            auto a = eev(e.lhs(), s);
            if (!a || a->kind != Value::Kind::Int) return std::nullopt;
            auto b = eev(e.rhs(), s);
            if (!b || b->kind != Value::Kind::Int) return std::nullopt;
            return Value::integer(e.kind() == Expr::Kind::Add ? checked_add(a->n, b->n) : checked_sub(a->n, b->n));
        }
    }
    return std::nullopt;
}

namespace {
ReaderStep stuck(std::string why) { return {std::nullopt, std::move(why)}; }

// Integer guard or a reason it is not one.
std::optional<std::int64_t> guard(const Expr& e, const Store& s, std::string& why) {
    auto v = eev(e, s);
    if (!v) {
        why = "evaluation of " + e.str() + " is undefined";
        return std::nullopt;
    }
    if (v->kind != Value::Kind::Int) {
        why = "evaluation of " + e.str() + " is not an integer";
        return std::nullopt;
    }
    return v->n;
}
}  // namespace

ReaderStep reader_step(const Reader& p, const Store& s) {
    using K = Reader::Kind;
    switch (p.kind()) {
        case K::Skip: return {Writer::ret(s), {}};
        case K::While: {
            std::string why;
            auto n = guard(p.expr(), s, why);
            if (!n) return stuck("while: " + why);
            if (*n == 0) return {Writer::ret(s), {}};
            return {Writer::emit(s, Writer::run(Reader::seq(p.first(), p), s)), {}};
        }
        case K::Assign: return {Writer::assign(p.expr(), Writer::run(p.first(), s)), {}};
        case K::If: {
            std::string why;
            auto n = guard(p.expr(), s, why);
            if (!n) return stuck("if: " + why);
            return {Writer::emit(s, Writer::run(*n != 0 ? p.first() : p.second(), s)), {}};
        }
        case K::Seq: return {Writer::seq(Writer::run(p.first(), s), p.second()), {}};
        case K::Alloc: return {Writer::alloc(Writer::run(p.first(), s)), {}};
        case K::ExprR: {
            auto v = eev(p.expr(), s);
            if (!v) return stuck("expr: evaluation of " + p.expr().str() + " is undefined");
            if (v->kind == Value::Kind::Reader) return {Writer::emit(s, Writer::run(v->p, s)), {}};
            return {Writer::ret_val(*v, s), {}};
        }
        case K::Proc: return {Writer::ret_val(Value::reader(p.first()), s), {}};
        case K::Hole: return stuck("unfilled hole");
    }
    return stuck("unknown reader");
}

std::string RefStep::str() const {
    switch (kind) {
        case StepKind::Silent: return "-> " + next.str();
        case StepKind::Output: return "-" + store.str() + "-> " + next.str();
        case StepKind::DoneStore: return "stops with " + store.str();
        case StepKind::DoneVal: return "stops with " + value.str() + ", " + store.str() + (fresh ? " (fresh)" : "");
    }
    return {};
}

namespace {

void expr_locs(const Expr& e, std::set<Loc>& out) {
    switch (e.kind()) {
        case Expr::Kind::Loc: out.insert(e.value()); break;
        case Expr::Kind::Int: break;
        case Expr::Kind::Deref: expr_locs(e.lhs(), out); break;
        default:
            expr_locs(e.lhs(), out);
            expr_locs(e.rhs(), out);
    }
}

void reader_locs(const Reader& r, std::set<Loc>& out) {
    if (!r.valid()) return;
    if (r.expr().valid()) expr_locs(r.expr(), out);
    reader_locs(r.first(), out);
    reader_locs(r.second(), out);
}

void value_locs(const Value& v, std::set<Loc>& out) {
    if (v.kind == Value::Kind::Loc) out.insert(v.n);
    if (v.kind == Value::Kind::Reader) reader_locs(v.p, out);
}

void store_locs(const Store& s, std::set<Loc>& out) {
    for (const auto& [l, v] : s.cells()) {
        out.insert(l);
        value_locs(v, out);
    }
}

void writer_locs(const Writer& w, std::set<Loc>& out) {
    if (!w.valid()) return;
    if (w.expr().valid()) expr_locs(w.expr(), out);
    writer_locs(w.inner(), out);
    reader_locs(w.reader(), out);
    store_locs(w.store(), out);
    if (w.kind() == Writer::Kind::RetVal) value_locs(w.value(), out);
}

// relevant is null in canonical mode
void steps_of(const Writer& c, const std::set<Loc>* relevant, std::vector<RefStep>& out) {
    using K = Writer::Kind;
    switch (c.kind()) {
        case K::Run: {
            auto r = reader_step(c.reader(), c.store());
            if (r.next) out.push_back({StepKind::Silent, *r.next, {}, {}, false});
            return;
        }
        case K::RetVal: out.push_back({StepKind::DoneVal, {}, c.store(), c.value(), false}); return;
        case K::Ret: out.push_back({StepKind::DoneStore, {}, c.store(), {}, false}); return;
        case K::Emit: out.push_back({StepKind::Output, c.inner(), c.store(), {}, false}); return;
        default: break;
    }
    std::vector<RefStep> inner;
    steps_of(c.inner(), relevant, inner);
    for (auto& st : inner) {
        switch (c.kind()) {
            case K::Alloc:
                if (st.kind == StepKind::Silent || st.kind == StepKind::Output) {
                    st.next = Writer::alloc(st.next);
                    out.push_back(std::move(st));
                } else if (st.kind == StepKind::DoneVal) {
                    std::vector<Loc> choices;
                    if (!relevant) {
                        choices.push_back(st.store.min_unused());
                    } else {
                        for (Loc l : *relevant)
                            if (l >= 0 && !st.store.contains(l)) choices.push_back(l);
                        Loc l = 0;
                        while (relevant->count(l) || st.store.contains(l)) ++l;
                        choices.push_back(l);
                    }
                    for (Loc l : choices)
                        out.push_back({StepKind::DoneVal, {}, st.store.set(l, st.value), Value::loc(l), true});
                }
                break;
            case K::Seq:
                if (st.kind == StepKind::Silent || st.kind == StepKind::Output) {
                    st.next = Writer::seq(st.next, c.reader());
                    out.push_back(std::move(st));
                } else if (st.kind == StepKind::DoneVal) {
                    out.push_back({StepKind::Output, Writer::run(c.reader(), st.store), st.store, {}, false});
                } else {
                    out.push_back({StepKind::Silent, Writer::run(c.reader(), st.store), {}, {}, false});
                }
                break;
            case K::Assign:
                if (st.kind == StepKind::Silent || st.kind == StepKind::Output) {
                    st.next = Writer::assign(c.expr(), st.next);
                    out.push_back(std::move(st));
                } else if (st.kind == StepKind::DoneVal) {
                    auto l = eev(c.expr(), st.store);
                    if (l && l->kind == Value::Kind::Loc)
                        out.push_back({StepKind::DoneStore, {}, st.store.set(l->n, st.value), {}, false});
                }
                break;
            default: break;
        }
    }
}

std::string stuck_reason(const Writer& c) {
    using K = Writer::Kind;
    switch (c.kind()) {
        case K::Run: return reader_step(c.reader(), c.store()).stuck;
        case K::Alloc: {
            auto inner = writer_steps(c.inner());
            if (inner.empty()) return stuck_reason(c.inner());
            return "&: operand terminated without a value";
        }
        case K::Seq: return stuck_reason(c.inner());
        case K::Assign: {
            auto inner = writer_steps(c.inner());
            if (inner.empty()) return stuck_reason(c.inner());
            if (inner.front().kind == StepKind::DoneStore) return ":=: right-hand side terminated without a value";
            return ":=: " + c.expr().str() + " does not evaluate to a location";
        }
        default: return "no rule applies";
    }
}

}  // namespace

std::vector<RefStep> writer_steps(const Writer& c, Alloc mode) {
    std::vector<RefStep> out;
    if (mode == Alloc::Canonical) {
        steps_of(c, nullptr, out);
    } else {
        std::set<Loc> relevant;
        writer_locs(c, relevant);
        steps_of(c, &relevant, out);
    }
    return out;
}

std::string Outcome::str() const {
    switch (kind) {
        case Kind::Value: return "Value(" + value.str() + ", " + store.str() + ")";
        case Kind::Store: return "Store(" + store.str() + ")";
        case Kind::Stuck: return "Stuck(" + stuck + ")";
        case Kind::Cut: return "Cut";
    }
    return {};
}

Outcome run(const Writer& start, std::size_t fuel) {
    Outcome o;
    Writer c = start;
    while (true) {
        auto steps = writer_steps(c);
        if (steps.empty()) {
            o.kind = Outcome::Kind::Stuck;
            o.stuck = stuck_reason(c);
            return o;
        }
        auto& st = steps.front();
        if (st.kind == StepKind::DoneStore) {
            o.kind = Outcome::Kind::Store;
            o.store = st.store;
            return o;
        }
        if (st.kind == StepKind::DoneVal) {
            o.kind = Outcome::Kind::Value;
            o.value = st.value;
            o.store = st.store;
            return o;
        }
        if (o.steps == fuel) {
            o.kind = Outcome::Kind::Cut;
            return o;
        }
        ++o.steps;
        c = st.next;
    }
}

Outcome run(const Reader& p, const Store& s, std::size_t fuel) { return run(Writer::run(p, s), fuel); }

Closure weak_closure(const Writer& c, std::size_t fuel, Alloc mode) {
    Closure out;
    std::unordered_set<Writer, WriterHash> seen{c};
    std::deque<Writer> todo{c};
    out.reach.push_back(c);
    auto add_unique_store = [&](const Store& s) {
        if (std::find(out.terminationsStore.begin(), out.terminationsStore.end(), s) == out.terminationsStore.end())
            out.terminationsStore.push_back(s);
    };
    while (!todo.empty()) {
        if (out.expansions >= fuel) {
            out.truncated = true;
            break;
        }
        Writer w = todo.front();
        todo.pop_front();
        ++out.expansions;
        for (auto& st : writer_steps(w, mode)) {
            switch (st.kind) {
                case StepKind::Silent:
                case StepKind::Output:
                    if (seen.insert(st.next).second) {
                        out.reach.push_back(st.next);
                        todo.push_back(st.next);
                    }
                    break;
                case StepKind::DoneStore: add_unique_store(st.store); break;
                case StepKind::DoneVal: {
                    std::pair<Value, Store> vs{st.value, st.store};
                    if (std::find(out.terminationsVal.begin(), out.terminationsVal.end(), vs) == out.terminationsVal.end())
                        out.terminationsVal.push_back(std::move(vs));
                    break;
                }
            }
        }
    }
    return out;
}

std::string to_string(Halting h) {
    switch (h) {
        case Halting::Terminates: return "terminates";
        case Halting::Diverges: return "diverges";
        case Halting::Unknown: return "unknown";
    }
    return {};
}

HaltVerdict halts(const Writer& c, std::size_t cap) {
    HaltVerdict v;
    try {
        // Most terminating runs are found by the canonical run already.
        Outcome o = run(c, cap);
        v.explored = o.steps;
        if (o.kind == Outcome::Kind::Value || o.kind == Outcome::Kind::Store) {
            v.halting = Halting::Terminates;
            return v;
        }
        std::unordered_set<Writer, WriterHash> seen{c};
        std::deque<Writer> todo{c};
        while (!todo.empty()) {
            Writer w = todo.front();
            todo.pop_front();
            for (auto& st : writer_steps(w, Alloc::Exhaustive)) {
                if (st.kind == StepKind::DoneStore || st.kind == StepKind::DoneVal) {
                    v.halting = Halting::Terminates;
                    v.explored += seen.size();
                    return v;
                }
                if (seen.insert(st.next).second) {
                    if (seen.size() > cap) {
                        v.halting = Halting::Unknown;
                        v.explored += seen.size();
                        return v;
                    }
                    todo.push_back(st.next);
                }
            }
        }
        v.explored += seen.size();
        v.halting = Halting::Diverges;
    } catch (const OverflowError&) {
        v.halting = Halting::Unknown;
    }
    return v;
}

HaltVerdict halts(const Reader& p, const Store& s, std::size_t cap) { return halts(Writer::run(p, s), cap); }

// ---------------------------------------------------------------- relations

void Relation::add_reader(const Reader& p, const Reader& q) {
    if (rset_.insert({p, q}).second) readers_.emplace_back(p, q);
}
void Relation::add_writer(const Writer& c, const Writer& d) {
    if (wset_.insert({c, d}).second) writers_.emplace_back(c, d);
}
bool Relation::has_reader(const Reader& p, const Reader& q) const {
    return (diagonal && p == q) || rset_.count({p, q}) > 0;
}
bool Relation::has_writer(const Writer& c, const Writer& d) const {
    return (diagonal && c == d) || wset_.count({c, d}) > 0;
}

Relation Relation::converse() const {
    Relation r;
    r.diagonal = diagonal;
    for (const auto& [p, q] : readers_) r.add_reader(q, p);
    for (const auto& [c, d] : writers_) r.add_writer(d, c);
    return r;
}

Relation Relation::symmetrized() const {
    Relation r = *this;
    for (const auto& [p, q] : readers_) r.add_reader(q, p);
    for (const auto& [c, d] : writers_) r.add_writer(d, c);
    return r;
}

bool value_related(const Relation& R, const Value& a, const Value& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Value::Kind::Reader) return R.has_reader(a.p, b.p);
    return a.n == b.n;
}

bool store_related(const Relation& R, const Store& a, const Store& b) {
    const auto& x = a.cells();
    const auto& y = b.cells();
    if (x.size() != y.size()) return false;
    for (auto i = x.begin(), j = y.begin(); i != x.end(); ++i, ++j)
        if (i->first != j->first || !value_related(R, i->second, j->second)) return false;
    return true;
}

bool value_store_related(const Relation& R, const ValueOrStore& a, const ValueOrStore& b) {
    if (a.index() != b.index()) throw KindMismatch("cannot relate a value with a store");
    if (a.index() == 0) return value_related(R, std::get<Value>(a), std::get<Value>(b));
    return store_related(R, std::get<Store>(a), std::get<Store>(b));
}

std::string to_string(Status s) {
    switch (s) {
        case Status::Holds: return "Holds";
        case Status::Fails: return "Fails";
        case Status::Inconclusive: return "Inconclusive";
    }
    return {};
}

SimVerdict check_ho_termination_sim(const Relation& R, const std::vector<Store>& sample, const SimOptions& opt) {
    SimVerdict v;
    auto fail = [&](char sort, int clause, std::string l, std::string r, std::string s, std::string w) {
        v.status = Status::Fails;
        v.sort = sort;
        v.clause = clause;
        v.left = std::move(l);
        v.right = std::move(r);
        v.store = std::move(s);
        v.witness = std::move(w);
        return v;
    };
    bool inconclusive = false;
    SimVerdict firstInconclusive;

    for (const auto& [p, q] : R.readers()) {
        ++v.pairsChecked;
        for (const auto& s : sample) {
            auto rp = reader_step(p, s);
            auto rq = reader_step(q, s);
            if (!rp.next) {
                if (opt.stuckMustMatch && rq.next)
                    return fail('r', 1, p.str(), q.str(), s.str(), "left is stuck (" + rp.stuck + ") but right steps to " + rq.next->str());
                continue;
            }
            if (!rq.next)
                return fail('r', 1, p.str(), q.str(), s.str(), "left steps to " + rp.next->str() + " but right is stuck (" + rq.stuck + ")");
            if (!R.has_writer(*rp.next, *rq.next))
                return fail('r', 1, p.str(), q.str(), s.str(),
                            "(" + rp.next->str() + ", " + rq.next->str() + ") is not related");
        }
    }

    for (const auto& [c, d] : R.writers()) {
        ++v.pairsChecked;
        auto steps = writer_steps(c);
        if (steps.empty()) continue;
        Closure cl = weak_closure(d, opt.fuel);
        for (const auto& st : steps) {
            bool ok = false;
            int clause = 0;
            switch (st.kind) {
                case StepKind::Silent:
                case StepKind::Output:
                    clause = 2;
                    for (const auto& d2 : cl.reach)
                        if (R.has_writer(st.next, d2)) { ok = true; break; }
                    break;
                case StepKind::DoneStore:
                    clause = 3;
                    for (const auto& s2 : cl.terminationsStore)
                        if (store_related(R, st.store, s2)) { ok = true; break; }
                    break;
                case StepKind::DoneVal:
                    clause = 4;
                    for (const auto& [v2, s2] : cl.terminationsVal)
                        if (value_related(R, st.value, v2) && store_related(R, st.store, s2)) { ok = true; break; }
                    break;
            }
            if (ok) continue;
            if (cl.truncated) {
                if (!inconclusive) {
                    inconclusive = true;
                    firstInconclusive.sort = 'w';
                    firstInconclusive.clause = clause;
                    firstInconclusive.left = c.str();
                    firstInconclusive.right = d.str();
                    firstInconclusive.witness = "left " + st.str() + "; no match within fuel";
                }
                continue;
            }
            return fail('w', clause, c.str(), d.str(), "", "left " + st.str() + "; right has no matching weak transition");
        }
    }
    if (inconclusive) {
        firstInconclusive.status = Status::Inconclusive;
        firstInconclusive.pairsChecked = v.pairsChecked;
        return firstInconclusive;
    }
    return v;
}

// ---------------------------------------------------------------- certify_pair

namespace {

// Local greatest fixpoint: each pair's validity is a conjunction of
// obligations, each a disjunction of options, each a conjunction of pairs.
struct Gfp {
    using Option = std::vector<int>;
    using Obligation = std::vector<Option>;

    struct PairNode {
        bool writer;
        Reader p, q;
        Writer c, d;
        std::vector<Obligation> obligations;
        bool alive = true;
    };

    struct RPairHash {
        std::size_t operator()(const std::pair<Reader, Reader>& x) const {
            std::size_t h = x.first.hash();
            hash_mix(h, x.second.hash());
            return h;
        }
    };
    struct WPairHash {
        std::size_t operator()(const std::pair<Writer, Writer>& x) const {
            std::size_t h = x.first.hash();
            hash_mix(h, x.second.hash());
            return h;
        }
    };

    const std::vector<Store>& sample;
    const SimOptions& opt;
    std::size_t maxPairs;
    std::vector<PairNode> nodes;
    std::unordered_map<std::pair<Reader, Reader>, int, RPairHash> rIndex;
    std::unordered_map<std::pair<Writer, Writer>, int, WPairHash> wIndex;
    std::unordered_map<Writer, Closure, WriterHash> closures;
    std::deque<int> todo;
    bool truncated = false, overflow = false;
    std::unordered_set<Reader, ReaderHash> readersSeen;
    std::unordered_set<Writer, WriterHash> writersSeen;

    Gfp(const std::vector<Store>& s, const SimOptions& o, std::size_t m) : sample(s), opt(o), maxPairs(m) {}

    // -1: trivially valid (identical sides)
    int reader_pair(const Reader& p, const Reader& q) {
        if (p == q) return -1;
        auto it = rIndex.find({p, q});
        if (it != rIndex.end()) return it->second;
        int id = static_cast<int>(nodes.size());
        nodes.push_back({false, p, q, {}, {}, {}, true});
        rIndex.emplace(std::make_pair(p, q), id);
        readersSeen.insert(p);
        readersSeen.insert(q);
        todo.push_back(id);
        return id;
    }

    int writer_pair(const Writer& c, const Writer& d) {
        if (c == d) return -1;
        auto it = wIndex.find({c, d});
        if (it != wIndex.end()) return it->second;
        int id = static_cast<int>(nodes.size());
        nodes.push_back({true, {}, {}, c, d, {}, true});
        wIndex.emplace(std::make_pair(c, d), id);
        writersSeen.insert(c);
        writersSeen.insert(d);
        todo.push_back(id);
        return id;
    }

    const Closure& closure(const Writer& d) {
        auto it = closures.find(d);
        if (it == closures.end()) {
            it = closures.emplace(d, weak_closure(d, opt.fuel)).first;
            if (it->second.truncated) truncated = true;
        }
        return it->second;
    }

    // Option for V(R) on values; nullopt when impossible regardless of R.
    std::optional<Option> value_option(const Value& a, const Value& b) {
        if (a.kind != b.kind) return std::nullopt;
        if (a.kind != Value::Kind::Reader) {
            if (a.n != b.n) return std::nullopt;
            return Option{};
        }
        Option o;
        int id = reader_pair(a.p, b.p);
        if (id >= 0) o.push_back(id);
        return o;
    }

    std::optional<Option> store_option(const Store& a, const Store& b) {
        const auto& x = a.cells();
        const auto& y = b.cells();
        if (x.size() != y.size()) return std::nullopt;
        Option o;
        for (auto i = x.begin(), j = y.begin(); i != x.end(); ++i, ++j) {
            if (i->first != j->first) return std::nullopt;
            auto vo = value_option(i->second, j->second);
            if (!vo) return std::nullopt;
            o.insert(o.end(), vo->begin(), vo->end());
        }
        return o;
    }

    void expand(int id) {
        // nodes may reallocate while expanding; copy what we need first
        if (!nodes[static_cast<std::size_t>(id)].writer) {
            Reader p = nodes[static_cast<std::size_t>(id)].p;
            Reader q = nodes[static_cast<std::size_t>(id)].q;
            std::vector<Obligation> obs;
            for (const auto& s : sample) {
                auto rp = reader_step(p, s);
                auto rq = reader_step(q, s);
                if (!rp.next) {
                    if (opt.stuckMustMatch && rq.next) obs.push_back({});  // unsatisfiable
                    continue;
                }
                if (!rq.next) {
                    obs.push_back({});
                    continue;
                }
                int w = writer_pair(*rp.next, *rq.next);
                obs.push_back({w >= 0 ? Option{w} : Option{}});
            }
            nodes[static_cast<std::size_t>(id)].obligations = std::move(obs);
            return;
        }
        Writer c = nodes[static_cast<std::size_t>(id)].c;
        Writer d = nodes[static_cast<std::size_t>(id)].d;
        std::vector<Obligation> obs;
        auto steps = writer_steps(c);
        if (!steps.empty()) {
            const Closure cl = closure(d);
            for (const auto& st : steps) {
                Obligation ob;
                switch (st.kind) {
                    case StepKind::Silent:
                    case StepKind::Output:
                        for (const auto& d2 : cl.reach) {
                            int w = writer_pair(st.next, d2);
                            if (w < 0) {
                                ob.assign(1, Option{});
                                break;
                            }
                            ob.push_back({w});
                        }
                        break;
                    case StepKind::DoneStore:
                        for (const auto& s2 : cl.terminationsStore)
                            if (auto o = store_option(st.store, s2)) ob.push_back(std::move(*o));
                        break;
                    case StepKind::DoneVal:
                        for (const auto& [v2, s2] : cl.terminationsVal) {
                            auto vo = value_option(st.value, v2);
                            if (!vo) continue;
                            auto so = store_option(st.store, s2);
                            if (!so) continue;
                            vo->insert(vo->end(), so->begin(), so->end());
                            ob.push_back(std::move(*vo));
                        }
                        break;
                }
                obs.push_back(std::move(ob));
            }
        }
        nodes[static_cast<std::size_t>(id)].obligations = std::move(obs);
    }

    bool build() {
        while (!todo.empty()) {
            if (nodes.size() > maxPairs) {
                overflow = true;
                return false;
            }
            int id = todo.front();
            todo.pop_front();
            expand(id);
        }
        return true;
    }

    void prune() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto& n : nodes) {
                if (!n.alive) continue;
                for (const auto& ob : n.obligations) {
                    bool some = false;
                    for (const auto& o : ob) {
                        bool all = true;
                        for (int k : o)
                            if (!nodes[static_cast<std::size_t>(k)].alive) { all = false; break; }
                        if (all) { some = true; break; }
                    }
                    if (!some) {
                        n.alive = false;
                        changed = true;
                        break;
                    }
                }
            }
        }
    }
};

}  // namespace

CertifyResult certify_pair(const Reader& p, const Reader& q, const std::vector<Store>& sample, const SimOptions& opt,
                           std::size_t maxPairs) {
    CertifyResult res;
    Gfp g(sample, opt, maxPairs);
    int root = g.reader_pair(p, q);
    if (root < 0) {
        res.status = Status::Holds;
        res.detail = "identical readers";
        return res;
    }
    try {
        if (!g.build()) {
            res.status = Status::Inconclusive;
            res.detail = "pair universe exceeds " + std::to_string(maxPairs);
            res.pairs = g.nodes.size();
            return res;
        }
    } catch (const OverflowError& e) {
        res.status = Status::Inconclusive;
        res.detail = e.what();
        return res;
    }
    g.prune();
    res.pairs = g.nodes.size();
    res.readers = g.readersSeen.size();
    res.writers = g.writersSeen.size();
    if (g.nodes[static_cast<std::size_t>(root)].alive) {
        res.status = Status::Holds;
        for (const auto& n : g.nodes)
            if (n.alive) {
                if (n.writer) res.relation.add_writer(n.c, n.d);
                else res.relation.add_reader(n.p, n.q);
            }
        res.detail = "pair survives the greatest fixpoint";
    } else if (g.truncated) {
        res.status = Status::Inconclusive;
        res.detail = "pair removed, but some weak closure was truncated";
    } else {
        res.status = Status::Fails;
        res.detail = "pair removed by the greatest fixpoint";
    }
    return res;
}

// ---------------------------------------------------------------- adequacy

AdequacyVerdict check_adequacy(const Relation& R, const std::vector<Store>& sample, std::size_t cap) {
    AdequacyVerdict v;
    bool failed = false;
    auto judge = [&](Halting a, Halting b, const std::string& l, const std::string& r, const std::string& s) {
        if (a == Halting::Unknown || b == Halting::Unknown) {
            ++v.inconclusive;
            if (!failed && v.status == Status::Holds) {
                v.status = Status::Inconclusive;
                v.left = l;
                v.right = r;
                v.store = s;
                v.detail = "left " + to_string(a) + ", right " + to_string(b);
            }
            return;
        }
        if (a == b) {
            (a == Halting::Terminates ? v.certifiedTerminating : v.certifiedDivergent) += 2;
            return;
        }
        if (!failed) {
            failed = true;
            v.status = Status::Fails;
            v.left = l;
            v.right = r;
            v.store = s;
            v.detail = "left " + to_string(a) + ", right " + to_string(b);
        }
    };
    for (const auto& [p, q] : R.readers())
        for (const auto& s : sample)
            judge(halts(p, s, cap).halting, halts(q, s, cap).halting, p.str(), q.str(), s.str());
    for (const auto& [c, d] : R.writers()) judge(halts(c, cap).halting, halts(d, cap).halting, c.str(), d.str(), "");
    return v;
}

// ---------------------------------------------------------------- contexts

std::string Context::str() const { return writer ? w.str() : r.str(); }

Reader plug(const Reader& ctx, const Reader& p) {
    if (!ctx.has_hole()) return ctx;
    using K = Reader::Kind;
    switch (ctx.kind()) {
        case K::Hole: return p;
        case K::While: return Reader::while_(ctx.expr(), plug(ctx.first(), p));
        case K::Assign: return Reader::assign(ctx.expr(), plug(ctx.first(), p));
        case K::If: return Reader::if_(ctx.expr(), plug(ctx.first(), p), plug(ctx.second(), p));
        case K::Seq: return Reader::seq(plug(ctx.first(), p), plug(ctx.second(), p));
        case K::Alloc: return Reader::alloc(plug(ctx.first(), p));
        case K::Proc: return Reader::proc(plug(ctx.first(), p));
        default: return ctx;
    }
}

namespace {
Value plug_value(const Value& v, const Reader& p) {
    if (v.kind == Value::Kind::Reader && v.p.has_hole()) return Value::reader(plug(v.p, p));
    return v;
}
}  // namespace

Store plug(const Store& ctx, const Reader& p) {
    Store s = ctx;
    for (const auto& [l, v] : ctx.cells())
        if (v.kind == Value::Kind::Reader && v.p.has_hole()) s = s.set(l, plug_value(v, p));
    return s;
}

Writer plug(const Writer& ctx, const Reader& p) {
    if (!ctx.has_hole()) return ctx;
    using K = Writer::Kind;
    switch (ctx.kind()) {
        case K::Assign: return Writer::assign(ctx.expr(), plug(ctx.inner(), p));
        case K::Seq: return Writer::seq(plug(ctx.inner(), p), plug(ctx.reader(), p));
        case K::Alloc: return Writer::alloc(plug(ctx.inner(), p));
        case K::Emit: return Writer::emit(plug(ctx.store(), p), plug(ctx.inner(), p));
        case K::Run: return Writer::run(plug(ctx.reader(), p), plug(ctx.store(), p));
        case K::RetVal: return Writer::ret_val(plug_value(ctx.value(), p), plug(ctx.store(), p));
        case K::Ret: return Writer::ret(plug(ctx.store(), p));
    }
    return ctx;
}

ContextPools ContextPools::standard() {
    ContextPools c;
    c.exprs = {Expr::integer(0), Expr::integer(1), Expr::integer(2), Expr::loc(0), Expr::loc(1),
               Expr::deref(Expr::loc(0)), Expr::deref(Expr::loc(1))};
    return c;
}

namespace {

struct ContextEnumerator {
    const std::vector<Store>& sample;
    const ContextPools& pools;
    std::vector<std::vector<Reader>> closed;   // by exact size
    std::vector<std::vector<Reader>> rctx;     // by exact size
    std::vector<std::vector<Writer>> wclosed;  // by exact size
    std::vector<std::vector<Writer>> wctx;     // by exact size

    ContextEnumerator(const std::vector<Store>& s, const ContextPools& p) : sample(s), pools(p) {}

    template <class T, class F>
    static void splits(std::size_t total, const std::vector<std::vector<T>>& left,
                       const std::vector<std::vector<Reader>>& right, F&& f) {
        for (std::size_t i = 1; i < total; ++i)
            for (const auto& a : left[i])
                for (const auto& b : right[total - i]) f(a, b);
    }

    // Shapes shared by closed readers (hole-free pieces) and reader
    // contexts (exactly one piece carries the hole).
    void readers_of_size(std::size_t n, const std::vector<std::vector<Reader>>& any,
                         const std::vector<std::vector<Reader>>& other, bool context, std::vector<Reader>& out) {
        if (n >= 3)
            for (const auto& e : pools.exprs)
                for (const auto& p : any[n - 2]) {
                    out.push_back(Reader::while_(e, p));
                    out.push_back(Reader::assign(e, p));
                }
        if (n >= 4)
            for (const auto& e : pools.exprs)
                for (std::size_t i = 1; i + 2 < n; ++i) {
                    for (const auto& p : any[i])
                        for (const auto& q : other[n - 2 - i]) out.push_back(Reader::if_(e, p, q));
                    if (context)
                        for (const auto& p : other[i])
                            for (const auto& q : any[n - 2 - i]) out.push_back(Reader::if_(e, p, q));
                }
        if (n >= 3)
            for (std::size_t i = 1; i + 1 < n; ++i) {
                for (const auto& p : any[i])
                    for (const auto& q : other[n - 1 - i]) out.push_back(Reader::seq(p, q));
                if (context)
                    for (const auto& p : other[i])
                        for (const auto& q : any[n - 1 - i]) out.push_back(Reader::seq(p, q));
            }
        if (n >= 2)
            for (const auto& p : any[n - 1]) {
                out.push_back(Reader::alloc(p));
                out.push_back(Reader::proc(p));
            }
    }

    void build(std::size_t maxSize) {
        closed.assign(maxSize + 1, {});
        rctx.assign(maxSize + 1, {});
        wclosed.assign(maxSize + 1, {});
        wctx.assign(maxSize + 1, {});
        for (std::size_t n = 1; n <= maxSize; ++n) {
            // closed readers
            if (n == 1) closed[n].push_back(Reader::skip());
            if (n == 2)
                for (const auto& e : pools.exprs) closed[n].push_back(Reader::expr(e));
            {
                std::vector<Reader> out;
                readers_of_size(n, closed, closed, false, out);
                // seq and if above pair closed with closed in one orientation
                closed[n].insert(closed[n].end(), out.begin(), out.end());
            }
            // reader contexts: the hole piece comes from rctx, the other from closed
            if (n == 1) rctx[n].push_back(Reader::hole());
            {
                std::vector<Reader> out;
                readers_of_size(n, rctx, closed, true, out);
                rctx[n].insert(rctx[n].end(), out.begin(), out.end());
            }
            // closed writers
            for (const auto& s : sample) {
                if (n == 1) wclosed[n].push_back(Writer::ret(s));
                if (n >= 2)
                    for (const auto& q : closed[n - 1]) wclosed[n].push_back(Writer::run(q, s));
            }
            // writer contexts
            for (const auto& s : sample) {
                if (n >= 2) {
                    for (const auto& C : rctx[n - 1]) wctx[n].push_back(Writer::run(C, s));
                    for (const auto& W : wctx[n - 1]) wctx[n].push_back(Writer::emit(s, W));
                }
                if (n == 2) {
                    wctx[n].push_back(Writer::ret_val(Value::reader(Reader::hole()), s));
                    for (Loc l : pools.holeLocs) wctx[n].push_back(Writer::ret(s.set(l, Value::reader(Reader::hole()))));
                }
                if (n >= 3)
                    for (Loc l : pools.holeLocs)
                        for (const auto& q : closed[n - 2])
                            wctx[n].push_back(Writer::run(q, s.set(l, Value::reader(Reader::hole()))));
            }
            if (n >= 3) {
                for (const auto& e : pools.exprs)
                    for (const auto& W : wctx[n - 2]) wctx[n].push_back(Writer::assign(e, W));
                for (std::size_t i = 1; i + 1 < n; ++i) {
                    for (const auto& W : wctx[i])
                        for (const auto& q : closed[n - 1 - i]) wctx[n].push_back(Writer::seq(W, q));
                    for (const auto& c : wclosed[i])
                        for (const auto& C : rctx[n - 1 - i]) wctx[n].push_back(Writer::seq(c, C));
                }
            }
            if (n >= 2)
                for (const auto& W : wctx[n - 1]) wctx[n].push_back(Writer::alloc(W));
        }
    }
};

}  // namespace

std::vector<Context> enumerate_contexts(std::size_t maxSize, const std::vector<Store>& sample, const ContextPools& pools) {
    ContextEnumerator en(sample, pools);
    en.build(maxSize);
    std::vector<Context> out;
    for (std::size_t n = 1; n <= maxSize; ++n) {
        for (const auto& r : en.rctx[n]) out.push_back({false, r, {}, n});
        for (const auto& w : en.wctx[n]) out.push_back({true, {}, w, n});
    }
    return out;
}

namespace {

struct CtxEval {
    bool found = false;
    std::string store;
    Halting left = Halting::Unknown, right = Halting::Unknown;
    bool inconclusive = false;
};

CtxEval evaluate_context(const Context& C, const Reader& p, const Reader& q, const std::vector<Store>& sample,
                         std::size_t cap) {
    CtxEval ev;
    auto consider = [&](Halting a, Halting b, const std::string& s) {
        if (a == Halting::Unknown || b == Halting::Unknown) {
            ev.inconclusive = true;
            return false;
        }
        if (a != b) {
            ev.found = true;
            ev.left = a;
            ev.right = b;
            ev.store = s;
            return true;
        }
        return false;
    };
    if (C.writer) {
        consider(halts(plug(C.w, p), cap).halting, halts(plug(C.w, q), cap).halting, "");
        return ev;
    }
    Reader cp = plug(C.r, p), cq = plug(C.r, q);
    for (const auto& s : sample)
        if (consider(halts(cp, s, cap).halting, halts(cq, s, cap).halting, s.str())) break;
    return ev;
}

}  // namespace

CtxResult ctx_refute(const Reader& p, const Reader& q, std::size_t maxSize, const std::vector<Store>& sample,
                     std::size_t cap, Exec exec) {
    CtxResult res;
    auto contexts = enumerate_contexts(maxSize, sample);
    const std::size_t n = contexts.size();
    std::vector<CtxEval> evals(n);
    if (exec == Exec::Parallel) {
        // Contexts are evaluated in chunks so an early counterexample stops
        // the search without evaluating every context.
        const std::size_t chunk = 256;
        for (std::size_t base = 0; base < n && !res.found; base += chunk) {
            const std::size_t end = std::min(n, base + chunk);
#pragma omp parallel for schedule(dynamic)
            for (std::size_t i = base; i < end; ++i) evals[i] = evaluate_context(contexts[i], p, q, sample, cap);
            for (std::size_t i = base; i < end; ++i) {
                ++res.contextsTried;
                if (evals[i].inconclusive) ++res.inconclusive;
                if (evals[i].found) {
                    res.found = true;
                    res.context = contexts[i];
                    res.store = evals[i].store;
                    res.left = evals[i].left;
                    res.right = evals[i].right;
                    break;
                }
            }
        }
        return res;
    }
    for (std::size_t i = 0; i < n; ++i) {
        evals[i] = evaluate_context(contexts[i], p, q, sample, cap);
        ++res.contextsTried;
        if (evals[i].inconclusive) ++res.inconclusive;
        if (evals[i].found) {
            res.found = true;
            res.context = contexts[i];
            res.store = evals[i].store;
            res.left = evals[i].left;
            res.right = evals[i].right;
            break;
        }
    }
    return res;
}

std::vector<Store> default_sample() {
    return {Store{}, Store{{0, Value::integer(0)}}, Store{{0, Value::integer(1)}, {1, Value::integer(2)}},
            Store{{0, Value::reader(Reader::skip())}}};
}

}  // namespace rwsos::ref2
