#include "rwsos/imp2.hpp"

#include <algorithm>

namespace rwsos::imp2 {

Writer Writer::run(Prog p, VarStore s) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Run;
    std::size_t h = 0x1001u;
    hash_mix(h, p.hash());
    hash_mix(h, s.hash());
    n->p = std::move(p);
    n->s = std::move(s);
    n->hash = h;
    Writer w;
    w.n_ = std::move(n);
    return w;
}

Writer Writer::ret(VarStore s) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Ret;
    std::size_t h = 0x2002u;
    hash_mix(h, s.hash());
    n->s = std::move(s);
    n->hash = h;
    Writer w;
    w.n_ = std::move(n);
    return w;
}

Writer Writer::emit(VarStore s, Writer c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Emit;
    std::size_t h = 0x3003u;
    hash_mix(h, s.hash());
    hash_mix(h, c.hash());
    n->s = std::move(s);
    n->c = std::move(c);
    n->hash = h;
    Writer w;
    w.n_ = std::move(n);
    return w;
}

Writer Writer::seq(Writer c, Prog q) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Seq;
    std::size_t h = 0x4004u;
    hash_mix(h, c.hash());
    hash_mix(h, q.hash());
    n->c = std::move(c);
    n->p = std::move(q);
    n->hash = h;
    Writer w;
    w.n_ = std::move(n);
    return w;
}

bool operator==(const Writer& a, const Writer& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_) return false;
    if (a.n_->hash != b.n_->hash || a.n_->kind != b.n_->kind) return false;
    switch (a.n_->kind) {
        case Writer::Kind::Run: return a.n_->s == b.n_->s && a.n_->p == b.n_->p;
        case Writer::Kind::Ret: return a.n_->s == b.n_->s;
        case Writer::Kind::Emit: return a.n_->s == b.n_->s && a.n_->c == b.n_->c;
        case Writer::Kind::Seq: return a.n_->c == b.n_->c && a.n_->p == b.n_->p;
    }
    return false;
}

namespace {
std::string reader_atom(const Prog& p) {
    std::string s = p.str();
    return p.kind() == Prog::Kind::Seq ? "(" + s + ")" : s;
}

std::string show(const Writer& w, bool atom) {
    switch (w.kind()) {
        case Writer::Kind::Run: return "[" + w.reader().str() + "]@" + w.store().str();
        case Writer::Kind::Ret: return "ret@" + w.store().str();
        case Writer::Kind::Emit: return w.store().str() + "." + show(w.inner(), true);
        case Writer::Kind::Seq: {
            std::string s = show(w.inner(), true) + " ; " + reader_atom(w.reader());
            return atom ? "(" + s + ")" : s;
        }
    }
    return "?";
}
}  // namespace

std::string Writer::str() const { return show(*this, false); }

Term Writer::to_term() const {
    switch (kind()) {
        case Kind::Run: return Term::op("run", {reader().to_term()}, Sort::Writer, store().str());
        case Kind::Ret: return Term::op("ret", {}, Sort::Writer, store().str());
        case Kind::Emit: return Term::op("emit", {inner().to_term()}, Sort::Writer, store().str());
        case Kind::Seq: return Term::op("wseq", {inner().to_term(), reader().to_term()}, Sort::Writer);
    }
    return {};
}

Signature Writer::signature() {
    Signature sig = Prog::signature();
    sig.add({"run", {Sort::Reader}, Sort::Writer, true});
    sig.add({"ret", {}, Sort::Writer, true});
    sig.add({"emit", {Sort::Writer}, Sort::Writer, true});
    sig.add({"wseq", {Sort::Writer, Sort::Reader}, Sort::Writer});
    sig.literalKinds.insert(LiteralKind::State);
    return sig;
}

Writer reader_step(const Prog& p, const VarStore& s) {
    switch (p.kind()) {
        case Prog::Kind::Seq: return Writer::seq(Writer::run(p.left(), s), p.right());
        case Prog::Kind::Skip: return Writer::ret(s);
        case Prog::Kind::Assign: return Writer::ret(s.set(p.var(), eev(p.expr(), s)));
        case Prog::Kind::While:
            if (eev(p.expr(), s) == 0) return Writer::ret(s);
            return Writer::emit(s, Writer::run(Prog::seq(p.body(), p), s));
    }
    throw Error("unreachable");
}

WriterStep writer_step(const Writer& c) {
    switch (c.kind()) {
        case Writer::Kind::Run: return WriterStep::silent(reader_step(c.reader(), c.store()));
        case Writer::Kind::Ret: return WriterStep::done(c.store());
        case Writer::Kind::Emit: return WriterStep::output(c.inner(), c.store());
        case Writer::Kind::Seq: {
            WriterStep st = writer_step(c.inner());
            switch (st.kind) {
                case StepKind::Silent: return WriterStep::silent(Writer::seq(std::move(st.next), c.reader()));
                case StepKind::Output:
                    return WriterStep::output(Writer::seq(std::move(st.next), c.reader()), std::move(st.state));
                case StepKind::Done: {
                    VarStore s = st.state;
                    return WriterStep::output(Writer::run(c.reader(), s), std::move(st.state));
                }
            }
        }
    }
    throw Error("unreachable");
}

WeakClosure<Writer, VarStore> weak_closure(const Writer& c, std::size_t fuel, Level mode) {
    return rwsos::weak_closure<Writer, VarStore, WriterHash>(
        c, fuel, mode, [](const Writer& w) { return std::vector<WriterStep>{writer_step(w)}; });
}

TraceResult trace(const Writer& c, std::size_t fuel) {
    TraceResult t;
    Writer cur = c;
    while (t.steps < fuel) {
        WriterStep st = writer_step(cur);
        ++t.steps;
        switch (st.kind) {
            case StepKind::Silent: cur = std::move(st.next); break;
            case StepKind::Output:
                t.emitted.push_back(std::move(st.state));
                cur = std::move(st.next);
                break;
            case StepKind::Done:
                t.finished = true;
                t.final = std::move(st.state);
                return t;
        }
    }
    return t;
}

TraceResult trace(const Prog& p, const VarStore& s, std::size_t fuel) { return imp2::trace(reader_step(p, s), fuel); }

namespace {
bool is_prefix(const std::vector<VarStore>& a, const std::vector<VarStore>& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

enum class Cmp { AgreeFinished, AgreeCut, FuelAsym, Mismatch, Overflow };

Cmp compare(const TraceResult& src, const TraceResult& tgt) {
    if (src.finished && tgt.finished) return src == tgt ? Cmp::AgreeFinished : Cmp::Mismatch;
    if (src.finished) return Cmp::Mismatch;  // target budget should have sufficed
    if (tgt.finished) return is_prefix(src.emitted, tgt.emitted) ? Cmp::FuelAsym : Cmp::Mismatch;
    bool ok = src.emitted.size() <= tgt.emitted.size() ? is_prefix(src.emitted, tgt.emitted)
                                                       : is_prefix(tgt.emitted, src.emitted);
    return ok ? Cmp::AgreeCut : Cmp::Mismatch;
}
}  // namespace

EmbeddingReport verify_embedding(const std::vector<Prog>& programs, const std::vector<VarStore>& stores,
                                 std::size_t fuel, Exec exec) {
    EmbeddingReport rep;
    rep.fuel = fuel;
    rep.targetFuel = embedding_fuel(fuel);
    const std::size_t total = programs.size() * stores.size();
    rep.checked = total;
    if (total == 0) return rep;
    const std::size_t ns = stores.size();
    std::vector<std::uint8_t> verdict(total);

    auto one = [&](std::size_t i) {
        const Prog& p = programs[i / ns];
        const VarStore& s = stores[i % ns];
        try {
            verdict[i] = static_cast<std::uint8_t>(compare(imp::trace(p, s, fuel), imp2::trace(p, s, rep.targetFuel)));
        } catch (const OverflowError&) {
            verdict[i] = static_cast<std::uint8_t>(Cmp::Overflow);
        }
    };

    if (exec == Exec::Parallel) {
        const long long n = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic, 64)
        for (long long i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < total; ++i) one(i);
    }

    for (std::size_t i = 0; i < total; ++i) {
        switch (static_cast<Cmp>(verdict[i])) {
            case Cmp::AgreeFinished: ++rep.agreeFinished; break;
            case Cmp::AgreeCut: ++rep.agreeCut; break;
            case Cmp::FuelAsym: ++rep.fuelAsymmetric; break;
            case Cmp::Overflow: ++rep.overflow; break;
            case Cmp::Mismatch: {
                const Prog& p = programs[i / ns];
                const VarStore& s = stores[i % ns];
                rep.mismatches.push_back({p, s, imp::trace(p, s, fuel), imp2::trace(p, s, rep.targetFuel)});
                break;
            }
        }
    }
    return rep;
}

}  // namespace rwsos::imp2
