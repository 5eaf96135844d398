#include "rwsos/imp.hpp"

#include <set>
#include <unordered_set>

namespace rwsos::imp {

Prog Prog::skip() {
    static const Prog s = [] {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Skip;
        n->hash = 0x51u;
        n->depth = 1;
        Prog p;
        p.n_ = std::move(n);
        return p;
    }();
    return s;
}

Prog Prog::assign(std::string x, ImpExpr e) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Assign;
    std::size_t h = 0xa5u;
    hash_mix(h, std::hash<std::string>{}(x));
    hash_mix(h, e.hash());
    n->var = std::move(x);
    n->e = std::move(e);
    n->hash = h;
    n->depth = 1;
    Prog p;
    p.n_ = std::move(n);
    return p;
}

Prog Prog::while_(ImpExpr guard, Prog body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::While;
    std::size_t h = 0x77u;
    hash_mix(h, guard.hash());
    hash_mix(h, body.hash());
    n->depth = body.depth() + 1;
    n->e = std::move(guard);
    n->a = std::move(body);
    n->hash = h;
    Prog p;
    p.n_ = std::move(n);
    return p;
}

Prog Prog::seq(Prog a, Prog b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Seq;
    std::size_t h = 0x3bu;
    hash_mix(h, a.hash());
    hash_mix(h, b.hash());
    n->depth = std::max(a.depth(), b.depth()) + 1;
    n->a = std::move(a);
    n->b = std::move(b);
    n->hash = h;
    Prog p;
    p.n_ = std::move(n);
    return p;
}

bool operator==(const Prog& a, const Prog& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_) return false;
    if (a.n_->hash != b.n_->hash || a.n_->kind != b.n_->kind) return false;
    switch (a.n_->kind) {
        case Prog::Kind::Skip: return true;
        case Prog::Kind::Assign: return a.n_->var == b.n_->var && a.n_->e == b.n_->e;
        case Prog::Kind::While: return a.n_->e == b.n_->e && a.n_->a == b.n_->a;
        case Prog::Kind::Seq: return a.n_->a == b.n_->a && a.n_->b == b.n_->b;
    }
    return false;
}

namespace {
std::string show(const Prog& p, bool inSeqLeft) {
    switch (p.kind()) {
        case Prog::Kind::Skip: return "skip";
        case Prog::Kind::Assign: return p.var() + " := " + p.expr().str();
        case Prog::Kind::While: return "while " + p.expr().str() + " { " + show(p.body(), false) + " }";
        case Prog::Kind::Seq: {
            // ';' associates to the right, so a left operand that is itself a
            // sequence needs parentheses
            std::string s = show(p.left(), true) + " ; " + show(p.right(), false);
            return inSeqLeft ? "(" + s + ")" : s;
        }
    }
    return "?";
}
}  // namespace

std::string Prog::str() const { return show(*this, false); }

Term Prog::to_term() const {
    switch (kind()) {
        case Kind::Skip: return Term::op("skip");
        case Kind::Assign: return Term::op("asg", {}, Sort::Reader, var() + ":=" + expr().str());
        case Kind::While: return Term::op("while", {body().to_term()}, Sort::Reader, expr().str());
        case Kind::Seq: return Term::op("seq", {left().to_term(), right().to_term()});
    }
    return {};
}

Signature Prog::signature() {
    Signature sig;
    sig.add({"skip", {}, Sort::Reader});
    sig.add({"asg", {}, Sort::Reader, true});
    sig.add({"while", {Sort::Reader}, Sort::Reader, true});
    sig.add({"seq", {Sort::Reader, Sort::Reader}, Sort::Reader});
    sig.literalKinds = {LiteralKind::VarName, LiteralKind::Expr};
    return sig;
}

StepResult step(const Prog& p, const VarStore& s) {
    switch (p.kind()) {
        case Prog::Kind::Skip: return StepResult::Done(s);
        case Prog::Kind::Assign: return StepResult::Done(s.set(p.var(), eev(p.expr(), s)));
        case Prog::Kind::While:
            if (eev(p.expr(), s) == 0) return StepResult::Done(s);
            return StepResult::Continue(Prog::seq(p.body(), p), s);
        case Prog::Kind::Seq: {
            StepResult r = step(p.left(), s);
            if (r.done) return StepResult::Continue(p.right(), std::move(r.store));
            return StepResult::Continue(Prog::seq(std::move(r.next), p.right()), std::move(r.store));
        }
    }
    throw Error("unreachable");
}

std::string TraceResult::str() const {
    std::string out = finished ? "Finished([" : "Cut([";
    for (std::size_t i = 0; i < emitted.size(); ++i) {
        if (i) out += ",";
        out += emitted[i].str();
    }
    out += "]";
    if (finished) out += ", " + final.str();
    return out + ")";
}

TraceResult trace(const Prog& p, const VarStore& s, std::size_t fuel) {
    TraceResult t;
    Prog cur = p;
    VarStore st = s;
    while (t.steps < fuel) {
        StepResult r = step(cur, st);
        ++t.steps;
        if (r.done) {
            t.finished = true;
            t.final = std::move(r.store);
            return t;
        }
        t.emitted.push_back(r.store);
        cur = std::move(r.next);
        st = std::move(r.store);
    }
    return t;
}

CostResult cost_of_trace(const TraceResult& t) {
    if (!t.finished) return {};
    return {true, t.emitted.size(), t.final};
}

TerResult ter_of_trace(const TraceResult& t) {
    if (!t.finished) return {};
    return {true, t.final};
}

bool same_observation(const TraceResult& a, const TraceResult& b, Semantics sem) {
    switch (sem) {
        case Semantics::Trace: return a == b;
        case Semantics::Cost: return cost_of_trace(a) == cost_of_trace(b);
        case Semantics::Termination: return ter_of_trace(a) == ter_of_trace(b);
    }
    return false;
}

namespace {
struct PairHash {
    std::size_t operator()(const std::pair<Prog, Prog>& pq) const {
        std::size_t h = pq.first.hash();
        hash_mix(h, pq.second.hash());
        return h;
    }
};
}  // namespace

BisimVerdict check_resumption_bisim(const std::vector<std::pair<Prog, Prog>>& R,
                                    const std::vector<VarStore>& stores, int depth) {
    BisimVerdict v;
    v.note = "holds up to the " + std::to_string(stores.size()) + "-store sample and depth " + std::to_string(depth);
    std::unordered_set<std::pair<Prog, Prog>, PairHash> seen;
    std::vector<std::pair<Prog, Prog>> level;
    for (const auto& pq : R)
        if (seen.insert(pq).second) level.push_back(pq);

    for (int d = 1; d <= depth && !level.empty(); ++d) {
        std::vector<std::pair<Prog, Prog>> next;
        for (const auto& [p, q] : level) {
            for (const auto& s : stores) {
                StepResult rp = step(p, s), rq = step(q, s);
                auto fail = [&](char clause, std::string why) {
                    v.holds = false;
                    v.note = "refuted";
                    v.p = p;
                    v.q = q;
                    v.store = s;
                    v.clause = clause;
                    v.depth = d;
                    v.detail = std::move(why);
                };
                if (!rp.done) {
                    if (rq.done) {
                        fail('a', "left continues, right terminates in " + rq.store.str());
                        return v;
                    }
                    if (rp.store != rq.store) {
                        fail('a', "left continues in " + rp.store.str() + ", right in " + rq.store.str());
                        return v;
                    }
                    std::pair<Prog, Prog> succ{rp.next, rq.next};
                    if (seen.insert(succ).second) next.push_back(std::move(succ));
                } else {
                    if (!rq.done) {
                        fail('c', "left terminates in " + rp.store.str() + ", right continues");
                        return v;
                    }
                    if (rp.store != rq.store) {
                        fail('b', "left terminates in " + rp.store.str() + ", right in " + rq.store.str());
                        return v;
                    }
                }
            }
        }
        level = std::move(next);
    }
    return v;
}

std::vector<Prog> enumerate_programs(const EnumConfig& cfg) {
    // byDepth[d] holds programs of depth exactly d
    std::vector<std::vector<Prog>> byDepth(static_cast<std::size_t>(cfg.maxDepth) + 1);
    if (cfg.maxDepth >= 1) byDepth[1] = cfg.leaves;
    for (int d = 2; d <= cfg.maxDepth; ++d) {
        auto& out = byDepth[static_cast<std::size_t>(d)];
        const auto& prev = byDepth[static_cast<std::size_t>(d - 1)];
        for (const auto& g : cfg.guards)
            for (const auto& b : prev) out.push_back(Prog::while_(g, b));
        // seq: at least one side of depth d-1
        for (int i = 1; i <= d - 1; ++i)
            for (int j = 1; j <= d - 1; ++j) {
                if (i != d - 1 && j != d - 1) continue;
                for (const auto& a : byDepth[static_cast<std::size_t>(i)])
                    for (const auto& b : byDepth[static_cast<std::size_t>(j)]) out.push_back(Prog::seq(a, b));
            }
    }
    std::vector<Prog> all;
    for (int d = 1; d <= cfg.maxDepth; ++d)
        for (const auto& p : byDepth[static_cast<std::size_t>(d)]) all.push_back(p);
    return all;
}

ImpExpr random_expr(std::mt19937_64& rng, const RandomConfig& cfg, int depth) {
    std::uniform_int_distribution<int> coin(0, 9);
    if (depth <= 1 || coin(rng) < 5) {
        if (coin(rng) < 5) {
            std::uniform_int_distribution<std::size_t> v(0, cfg.vars.size() - 1);
            return ImpExpr::var(cfg.vars[v(rng)]);
        }
        std::uniform_int_distribution<std::int64_t> c(0, cfg.maxConst);
        return ImpExpr::constant(c(rng));
    }
    std::uniform_int_distribution<int> op(0, 2);
    int o = op(rng);
    auto k = o == 0 ? ImpExpr::Kind::Add : o == 1 ? ImpExpr::Kind::Sub : ImpExpr::Kind::Mul;
    return ImpExpr::bin(k, random_expr(rng, cfg, depth - 1), random_expr(rng, cfg, depth - 1));
}

Prog random_program(std::mt19937_64& rng, const RandomConfig& cfg, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    int r = depth <= 1 ? pick(rng) % 4 : pick(rng);
    if (r == 0) return Prog::skip();
    if (r <= 3) {
        std::uniform_int_distribution<std::size_t> v(0, cfg.vars.size() - 1);
        return Prog::assign(cfg.vars[v(rng)], random_expr(rng, cfg, cfg.exprDepth));
    }
    if (r <= 5) return Prog::while_(random_expr(rng, cfg, 1), random_program(rng, cfg, depth - 1));
    return Prog::seq(random_program(rng, cfg, depth - 1), random_program(rng, cfg, depth - 1));
}

}  // namespace rwsos::imp
