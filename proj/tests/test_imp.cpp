#include "doctest.h"

#include <random>
#include <set>

#include "rwsos/imp.hpp"
#include "rwsos/parse.hpp"

using namespace rwsos;
using imp::Prog;

namespace {
Prog P(const char* text) { return parse::imp_program(text); }
VarStore S(const char* text) { return parse::var_store(text); }
}  // namespace

TEST_SUITE("imp") {
    TEST_CASE("single steps") {
        auto r = imp::step(P("x := 1 ; y := x + 1"), S("x=9"));
        CHECK_FALSE(r.done);
        CHECK(r.next == P("y := x + 1"));
        CHECK(r.store == S("x=1"));

        r = imp::step(P("while x { x := x - 1 }"), S("x=0"));
        CHECK(r.done);
        CHECK(r.store == S(""));

        r = imp::step(P("while y { skip }"), S("y=2"));
        CHECK_FALSE(r.done);
        CHECK(r.next == P("skip ; while y { skip }"));
        CHECK(r.store == S("y=2"));
    }

    TEST_CASE("traces emit every intermediate store") {
        auto t = imp::trace(P("x := 1 ; x := 2 ; x := 3"), S(""), 100);
        CHECK(t.finished);
        CHECK(t.emitted == std::vector<VarStore>{S("x=1"), S("x=2")});
        CHECK(t.final == S("x=3"));
        CHECK(t.str() == "Finished([{x=1},{x=2}], {x=3})");
    }

    TEST_CASE("fuel cuts divergent runs") {
        auto t = imp::trace(P("while 1 { skip }"), S(""), 10);
        CHECK_FALSE(t.finished);
        CHECK(t.steps == 10);
        CHECK(t.emitted.size() == 10);
    }

    TEST_CASE("the three observations") {
        auto a = imp::trace(P("x := 1 ; x := 2"), S(""), 50);
        auto b = imp::trace(P("x := 5 ; x := 2"), S(""), 50);
        auto c = imp::trace(P("x := 2"), S(""), 50);
        CHECK_FALSE(imp::same_observation(a, b, imp::Semantics::Trace));
        CHECK(imp::same_observation(a, b, imp::Semantics::Cost));
        CHECK_FALSE(imp::same_observation(a, c, imp::Semantics::Cost));
        CHECK(imp::same_observation(a, c, imp::Semantics::Termination));
        CHECK(imp::cost_of_trace(a).n == 1);
        CHECK(imp::ter_of_trace(c).final == S("x=2"));
    }

    TEST_CASE("trace equivalence is not resumption bisimilarity") {
        auto p = P("x := 1 ; x := 2"), q = P("x := 1 ; x := x + 1");
        std::vector<VarStore> stores;
        for (int x = -3; x <= 3; ++x) stores.push_back(VarStore{{"x", x}});
        for (const auto& s : stores) CHECK(imp::trace(p, s, 100) == imp::trace(q, s, 100));
        auto v = imp::check_resumption_bisim({{p, q}}, stores, 3);
        CHECK_FALSE(v.holds);
        CHECK(v.depth == 2);
        CHECK(v.clause == 'b');
        CHECK(v.p == P("x := 2"));
        CHECK(v.store.get("x") != 1);
    }

    TEST_CASE("resumption check confirms identical programs") {
        auto p = P("while x { x := x - 1 }");
        auto v = imp::check_resumption_bisim({{p, p}}, {S(""), S("x=2")}, 5);
        CHECK(v.holds);
        CHECK(v.note.find("2-store") != std::string::npos);
    }

    TEST_CASE("enumeration counts and depth") {
        imp::EnumConfig cfg;
        cfg.leaves = {P("skip"), P("x := 1")};
        cfg.guards = {ImpExpr::var("x")};
        cfg.maxDepth = 2;
        auto ps = imp::enumerate_programs(cfg);
        // 2 leaves, 2 loops, 4 sequences
        CHECK(ps.size() == 8);
        std::set<std::string> distinct;
        for (const auto& p : ps) {
            CHECK(p.depth() <= 2);
            distinct.insert(p.str());
        }
        CHECK(distinct.size() == ps.size());
        cfg.maxDepth = 3;
        CHECK(imp::enumerate_programs(cfg).size() == 8 + 6 + 6 * 6 + 2 * 6 * 2);
    }

    TEST_CASE("property: sequencing is associative on traces") {
        std::mt19937_64 rng(11);
        imp::RandomConfig rc;
        for (int i = 0; i < 200; ++i) {
            Prog a = imp::random_program(rng, rc, 2), b = imp::random_program(rng, rc, 2), c = imp::random_program(rng, rc, 2);
            VarStore s{{"x", static_cast<std::int64_t>(i % 3)}, {"y", 1}};
            try {
                auto l = imp::trace(Prog::seq(Prog::seq(a, b), c), s, 300);
                auto r = imp::trace(Prog::seq(a, Prog::seq(b, c)), s, 300);
                if (l.finished && r.finished) CHECK(l == r);
            } catch (const OverflowError&) {
            }
        }
    }

    TEST_CASE("property: random programs respect the depth bound") {
        std::mt19937_64 rng(12);
        imp::RandomConfig rc;
        for (int i = 0; i < 300; ++i) {
            Prog p = imp::random_program(rng, rc, 4);
            CHECK(p.depth() <= 4);
            CHECK(parse::imp_program(p.str()) == p);
        }
    }
}
