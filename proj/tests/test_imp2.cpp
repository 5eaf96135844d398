#include "doctest.h"

#include <random>

#include "rwsos/imp2.hpp"
#include "rwsos/parse.hpp"

using namespace rwsos;
using imp::Prog;
using imp2::Writer;
using imp2::WriterStep;

namespace {
Prog P(const char* text) { return parse::imp_program(text); }
Writer W(const char* text) { return parse::imp2_writer(text); }
VarStore S(const char* text) { return parse::var_store(text); }
}  // namespace

TEST_SUITE("imp2") {
    TEST_CASE("reader steps") {
        CHECK(imp2::reader_step(P("skip"), S("x=1")) == W("ret@{x=1}"));
        CHECK(imp2::reader_step(P("x := x + 1"), S("x=1")) == W("ret@{x=2}"));
        CHECK(imp2::reader_step(P("skip ; x := 1"), S("")) == W("[skip]@{} ; x := 1"));
        CHECK(imp2::reader_step(P("while x { skip }"), S("")) == W("ret@{}"));
        CHECK(imp2::reader_step(P("while x { skip }"), S("x=1")) == W("{x=1}.[skip ; while x { skip }]@{x=1}"));
    }

    TEST_CASE("writer steps") {
        auto st = imp2::writer_step(W("ret@{x=1}"));
        CHECK(st.kind == StepKind::Done);
        CHECK(st.state == S("x=1"));

        st = imp2::writer_step(W("{y=2}.ret@{}"));
        CHECK(st.kind == StepKind::Output);
        CHECK(st.state == S("y=2"));
        CHECK(st.next == W("ret@{}"));

        st = imp2::writer_step(W("[x := 4]@{}"));
        CHECK(st.kind == StepKind::Silent);
        CHECK(st.next == W("ret@{x=4}"));
    }

    TEST_CASE("derived sequencing rules") {
        // [p;q]_s -> [p]_s;q silently
        auto st = imp2::writer_step(W("[x := 1 ; y := 2]@{}"));
        CHECK(st.kind == StepKind::Silent);
        CHECK(st.next == W("[x := 1]@{} ; y := 2"));
        // ret_s;q ->^s [q]_s
        st = imp2::writer_step(W("ret@{x=1} ; y := 2"));
        CHECK(st.kind == StepKind::Output);
        CHECK(st.state == S("x=1"));
        CHECK(st.next == W("[y := 2]@{x=1}"));
        // emissions of the left operand are lifted
        st = imp2::writer_step(W("({x=3}.ret@{}) ; skip"));
        CHECK(st.kind == StepKind::Output);
        CHECK(st.next == W("ret@{} ; skip"));
    }

    TEST_CASE("traces agree with the single-sorted language") {
        for (const char* text : {"x := 1 ; x := 2", "while x { x := x - 1 ; y := y + 1 }", "(skip ; skip) ; skip",
                                 "while y { skip } ; x := 3"}) {
            CAPTURE(text);
            for (const char* store : {"", "x=2", "x=1,y=0"}) {
                auto a = imp::trace(P(text), S(store), 100);
                auto b = imp2::trace(P(text), S(store), imp2::embedding_fuel(100));
                REQUIRE(a.finished);
                CHECK(a == b);
            }
        }
    }

    TEST_CASE("weak closures") {
        auto c = W("[skip ; skip]@{x=1}");
        auto one = imp2::weak_closure(c, 100, Level::One);
        // [skip;skip] => [skip];skip => ret;skip, then the emission stops level one
        CHECK(one.silentReach.size() == 3);
        REQUIRE(one.outputs.size() == 1);
        CHECK(one.outputs[0].first == S("x=1"));
        CHECK(one.terminations.empty());
        auto two = imp2::weak_closure(c, 100, Level::Two);
        CHECK(two.terminations == std::vector<VarStore>{S("x=1")});
        // a loop that revisits its configuration has a finite closure
        auto loop = imp2::weak_closure(W("[while 1 { skip }]@{}"), 100, Level::Two);
        CHECK_FALSE(loop.truncated);
        CHECK(loop.terminations.empty());
        auto counter = imp2::weak_closure(W("[while 1 { x := x + 1 }]@{}"), 50, Level::Two);
        CHECK(counter.truncated);
    }

    TEST_CASE("embedding report classes") {
        std::vector<Prog> ps = {P("x := 1"), P("while 1 { skip }"), P("while x { x := x - 1 }")};
        auto rep = imp2::verify_embedding(ps, {S(""), S("x=3")}, 20);
        CHECK(rep.checked == 6);
        CHECK(rep.mismatches.empty());
        CHECK(rep.agreeCut == 2);
        CHECK(rep.agreeFinished == 4);
        auto ov = imp2::verify_embedding({P("x := x * x")}, {S("x=9223372036854775807")}, 5);
        CHECK(ov.overflow == 1);
    }

    TEST_CASE("parallel embedding check equals the serial one") {
        std::mt19937_64 rng(21);
        imp::RandomConfig rc;
        std::vector<Prog> ps;
        for (int i = 0; i < 400; ++i) ps.push_back(imp::random_program(rng, rc, 4));
        std::vector<VarStore> stores = {S(""), S("x=1"), S("x=2,y=1")};
        auto a = imp2::verify_embedding(ps, stores, 40, Exec::Serial);
        auto b = imp2::verify_embedding(ps, stores, 40, Exec::Parallel);
        CHECK(a.agreeFinished == b.agreeFinished);
        CHECK(a.agreeCut == b.agreeCut);
        CHECK(a.fuelAsymmetric == b.fuelAsymmetric);
        CHECK(a.overflow == b.overflow);
        CHECK(a.mismatches.size() == b.mismatches.size());
        CHECK(a.mismatches.empty());
    }

    TEST_CASE("property: writer steps preserve the observation") {
        std::mt19937_64 rng(22);
        imp::RandomConfig rc;
        for (int i = 0; i < 200; ++i) {
            Prog p = imp::random_program(rng, rc, 3);
            VarStore s{{"x", static_cast<std::int64_t>(i % 3)}};
            Writer c = imp2::reader_step(p, s);
            auto full = imp2::trace(c, 400);
            auto st = imp2::writer_step(c);
            if (!full.finished || st.kind == StepKind::Done) continue;
            auto rest = imp2::trace(st.next, 400);
            if (st.kind == StepKind::Output) rest.emitted.insert(rest.emitted.begin(), st.state);
            CHECK(rest == full);
        }
    }
}
