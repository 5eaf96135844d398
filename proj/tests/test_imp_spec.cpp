#include "doctest.h"

#include "rwsos/imp_spec.hpp"
#include "rwsos/parse.hpp"

using namespace rwsos;

TEST_SUITE("imp_spec") {
    TEST_CASE("shape of the specification") {
        auto is = impspec::imp_as_spec();
        CHECK(is.spec.states == std::vector<std::string>{"x=0", "x=1", "x=2"});
        CHECK(is.spec.op_index("seq") >= 0);
        CHECK(is.spec.op_index("while_x") >= 0);
        CHECK(is.spec.op_index("asg_x_2") >= 0);
        CHECK_NOTHROW(is.spec.validate());
        auto rep = sos::check_cool(is.spec);
        CHECK(rep.cool);
        CHECK(rep.active == std::map<std::string, int>{{"seq", 1}});
    }

    TEST_CASE("states and stores correspond") {
        impspec::Config cfg;
        cfg.vars = {"x", "y"};
        cfg.domain = 3;
        auto is = impspec::imp_as_spec(cfg);
        CHECK(is.all_states().size() == 9);
        for (auto s : is.all_states()) CHECK(is.state_of(is.store_of(s)) == s);
        CHECK(is.store_of(is.state_of(VarStore{{"y", 2}})) == VarStore{{"y", 2}});
        CHECK_THROWS_AS(is.state_of(VarStore{{"x", 3}}), Error);
        CHECK_THROWS_AS(impspec::imp_as_spec({{"x-y"}, 2}), Error);
    }

    TEST_CASE("translation of programs") {
        impspec::Config cfg;
        cfg.vars = {"x", "y"};
        auto is = impspec::imp_as_spec(cfg);
        for (const char* text : {"skip", "x := 2", "y := x", "while x { x := 0 } ; y := 1"}) {
            CAPTURE(text);
            auto p = parse::imp_program(text);
            CHECK(is.to_imp(is.from_imp(p)) == p);
        }
        CHECK_THROWS_AS(is.from_imp(parse::imp_program("x := x + 1")), Error);
        CHECK_THROWS_AS(is.from_imp(parse::imp_program("x := 7")), Error);
    }

    TEST_CASE("the spec agrees with the interpreter") {
        impspec::Config cfg;
        cfg.vars = {"x", "y"};
        auto is = impspec::imp_as_spec(cfg);
        auto p = parse::imp_program("while x { x := 0 ; y := 2 } ; y := x");
        for (auto s : is.all_states()) {
            auto lt = sos::l_trace(is.spec, is.from_imp(p), s, 100);
            auto it = imp::trace(p, is.store_of(s), 100);
            REQUIRE(lt.finished);
            REQUIRE(it.finished);
            CHECK(is.store_of(lt.final) == it.final);
            REQUIRE(lt.emitted.size() == it.emitted.size());
            for (std::size_t i = 0; i < lt.emitted.size(); ++i) CHECK(is.store_of(lt.emitted[i]) == it.emitted[i]);
        }
    }

    TEST_CASE("fidelity of the derived reader-writer semantics") {
        auto is = impspec::imp_as_spec();
        auto terms = sos::enumerate_terms(is.spec, 3);
        auto rep = impspec::check_fidelity(is, terms, is.all_states());
        CHECK(rep.disagreements.empty());
        CHECK(rep.truncatedRoots == 0);
        CHECK(rep.roots == terms.size() * 3);
        CHECK(rep.readerSteps >= rep.roots);
    }

    TEST_CASE("parallel fidelity check equals the serial one") {
        impspec::Config cfg;
        cfg.vars = {"x", "y"};
        cfg.domain = 2;
        auto is = impspec::imp_as_spec(cfg);
        auto terms = sos::enumerate_terms(is.spec, 3);
        auto a = impspec::check_fidelity(is, terms, is.all_states(), 2000, Exec::Serial);
        auto b = impspec::check_fidelity(is, terms, is.all_states(), 2000, Exec::Parallel);
        CHECK(a.roots == b.roots);
        CHECK(a.readerSteps == b.readerSteps);
        CHECK(a.writerSteps == b.writerSteps);
        CHECK(a.truncatedRoots == b.truncatedRoots);
        CHECK(a.disagreements == b.disagreements);
    }
}
