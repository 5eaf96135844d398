#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rwsos/cli.hpp"

using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
    json doc() const { return json::parse(out); }
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = rwsos::cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const std::string kData = RWSOS_DATA_DIR;

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("run reports the trace") {
        auto r = cli({"run", "imp", "x := 1 ; x := x + 1", "--store", "x=3"});
        CHECK(r.code == 0);
        auto d = r.doc();
        CHECK(d["schemaVersion"] == rwsos::cli::kSchemaVersion);
        CHECK(d["command"] == "run");
        CHECK(d["outcome"]["finished"] == true);
        CHECK(d["outcome"]["final"] == "{x=2}");
        CHECK(d["outcome"]["emitted"] == json::array({"{x=1}"}));
    }

    TEST_CASE("parse errors exit with status 2") {
        auto r = cli({"run", "imp", "x := "});
        CHECK(r.code == 2);
        CHECK(r.err.find("1:6") != std::string::npos);
        CHECK(cli({}).code == 2);
        CHECK(cli({"run", "cobol", "skip"}).code == 2);
    }

    TEST_CASE("equivalence on sampled stores") {
        auto r = cli({"equiv", "imp", "x := 1 ; x := 2", "x := 1 ; x := x + 1", "--semantics", "trace"});
        CHECK(r.code == 0);
        CHECK(r.doc()["outcome"] == "equivalent on sample");
        auto res = cli({"equiv", "imp", "x := 1 ; x := 2", "x := 1 ; x := x + 1", "--semantics", "resumption"});
        CHECK(res.code == 1);
        CHECK(res.doc()["counterexample"]["depth"] == 2);
        auto diff = cli({"equiv", "imp2", "x := 1", "x := 2", "--semantics", "ter"});
        CHECK(diff.code == 1);
        CHECK(diff.doc()["outcome"] == "distinguished");
    }

    TEST_CASE("stateful specifications") {
        auto cool = cli({"sos", "check-cool", kData + "/imp.spec.json"});
        CHECK(cool.code == 0);
        CHECK(cool.doc()["outcome"]["active"]["seq"] == 1);
        auto spec = cli({"sos", "imp-spec", "--vars", "x", "--domain", "2"});
        CHECK(spec.code == 0);
        CHECK(spec.doc()["states"].size() == 2);
        auto run = cli({"sos", "run", kData + "/imp.spec.json", "seq(asg_x_1, while_x(asg_x_0))", "--state", "x=0", "--rw"});
        CHECK(run.code == 0);
        auto pres = cli({"sos", "verify-preservation", kData + "/imp.spec.json", "--depth", "2"});
        CHECK(pres.code == 0);
        CHECK(cli({"sos", "check-cool", kData + "/missing.json"}).code == 2);
    }

    TEST_CASE("finite systems") {
        auto chk = cli({"sim", "check", kData + "/example.sys.json", kData + "/example.rel.json", "--flavor", "trace"});
        CHECK(chk.code == 0);
        CHECK(chk.doc()["outcome"]["holds"] == true);
        auto g = cli({"sim", "greatest", kData + "/example.sys.json", "--flavor", "cost"});
        CHECK(g.code == 0);
        CHECK(g.doc()["outcome"]["w"].is_array());
    }

    TEST_CASE("higher-order store language") {
        auto r = cli({"ref2", "run", "#0 := 2 ; #0 := !#0 (+) 2", "--loc", "0=0"});
        CHECK(r.code == 0);
        CHECK(r.out.find("#0=4") != std::string::npos);
        auto refute = cli({"ref2", "ctx-refute", "skip", "while 1 { skip }", "--max-size", "2"});
        CHECK(refute.code == 1);
        CHECK(refute.doc()["outcome"]["context"] == "\xC2\xB7");
        auto keep = cli({"ref2", "ctx-refute", "skip ; skip", "skip", "--max-size", "2"});
        CHECK(keep.code == 0);
        CHECK(keep.doc()["outcome"]["found"] == false);
    }

    TEST_CASE("relation documents for the higher-order checker") {
        const std::string path = "cli_test_rel.json";
        {
            std::ofstream f(path);
            f << R"({"certify": [["skip ; #0 := 1", "#0 := 1"]]})";
        }
        auto r = cli({"ref2", "sim-check", path});
        CHECK(r.code == 0);
        std::remove(path.c_str());
    }

    TEST_CASE("output file") {
        const std::string path = "cli_test_out.json";
        auto r = cli({"run", "imp", "skip", "-o", path});
        CHECK(r.code == 0);
        std::ifstream f(path);
        json d = json::parse(f);
        CHECK(d["command"] == "run");
        std::remove(path.c_str());
    }
}
