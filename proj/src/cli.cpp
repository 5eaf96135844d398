#include "rwsos/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "rwsos/equivalence.hpp"
#include "rwsos/imp_spec.hpp"
#include "rwsos/parse.hpp"
#include "rwsos/ref2.hpp"
#include "rwsos/sos.hpp"

namespace rwsos::cli {

using nlohmann::json;

namespace {

struct UsageError : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Program arguments are file names when such a file exists, else literal text.
std::string source(const std::string& arg) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) return read_file(arg);
    return arg;
}

void collect_vars(const ImpExpr& e, std::set<std::string>& out) {
    switch (e.kind()) {
        case ImpExpr::Kind::Const: return;
        case ImpExpr::Kind::Var: out.insert(e.name()); return;
        default:
            collect_vars(e.lhs(), out);
            collect_vars(e.rhs(), out);
    }
}

void collect_vars(const imp::Prog& p, std::set<std::string>& out) {
    using K = imp::Prog::Kind;
    switch (p.kind()) {
        case K::Skip: return;
        case K::Assign:
            out.insert(p.var());
            collect_vars(p.expr(), out);
            return;
        case K::While:
            collect_vars(p.expr(), out);
            collect_vars(p.body(), out);
            return;
        case K::Seq:
            collect_vars(p.left(), out);
            collect_vars(p.right(), out);
            return;
    }
}

json trace_json(const imp::TraceResult& t) {
    json j = {{"finished", t.finished}, {"steps", t.steps}, {"emitted", json::array()}};
    for (const auto& s : t.emitted) j["emitted"].push_back(s.str());
    if (t.finished) j["final"] = t.final.str();
    return j;
}

json state_trace_json(const sos::StatefulSpec& spec, const sos::StateTrace& t) {
    json j = {{"finished", t.finished}, {"stalled", t.stalled}, {"steps", t.steps}, {"emitted", json::array()}};
    for (auto s : t.emitted) j["emitted"].push_back(spec.states[static_cast<std::size_t>(s)]);
    if (t.finished) j["final"] = spec.states[static_cast<std::size_t>(t.final)];
    return j;
}

json outcome_json(const ref2::Outcome& o) {
    json j = {{"steps", o.steps}};
    switch (o.kind) {
        case ref2::Outcome::Kind::Value:
            j["kind"] = "value";
            j["value"] = o.value.str();
            j["store"] = o.store.str();
            break;
        case ref2::Outcome::Kind::Store:
            j["kind"] = "store";
            j["store"] = o.store.str();
            break;
        case ref2::Outcome::Kind::Stuck:
            j["kind"] = "stuck";
            j["reason"] = o.stuck;
            break;
        case ref2::Outcome::Kind::Cut: j["kind"] = "cut"; break;
    }
    return j;
}

VarStore store_from_bindings(const std::vector<std::string>& bindings) {
    VarStore s;
    for (const auto& b : bindings) {
        auto [x, v] = parse::binding(b);
        s.put(x, v);
    }
    return s;
}

ref2::Store store_from_locs(const std::vector<std::string>& locs) {
    ref2::Store s;
    for (const auto& b : locs) {
        auto eq = b.find('=');
        if (eq == std::string::npos) throw UsageError("--loc expects l=v, got " + b);
        std::string key = b.substr(0, eq);
        if (!key.empty() && key[0] == '#') key = key.substr(1);
        ref2::Loc l;
        try {
            std::size_t used = 0;
            l = std::stoll(key, &used);
            if (used != key.size() || l < 0) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw UsageError("--loc expects a non-negative location, got " + b);
        }
        s = s.set(l, parse::ref2_value(b.substr(eq + 1)));
    }
    return s;
}

std::vector<ref2::Store> stores_from_json(const json& doc) {
    if (!doc.contains("stores")) return ref2::default_sample();
    std::vector<ref2::Store> out;
    for (const auto& s : doc["stores"]) out.push_back(parse::ref2_store(s.get<std::string>()));
    return out;
}

struct Ctx {
    std::ostream& out;
    std::ostream& err;
    std::string outFile;
    json report;
    int status = 0;
};

// ---- command bodies ----

void cmd_run(Ctx& cx, const std::string& lang, const std::string& prog, const std::vector<std::string>& stores,
             const std::vector<std::string>& locs, std::size_t fuel, bool writer) {
    const std::string text = source(prog);
    cx.report["inputs"] = {{"language", lang}, {"program", text}, {"fuel", fuel}};
    if (lang == "imp") {
        imp::Prog p = parse::imp_program(text);
        VarStore s = store_from_bindings(stores);
        cx.report["inputs"]["store"] = s.str();
        imp::TraceResult t = imp::trace(p, s, fuel);
        cx.report["outcome"] = trace_json(t);
        cx.err << (t.finished ? "finished in " + t.final.str() : std::string("ran out of fuel")) << "\n";
    } else if (lang == "imp2") {
        imp::TraceResult t;
        if (writer) {
            t = imp2::trace(parse::imp2_writer(text), fuel);
        } else {
            VarStore s = store_from_bindings(stores);
            cx.report["inputs"]["store"] = s.str();
            t = imp2::trace(parse::imp_program(text), s, fuel);
        }
        cx.report["outcome"] = trace_json(t);
        cx.err << (t.finished ? "finished in " + t.final.str() : std::string("ran out of fuel")) << "\n";
    } else if (lang == "ref2") {
        ref2::Outcome o;
        if (writer) {
            o = ref2::run(parse::ref2_writer(text), fuel);
        } else {
            ref2::Store s = store_from_locs(locs);
            cx.report["inputs"]["store"] = s.str();
            o = ref2::run(parse::ref2_reader(text), s, fuel);
        }
        cx.report["outcome"] = outcome_json(o);
        cx.err << o.str() << "\n";
        if (o.kind == ref2::Outcome::Kind::Stuck) cx.status = 1;
    } else {
        throw UsageError("unknown language " + lang + " (expected imp, imp2 or ref2)");
    }
}

void cmd_equiv(Ctx& cx, const std::string& lang, const std::string& pa, const std::string& qa, const std::string& sem,
               std::size_t nstores, std::uint64_t seed, std::size_t fuel, int depth) {
    const std::string pt = source(pa), qt = source(qa);
    cx.report["inputs"] = {{"language", lang}, {"p", pt}, {"q", qt}, {"semantics", sem}, {"stores", nstores},
                           {"seed", seed}, {"fuel", fuel}};
    if (lang != "imp" && lang != "imp2") throw UsageError("equiv supports imp and imp2");
    imp::Prog p = parse::imp_program(pt), q = parse::imp_program(qt);
    std::set<std::string> vars;
    collect_vars(p, vars);
    collect_vars(q, vars);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> val(-5, 5);
    std::vector<VarStore> stores;
    for (std::size_t i = 0; i < nstores; ++i) {
        VarStore s;
        for (const auto& x : vars) s.put(x, val(rng));
        stores.push_back(s);
    }
    if (sem == "resumption") {
        cx.report["inputs"]["depth"] = depth;
        imp::BisimVerdict v = imp::check_resumption_bisim({{p, q}}, stores, depth);
        cx.report["outcome"] = {{"holds", v.holds}, {"note", v.note}};
        if (!v.holds) {
            cx.report["counterexample"] = {{"p", v.p.str()}, {"q", v.q.str()}, {"store", v.store.str()},
                                           {"clause", std::string(1, v.clause)}, {"depth", v.depth}, {"detail", v.detail}};
            cx.status = 1;
        }
        cx.err << (v.holds ? "resumption bisimilar on sample" : "not resumption bisimilar: " + v.detail) << "\n";
        return;
    }
    const equiv::Flavor flavor = equiv::flavor_from_string(sem);
    std::size_t cut = 0;
    for (const auto& s : stores) {
        imp::TraceResult a = lang == "imp" ? imp::trace(p, s, fuel) : imp2::trace(p, s, fuel);
        imp::TraceResult b = lang == "imp" ? imp::trace(q, s, fuel) : imp2::trace(q, s, fuel);
        if (!a.finished || !b.finished) ++cut;
        if (!imp::same_observation(a, b, flavor)) {
            cx.status = 1;
            cx.report["outcome"] = "distinguished";
            cx.report["counterexample"] = {{"store", s.str()}, {"p", trace_json(a)}, {"q", trace_json(b)}};
            cx.err << "distinguished from " << s.str() << "\n";
            return;
        }
    }
    cx.report["outcome"] = "equivalent on sample";
    cx.report["cutRuns"] = cut;
    cx.err << "equivalent on sample (" << stores.size() << " stores, " << cut << " cut)\n";
}

json cool_json(const sos::StatefulSpec& spec, const sos::CoolReport& r) {
    json j = {{"cool", r.cool}, {"passive", r.passive}, {"active", r.active}, {"violations", json::array()}};
    for (const auto& v : r.violations)
        j["violations"].push_back({{"operator", v.op},
                                   {"position", v.position},
                                   {"trigger", spec.trigger_str(spec.op_index(v.op), v.trigger)},
                                   {"reason", sos::to_string(v.reason)},
                                   {"detail", v.detail}});
    return j;
}

void cmd_sos_check_cool(Ctx& cx, const std::string& file) {
    sos::StatefulSpec spec = sos::load_spec(read_file(file));
    sos::CoolReport r = sos::check_cool(spec);
    cx.report["inputs"] = {{"spec", file}};
    cx.report["outcome"] = cool_json(spec, r);
    if (!r.cool) cx.status = 1;
    cx.err << (r.cool ? "cool" : "not cool") << ";";
    for (const auto& [op, j] : r.active) cx.err << " " << op << ": j=" << j;
    cx.err << "\n";
}

void cmd_sos_derive(Ctx& cx, const std::string& file) {
    sos::StatefulSpec spec = sos::load_spec(read_file(file));
    sos::CoolReport r = sos::check_cool(spec);
    cx.report["inputs"] = {{"spec", file}};
    if (!r.cool) {
        cx.report["outcome"] = cool_json(spec, r);
        cx.status = 1;
        cx.err << "not cool, nothing derived\n";
        return;
    }
    cx.report["outcome"] = json::parse(sos::rw_to_json(sos::derive_rw(spec)));
    cx.err << "derived the reader-writer extension\n";
}

void cmd_sos_run(Ctx& cx, const std::string& file, const std::string& termText, const std::string& state,
                 std::size_t fuel, bool rwMode) {
    sos::StatefulSpec spec = sos::load_spec(read_file(file));
    Term t = parse::tiny_term(source(termText));
    if (auto e = validate_term(spec.signature(), t)) throw UsageError(e->what());
    sos::StateId s = state.empty() ? 0 : spec.state_id(state);
    cx.report["inputs"] = {{"spec", file}, {"term", t.str()}, {"state", spec.states[static_cast<std::size_t>(s)]},
                           {"fuel", fuel}, {"semantics", rwMode ? "rw" : "l"}};
    sos::StateTrace tr = rwMode ? sos::rw_trace(sos::derive_rw(spec), t, s, fuel) : sos::l_trace(spec, t, s, fuel);
    cx.report["outcome"] = state_trace_json(spec, tr);
    cx.err << tr.str(spec) << "\n";
}

void cmd_sos_verify(Ctx& cx, const std::string& file, int depth, std::size_t nterms, std::uint64_t seed, std::size_t fuel) {
    sos::StatefulSpec spec = sos::load_spec(read_file(file));
    std::vector<Term> terms;
    if (nterms == 0) {
        terms = sos::enumerate_terms(spec, depth);
    } else {
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < nterms; ++i) terms.push_back(sos::random_term(rng, spec, depth));
    }
    std::vector<sos::StateId> states;
    for (int i = 0; i < static_cast<int>(spec.states.size()); ++i) states.push_back(i);
    sos::PreservationReport r = sos::verify_preservation(spec, terms, states, fuel);
    cx.report["inputs"] = {{"spec", file}, {"depth", depth}, {"terms", terms.size()}, {"seed", seed}, {"fuel", fuel}};
    json ms = json::array();
    for (std::size_t i = 0; i < r.mismatches.size() && i < 20; ++i) {
        const auto& m = r.mismatches[i];
        ms.push_back({{"term", m.term.str()}, {"state", spec.states[static_cast<std::size_t>(m.state)]},
                      {"l", state_trace_json(spec, m.l)}, {"rw", state_trace_json(spec, m.l2)}});
    }
    cx.report["outcome"] = {{"checked", r.checked}, {"agreeFinished", r.agreeFinished}, {"agreeCut", r.agreeCut},
                            {"mismatches", r.mismatches.size()}, {"examples", ms}};
    if (!r.mismatches.empty()) cx.status = 1;
    cx.err << r.checked << " runs, " << r.mismatches.size() << " mismatches\n";
}

void cmd_sos_imp_spec(Ctx& cx, const std::string& vars, int domain) {
    impspec::Config cfg;
    cfg.vars.clear();
    std::stringstream ss(vars);
    for (std::string x; std::getline(ss, x, ',');)
        if (!x.empty()) cfg.vars.push_back(x);
    cfg.domain = domain;
    cx.report = json::parse(sos::spec_to_json(impspec::imp_as_spec(cfg).spec));
    cx.err << "imp specification over " << vars << " with values 0.." << domain - 1 << "\n";
}

json verdict_json(const equiv::FiniteRWSystem& sys, const equiv::Verdict& v) {
    json j = {{"holds", v.holds}, {"pairsChecked", v.pairsChecked}};
    if (v.holds) return j;
    const auto& names = v.sort == 'r' ? sys.readers : sys.writers;
    j["sort"] = std::string(1, v.sort);
    j["pair"] = {names[static_cast<std::size_t>(v.left)], names[static_cast<std::size_t>(v.right)]};
    j["clause"] = v.clause;
    if (v.state >= 0) j["state"] = sys.states[static_cast<std::size_t>(v.state)];
    j["witness"] = v.witness;
    return j;
}

void cmd_sim_check(Ctx& cx, const std::string& sysFile, const std::string& relFile, const std::string& flavorName) {
    auto sys = equiv::load_system(read_file(sysFile));
    auto R = equiv::load_relation(sys, read_file(relFile));
    auto flavor = equiv::flavor_from_string(flavorName);
    auto v = equiv::check_simulation(sys, R, flavor);
    cx.report["inputs"] = {{"system", sysFile}, {"relation", relFile}, {"flavor", equiv::to_string(flavor)}};
    cx.report["outcome"] = verdict_json(sys, v);
    if (!v.holds) cx.status = 1;
    cx.err << (v.holds ? "holds" : "fails: clause " + std::to_string(v.clause) + ", " + v.witness) << "\n";
}

void cmd_sim_greatest(Ctx& cx, const std::string& sysFile, const std::string& flavorName) {
    auto sys = equiv::load_system(read_file(sysFile));
    auto flavor = equiv::flavor_from_string(flavorName);
    auto R = equiv::greatest_simulation(sys, flavor);
    cx.report["inputs"] = {{"system", sysFile}, {"flavor", equiv::to_string(flavor)}};
    cx.report["outcome"] = json::parse(equiv::relation_to_json(sys, R));
    cx.err << R.r.count() << " reader pairs, " << R.w.count() << " writer pairs\n";
}

int status_code(ref2::Status s) { return s == ref2::Status::Holds ? 0 : 1; }

void cmd_ref2_sim_check(Ctx& cx, const std::string& relFile, std::size_t fuel) {
    const json doc = json::parse(read_file(relFile));
    const auto sample = stores_from_json(doc);
    ref2::SimOptions opt;
    opt.fuel = fuel;
    if (doc.contains("stuckMustMatch")) opt.stuckMustMatch = doc["stuckMustMatch"].get<bool>();
    cx.report["inputs"] = {{"relation", relFile}, {"fuel", fuel}, {"stores", json::array()}};
    for (const auto& s : sample) cx.report["inputs"]["stores"].push_back(s.str());

    if (doc.contains("certify")) {
        json results = json::array();
        for (const auto& pr : doc["certify"]) {
            auto p = parse::ref2_reader(pr.at(0).get<std::string>()), q = parse::ref2_reader(pr.at(1).get<std::string>());
            auto r = ref2::certify_pair(p, q, sample, opt);
            results.push_back({{"left", p.str()}, {"right", q.str()}, {"status", ref2::to_string(r.status)},
                               {"pairs", r.pairs}, {"detail", r.detail}});
            cx.status = std::max(cx.status, status_code(r.status));
            cx.err << p.str() << " <= " << q.str() << ": " << ref2::to_string(r.status) << "\n";
        }
        cx.report["outcome"] = {{"certified", results}};
        return;
    }
    ref2::Relation R;
    if (doc.contains("diagonal")) R.diagonal = doc["diagonal"].get<bool>();
    if (doc.contains("readers"))
        for (const auto& pr : doc["readers"])
            R.add_reader(parse::ref2_reader(pr.at(0).get<std::string>()), parse::ref2_reader(pr.at(1).get<std::string>()));
    // "$s" in a writer pair stands for each sample store in turn.
    if (doc.contains("writers"))
        for (const auto& pr : doc["writers"]) {
            std::string a = pr.at(0).get<std::string>(), b = pr.at(1).get<std::string>();
            if (a.find("$s") == std::string::npos && b.find("$s") == std::string::npos) {
                R.add_writer(parse::ref2_writer(a), parse::ref2_writer(b));
                continue;
            }
            for (const auto& s : sample) {
                auto subst = [&](std::string t) {
                    for (std::size_t at; (at = t.find("$s")) != std::string::npos;) t.replace(at, 2, s.str());
                    return t;
                };
                R.add_writer(parse::ref2_writer(subst(a)), parse::ref2_writer(subst(b)));
            }
        }
    if (doc.value("symmetric", false)) R = R.symmetrized();
    auto v = ref2::check_ho_termination_sim(R, sample, opt);
    json o = {{"status", ref2::to_string(v.status)}, {"pairsChecked", v.pairsChecked}};
    if (v.status != ref2::Status::Holds)
        o.update({{"sort", std::string(1, v.sort)}, {"clause", v.clause}, {"left", v.left}, {"right", v.right},
                  {"store", v.store}, {"witness", v.witness}});
    cx.report["outcome"] = o;
    cx.status = status_code(v.status);
    cx.err << ref2::to_string(v.status);
    if (v.status != ref2::Status::Holds) cx.err << ": clause " << v.clause << ", " << v.witness;
    cx.err << "\n";
}

void cmd_ref2_ctx(Ctx& cx, const std::string& pa, const std::string& qa, std::size_t maxSize, std::size_t cap) {
    auto p = parse::ref2_reader(source(pa)), q = parse::ref2_reader(source(qa));
    const auto sample = ref2::default_sample();
    auto r = ref2::ctx_refute(p, q, maxSize, sample, cap);
    cx.report["inputs"] = {{"p", p.str()}, {"q", q.str()}, {"maxSize", maxSize}, {"cap", cap}};
    json o = {{"found", r.found}, {"contextsTried", r.contextsTried}, {"inconclusive", r.inconclusive}};
    if (r.found) {
        o["context"] = r.context.str();
        o["size"] = r.context.size;
        if (!r.store.empty()) o["store"] = r.store;
        o["left"] = ref2::to_string(r.left);
        o["right"] = ref2::to_string(r.right);
        cx.status = 1;
    }
    cx.report["outcome"] = o;
    cx.err << (r.found ? "refuted by " + r.context.str() : std::string("no distinguishing context found")) << " ("
           << r.contextsTried << " contexts)\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"rwsos: reader-writer operational semantics workbench", "rwsos"};
    app.require_subcommand(1);
    Ctx cx{out, err, {}, json::object(), 0};
    std::function<void()> action;

    std::size_t fuel = 1000, stores = 100, maxSize = 4, cap = 4000, nterms = 0;
    std::uint64_t seed = 0;
    int depth = 2, domain = 3;
    std::string flavor = "trace", lang, a, b, state, vars = "x";
    std::vector<std::string> storeFlags, locFlags;
    bool writer = false, rwMode = false;

    auto add_out = [&](CLI::App* c) { c->add_option("-o", cx.outFile, "write the report to a file"); };
    auto add_fuel = [&](CLI::App* c) { c->add_option("--fuel", fuel, "step budget")->capture_default_str(); };

    auto* run = app.add_subcommand("run", "run a program");
    run->add_option("language", lang, "imp, imp2 or ref2")->required();
    run->add_option("program", a, "program text or file")->required();
    run->add_option("--store", storeFlags, "x=v binding (imp, imp2)");
    run->add_option("--loc", locFlags, "l=v cell (ref2)");
    run->add_flag("--writer", writer, "the program is a writer");
    add_fuel(run);
    add_out(run);
    run->callback([&] { action = [&] { cmd_run(cx, lang, a, storeFlags, locFlags, fuel, writer); }; });

    auto* eq = app.add_subcommand("equiv", "compare two programs on sampled stores");
    eq->add_option("language", lang, "imp or imp2")->required();
    eq->add_option("p", a)->required();
    eq->add_option("q", b)->required();
    eq->add_option("--semantics,--flavor", flavor, "trace, cost, ter or resumption")->capture_default_str();
    eq->add_option("--stores", stores, "number of sampled stores")->capture_default_str();
    eq->add_option("--seed", seed)->capture_default_str();
    eq->add_option("--depth", depth, "resumption depth")->capture_default_str();
    add_fuel(eq);
    add_out(eq);
    eq->callback([&] { action = [&] { cmd_equiv(cx, lang, a, b, flavor, stores, seed, fuel, depth); }; });

    auto* sos = app.add_subcommand("sos", "stateful SOS specifications");
    sos->require_subcommand(1);
    auto* cool = sos->add_subcommand("check-cool", "check the cool format");
    cool->add_option("spec", a)->required()->check(CLI::ExistingFile);
    add_out(cool);
    cool->callback([&] { action = [&] { cmd_sos_check_cool(cx, a); }; });
    auto* derive = sos->add_subcommand("derive-rw", "derive the reader-writer extension");
    derive->add_option("spec", a)->required()->check(CLI::ExistingFile);
    add_out(derive);
    derive->callback([&] { action = [&] { cmd_sos_derive(cx, a); }; });
    auto* srun = sos->add_subcommand("run", "run a term");
    srun->add_option("spec", a)->required()->check(CLI::ExistingFile);
    srun->add_option("term", b)->required();
    srun->add_option("--state", state, "initial state name");
    srun->add_flag("--rw", rwMode, "use the derived reader-writer semantics");
    add_fuel(srun);
    add_out(srun);
    srun->callback([&] { action = [&] { cmd_sos_run(cx, a, b, state, fuel, rwMode); }; });
    auto* pres = sos->add_subcommand("verify-preservation", "compare both semantics on many terms");
    pres->add_option("spec", a)->required()->check(CLI::ExistingFile);
    pres->add_option("--depth", depth, "term depth")->capture_default_str();
    pres->add_option("--terms", nterms, "random terms instead of all terms");
    pres->add_option("--seed", seed)->capture_default_str();
    add_fuel(pres);
    add_out(pres);
    pres->callback([&] { action = [&] { cmd_sos_verify(cx, a, depth, nterms, seed, fuel); }; });
    auto* ispec = sos->add_subcommand("imp-spec", "emit the while language as a specification");
    ispec->add_option("--vars", vars, "comma separated variables")->capture_default_str();
    ispec->add_option("--domain", domain, "values 0..domain-1")->capture_default_str();
    add_out(ispec);
    ispec->callback([&] { action = [&] { cmd_sos_imp_spec(cx, vars, domain); }; });

    auto* sim = app.add_subcommand("sim", "finite systems");
    sim->require_subcommand(1);
    auto* scheck = sim->add_subcommand("check", "check a relation");
    scheck->add_option("system", a)->required()->check(CLI::ExistingFile);
    scheck->add_option("relation", b)->required()->check(CLI::ExistingFile);
    scheck->add_option("--flavor", flavor)->capture_default_str();
    add_out(scheck);
    scheck->callback([&] { action = [&] { cmd_sim_check(cx, a, b, flavor); }; });
    auto* sgreat = sim->add_subcommand("greatest", "compute similarity");
    sgreat->add_option("system", a)->required()->check(CLI::ExistingFile);
    sgreat->add_option("--flavor", flavor)->capture_default_str();
    add_out(sgreat);
    sgreat->callback([&] { action = [&] { cmd_sim_greatest(cx, a, flavor); }; });

    auto* r2 = app.add_subcommand("ref2", "the language with higher-order store");
    r2->require_subcommand(1);
    auto* r2run = r2->add_subcommand("run", "run a reader");
    r2run->add_option("program", a)->required();
    r2run->add_option("--loc", locFlags, "l=v cell");
    r2run->add_flag("--writer", writer, "the program is a writer");
    add_fuel(r2run);
    add_out(r2run);
    r2run->callback([&] { action = [&] { cmd_run(cx, "ref2", a, {}, locFlags, fuel, writer); }; });
    auto* r2sim = r2->add_subcommand("sim-check", "check a higher-order termination simulation");
    r2sim->add_option("relation", a)->required()->check(CLI::ExistingFile);
    r2sim->add_option("--fuel", fuel, "expansions per weak closure")->capture_default_str();
    add_out(r2sim);
    r2sim->callback([&] { action = [&] { cmd_ref2_sim_check(cx, a, fuel); }; });
    auto* r2ctx = r2->add_subcommand("ctx-refute", "search for a distinguishing context");
    r2ctx->add_option("p", a)->required();
    r2ctx->add_option("q", b)->required();
    r2ctx->add_option("--max-size", maxSize)->capture_default_str();
    r2ctx->add_option("--cap", cap, "configurations per halting check")->capture_default_str();
    add_out(r2ctx);
    r2ctx->callback([&] { action = [&] { cmd_ref2_ctx(cx, a, b, maxSize, cap); }; });

    std::vector<std::string> argvStore{"rwsos"};
    argvStore.insert(argvStore.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argvStore) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    std::string command;
    for (auto* c = app.get_subcommands().front();; c = c->get_subcommands().front()) {
        command += (command.empty() ? "" : " ") + c->get_name();
        if (c->get_subcommands().empty()) break;
    }
    try {
        action();
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (command != "sos imp-spec") {
        json doc = {{"schemaVersion", kSchemaVersion}, {"command", command}};
        doc.update(cx.report);
        cx.report = std::move(doc);
    }
    const std::string text = cx.report.dump(2) + "\n";
    if (cx.outFile.empty()) {
        out << text;
    } else {
        std::ofstream f(cx.outFile);
        if (!f) {
            err << "cannot write " << cx.outFile << "\n";
            return 2;
        }
        f << text;
    }
    return cx.status;
}

}  // namespace rwsos::cli
