#include "helpers.hpp"
#include "support/oracle.hpp"

using namespace th;

namespace {

// Modular reference for the codec on {0, 1, 2}.
int ref_delta(Datum old, int now)
{
    return old ? ((now - *old) % 3 + 3) % 3 : now;
}

int ref_rho(Datum old, int diff)
{
    return old ? (*old + diff) % 3 : diff;
}

std::vector<Entry> entries(const TimedStream& x)
{
    std::vector<Entry> out;
    for (const auto& m : flatten(x))
        out.push_back(*parse_entry(m));
    return out;
}

bool is_prefix(const std::vector<Entry>& a, const std::vector<Entry>& b)
{
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

NamedStreamTuple single(const std::string& ch, std::vector<Interval> ivs)
{
    auto h = ivs.size();
    return tup(h, {{ChannelId(ch), ts(std::move(ivs))}});
}

} // namespace

TEST_CASE("codec matches the modular reference", "[case_study]")
{
    Codec c;
    for (int d = 0; d < 3; ++d) {
        CHECK(c.delta(std::nullopt, d) == d);
        CHECK(c.rho(std::nullopt, d) == d);
        CHECK(c.delta(d, d) == 0);
    }
    CHECK(c.delta(1, 2) == 1);
    CHECK(c.rho(1, 1) == 2);
    for (Datum old : {Datum{}, Datum{0}, Datum{1}, Datum{2}})
        for (int v = 0; v < 3; ++v) {
            CHECK(c.delta(old, v) == ref_delta(old, v));
            CHECK(c.rho(old, v) == ref_rho(old, v));
            CHECK(c.rho(old, c.delta(old, v)) == v);
        }
    CHECK_THROWS_AS(c.delta(1, std::nullopt), DomainError);
    CHECK_THROWS_AS(c.rho(1, std::nullopt), DomainError);
    CHECK_THROWS_AS(c.delta(1, 3), DomainError);
}

TEST_CASE("stream extensions of the codec", "[case_study]")
{
    Codec c;
    CHECK(delta_star(c, {}, {}).empty());
    CHECK(rho_star(c, {}, {}).empty());
    std::vector<Entry> x{{"a", 1}, {"a", 2}};
    std::vector<Entry> dx{{"a", 1}, {"a", 1}};
    CHECK(delta_star(c, {}, x) == dx);
    CHECK(rho_star(c, {}, dx) == x);
    std::vector<Entry> mixed{{"a", 2}, {"b", 1}, {"a", 0}};
    CHECK(delta_star(c, {{"b", 2}}, mixed) == std::vector<Entry>{{"a", 2}, {"b", 2}, {"a", 1}});
    CHECK(delta_star(c, {}, mixed).size() == mixed.size());
    CHECK(rho_star(c, {{"b", 2}}, delta_star(c, {{"b", 2}}, mixed)) == mixed);
}

TEST_CASE("entry tokens", "[case_study]")
{
    CHECK(entry_token({"a", 2}) == "a:2");
    CHECK(parse_entry("a:2") == Entry{"a", 2});
    CHECK_FALSE(parse_entry("a2").has_value());
    CHECK(datum_token(std::nullopt) == "bot");
    CHECK(datum_token(1) == "1");
}

TEST_CASE("preprocessor delays entries", "[case_study]")
{
    CaseStudyProfile p;
    auto b = case_study_bounds(p);
    auto pre = make_pre(p).behav;
    auto outs = behavior_of(pre, single("In", {{"a:1"}, {}, {}, {}}), b);
    std::set<std::size_t> delays;
    for (const auto& o : outs) {
        const auto& i = o.at("I");
        CHECK(i[0].empty());
        for (std::size_t t = 0; t < 4; ++t)
            if (!i[t].empty()) {
                CHECK(i[t] == Interval{"a:1"});
                delays.insert(t);
            }
    }
    CHECK(delays == std::set<std::size_t>{1, 2, 3});

    auto quiet = behavior_of(pre, single("In", {{}, {}, {}, {}}), b);
    CHECK(quiet == OutputSet{single("I", {{}, {}, {}, {}})});

    p.f = {{1, 2}};
    auto mapped = make_pre(p).behav;
    CHECK(mapped.describe() == "preprocessor(In, I, {1:2})");
    auto in = single("In", {{"a:1"}, {"a:0"}, {}, {}});
    for (const auto& o : behavior_of(mapped, in, b))
        CHECK(is_prefix(entries(o.at("I")), {{"a", 2}, {"a", 0}}));
}

TEST_CASE("database answers queries with stored data", "[case_study]")
{
    CaseStudyProfile p;
    auto b = case_study_bounds(p);
    auto rdb = make_rdb(p, "I").behav;
    auto x = tup(4, {{"I", ts({{"a:1"}, {}, {}, {}})}, {"Key", ts({{}, {"a"}, {}, {}})}});
    std::set<Interval> answers;
    for (const auto& o : behavior_of(rdb, x, b))
        for (const auto& iv : o.at("Data").intervals())
            if (!iv.empty())
                answers.insert(iv);
    CHECK(answers == std::set<Interval>{{"1"}, {"bot"}});

    auto early = tup(4, {{"I", ts({{}, {}, {}, {}})}, {"Key", ts({{"a"}, {}, {}, {}})}});
    for (const auto& o : behavior_of(rdb, early, b))
        for (const auto& iv : o.at("Data").intervals())
            if (!iv.empty())
                CHECK(iv == Interval{"bot"});

    auto dec = make_rdb(p, "R", true).behav;
    Codec c;
    auto encoded = delta_star(c, {}, {{"a", 1}, {"a", 2}});
    auto y = tup(4, {{"R", ts({{entry_token(encoded[0])}, {entry_token(encoded[1])}, {}, {}})},
                     {"Key", ts({{}, {}, {"a"}, {}})}});
    auto outs = behavior_of(dec, y, b);
    CHECK(outs.contains(tup(4, {{"Data", ts({{}, {}, {}, {"2"}})}})));
    for (const auto& o : outs)
        for (const auto& iv : o.at("Data").intervals())
            if (!iv.empty())
                CHECK((iv == Interval{"2"} || iv == Interval{"1"} || iv == Interval{"bot"}));
}

TEST_CASE("encoder and decoder", "[case_study]")
{
    CaseStudyProfile p;
    auto b = case_study_bounds(p);
    auto enc = make_enc(p).behav;
    auto x = single("I", {{"a:1"}, {"a:2"}, {}, {}});
    bool full = false;
    for (const auto& o : behavior_of(enc, x, b)) {
        auto d = entries(o.at("D"));
        CHECK(is_prefix(d, {{"a", 1}, {"a", 1}}));
        full = full || d.size() == 2;
    }
    CHECK(full);
    CHECK(behavior_of(enc, single("I", {{}, {}, {}, {}}), b) == OutputSet{single("D", {{}, {}, {}, {}})});

    System pair({"I"}, {"R"}, {make_enc(p), make_dec(p)}, b);
    for (const auto& env : b.with_horizon(3).all_tuples({"I"}, 3)) {
        auto s3 = pair.with_bounds(b.with_horizon(3));
        for (const auto& l : system_runs(s3, env))
            CHECK(is_prefix(entries(l.at("R")), entries(l.at("I"))));
    }
}

TEST_CASE("round-trip invariant", "[case_study]")
{
    CaseStudyProfile p;
    auto psi = roundtrip_invariant("I", "R");
    CHECK(psi->reads() == ChannelSet{"I", "R"});
    auto good = tup(3, {{"I", ts({{"a:1"}, {"a:2"}, {}})}, {"R", ts({{}, {"a:1"}, {"a:2"}})}});
    CHECK(holds(*psi, good));
    auto bad = tup(3, {{"I", ts({{"a:1"}, {}, {}})}, {"R", ts({{}, {"a:0"}, {}})}});
    CHECK_FALSE(holds(*psi, bad));

    auto s = original_system(p);
    auto script = case_study_script(p);
    for (std::size_t i = 0; i < 9; ++i)
        s = apply_step(s, script[i]).system;
    REQUIRE(s.component("RDB").in == ChannelSet{"I", "Key", "R"});
    for (std::size_t h = 1; h <= 4; ++h) {
        auto sh = s.with_bounds(s.bounds().with_horizon(h));
        CHECK(check_invariant_valid(sh, *psi).holds);
        CHECK(check_environment_unrestricted(sh, *psi).holds);
    }
}

TEST_CASE("case study refines at horizon 4", "[case_study]")
{
    CaseStudyProfile p;
    auto r = run_case_study(p, true);
    REQUIRE(r.ok());
    REQUIRE(r.replay.steps.size() == 13);
    std::vector<int> stages;
    for (const auto& s : r.replay.steps) {
        if (stages.empty() || stages.back() != s.step.stage)
            stages.push_back(s.step.stage);
        REQUIRE(s.refinement);
        CHECK(s.refinement->holds);
        bool architectural = s.step.stage != 4 && s.step.stage != 6;
        CHECK(is_architectural(s.step.rule) == architectural);
        if (architectural) {
            REQUIRE(s.equality);
            CHECK(s.equality->holds);
        }
    }
    CHECK(stages == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
    const auto& final_system = r.replay.final_system;
    REQUIRE(final_system.components().size() == 2);
    CHECK(final_system.components()[0].name == "PRE'");
    CHECK(final_system.components()[1].name == "RDB'");
    CHECK(minus(final_system.out_c(), final_system.out()) == ChannelSet{"D"});
}

TEST_CASE("step 6 needs the invariant", "[case_study]")
{
    CaseStudyProfile p;
    auto s = original_system(p);
    auto script = case_study_script(p);
    for (std::size_t i = 0; i < 9; ++i)
        s = apply_step(s, script[i]).system;
    auto s2 = s.with_bounds(s.bounds().with_horizon(3));
    auto step = script[9];
    auto with = refine_with_invariant(s2, "RDB", *step.machine, step.invariant);
    CHECK(with.applied());
    auto without = refine_with_invariant(s2, "RDB", *step.machine, true_invariant());
    CHECK_FALSE(without.applied());
    CHECK(without.report.has_failure("inclusion-under-invariant"));
}

TEST_CASE("a decoder that skips decoding is caught at step 6", "[case_study]")
{
    CaseStudyProfile p;
    p.mutant_decoder = true;
    p.horizon = 5;
    auto r = run_case_study(p, false);
    REQUIRE(r.replay.failed_step);
    const auto& failed = r.replay.steps[*r.replay.failed_step];
    CHECK(failed.step.stage == 6);
    const auto* f = failed.report.first_failure();
    REQUIRE(f);
    CHECK(f->id == "invariant-valid");
    REQUIRE(f->witness);
    const auto& run = f->witness->at("run");
    CHECK_FALSE(holds(*roundtrip_invariant("I", "R"), run));
}
