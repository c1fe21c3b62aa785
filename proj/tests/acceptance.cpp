// Acceptance suite: one line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "flowrefine/commands.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace flowrefine;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool same_system(const System& a, const System& b)
{
    if (a.in() != b.in() || a.out() != b.out() || a.components().size() != b.components().size())
        return false;
    for (std::size_t i = 0; i < a.components().size(); ++i) {
        const auto& x = a.components()[i];
        const auto& y = b.components()[i];
        if (x.name != y.name || x.in != y.in || x.out != y.out || !x.behav.same_as(y.behav))
            return false;
    }
    return true;
}

// 1 ------------------------------------------------------------------------

Outcome consistency_conditions()
{
    CaseStudyProfile p;
    auto s = original_system(p);
    auto quiet = [](const std::string& name, ChannelSet in, ChannelSet out) {
        return make_component(name, in, out, silent(in, out));
    };
    auto plus = [&](Component c) {
        auto comps = s.components();
        comps.push_back(std::move(c));
        return s.with_components(std::move(comps));
    };
    std::vector<std::pair<std::string, System>> cases{
        {"condition-1", plus(quiet("PRE", {}, {}))},
        {"condition-2", plus(quiet("X", {}, {"I"}))},
        {"condition-3", plus(quiet("X", {}, {"Key"}))},
        {"condition-4", plus(quiet("X", {"Z"}, {}))},
        {"condition-5", System(s.in(), {"Data", "W"}, s.components(), s.bounds())},
    };
    std::ostringstream detail;
    bool ok = validate_system(s).verdicts.empty();
    detail << "original " << (ok ? "consistent" : "INCONSISTENT");
    for (const auto& [expected, sys] : cases) {
        auto r = validate_system(sys);
        bool exact = r.verdicts.size() == 1 && r.verdicts[0].id == expected && !r.verdicts[0].holds;
        ok = ok && exact;
        detail << "; " << expected << (exact ? " flagged alone" : " NOT flagged alone");
    }
    return {ok, detail.str()};
}

// 2 ------------------------------------------------------------------------

void sequences(std::size_t max_len, std::vector<Entry>& cur, const std::function<void(const std::vector<Entry>&)>& f)
{
    f(cur);
    if (cur.size() == max_len)
        return;
    for (int d = 0; d < 3; ++d) {
        cur.push_back({"a", d});
        sequences(max_len, cur, f);
        cur.pop_back();
    }
}

Outcome codec_laws()
{
    Codec codec;
    std::size_t checked = 0, failures = 0;
    for (Datum old : {Datum{}, Datum{0}, Datum{1}, Datum{2}})
        for (int now = 0; now < 3; ++now) {
            ++checked;
            if (codec.rho(old, codec.delta(old, now)) != now)
                ++failures;
        }
    std::vector<Database> dbs{{}, {{"a", 0}}, {{"a", 1}}, {{"a", 2}}};
    std::vector<Entry> cur;
    for (const auto& m : dbs)
        sequences(5, cur, [&](const std::vector<Entry>& x) {
            ++checked;
            if (rho_star(codec, m, delta_star(codec, m, x)) != x)
                ++failures;
        });
    return {failures == 0, std::to_string(checked) + " cases, " + std::to_string(failures) + " failures"};
}

// 3 ------------------------------------------------------------------------

Outcome composition_oracle()
{
    std::mt19937 rng(3003);
    std::size_t systems = 0, mismatches = 0, inputs = 0;
    while (systems < 120) {
        auto s = gen::random_system(rng);
        if (!validate_system(s).ok())
            continue;
        ++systems;
        auto lib = oracle::from_bounded(bounded_behavior(black_box(s), s.bounds()));
        auto ref = oracle::black_box(s);
        inputs += ref.size();
        if (lib != ref)
            ++mismatches;
    }
    return {mismatches == 0, std::to_string(systems) + " systems, " + std::to_string(inputs) + " inputs, " +
                                 std::to_string(mismatches) + " mismatches"};
}

// 4 and 7 ----------------------------------------------------------------------

struct SoundnessStats {
    std::size_t triples = 0, accepted = 0, violations = 0, mutated = 0;
    std::map<Rule, std::size_t> accepted_by_rule;
    std::size_t chains = 0, chain_violations = 0;
};

SoundnessStats soundness_search()
{
    std::mt19937 rng(4004);
    SoundnessStats st;
    auto one = [&](const System& s, std::optional<System>& after) {
        auto step = gen::random_step(rng, s);
        ++st.triples;
        auto r = apply_step(s, step);
        if (!r.applied()) {
            if (!same_system(s, r.system))
                ++st.mutated;
            return;
        }
        ++st.accepted;
        ++st.accepted_by_rule[step.rule];
        bool ok = check_system_refinement(s, r.system, s.bounds()).holds;
        if (ok && is_architectural(step.rule))
            ok = check_system_equality(s, r.system, s.bounds()).holds;
        if (!ok)
            ++st.violations;
        after = r.system;
    };
    while (st.triples < 600 || st.chains < 150) {
        auto s = gen::random_system(rng);
        if (!validate_system(s).ok())
            continue;
        std::optional<System> s1, s2;
        one(s, s1);
        if (!s1)
            continue;
        one(*s1, s2);
        if (!s2)
            continue;
        ++st.chains;
        if (!check_system_refinement(s, *s2, s.bounds()).holds)
            ++st.chain_violations;
    }
    return st;
}

// 5 ------------------------------------------------------------------------

Outcome complementarity()
{
    std::mt19937 rng(5005);
    std::size_t outputs = 0, inputs = 0, comps = 0, violations = 0, systems = 0;
    while (outputs < 100 || inputs < 100 || comps < 100) {
        auto s = gen::random_system(rng);
        if (!validate_system(s).ok())
            continue;
        ++systems;
        const auto& c = s.components()[std::uniform_int_distribution<std::size_t>(0, s.components().size() - 1)(rng)];
        auto equal = [&](const System& t) { return check_system_equality(s, t, s.bounds()).holds; };

        auto a = add_output_channel(s, c.name, "f0");
        auto b = a.applied() ? remove_output_channel(a.system, c.name, "f0") : a;
        if (a.applied() && b.applied()) {
            ++outputs;
            violations += !equal(b.system);
        }

        auto candidates = minus(s.run_channels(), c.in);
        if (!candidates.empty()) {
            auto p = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
            auto x = add_input_channel(s, c.name, p);
            auto y = x.applied() ? remove_input_channel(x.system, c.name, p) : x;
            if (x.applied() && y.applied()) {
                ++inputs;
                violations += !equal(y.system);
            } else {
                ++violations;
            }
        }

        auto u = add_component(s, "N0");
        auto v = u.applied() ? remove_component(u.system, "N0") : u;
        if (u.applied() && v.applied()) {
            ++comps;
            violations += !equal(v.system);
        }
    }
    return {violations == 0, std::to_string(systems) + " systems; round trips: output " + std::to_string(outputs) +
                                 ", input " + std::to_string(inputs) + ", component " + std::to_string(comps) + "; " +
                                 std::to_string(violations) + " violations"};
}

// 6 ------------------------------------------------------------------------

Outcome flagship()
{
    CaseStudyProfile p;
    auto t0 = Clock::now();
    auto r = run_case_study(p, true);
    double main_time = seconds_since(t0);
    bool ok = r.ok() && r.replay.steps.size() == 13 && main_time < 300;
    bool step6_invariant = false;
    for (const auto& s : r.replay.steps)
        if (s.step.stage == 6)
            for (const auto& v : s.report.verdicts)
                if (v.id == "invariant-valid" && v.holds)
                    step6_invariant = true;
    ok = ok && step6_invariant;
    std::ostringstream d;
    d << "H=4: " << r.replay.steps.size() << " applications accepted and verified, invariant "
      << (step6_invariant ? "confirmed" : "NOT confirmed") << ", final refinement "
      << (r.final_check && r.final_check->holds ? "holds" : "FAILS") << " (" << main_time << " s)";

    // The mutant is indistinguishable at H=4: only one entry crosses the
    // pipeline and Δ(⊥, d) = d. At H=5 a second entry reaches R.
    auto mp = p;
    mp.mutant_decoder = true;
    mp.horizon = 5;
    auto m = run_case_study(mp, false);
    bool mutant_fails = false;
    if (m.replay.failed_step) {
        const auto& s = m.replay.steps[*m.replay.failed_step];
        const auto* f = s.report.first_failure();
        mutant_fails = s.step.stage == 6 && f && f->witness.has_value();
        d << "; mutant at H=5 fails at stage " << s.step.stage << " premise " << (f ? f->id : "?");
        if (f && f->witness)
            d << " [" << f->witness->description << "]";
    } else {
        d << "; mutant at H=5 NOT rejected";
    }
    return {ok && mutant_fails, d.str()};
}

// 8 ------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli_replay()
{
    std::filesystem::path data(FLOWREFINE_DATA_DIR);
    auto produced = std::filesystem::temp_directory_path() / "flowrefine_acceptance_final.arch";
    std::ostringstream out, err;
    CommandOptions opt;
    opt.output = produced.string();
    int apply = cmd_apply((data / "original.arch").string(), (data / "script.txt").string(), opt, out, err);
    bool identical = apply == 0 && slurp(produced) == slurp(data / "final.arch");
    std::ostringstream out2, err2;
    int check = cmd_check((data / "original.arch").string(), produced.string(), CommandOptions{}, out2, err2);
    std::filesystem::remove(produced);
    return {identical && check == 0, "apply-script exit " + std::to_string(apply) + ", golden " +
                                          (identical ? "byte-identical" : "DIFFERS") + ", check-refine exit " +
                                          std::to_string(check)};
}

} // namespace

int main()
{
    int failed = 0;
    auto report = [&](int n, const std::string& name, const std::function<Outcome()>& f, double limit) {
        auto t0 = Clock::now();
        auto o = f();
        double t = seconds_since(t0);
        bool pass = o.pass && t < limit;
        failed += !pass;
        std::printf("[%s] criterion %d: %s: %s (%.2f s, limit %.0f s)\n", pass ? "PASS" : "FAIL", n, name.c_str(),
                    o.detail.c_str(), t, limit);
        std::fflush(stdout);
    };

    report(1, "consistency conditions", consistency_conditions, 1);
    report(2, "codec laws", codec_laws, 10);
    report(3, "composition oracle", composition_oracle, 300);

    SoundnessStats st;
    report(4, "rule soundness", [&] {
        st = soundness_search();
        std::ostringstream d;
        d << st.triples << " triples, " << st.accepted << " accepted (";
        bool first = true;
        for (const auto& [rule, n] : st.accepted_by_rule) {
            d << (first ? "" : ", ") << rule_name(rule) << " " << n;
            first = false;
        }
        d << "), " << st.violations << " violations, " << st.mutated << " rejected applications changed the system";
        return Outcome{st.triples >= 500 && st.violations == 0 && st.mutated == 0 && st.accepted_by_rule.size() == 11,
                       d.str()};
    }, 600);
    report(5, "complementarity", complementarity, 600);
    report(6, "flagship case study", flagship, 300);
    report(7, "transitivity", [&] {
        return Outcome{st.chains >= 100 && st.chain_violations == 0,
                       std::to_string(st.chains) + " chains S ~> S' ~> S'', " + std::to_string(st.chain_violations) +
                           " violations"};
    }, 600);
    report(8, "CLI determinism and replay", cli_replay, 300);

    std::printf("%s: %d of 8 criteria failed\n", failed ? "FAILED" : "ALL PASSED", failed);
    return failed ? 1 : 0;
}
