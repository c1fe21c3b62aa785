#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "support/oracle.hpp"

using namespace th;

namespace {

const std::filesystem::path data_dir(FLOWREFINE_DATA_DIR);

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string data(const char* name)
{
    return (data_dir / name).string();
}

/// Temporary file removed on scope exit.
struct TempFile {
    std::filesystem::path path;

    explicit TempFile(const std::string& name, const std::string& text = {})
        : path(std::filesystem::temp_directory_path() / ("flowrefine_unit_" + name))
    {
        std::ofstream(path, std::ios::binary) << text;
    }
    ~TempFile() { std::filesystem::remove(path); }
    std::string str() const { return path.string(); }
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

template <class F>
Run run(F&& f)
{
    std::ostringstream out, err;
    int code = f(out, err);
    return {code, out.str(), err.str()};
}

std::string with_extra_writer(const std::string& channel)
{
    auto text = slurp(data_dir / "original.arch");
    auto at = text.find("\nsystem");
    return text.insert(at, "component X in {} out {" + channel + "} behavior silent({}, {" + channel + "})\n");
}

} // namespace

TEST_CASE("validate", "[cli]")
{
    CommandOptions opt;
    auto ok = run([&](auto& o, auto& e) { return cmd_validate(data("original.arch"), opt, o, e); });
    CHECK(ok.code == exit_ok);

    TempFile twice("twice.arch", with_extra_writer("I"));
    auto r2 = run([&](auto& o, auto& e) { return cmd_validate(twice.str(), opt, o, e); });
    CHECK(r2.code == exit_failure);
    CHECK(r2.out.find("condition-2") != std::string::npos);

    TempFile env("env.arch", with_extra_writer("Key"));
    auto r3 = run([&](auto& o, auto& e) { return cmd_validate(env.str(), opt, o, e); });
    CHECK(r3.code == exit_failure);
    CHECK(r3.out.find("condition-3") != std::string::npos);

    TempFile bad("bad.arch", "component\n");
    auto r4 = run([&](auto& o, auto& e) { return cmd_validate(bad.str(), opt, o, e); });
    CHECK(r4.code == exit_usage);
    CHECK(r4.err.find(bad.str() + ":1:") != std::string::npos);

    auto missing = run([&](auto& o, auto& e) { return cmd_validate(data("nosuch.arch"), opt, o, e); });
    CHECK(missing.code == exit_usage);
}

TEST_CASE("simulate lists every run", "[cli]")
{
    CommandOptions opt;
    auto r = run([&](auto& o, auto& e) {
        return cmd_simulate(data("original.arch"), data("store_then_query.env"), opt, o, e);
    });
    REQUIRE(r.code == exit_ok);
    CHECK(r.out == slurp(data_dir / "store_then_query.golden"));

    CommandOptions h2;
    h2.bounds.horizon = 2;
    auto short_run = run([&](auto& o, auto& e) {
        return cmd_simulate(data("original.arch"), data("store_then_query.env"), h2, o, e);
    });
    auto s2 = build_system(parse_architecture(slurp(data_dir / "original.arch")), h2.bounds);
    auto env2 = parse_environment(slurp(data_dir / "store_then_query.env"), s2.in(), 2);
    CHECK(short_run.out == render_runs(oracle::runs(s2, env2)));

    CommandOptions h0;
    h0.bounds.horizon = 0;
    auto zero = run([&](auto& o, auto& e) {
        return cmd_simulate(data("original.arch"), data("store_then_query.env"), h0, o, e);
    });
    CHECK(zero.code == exit_ok);
    CHECK(zero.out.find("runs: 1") == 0);

    TempFile det("det.arch", "alphabet a m\nalphabet b m\ncomponent B in {a} out {b} behavior delay_copy(a, b)\n"
                             "system in {a} out {b}\n");
    TempFile denv("det.env", "stream a <m> <> <m>\n");
    auto one = run([&](auto& o, auto& e) { return cmd_simulate(det.str(), denv.str(), opt, o, e); });
    CHECK(one.code == exit_ok);
    CHECK(one.out.find("runs: 1\n") == 0);

    auto s = build_system(parse_architecture(slurp(det.path)));
    auto env = parse_environment(slurp(denv.path), s.in(), s.bounds().horizon());
    CHECK(one.out == render_runs(oracle::runs(s, env)));
}

TEST_CASE("check-refine", "[cli]")
{
    CommandOptions opt;
    auto same = run([&](auto& o, auto& e) { return cmd_check(data("original.arch"), data("original.arch"), opt, o, e); });
    CHECK(same.code == exit_ok);
    auto fin = run([&](auto& o, auto& e) { return cmd_check(data("original.arch"), data("final.arch"), opt, o, e); });
    CHECK(fin.code == exit_ok);
    CHECK(fin.out.find("refinement holds") == 0);

    CommandOptions h6;
    h6.bounds.horizon = 6;
    h6.json = true;
    auto broken = run([&](auto& o, auto& e) {
        return cmd_check(data("original.arch"), data("broken_final.arch"), h6, o, e);
    });
    CHECK(broken.code == exit_failure);
    auto j = nlohmann::json::parse(broken.out);
    CHECK(j["command"] == "check-refine");
    CHECK(j["result"]["holds"] == false);
    CHECK(j["result"]["counterexample"]["tuples"].size() == 2);
}

TEST_CASE("apply-script", "[cli]")
{
    TempFile produced("final.arch");
    CommandOptions opt;
    opt.output = produced.str();
    auto r = run([&](auto& o, auto& e) { return cmd_apply(data("original.arch"), data("script.txt"), opt, o, e); });
    CHECK(r.code == exit_ok);
    CHECK(slurp(produced.path) == slurp(data_dir / "final.arch"));
    CHECK(r.out.find("[13/13] stage 8") != std::string::npos);

    auto script = slurp(data_dir / "script.txt");
    auto at = script.find("step 5 ");
    script.erase(at, script.find('\n', at) - at + 1);
    TempFile no5("no5.txt", script);
    CommandOptions plain;
    auto f = run([&](auto& o, auto& e) { return cmd_apply(data("original.arch"), no5.str(), plain, o, e); });
    CHECK(f.code == exit_failure);
    CHECK(f.out.find("failed at step 9 (stage 6)") != std::string::npos);

    TempFile empty("empty.txt", "");
    TempFile same("same.arch");
    CommandOptions eo;
    eo.output = same.str();
    auto e = run([&](auto& o, auto& er) { return cmd_apply(data("original.arch"), empty.str(), eo, o, er); });
    CHECK(e.code == exit_ok);
    CHECK(slurp(same.path) == slurp(data_dir / "original.arch"));

    TempFile unknown("unknown.txt", "step 1 remove-component NOPE\n");
    auto u = run([&](auto& o, auto& er) { return cmd_apply(data("original.arch"), unknown.str(), plain, o, er); });
    CHECK(u.code == exit_usage);
}

TEST_CASE("json output is deterministic", "[cli]")
{
    CommandOptions opt;
    opt.json = true;
    auto a = run([&](auto& o, auto& e) { return cmd_validate(data("final.arch"), opt, o, e); });
    auto b = run([&](auto& o, auto& e) { return cmd_validate(data("final.arch"), opt, o, e); });
    CHECK(a.out == b.out);
    auto j = nlohmann::json::parse(a.out);
    CHECK(j["ok"] == true);
    CHECK(j["report"]["verdicts"].is_array());

    TempFile twice("twice.arch", with_extra_writer("I"));
    auto f = run([&](auto& o, auto& e) { return cmd_validate(twice.str(), opt, o, e); });
    auto jf = nlohmann::json::parse(f.out);
    CHECK(jf["ok"] == false);
    CHECK(jf["report"]["verdicts"][0]["id"] == "condition-2");
    CHECK(jf["report"]["verdicts"][0]["holds"] == false);
}
