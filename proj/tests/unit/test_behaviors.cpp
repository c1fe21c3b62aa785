#include <random>

#include "helpers.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace th;

namespace {

TableSpec two_choice_spec()
{
    TableSpec t;
    t.name = "Two";
    t.inputs = {"a"};
    t.outputs = {"b"};
    t.states = {"s"};
    t.initial = "s";
    t.emits = {{"s", {{"b", {"m"}}}}, {"s", {{"b", {}}}}};
    t.rules = {{"s", {}, {}, {"s"}}};
    return t;
}

std::set<NamedStreamTuple> prefixes(const OutputSet& s, std::size_t n)
{
    std::set<NamedStreamTuple> out;
    for (const auto& o : s)
        out.insert(prefix(o, n));
    return out;
}

} // namespace

TEST_CASE("behavior_of enumerates every run", "[behaviors]")
{
    auto b = mn_bounds(2, {"a", "b"});
    SECTION("constant empty machine gives one all-empty output")
    {
        auto m = silent({"a"}, {"b"});
        for (const auto& x : b.all_tuples({"a"}, 2))
            CHECK(behavior_of(m, x, b) == OutputSet{tup(2, {{"b", TimedStream::silent(2)}})});
    }
    SECTION("one-step delay copier")
    {
        auto m = delay_copy("a", "b");
        auto x = tup(2, {{"a", ts({{"m"}, {}})}});
        CHECK(behavior_of(m, x, b) == OutputSet{tup(2, {{"b", ts({{}, {"m"}})}})});
    }
    SECTION("two emit choices at horizon 1")
    {
        auto b1 = b.with_horizon(1);
        auto m = make_table(two_choice_spec());
        CHECK(behavior_of(m, tup(1, {{"a", ts({{}})}}), b1).size() == 2);
    }
    SECTION("inputs are checked against the bounds")
    {
        auto m = delay_copy("a", "b");
        CHECK_THROWS_AS(behavior_of(m, tup(2, {{"a", ts({{"m", "n"}, {}})}}), b), BoundsError);
        CHECK_THROWS_AS(behavior_of(m, tup(2, {{"a", ts({{"z"}, {}})}}), b), BoundsError);
        CHECK_THROWS(behavior_of(m, tup(1, {{"a", ts({{}})}}), b));
    }
}

TEST_CASE("behavior_of agrees with a direct state-set simulation", "[behaviors]")
{
    std::mt19937 rng(11);
    for (int i = 0; i < 40; ++i) {
        auto b = mn_bounds(1 + i % 3, {"a", "b", "c"});
        ChannelSet in = i % 2 ? ChannelSet{"a"} : ChannelSet{"a", "b"};
        auto m = gen::random_table(rng, in, {"c"}, b, 3);
        CHECK(oracle::from_bounded(bounded_behavior(m, b)) == oracle::relation(m, b));
    }
}

TEST_CASE("validate_transducer reports structural problems", "[behaviors]")
{
    auto b = mn_bounds(3, {"a", "b"});
    CHECK(validate_transducer(delay_copy("a", "b"), b).ok());

    auto empty = two_choice_spec();
    empty.states = {"s", "t"};
    empty.rules = {{"s", {}, {}, {"t"}}};
    auto r = validate_transducer(make_table(empty), b);
    CHECK(r.has_failure("empty-choice-set"));

    auto wide = two_choice_spec();
    wide.emits = {{"s", {{"b", {"m", "n"}}}}};
    auto w = validate_transducer(make_table(wide), b);
    CHECK(w.has_failure("burst-exceeded"));
    CHECK_FALSE(w.has_failure("empty-choice-set"));

    auto foreign = two_choice_spec();
    foreign.emits = {{"s", {{"b", {"z"}}}}};
    CHECK(validate_transducer(make_table(foreign), b).has_failure("alphabet"));
}

TEST_CASE("adapt adds ignored inputs and hides outputs", "[behaviors]")
{
    auto b = mn_bounds(2, {"a", "p", "b", "c"});
    std::mt19937 rng(7);
    auto m = gen::random_table(rng, {"a"}, {"b", "c"}, b, 3);

    CHECK(bounded_behavior(adapt(m, {"a"}, {"b", "c"}), b) == bounded_behavior(m, b));

    auto wide = adapt(m, {"a", "p"}, {"b"});
    for (const auto& x : b.all_tuples({"a", "p"}, 2)) {
        OutputSet expected;
        for (const auto& o : behavior_of(m, restrict(x, {"a"}), b))
            expected.insert(restrict(o, {"b"}));
        CHECK(behavior_of(wide, x, b) == expected);
    }

    auto hidden = adapt(m, {"a"}, {});
    for (const auto& [x, outs] : bounded_behavior(hidden, b))
        CHECK(outs == OutputSet{NamedStreamTuple(2)});

    CHECK_THROWS_AS(adapt(m, {}, {"b"}), InterfaceError);
    CHECK_THROWS_AS(adapt(m, {"a"}, {"z"}), InterfaceError);
}

TEST_CASE("compose runs parts in lockstep with feedback", "[behaviors]")
{
    auto b = mn_bounds(3, {"In", "I", "Out"});
    auto copy = delay_copy("In", "Out");
    CHECK(bounded_behavior(compose({copy}), b) == bounded_behavior(copy, b));

    auto pipe = compose({delay_copy("In", "I"), delay_copy("I", "Out")});
    CHECK(pipe.inputs() == ChannelSet{"In"});
    CHECK(pipe.outputs() == ChannelSet{"I", "Out"});
    auto x = tup(3, {{"In", ts({{"m"}, {}, {}})}});
    auto outs = behavior_of(adapt(pipe, {"In"}, {"Out"}), x, b);
    CHECK(outs == OutputSet{tup(3, {{"Out", ts({{}, {}, {"m"}})}})});

    auto two = make_table(two_choice_spec());
    auto both = compose({two, delay_copy("b", "c")});
    CHECK(validate_transducer(both, mn_bounds(3, {"a", "b", "c"})).ok());

    CHECK_THROWS_AS(compose({delay_copy("a", "b"), delay_copy("c", "b")}), CompositionError);
}

TEST_CASE("compose matches the exists-l characterization", "[behaviors]")
{
    std::mt19937 rng(99);
    for (int i = 0; i < 30; ++i) {
        auto s = gen::random_system(rng);
        if (!validate_system(s).ok())
            continue;
        CHECK(oracle::from_bounded(bounded_behavior(black_box(s), s.bounds())) == oracle::black_box(s));
    }
}

TEST_CASE("refines_behavior is bounded inclusion", "[behaviors]")
{
    auto b = mn_bounds(2, {"a", "b"});
    auto copy = delay_copy("a", "b");
    CHECK(refines_behavior(copy, copy, b).holds);
    CHECK(refines_behavior(copy, chaos({"a"}, {"b"}, b), b).holds);

    auto b1 = b.with_horizon(1);
    auto r = refines_behavior(chaos({"a"}, {"b"}, b1), silent({"a"}, {"b"}), b1);
    REQUIRE_FALSE(r.holds);
    REQUIRE(r.counterexample);
    const auto& o = r.counterexample->at("output");
    CHECK_FALSE(behavior_of(silent({"a"}, {"b"}), r.counterexample->at("input"), b1).contains(o));
    CHECK_FALSE(o.at("b")[0].empty());

    CHECK_THROWS_AS(refines_behavior(copy, delay_copy("a", "c"), b), InterfaceError);
}

TEST_CASE("random machines refine chaos", "[behaviors]")
{
    std::mt19937 rng(5);
    auto b = mn_bounds(2, {"a", "b"});
    for (int i = 0; i < 20; ++i) {
        auto m = gen::random_table(rng, {"a"}, {"b"}, b, 3);
        CHECK(refines_behavior(m, chaos({"a"}, {"b"}, b), b).holds);
    }
}

TEST_CASE("chaos emits every in-bounds slice", "[behaviors]")
{
    EnumerationBounds b(1, 1, {{"a", {"m"}}, {"b", {"m"}}});
    auto none = bounded_behavior(chaos({}, {}, b), b);
    REQUIRE(none.size() == 1);
    CHECK(none.begin()->second == OutputSet{NamedStreamTuple(1)});
    for (const auto& [x, outs] : bounded_behavior(chaos({"a"}, {"b"}, b), b))
        CHECK(outs.size() == 2);
}

TEST_CASE("output prefixes depend only on earlier input", "[behaviors]")
{
    std::mt19937 rng(21);
    auto b = mn_bounds(3, {"a", "b"});
    for (int k = 0; k < 10; ++k) {
        auto m = gen::random_table(rng, {"a"}, {"b"}, b, 3);
        auto beh = bounded_behavior(m, b);
        for (const auto& [x, ox] : beh) {
            CHECK_FALSE(ox.empty());
            for (const auto& [y, oy] : beh)
                for (std::size_t i = 0; i < 3; ++i)
                    if (prefix(x, i) == prefix(y, i))
                        CHECK(prefixes(ox, i + 1) == prefixes(oy, i + 1));
        }
    }
}
