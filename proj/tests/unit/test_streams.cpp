#include "helpers.hpp"

using namespace th;

TEST_CASE("prefix truncates to the first intervals", "[streams]")
{
    auto x = ts({{"m"}, {}, {"n"}});
    CHECK(prefix(x, 2) == ts({{"m"}, {}}));
    CHECK(prefix(x, 0).horizon() == 0);
    CHECK(prefix(x, 3) == x);
    CHECK_THROWS_AS(prefix(x, 4), RangeError);
    for (std::size_t i = 0; i <= 3; ++i)
        for (std::size_t j = 0; j <= 3; ++j)
            CHECK(prefix(prefix(x, i), std::min(i, j)) == prefix(x, std::min(i, j)));
}

TEST_CASE("restrict keeps the requested channels", "[streams]")
{
    auto t = tup(2, {{"a", ts({{"m"}, {}})}, {"b", ts({{}, {"n"}})}});
    CHECK(restrict(t, t.domain()) == t);
    auto none = restrict(t, {});
    CHECK(none.domain().empty());
    CHECK(none.horizon() == 2);
    CHECK(restrict(t, {"a"}) == tup(2, {{"a", ts({{"m"}, {}})}}));
    CHECK(restrict(restrict(t, {"a", "b"}), {"b"}) == restrict(t, {"b"}));
    CHECK_THROWS_AS(restrict(t, {"c"}), DomainError);
}

TEST_CASE("flatten ignores interval boundaries", "[streams]")
{
    auto x = ts({{"m1"}, {}, {"m2", "m3"}});
    CHECK(flatten(x) == std::vector<Message>{"m1", "m2", "m3"});
    CHECK(flatten(TimedStream::silent(4)).empty());
    for (std::size_t i = 0; i <= 3; ++i) {
        auto f = flatten(prefix(x, i));
        auto full = flatten(x);
        CHECK(std::equal(f.begin(), f.end(), full.begin()));
    }
}

TEST_CASE("head_rest splits a sequence", "[streams]")
{
    std::vector<Message> two{"m1", "m2"};
    CHECK(head_rest(two) == std::pair<Message, std::vector<Message>>{"m1", {"m2"}});
    std::vector<Message> one{"m"};
    CHECK(head_rest(one) == std::pair<Message, std::vector<Message>>{"m", {}});
    CHECK_THROWS_AS(head_rest(std::vector<Message>{}), EmptyError);
}

TEST_CASE("merge unites disjoint tuples", "[streams]")
{
    auto a = tup(1, {{"a", ts({{"m"}})}});
    auto b = tup(1, {{"b", ts({{"n"}})}});
    auto ab = merge(a, b);
    CHECK(ab.domain() == ChannelSet{"a", "b"});
    CHECK(restrict(ab, a.domain()) == a);
    CHECK(merge(a, NamedStreamTuple(1)) == a);
    CHECK_THROWS_AS(merge(a, tup(1, {{"a", ts({{}})}})), MergeError);
    CHECK_THROWS_AS(merge(a, tup(2, {{"b", ts({{}, {}})}})), MergeError);
}

TEST_CASE("tuples reject mixed horizons", "[streams]")
{
    CHECK_THROWS_AS(tup(2, {{"a", ts({{}})}}), BoundsError);
}

TEST_CASE("enumeration bounds check bursts and alphabets", "[streams]")
{
    auto b = mn_bounds(2, {"a"});
    CHECK(b.intervals("a").size() == 3);
    CHECK_NOTHROW(b.check_interval("a", {"m"}));
    CHECK_THROWS_AS(b.check_interval("a", {"m", "n"}), BoundsError);
    CHECK_THROWS_AS(b.check_interval("a", {"z"}), BoundsError);
    CHECK_THROWS_AS(b.check_interval("b", {}), BoundsError);
    CHECK(b.all_tuples({"a"}, 2).size() == 9);
    CHECK(b.with_burst(2).intervals("a").size() == 7);
}

TEST_CASE("channel identifiers are validated", "[streams]")
{
    CHECK_THROWS_AS(ChannelId("a b"), DomainError);
    CHECK_THROWS_AS(ChannelId(""), DomainError);
    CHECK(ChannelSet{"b", "a", "b"}.size() == 2);
    CHECK(to_string(ChannelSet{"b", "a"}) == "{a, b}");
}
