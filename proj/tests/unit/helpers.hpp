#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "flowrefine/case_study.hpp"
#include "flowrefine/commands.hpp"
#include "flowrefine/document.hpp"

namespace th {

using namespace flowrefine;

inline TimedStream ts(std::vector<Interval> ivs)
{
    return TimedStream(std::move(ivs));
}

inline NamedStreamTuple tup(std::size_t h, std::map<ChannelId, TimedStream> b)
{
    return NamedStreamTuple(h, std::move(b));
}

/// Alphabet {m, n} on every listed channel.
inline EnumerationBounds mn_bounds(std::size_t h, std::initializer_list<const char*> channels, std::size_t burst = 1)
{
    std::map<ChannelId, std::vector<Message>> a;
    for (auto c : channels)
        a[ChannelId(c)] = {"m", "n"};
    return EnumerationBounds(h, burst, a);
}

/// One-state machine that always emits `iv` on every output.
inline IntervalTransducer constant(const ChannelSet& in, const ChannelSet& out, Interval iv, const std::string& name)
{
    TableSpec t;
    t.name = name;
    t.inputs = in;
    t.outputs = out;
    t.states = {"s"};
    t.initial = "s";
    std::map<ChannelId, Interval> slice;
    for (const auto& c : out)
        slice[c] = iv;
    t.emits.emplace_back("s", slice);
    t.rules.push_back({"s", {}, {}, {"s"}});
    return make_table(t);
}

} // namespace th
