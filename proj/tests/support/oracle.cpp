#include "oracle.hpp"

#include <cmath>
#include <functional>

namespace oracle {

std::vector<Interval> intervals(const std::vector<Message>& alphabet, std::size_t burst)
{
    std::vector<Interval> out{Interval{}};
    std::vector<Interval> frontier{Interval{}};
    for (std::size_t len = 1; len <= burst; ++len) {
        std::vector<Interval> next;
        for (const auto& iv : frontier)
            for (const auto& m : alphabet) {
                auto longer = iv;
                longer.push_back(m);
                next.push_back(longer);
            }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

std::vector<NamedStreamTuple> tuples(const ChannelSet& channels, std::size_t horizon, const EnumerationBounds& bounds)
{
    std::vector<std::vector<Interval>> options;
    for (const auto& c : channels)
        options.push_back(intervals(bounds.alphabet(c), bounds.burst()));
    std::size_t cells = channels.size() * horizon;
    std::vector<std::size_t> digit(cells, 0);
    std::vector<NamedStreamTuple> out;
    while (true) {
        std::map<ChannelId, TimedStream> bind;
        for (std::size_t k = 0; k < channels.size(); ++k) {
            std::vector<Interval> ivs;
            for (std::size_t t = 0; t < horizon; ++t)
                ivs.push_back(options[k][digit[k * horizon + t]]);
            bind.emplace(channels[k], TimedStream(std::move(ivs)));
        }
        out.emplace_back(horizon, std::move(bind));
        std::size_t i = 0;
        for (; i < cells; ++i) {
            if (++digit[i] < options[i / horizon].size())
                break;
            digit[i] = 0;
        }
        if (i == cells)
            return out;
    }
}

double tuple_count(const ChannelSet& channels, std::size_t horizon, const EnumerationBounds& bounds)
{
    double n = 1;
    for (const auto& c : channels)
        n *= std::pow(static_cast<double>(intervals(bounds.alphabet(c), bounds.burst()).size()),
                      static_cast<double>(horizon));
    return n;
}

namespace {

Slice slice_at(const NamedStreamTuple& t, const ChannelSet& channels, std::size_t step)
{
    Slice s;
    for (const auto& c : channels)
        s.push_back(intern(t.at(c)[step]));
    return s;
}

} // namespace

bool can_produce(const IntervalTransducer& m, const NamedStreamTuple& x, const NamedStreamTuple& o)
{
    std::set<StateId> current{m.initial()};
    for (std::size_t step = 0; step < o.horizon(); ++step) {
        auto out = slice_at(o, m.outputs(), step);
        auto in = slice_at(x, m.inputs(), step);
        std::set<StateId> next;
        bool emitted = false;
        for (auto s : current) {
            const auto& choices = m.emit(s);
            for (std::size_t k = 0; k < choices.size(); ++k) {
                if (choices[k] != out)
                    continue;
                emitted = true;
                if (step + 1 < o.horizon())
                    for (auto t : m.advance(s, k, in))
                        next.insert(t);
            }
        }
        if (!emitted)
            return false;
        if (step + 1 < o.horizon() && next.empty())
            return false;
        current = std::move(next);
    }
    return true;
}

std::vector<NamedStreamTuple> witnesses(const System& s)
{
    auto channels = unite(s.in(), s.out_c());
    std::vector<NamedStreamTuple> out;
    for (auto& l : tuples(channels, s.bounds().horizon(), s.bounds())) {
        bool ok = true;
        for (const auto& c : s.components()) {
            if (!can_produce(c.behav, restrict(l, c.in), restrict(l, c.out))) {
                ok = false;
                break;
            }
        }
        if (ok)
            out.push_back(std::move(l));
    }
    return out;
}

std::vector<NamedStreamTuple> runs(const System& s, const NamedStreamTuple& env)
{
    std::vector<NamedStreamTuple> out;
    for (auto& l : witnesses(s))
        if (restrict(l, s.in()) == env)
            out.push_back(std::move(l));
    std::sort(out.begin(), out.end());
    return out;
}

Relation black_box(const System& s)
{
    Relation r;
    for (auto& x : tuples(s.in(), s.bounds().horizon(), s.bounds()))
        r[x];
    for (const auto& l : witnesses(s))
        r[restrict(l, s.in())].insert(restrict(l, s.out()));
    return r;
}

Relation relation(const IntervalTransducer& m, const EnumerationBounds& bounds)
{
    Relation r;
    auto outs = tuples(m.outputs(), bounds.horizon(), bounds);
    for (auto& x : tuples(m.inputs(), bounds.horizon(), bounds)) {
        auto& set = r[x];
        for (const auto& o : outs)
            if (can_produce(m, x, o))
                set.insert(o);
    }
    return r;
}

Relation from_bounded(const std::map<NamedStreamTuple, std::set<NamedStreamTuple>>& b)
{
    return Relation(b.begin(), b.end());
}

} // namespace oracle
