#include "flowrefine/streams.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <set>
#include <sstream>

namespace flowrefine {

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& ds)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i)
            out << '\n';
        out << ds[i].line << ':' << ds[i].column << ": " << ds[i].message;
    }
    return out.str();
}

} // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : Error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics))
{
}

bool is_valid_token(std::string_view token) noexcept
{
    if (token.empty())
        return false;
    return std::all_of(token.begin(), token.end(), [](char ch) {
        auto c = static_cast<unsigned char>(ch);
        return std::isalnum(c) || ch == '_' || ch == '\'' || ch == '.' || ch == ':' || ch == '-' ||
               ch == '+' || ch == '/';
    });
}

ChannelId::ChannelId(std::string name) : name_(std::move(name))
{
    if (!is_valid_token(name_))
        throw DomainError("invalid channel identifier '" + name_ + "'");
}

// ---------------------------------------------------------------------------
// ChannelSet

ChannelSet::ChannelSet(std::initializer_list<ChannelId> ids) : ChannelSet(std::vector<ChannelId>(ids)) {}

ChannelSet::ChannelSet(std::vector<ChannelId> ids) : ids_(std::move(ids))
{
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool ChannelSet::contains(const ChannelId& c) const noexcept
{
    return std::binary_search(ids_.begin(), ids_.end(), c);
}

std::size_t ChannelSet::index_of(const ChannelId& c) const
{
    auto it = std::lower_bound(ids_.begin(), ids_.end(), c);
    if (it == ids_.end() || *it != c)
        throw LookupError("channel '" + c.str() + "' not in " + to_string(*this));
    return static_cast<std::size_t>(it - ids_.begin());
}

bool ChannelSet::is_subset_of(const ChannelSet& other) const
{
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

bool ChannelSet::intersects(const ChannelSet& other) const
{
    return !intersect(*this, other).empty();
}

ChannelSet unite(const ChannelSet& a, const ChannelSet& b)
{
    std::vector<ChannelId> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return ChannelSet(std::move(out));
}

ChannelSet intersect(const ChannelSet& a, const ChannelSet& b)
{
    std::vector<ChannelId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return ChannelSet(std::move(out));
}

ChannelSet minus(const ChannelSet& a, const ChannelSet& b)
{
    std::vector<ChannelId> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return ChannelSet(std::move(out));
}

ChannelSet with(const ChannelSet& a, const ChannelId& c)
{
    return unite(a, ChannelSet{c});
}

ChannelSet without(const ChannelSet& a, const ChannelId& c)
{
    return minus(a, ChannelSet{c});
}

std::string to_string(const ChannelSet& set)
{
    std::string out = "{";
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (i)
            out += ", ";
        out += set[i].str();
    }
    return out + "}";
}

// ---------------------------------------------------------------------------
// Streams

TimedStream TimedStream::silent(std::size_t horizon)
{
    return TimedStream(std::vector<Interval>(horizon));
}

TimedStream prefix(const TimedStream& x, std::size_t i)
{
    if (i > x.horizon())
        throw RangeError("prefix length " + std::to_string(i) + " exceeds horizon " +
                         std::to_string(x.horizon()));
    return TimedStream(std::vector<Interval>(x.intervals().begin(),
                                             x.intervals().begin() + static_cast<std::ptrdiff_t>(i)));
}

std::vector<Message> flatten(const TimedStream& x)
{
    std::vector<Message> out;
    for (const auto& iv : x.intervals())
        out.insert(out.end(), iv.begin(), iv.end());
    return out;
}

std::pair<Message, std::vector<Message>> head_rest(std::span<const Message> s)
{
    if (s.empty())
        throw EmptyError("head_rest of an empty sequence");
    return {s.front(), std::vector<Message>(s.begin() + 1, s.end())};
}

NamedStreamTuple::NamedStreamTuple(std::size_t horizon, std::map<ChannelId, TimedStream> bindings)
    : horizon_(horizon), bindings_(std::move(bindings))
{
    for (const auto& [c, x] : bindings_)
        if (x.horizon() != horizon_)
            throw BoundsError("stream on '" + c.str() + "' has horizon " + std::to_string(x.horizon()) +
                              ", expected " + std::to_string(horizon_));
}

ChannelSet NamedStreamTuple::domain() const
{
    std::vector<ChannelId> ids;
    for (const auto& [c, x] : bindings_)
        ids.push_back(c);
    return ChannelSet(std::move(ids));
}

const TimedStream& NamedStreamTuple::at(const ChannelId& c) const
{
    auto it = bindings_.find(c);
    if (it == bindings_.end())
        throw LookupError("channel '" + c.str() + "' not bound in tuple");
    return it->second;
}

NamedStreamTuple restrict(const NamedStreamTuple& t, const ChannelSet& channels)
{
    std::map<ChannelId, TimedStream> out;
    for (const auto& c : channels) {
        auto it = t.bindings().find(c);
        if (it == t.bindings().end())
            throw DomainError("restriction to " + to_string(channels) + " outside domain " +
                              to_string(t.domain()));
        out.emplace(c, it->second);
    }
    return NamedStreamTuple(t.horizon(), std::move(out));
}

NamedStreamTuple merge(const NamedStreamTuple& a, const NamedStreamTuple& b)
{
    if (a.horizon() != b.horizon())
        throw MergeError("cannot merge tuples of horizons " + std::to_string(a.horizon()) + " and " +
                         std::to_string(b.horizon()));
    auto out = a.bindings();
    for (const auto& [c, x] : b.bindings())
        if (!out.emplace(c, x).second)
            throw MergeError("channel '" + c.str() + "' bound in both tuples");
    return NamedStreamTuple(a.horizon(), std::move(out));
}

NamedStreamTuple prefix(const NamedStreamTuple& t, std::size_t i)
{
    if (i > t.horizon())
        throw RangeError("prefix length " + std::to_string(i) + " exceeds horizon " +
                         std::to_string(t.horizon()));
    std::map<ChannelId, TimedStream> out;
    for (const auto& [c, x] : t.bindings())
        out.emplace(c, prefix(x, i));
    return NamedStreamTuple(i, std::move(out));
}

std::string to_string(const Interval& interval)
{
    std::string out = "<";
    for (std::size_t i = 0; i < interval.size(); ++i) {
        if (i)
            out += ' ';
        out += interval[i];
    }
    return out + ">";
}

std::string to_string(const TimedStream& x)
{
    std::string out;
    for (std::size_t i = 0; i < x.horizon(); ++i) {
        if (i)
            out += ' ';
        out += to_string(x[i]);
    }
    return out;
}

std::string to_string(const NamedStreamTuple& t)
{
    std::string out;
    for (const auto& [c, x] : t.bindings()) {
        if (!out.empty())
            out += "; ";
        out += c.str() + " = " + to_string(x);
    }
    return "{" + out + "}";
}

// ---------------------------------------------------------------------------
// EnumerationBounds

EnumerationBounds::EnumerationBounds(std::size_t horizon, std::size_t burst,
                                     std::map<ChannelId, std::vector<Message>> alphabets)
    : horizon_(horizon), burst_(burst), alphabets_(std::move(alphabets))
{
    if (burst_ < 1)
        throw BoundsError("burst bound must be at least 1");
    for (auto& [c, alphabet] : alphabets_) {
        if (alphabet.empty())
            throw BoundsError("alphabet of '" + c.str() + "' is empty");
        for (const auto& m : alphabet)
            if (!is_valid_token(m))
                throw BoundsError("invalid message token '" + m + "' on '" + c.str() + "'");
        std::sort(alphabet.begin(), alphabet.end());
        alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    }
}

const std::vector<Message>& EnumerationBounds::alphabet(const ChannelId& c) const
{
    auto it = alphabets_.find(c);
    if (it == alphabets_.end())
        throw BoundsError("no alphabet declared for channel '" + c.str() + "'");
    return it->second;
}

EnumerationBounds EnumerationBounds::with_horizon(std::size_t horizon) const
{
    return EnumerationBounds(horizon, burst_, alphabets_);
}

EnumerationBounds EnumerationBounds::with_burst(std::size_t burst) const
{
    return EnumerationBounds(horizon_, burst, alphabets_);
}

EnumerationBounds EnumerationBounds::with_alphabet(const ChannelId& c, std::vector<Message> alphabet) const
{
    auto alphabets = alphabets_;
    alphabets.insert_or_assign(c, std::move(alphabet));
    return EnumerationBounds(horizon_, burst_, std::move(alphabets));
}

std::vector<Interval> EnumerationBounds::intervals(const ChannelId& c) const
{
    const auto& alphabet = this->alphabet(c);
    std::vector<Interval> out{Interval{}};
    std::vector<Interval> layer{Interval{}};
    for (std::size_t len = 1; len <= burst_; ++len) {
        std::vector<Interval> next;
        for (const auto& iv : layer)
            for (const auto& m : alphabet) {
                auto longer = iv;
                longer.push_back(m);
                next.push_back(std::move(longer));
            }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void EnumerationBounds::check_interval(const ChannelId& c, const Interval& iv) const
{
    if (iv.size() > burst_)
        throw BoundsError("interval " + to_string(iv) + " on '" + c.str() + "' exceeds burst bound " +
                          std::to_string(burst_));
    const auto& alphabet = this->alphabet(c);
    for (const auto& m : iv)
        if (!std::binary_search(alphabet.begin(), alphabet.end(), m))
            throw BoundsError("message '" + m + "' outside the alphabet of '" + c.str() + "'");
}

void EnumerationBounds::check_stream(const ChannelId& c, const TimedStream& x) const
{
    for (const auto& iv : x.intervals())
        check_interval(c, iv);
}

void EnumerationBounds::check_tuple(const NamedStreamTuple& t, std::size_t horizon) const
{
    if (t.horizon() != horizon)
        throw BoundsError("tuple horizon " + std::to_string(t.horizon()) + " differs from " +
                          std::to_string(horizon));
    for (const auto& [c, x] : t.bindings())
        check_stream(c, x);
}

std::vector<NamedStreamTuple> EnumerationBounds::all_tuples(const ChannelSet& channels,
                                                            std::size_t horizon) const
{
    // Enumerate per-channel streams, then take the product.
    std::vector<std::vector<TimedStream>> streams;
    for (const auto& c : channels) {
        auto ivs = intervals(c);
        std::vector<std::vector<Interval>> partial{{}};
        for (std::size_t step = 0; step < horizon; ++step) {
            std::vector<std::vector<Interval>> next;
            next.reserve(partial.size() * ivs.size());
            for (const auto& p : partial)
                for (const auto& iv : ivs) {
                    auto q = p;
                    q.push_back(iv);
                    next.push_back(std::move(q));
                }
            partial = std::move(next);
        }
        std::vector<TimedStream> xs;
        xs.reserve(partial.size());
        for (auto& p : partial)
            xs.emplace_back(std::move(p));
        streams.push_back(std::move(xs));
    }
    std::vector<NamedStreamTuple> out;
    std::vector<std::size_t> digit(channels.size(), 0);
    while (true) {
        std::map<ChannelId, TimedStream> bindings;
        for (std::size_t k = 0; k < channels.size(); ++k)
            bindings.emplace(channels[k], streams[k][digit[k]]);
        out.emplace_back(horizon, std::move(bindings));
        std::size_t k = channels.size();
        while (true) {
            if (k == 0)
                return out;
            --k;
            if (++digit[k] < streams[k].size())
                break;
            digit[k] = 0;
        }
    }
}

} // namespace flowrefine
