#include "flowrefine/invariant.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace flowrefine {

namespace {

class TrueInvariant final : public Invariant {
public:
    ChannelSet reads() const override { return {}; }
    std::string initial() const override { return ""; }
    std::optional<std::string> step(const std::string& s, const Slice&) const override { return s; }
    std::string describe() const override { return "true"; }
};

class SilentInvariant final : public Invariant {
public:
    explicit SilentInvariant(ChannelId c) : c_(std::move(c)) {}
    ChannelSet reads() const override { return {c_}; }
    std::string initial() const override { return ""; }
    std::optional<std::string> step(const std::string& s, const Slice& letter) const override
    {
        if (letter.at(0) != empty_interval())
            return std::nullopt;
        return s;
    }
    std::string describe() const override { return "silent(" + c_.str() + ")"; }

private:
    ChannelId c_;
};

/// Monitor states interned to dense ids.
class StateTable {
public:
    std::uint32_t id(const std::string& s)
    {
        auto [it, fresh] = ids_.try_emplace(s, static_cast<std::uint32_t>(names_.size()));
        if (fresh)
            names_.push_back(s);
        return it->second;
    }
    const std::string& name(std::uint32_t id) const { return names_.at(id); }

private:
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<std::string> names_;
};

/// Where each channel of a monitor's read set comes from: slot `source`
/// (0 or 1) at position `index`.
struct Wiring {
    std::vector<std::pair<int, std::size_t>> from;

    Wiring(const ChannelSet& reads, const ChannelSet& first, const ChannelSet& second)
    {
        for (const auto& c : reads) {
            if (first.contains(c))
                from.emplace_back(0, first.index_of(c));
            else
                from.emplace_back(1, second.index_of(c));
        }
    }

    Slice assemble(const Slice& a, const Slice& b) const
    {
        Slice out;
        out.reserve(from.size());
        for (const auto& [src, idx] : from)
            out.push_back(src == 0 ? a[idx] : b[idx]);
        return out;
    }
};

struct Triple {
    std::uint32_t depth;
    StateId state;
    std::uint32_t monitor;
    friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept
    {
        return (std::size_t{t.depth} << 56) ^ (std::size_t{t.state} * 0x9E3779B97F4A7C15ULL) ^ t.monitor;
    }
};

class ValiditySearch {
public:
    ValiditySearch(const System& s, const Invariant& psi)
        : psi_(psi), machine_(run_machine(s)), horizon_(s.bounds().horizon()),
          env_(all_slices(s.in(), s.bounds())), wiring_(psi.reads(), s.in(), s.out_c())
    {
    }

    InvariantCheck run()
    {
        InvariantCheck r;
        auto m0 = monitors_.id(psi_.initial());
        r.holds = dfs(0, machine_.initial(), m0);
        r.counterexample = std::move(cx_);
        return r;
    }

private:
    bool dfs(std::size_t depth, StateId st, std::uint32_t mon)
    {
        if (depth == horizon_) {
            if (psi_.accepts(monitors_.name(mon)))
                return true;
            fail(depth, {}, "the run does not satisfy the invariant at the horizon");
            return false;
        }
        Triple key{static_cast<std::uint32_t>(depth), st, mon};
        if (ok_.contains(key))
            return true;
        const auto& choices = machine_.emit(st);
        for (const auto& x : env_) {
            for (std::size_t k = 0; k < choices.size(); ++k) {
                const auto& o = choices[k];
                auto next = psi_.step(monitors_.name(mon), wiring_.assemble(x, o));
                xs_.push_back(x);
                os_.push_back(o);
                if (!next) {
                    auto succ = machine_.advance(st, k, x);
                    fail(depth + 1, succ, "the run violates the invariant at step " + std::to_string(depth));
                    return false;
                }
                auto nid = monitors_.id(*next);
                if (depth + 1 == horizon_) {
                    if (!dfs(depth + 1, st, nid))
                        return false;
                } else {
                    for (auto t : machine_.advance(st, k, x))
                        if (!dfs(depth + 1, t, nid))
                            return false;
                }
                xs_.pop_back();
                os_.pop_back();
            }
        }
        ok_.insert(key);
        return true;
    }

    void fail(std::size_t depth, std::vector<StateId> states, std::string why)
    {
        for (std::size_t d = depth; d < horizon_; ++d) {
            const auto& x = env_.front();
            Slice o(machine_.outputs().size(), empty_interval());
            if (!states.empty()) {
                auto st = states.front();
                o = machine_.emit(st).front();
                states = machine_.advance(st, 0, x);
            }
            xs_.push_back(x);
            os_.push_back(o);
        }
        Counterexample c;
        c.description = std::move(why);
        c.tuples.emplace_back("run", merge(to_tuple(xs_, machine_.inputs()), to_tuple(os_, machine_.outputs())));
        cx_ = std::move(c);
    }

    const Invariant& psi_;
    IntervalTransducer machine_;
    std::size_t horizon_;
    std::vector<Slice> env_;
    Wiring wiring_;
    StateTable monitors_;
    std::unordered_set<Triple, TripleHash> ok_;
    std::vector<Slice> xs_;
    std::vector<Slice> os_;
    std::optional<Counterexample> cx_;
};

using MonitorSet = std::vector<std::uint32_t>;

struct SetNode {
    std::uint32_t depth;
    MonitorSet set;
    friend bool operator==(const SetNode&, const SetNode&) = default;
};

struct SetNodeHash {
    std::size_t operator()(const SetNode& n) const noexcept { return StateSetHash{}(n.set) ^ (std::size_t{n.depth} << 48); }
};

class EnvironmentSearch {
public:
    EnvironmentSearch(const System& s, const Invariant& psi)
        : psi_(psi), in_(s.in()), observed_(intersect(psi.reads(), s.in())),
          hidden_(minus(psi.reads(), s.in())), horizon_(s.bounds().horizon()),
          env_(all_slices(observed_, s.bounds())), others_(all_slices(hidden_, s.bounds())),
          wiring_(psi.reads(), observed_, hidden_)
    {
    }

    InvariantCheck run()
    {
        InvariantCheck r;
        r.holds = dfs(0, MonitorSet{monitors_.id(psi_.initial())});
        r.counterexample = std::move(cx_);
        return r;
    }

private:
    bool dfs(std::size_t depth, const MonitorSet& set)
    {
        if (depth == horizon_) {
            for (auto m : set)
                if (psi_.accepts(monitors_.name(m)))
                    return true;
            fail();
            return false;
        }
        SetNode key{static_cast<std::uint32_t>(depth), set};
        if (ok_.contains(key))
            return true;
        for (const auto& e : env_) {
            MonitorSet next;
            for (auto m : set)
                for (const auto& q : others_)
                    if (auto n = psi_.step(monitors_.name(m), wiring_.assemble(e, q)))
                        next.push_back(monitors_.id(*n));
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            xs_.push_back(e);
            if (next.empty()) {
                fail();
                return false;
            }
            if (!dfs(depth + 1, next))
                return false;
            xs_.pop_back();
        }
        ok_.insert(std::move(key));
        return true;
    }

    void fail()
    {
        while (xs_.size() < horizon_)
            xs_.push_back(env_.front());
        auto observed = to_tuple(xs_, observed_);
        std::map<ChannelId, TimedStream> bindings = observed.bindings();
        for (const auto& c : in_)
            if (!observed_.contains(c))
                bindings.emplace(c, TimedStream::silent(horizon_));
        Counterexample c;
        c.description = "no tuple extending this environment input satisfies the invariant";
        c.tuples.emplace_back("input", NamedStreamTuple(horizon_, std::move(bindings)));
        cx_ = std::move(c);
    }

    const Invariant& psi_;
    ChannelSet in_;
    ChannelSet observed_;
    ChannelSet hidden_;
    std::size_t horizon_;
    std::vector<Slice> env_;
    std::vector<Slice> others_;
    Wiring wiring_;
    StateTable monitors_;
    std::unordered_set<SetNode, SetNodeHash> ok_;
    std::vector<Slice> xs_;
    std::optional<Counterexample> cx_;
};

class InvariantGuard final : public StepGuard {
public:
    InvariantGuard(InvariantPtr psi, const ChannelSet& inputs, const EnumerationBounds& bounds)
        : psi_(std::move(psi)), horizon_(bounds.horizon()),
          hidden_(minus(psi_->reads(), inputs)), others_(all_slices(hidden_, bounds)),
          all_(all_slices(psi_->reads(), bounds)), wiring_(psi_->reads(), inputs, hidden_)
    {
    }

    std::uint32_t initial() const override
    {
        auto m = monitors_.id(psi_->initial());
        MonitorSet set;
        if (viable(0, m))
            set.push_back(m);
        return set_id(set);
    }

    std::optional<std::uint32_t> step(std::uint32_t g, std::size_t depth, const Slice& input) const override
    {
        auto cache_key = std::make_tuple(g, static_cast<std::uint32_t>(depth), input);
        if (auto it = steps_.find(cache_key); it != steps_.end())
            return it->second;
        MonitorSet next;
        for (auto m : sets_.at(g))
            for (const auto& q : others_)
                if (auto n = psi_->step(monitors_.name(m), wiring_.assemble(input, q))) {
                    auto nid = monitors_.id(*n);
                    if (viable(depth + 1, nid))
                        next.push_back(nid);
                }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        std::optional<std::uint32_t> r;
        if (!next.empty())
            r = set_id(next);
        steps_.emplace(cache_key, r);
        return r;
    }

private:
    bool viable(std::size_t depth, std::uint32_t m) const
    {
        if (depth >= horizon_)
            return psi_->accepts(monitors_.name(m));
        auto key = std::make_pair(static_cast<std::uint32_t>(depth), m);
        if (auto it = viable_.find(key); it != viable_.end())
            return it->second;
        bool ok = false;
        for (const auto& letter : all_) {
            if (auto n = psi_->step(monitors_.name(m), letter); n && viable(depth + 1, monitors_.id(*n))) {
                ok = true;
                break;
            }
        }
        viable_.emplace(key, ok);
        return ok;
    }

    std::uint32_t set_id(const MonitorSet& set) const
    {
        auto [it, fresh] = set_ids_.try_emplace(set, static_cast<std::uint32_t>(sets_.size()));
        if (fresh)
            sets_.push_back(set);
        return it->second;
    }

    InvariantPtr psi_;
    std::size_t horizon_;
    ChannelSet hidden_;
    std::vector<Slice> others_;
    std::vector<Slice> all_;
    Wiring wiring_;
    mutable StateTable monitors_;
    mutable std::map<MonitorSet, std::uint32_t> set_ids_;
    mutable std::vector<MonitorSet> sets_;
    mutable std::map<std::pair<std::uint32_t, std::uint32_t>, bool> viable_;
    mutable std::map<std::tuple<std::uint32_t, std::uint32_t, Slice>, std::optional<std::uint32_t>> steps_;
};

void require_domain(const System& s, const Invariant& psi)
{
    if (!psi.reads().is_subset_of(s.run_channels()))
        throw DomainError("invariant " + psi.describe() + " reads " + to_string(psi.reads()) + " outside " +
                          to_string(s.run_channels()));
}

} // namespace

InvariantPtr true_invariant()
{
    static const InvariantPtr t = std::make_shared<TrueInvariant>();
    return t;
}

InvariantPtr silent_invariant(const ChannelId& c)
{
    return std::make_shared<SilentInvariant>(c);
}

bool holds(const Invariant& psi, const NamedStreamTuple& l)
{
    auto steps = to_slices(l, psi.reads());
    auto state = psi.initial();
    for (const auto& letter : steps) {
        auto next = psi.step(state, letter);
        if (!next)
            return false;
        state = std::move(*next);
    }
    return psi.accepts(state);
}

InvariantCheck check_invariant_valid(const System& s, const Invariant& psi)
{
    require_domain(s, psi);
    return ValiditySearch(s, psi).run();
}

InvariantCheck check_environment_unrestricted(const System& s, const Invariant& psi)
{
    require_domain(s, psi);
    return EnvironmentSearch(s, psi).run();
}

std::unique_ptr<StepGuard> invariant_guard(InvariantPtr psi, const ChannelSet& inputs, const EnumerationBounds& bounds)
{
    return std::make_unique<InvariantGuard>(std::move(psi), inputs, bounds);
}

} // namespace flowrefine
