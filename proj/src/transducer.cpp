#include "flowrefine/transducer.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "flowrefine/interned_machine.hpp"

namespace flowrefine {

// ---------------------------------------------------------------------------
// Interval interning

namespace {

struct IntervalHash {
    std::size_t operator()(const Interval& iv) const noexcept
    {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (const auto& m : iv)
            h = (h ^ std::hash<std::string>{}(m)) * 0x100000001b3ULL;
        return h ^ iv.size();
    }
};

struct IntervalTable {
    std::mutex mu;
    std::unordered_map<Interval, IntervalId, IntervalHash> ids;
    std::deque<Interval> values;

    IntervalTable()
    {
        values.emplace_back();
        ids.emplace(Interval{}, 0);
    }
};

IntervalTable& interval_table()
{
    static IntervalTable table;
    return table;
}

std::string join(const std::vector<std::string>& parts, const char* sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

const std::vector<StateId>& no_successors()
{
    static const std::vector<StateId> none;
    return none;
}

const std::vector<StateId>& state_zero()
{
    static const std::vector<StateId> zero{0};
    return zero;
}

} // namespace

IntervalId intern(const Interval& interval)
{
    auto& t = interval_table();
    std::lock_guard lock(t.mu);
    auto [it, fresh] = t.ids.try_emplace(interval, static_cast<IntervalId>(t.values.size()));
    if (fresh)
        t.values.push_back(interval);
    return it->second;
}

const Interval& interval_of(IntervalId id)
{
    auto& t = interval_table();
    std::lock_guard lock(t.mu);
    return t.values.at(id);
}

bool interval_less(IntervalId a, IntervalId b)
{
    if (a == b)
        return false;
    return interval_of(a) < interval_of(b);
}

bool slice_less(const Slice& a, const Slice& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), interval_less);
}

std::size_t SliceHash::operator()(const Slice& s) const noexcept
{
    std::size_t h = 0x84222325cbf29ce4ULL ^ s.size();
    for (auto id : s)
        h = (h ^ id) * 0x100000001b3ULL;
    return h;
}

std::size_t StateSetHash::operator()(const std::vector<StateId>& s) const noexcept
{
    std::size_t h = 0x9E3779B97F4A7C15ULL ^ s.size();
    for (auto id : s)
        h = (h ^ id) * 0x100000001b3ULL;
    return h;
}

std::string to_string(const Slice& slice, const ChannelSet& channels)
{
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < slice.size() && i < channels.size(); ++i)
        parts.push_back(channels[i].str() + "=" + to_string(interval_of(slice[i])));
    return "[" + join(parts, " ") + "]";
}

std::vector<Slice> all_slices(const ChannelSet& channels, const EnumerationBounds& bounds)
{
    std::vector<Slice> out{Slice{}};
    for (const auto& c : channels) {
        std::vector<IntervalId> ids;
        for (const auto& iv : bounds.intervals(c))
            ids.push_back(intern(iv));
        std::vector<Slice> next;
        next.reserve(out.size() * ids.size());
        for (const auto& s : out)
            for (auto id : ids) {
                auto t = s;
                t.push_back(id);
                next.push_back(std::move(t));
            }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end(), slice_less);
    return out;
}

IntervalTransducer::IntervalTransducer(std::shared_ptr<const TransducerImpl> impl) : impl_(std::move(impl))
{
    if (!impl_)
        throw DomainError("null transducer");
}

std::size_t IntervalTransducer::find_choice(StateId s, const Slice& out) const
{
    const auto& choices = emit(s);
    auto it = std::lower_bound(choices.begin(), choices.end(), out, slice_less);
    if (it == choices.end() || *it != out)
        return npos;
    return static_cast<std::size_t>(it - choices.begin());
}

std::string describe_set(const ChannelSet& set)
{
    return to_string(set);
}

// ---------------------------------------------------------------------------
// Table machines

namespace {

class TableMachine final : public TransducerImpl {
public:
    explicit TableMachine(TableSpec spec)
        : TransducerImpl(spec.inputs, spec.outputs), spec_(std::move(spec))
    {
        std::unordered_map<std::string, StateId> ids;
        for (const auto& name : spec_.states) {
            if (!is_valid_token(name))
                throw DomainError("machine " + spec_.name + ": invalid state name '" + name + "'");
            if (!ids.emplace(name, static_cast<StateId>(ids.size())).second)
                throw DomainError("machine " + spec_.name + ": duplicate state '" + name + "'");
        }
        auto state = [&](const std::string& name) {
            auto it = ids.find(name);
            if (it == ids.end())
                throw DomainError("machine " + spec_.name + ": unknown state '" + name + "'");
            return it->second;
        };
        initial_ = state(spec_.initial);
        emits_.resize(spec_.states.size());
        rules_.resize(spec_.states.size());
        for (const auto& [from, assignment] : spec_.emits) {
            Slice slice;
            for (const auto& c : outputs()) {
                auto it = assignment.find(c);
                if (it == assignment.end())
                    throw DomainError("machine " + spec_.name + ": emit in state '" + from +
                                      "' does not assign output '" + c.str() + "'");
                slice.push_back(intern(it->second));
            }
            for (const auto& [c, iv] : assignment)
                if (!outputs().contains(c))
                    throw DomainError("machine " + spec_.name + ": '" + c.str() + "' is not an output");
            emits_[state(from)].push_back(std::move(slice));
        }
        for (auto& e : emits_) {
            std::sort(e.begin(), e.end(), slice_less);
            e.erase(std::unique(e.begin(), e.end()), e.end());
        }
        for (const auto& rule : spec_.rules) {
            Compiled compiled;
            compiled.emitted.assign(outputs().size(), std::nullopt);
            compiled.read.assign(inputs().size(), std::nullopt);
            for (const auto& [c, iv] : rule.emitted.fixed) {
                if (!outputs().contains(c))
                    throw DomainError("machine " + spec_.name + ": '" + c.str() + "' is not an output");
                compiled.emitted[outputs().index_of(c)] = intern(iv);
            }
            for (const auto& [c, iv] : rule.read.fixed) {
                if (!inputs().contains(c))
                    throw DomainError("machine " + spec_.name + ": '" + c.str() + "' is not an input");
                compiled.read[inputs().index_of(c)] = intern(iv);
            }
            for (const auto& t : rule.targets)
                compiled.targets.push_back(state(t));
            std::sort(compiled.targets.begin(), compiled.targets.end());
            compiled.targets.erase(std::unique(compiled.targets.begin(), compiled.targets.end()),
                                   compiled.targets.end());
            rules_[state(rule.from)].push_back(std::move(compiled));
        }
    }

    StateId initial() const override { return initial_; }
    const std::vector<Slice>& emit(StateId s) const override { return emits_.at(s); }

    const std::vector<StateId>& advance(StateId s, std::size_t choice, const Slice& input) const override
    {
        const auto& choices = emits_.at(s);
        if (choice >= choices.size())
            return no_successors();
        const auto& out = choices[choice];
        for (const auto& rule : rules_[s])
            if (matches(rule.emitted, out) && matches(rule.read, input))
                return rule.targets;
        return no_successors();
    }

    std::string describe() const override { return spec_.name; }
    std::string state_label(StateId s) const override { return spec_.states.at(s); }

    const TableSpec& spec() const noexcept { return spec_; }

private:
    struct Compiled {
        std::vector<std::optional<IntervalId>> emitted;
        std::vector<std::optional<IntervalId>> read;
        std::vector<StateId> targets;
    };

    static bool matches(const std::vector<std::optional<IntervalId>>& pattern, const Slice& s)
    {
        for (std::size_t i = 0; i < pattern.size(); ++i)
            if (pattern[i] && *pattern[i] != s[i])
                return false;
        return true;
    }

    TableSpec spec_;
    StateId initial_ = 0;
    std::vector<std::vector<Slice>> emits_;
    std::vector<std::vector<Compiled>> rules_;
};

// ---------------------------------------------------------------------------
// Chaos and silent machines

class ChaosMachine final : public TransducerImpl {
public:
    ChaosMachine(ChannelSet in, ChannelSet out, const EnumerationBounds& bounds)
        : TransducerImpl(std::move(in), std::move(out)), emits_(all_slices(outputs(), bounds))
    {
    }
    StateId initial() const override { return 0; }
    const std::vector<Slice>& emit(StateId) const override { return emits_; }
    const std::vector<StateId>& advance(StateId, std::size_t choice, const Slice&) const override
    {
        return choice < emits_.size() ? state_zero() : no_successors();
    }
    std::string describe() const override
    {
        return "chaos(" + describe_set(inputs()) + ", " + describe_set(outputs()) + ")";
    }
    std::string state_label(StateId) const override { return "chaos"; }

private:
    std::vector<Slice> emits_;
};

class SilentMachine final : public TransducerImpl {
public:
    SilentMachine(ChannelSet in, ChannelSet out)
        : TransducerImpl(std::move(in), std::move(out)), emits_{Slice(outputs().size(), empty_interval())}
    {
    }
    StateId initial() const override { return 0; }
    const std::vector<Slice>& emit(StateId) const override { return emits_; }
    const std::vector<StateId>& advance(StateId, std::size_t choice, const Slice&) const override
    {
        return choice == 0 ? state_zero() : no_successors();
    }
    std::string describe() const override
    {
        return "silent(" + describe_set(inputs()) + ", " + describe_set(outputs()) + ")";
    }
    std::string state_label(StateId) const override { return "idle"; }

private:
    std::vector<Slice> emits_;
};

class DelayCopyMachine final : public InternedMachine<IntervalId> {
public:
    DelayCopyMachine(const ChannelId& from, const ChannelId& to)
        : InternedMachine(ChannelSet{from}, ChannelSet{to}), from_(from), to_(to)
    {
    }
    std::string describe() const override { return "delay_copy(" + from_.str() + ", " + to_.str() + ")"; }

protected:
    IntervalId start() const override { return empty_interval(); }
    std::vector<Slice> emissions(const IntervalId& held) const override { return {Slice{held}}; }
    std::vector<IntervalId> successors(const IntervalId&, const Slice&, const Slice& in) const override
    {
        return {in.at(0)};
    }
    std::string label(const IntervalId& held) const override { return to_string(interval_of(held)); }

private:
    ChannelId from_;
    ChannelId to_;
};

// ---------------------------------------------------------------------------
// Composition

class ComposedMachine final : public InternedMachine<std::vector<StateId>, StateSetHash> {
public:
    ComposedMachine(std::vector<IntervalTransducer> parts, ChannelSet in, ChannelSet out)
        : InternedMachine(std::move(in), std::move(out)), parts_(std::move(parts))
    {
        for (const auto& p : parts_) {
            std::vector<std::size_t> out_pos;
            for (const auto& c : p.outputs())
                out_pos.push_back(outputs().index_of(c));
            std::vector<Source> in_src;
            for (const auto& c : p.inputs()) {
                if (outputs().contains(c))
                    in_src.push_back({true, outputs().index_of(c)});
                else
                    in_src.push_back({false, inputs().index_of(c)});
            }
            out_pos_.push_back(std::move(out_pos));
            in_src_.push_back(std::move(in_src));
        }
    }

    std::string describe() const override
    {
        std::vector<std::string> names;
        for (const auto& p : parts_)
            names.push_back(p.describe());
        return "compose(" + join(names, ", ") + ")";
    }

protected:
    std::vector<StateId> start() const override
    {
        std::vector<StateId> s;
        for (const auto& p : parts_)
            s.push_back(p.initial());
        return s;
    }

    std::vector<Slice> emissions(const std::vector<StateId>& key) const override
    {
        std::vector<Slice> out{Slice(outputs().size(), empty_interval())};
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            const auto& choices = parts_[k].emit(key[k]);
            std::vector<Slice> next;
            next.reserve(out.size() * choices.size());
            for (const auto& partial : out)
                for (const auto& c : choices) {
                    auto s = partial;
                    for (std::size_t j = 0; j < c.size(); ++j)
                        s[out_pos_[k][j]] = c[j];
                    next.push_back(std::move(s));
                }
            out = std::move(next);
        }
        return out;
    }

    std::vector<std::vector<StateId>> successors(const std::vector<StateId>& key, const Slice& out,
                                                 const Slice& in) const override
    {
        std::vector<std::vector<StateId>> result{{}};
        for (std::size_t k = 0; k < parts_.size(); ++k) {
            Slice part_out;
            for (auto pos : out_pos_[k])
                part_out.push_back(out[pos]);
            auto choice = parts_[k].find_choice(key[k], part_out);
            if (choice == IntervalTransducer::npos)
                return {};
            Slice part_in;
            for (const auto& src : in_src_[k])
                part_in.push_back(src.from_output ? out[src.index] : in[src.index]);
            const auto& next = parts_[k].advance(key[k], choice, part_in);
            if (next.empty())
                return {};
            std::vector<std::vector<StateId>> grown;
            grown.reserve(result.size() * next.size());
            for (const auto& r : result)
                for (auto n : next) {
                    auto g = r;
                    g.push_back(n);
                    grown.push_back(std::move(g));
                }
            result = std::move(grown);
        }
        return result;
    }

public:
    const std::vector<IntervalTransducer>& parts() const noexcept { return parts_; }

protected:
    std::string label(const std::vector<StateId>& key) const override
    {
        std::vector<std::string> parts;
        for (std::size_t k = 0; k < parts_.size(); ++k)
            parts.push_back(parts_[k].state_label(key[k]));
        return "(" + join(parts, ", ") + ")";
    }

private:
    struct Source {
        bool from_output;
        std::size_t index;
    };
    std::vector<IntervalTransducer> parts_;
    std::vector<std::vector<std::size_t>> out_pos_;
    std::vector<std::vector<Source>> in_src_;
};

// ---------------------------------------------------------------------------
// Wrappers that keep the inner state space.

/// Shared machinery for wrappers whose emit list is a re-labelled view of
/// the inner machine's, possibly merging several inner choices.
class ViewMachine : public TransducerImpl {
public:
    ViewMachine(IntervalTransducer inner, ChannelSet in, ChannelSet out)
        : TransducerImpl(std::move(in), std::move(out)), inner_(std::move(inner))
    {
    }

    StateId initial() const override { return inner_.initial(); }
    std::string state_label(StateId s) const override { return inner_.state_label(s); }

    const std::vector<Slice>& emit(StateId s) const override { return entry(s).emits; }

    const std::vector<StateId>& advance(StateId s, std::size_t choice, const Slice& input) const override
    {
        Key k{s, static_cast<std::uint32_t>(choice), input};
        {
            std::lock_guard lock(mu_);
            if (auto it = advances_.find(k); it != advances_.end())
                return it->second;
        }
        const auto& e = entry(s);
        std::vector<StateId> out;
        if (choice < e.groups.size()) {
            auto inner_input = to_inner_input(input);
            for (auto ic : e.groups[choice]) {
                const auto& next = inner_.advance(s, ic, inner_input);
                out.insert(out.end(), next.begin(), next.end());
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
        }
        std::lock_guard lock(mu_);
        return advances_.try_emplace(std::move(k), std::move(out)).first->second;
    }

protected:
    /// Views of the inner choices of one state: one or more per inner choice.
    virtual std::vector<std::pair<Slice, std::size_t>> view(const std::vector<Slice>& inner_emits) const = 0;
    virtual Slice to_inner_input(const Slice& input) const = 0;

public:
    const IntervalTransducer& inner() const noexcept { return inner_; }

private:
    struct Entry {
        std::vector<Slice> emits;
        std::vector<std::vector<std::size_t>> groups;
    };
    struct Key {
        StateId state;
        std::uint32_t choice;
        Slice input;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept
        {
            return SliceHash{}(k.input) ^ (std::size_t{k.state} * 0x9E3779B97F4A7C15ULL) ^
                   (std::size_t{k.choice} << 40);
        }
    };

    const Entry& entry(StateId s) const
    {
        {
            std::lock_guard lock(mu_);
            if (auto it = entries_.find(s); it != entries_.end())
                return it->second;
        }
        auto pairs = view(inner_.emit(s));
        std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first)
                return slice_less(a.first, b.first);
            return a.second < b.second;
        });
        Entry e;
        for (auto& [slice, ic] : pairs) {
            if (e.emits.empty() || e.emits.back() != slice) {
                e.emits.push_back(slice);
                e.groups.emplace_back();
            }
            e.groups.back().push_back(ic);
        }
        std::lock_guard lock(mu_);
        return entries_.try_emplace(s, std::move(e)).first->second;
    }

    IntervalTransducer inner_;
    mutable std::mutex mu_;
    mutable std::unordered_map<StateId, Entry> entries_;
    mutable std::unordered_map<Key, std::vector<StateId>, KeyHash> advances_;
};

class AdaptedMachine final : public ViewMachine {
public:
    AdaptedMachine(IntervalTransducer inner, ChannelSet in, ChannelSet out)
        : ViewMachine(std::move(inner), std::move(in), std::move(out))
    {
        for (const auto& c : this->inner().inputs())
            in_pick_.push_back(inputs().index_of(c));
        for (const auto& c : outputs())
            out_pick_.push_back(this->inner().outputs().index_of(c));
    }

    std::string describe() const override
    {
        return "adapt(" + inner().describe() + ", " + describe_set(inputs()) + ", " + describe_set(outputs()) + ")";
    }

protected:
    std::vector<std::pair<Slice, std::size_t>> view(const std::vector<Slice>& inner_emits) const override
    {
        std::vector<std::pair<Slice, std::size_t>> out;
        for (std::size_t i = 0; i < inner_emits.size(); ++i) {
            Slice s;
            for (auto pos : out_pick_)
                s.push_back(inner_emits[i][pos]);
            out.emplace_back(std::move(s), i);
        }
        return out;
    }

    Slice to_inner_input(const Slice& input) const override
    {
        Slice s;
        s.reserve(in_pick_.size());
        for (auto pos : in_pick_)
            s.push_back(input[pos]);
        return s;
    }

private:
    std::vector<std::size_t> in_pick_;
    std::vector<std::size_t> out_pick_;
};

class FreeOutputMachine final : public ViewMachine {
public:
    FreeOutputMachine(IntervalTransducer inner, const ChannelId& p, const EnumerationBounds& bounds)
        : ViewMachine(inner, inner.inputs(), with(inner.outputs(), p)), p_(p), pos_(outputs().index_of(p))
    {
        for (const auto& iv : bounds.intervals(p))
            free_.push_back(intern(iv));
    }

    std::string describe() const override
    {
        return "with_free_output(" + inner().describe() + ", " + p_.str() + ")";
    }

protected:
    std::vector<std::pair<Slice, std::size_t>> view(const std::vector<Slice>& inner_emits) const override
    {
        std::vector<std::pair<Slice, std::size_t>> out;
        for (std::size_t i = 0; i < inner_emits.size(); ++i)
            for (auto iv : free_) {
                Slice s = inner_emits[i];
                s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos_), iv);
                out.emplace_back(std::move(s), i);
            }
        return out;
    }

    Slice to_inner_input(const Slice& input) const override { return input; }

private:
    ChannelId p_;
    std::size_t pos_;
    std::vector<IntervalId> free_;
};

class RenamedMachine final : public ViewMachine {
public:
    RenamedMachine(IntervalTransducer inner, const ChannelId& from, const ChannelId& to)
        : ViewMachine(inner, swap(inner.inputs(), from, to), swap(inner.outputs(), from, to)), from_(from), to_(to)
    {
        for (const auto& c : this->inner().inputs())
            in_pick_.push_back(inputs().index_of(c == from_ ? to_ : c));
        for (const auto& c : outputs())
            out_pick_.push_back(this->inner().outputs().index_of(c == to_ ? from_ : c));
    }

    std::string describe() const override
    {
        return "rename(" + inner().describe() + ", " + from_.str() + ", " + to_.str() + ")";
    }

protected:
    std::vector<std::pair<Slice, std::size_t>> view(const std::vector<Slice>& inner_emits) const override
    {
        std::vector<std::pair<Slice, std::size_t>> out;
        for (std::size_t i = 0; i < inner_emits.size(); ++i) {
            Slice s;
            for (auto pos : out_pick_)
                s.push_back(inner_emits[i][pos]);
            out.emplace_back(std::move(s), i);
        }
        return out;
    }

    Slice to_inner_input(const Slice& input) const override
    {
        Slice s;
        s.reserve(in_pick_.size());
        for (auto pos : in_pick_)
            s.push_back(input[pos]);
        return s;
    }

private:
    static ChannelSet swap(const ChannelSet& set, const ChannelId& from, const ChannelId& to)
    {
        return set.contains(from) ? with(without(set, from), to) : set;
    }

    ChannelId from_;
    ChannelId to_;
    std::vector<std::size_t> in_pick_;
    std::vector<std::size_t> out_pick_;
};

class WithoutInputMachine final : public TransducerImpl {
public:
    WithoutInputMachine(IntervalTransducer inner, const ChannelId& p)
        : TransducerImpl(without(inner.inputs(), p), inner.outputs()), inner_(std::move(inner)), p_(p),
          pos_(inner_.inputs().index_of(p))
    {
    }

    StateId initial() const override { return inner_.initial(); }
    const std::vector<Slice>& emit(StateId s) const override { return inner_.emit(s); }
    const std::vector<StateId>& advance(StateId s, std::size_t choice, const Slice& input) const override
    {
        Slice full = input;
        full.insert(full.begin() + static_cast<std::ptrdiff_t>(pos_), empty_interval());
        return inner_.advance(s, choice, full);
    }
    std::string describe() const override { return "without_input(" + inner_.describe() + ", " + p_.str() + ")"; }
    const IntervalTransducer& inner() const noexcept { return inner_; }
    std::string state_label(StateId s) const override { return inner_.state_label(s); }

private:
    IntervalTransducer inner_;
    ChannelId p_;
    std::size_t pos_;
};

} // namespace

IntervalTransducer make_table(TableSpec spec)
{
    return IntervalTransducer(std::make_shared<TableMachine>(std::move(spec)));
}

const TableSpec* table_spec(const IntervalTransducer& m)
{
    if (auto* t = dynamic_cast<const TableMachine*>(&m.impl()))
        return &t->spec();
    return nullptr;
}

std::vector<TableSpec> tables_used(const IntervalTransducer& m)
{
    std::vector<TableSpec> out;
    std::vector<IntervalTransducer> todo{m};
    while (!todo.empty()) {
        auto cur = todo.back();
        todo.pop_back();
        const auto* impl = &cur.impl();
        if (auto* t = dynamic_cast<const TableMachine*>(impl)) {
            if (std::find(out.begin(), out.end(), t->spec()) == out.end())
                out.push_back(t->spec());
        } else if (auto* c = dynamic_cast<const ComposedMachine*>(impl)) {
            for (auto it = c->parts().rbegin(); it != c->parts().rend(); ++it)
                todo.push_back(*it);
        } else if (auto* v = dynamic_cast<const ViewMachine*>(impl)) {
            todo.push_back(v->inner());
        } else if (auto* w = dynamic_cast<const WithoutInputMachine*>(impl)) {
            todo.push_back(w->inner());
        }
    }
    return out;
}

IntervalTransducer chaos(const ChannelSet& inputs, const ChannelSet& outputs, const EnumerationBounds& bounds)
{
    return IntervalTransducer(std::make_shared<ChaosMachine>(inputs, outputs, bounds));
}

IntervalTransducer silent(const ChannelSet& inputs, const ChannelSet& outputs)
{
    return IntervalTransducer(std::make_shared<SilentMachine>(inputs, outputs));
}

IntervalTransducer delay_copy(const ChannelId& from, const ChannelId& to)
{
    return IntervalTransducer(std::make_shared<DelayCopyMachine>(from, to));
}

IntervalTransducer adapt(const IntervalTransducer& m, const ChannelSet& inputs, const ChannelSet& outputs)
{
    if (!m.inputs().is_subset_of(inputs))
        throw InterfaceError("adapt: inputs " + to_string(inputs) + " do not contain " + to_string(m.inputs()));
    if (!outputs.is_subset_of(m.outputs()))
        throw InterfaceError("adapt: outputs " + to_string(outputs) + " not within " + to_string(m.outputs()));
    return IntervalTransducer(std::make_shared<AdaptedMachine>(m, inputs, outputs));
}

IntervalTransducer compose(const std::vector<IntervalTransducer>& parts)
{
    ChannelSet outs;
    ChannelSet ins;
    for (const auto& p : parts) {
        if (outs.intersects(p.outputs()))
            throw CompositionError("compose: output channels " + to_string(intersect(outs, p.outputs())) +
                                   " are controlled by more than one part");
        outs = unite(outs, p.outputs());
        ins = unite(ins, p.inputs());
    }
    return IntervalTransducer(std::make_shared<ComposedMachine>(parts, minus(ins, outs), outs));
}

IntervalTransducer with_free_output(const IntervalTransducer& m, const ChannelId& p, const EnumerationBounds& bounds)
{
    if (m.outputs().contains(p))
        throw InterfaceError("with_free_output: '" + p.str() + "' is already an output");
    return IntervalTransducer(std::make_shared<FreeOutputMachine>(m, p, bounds));
}

IntervalTransducer without_input(const IntervalTransducer& m, const ChannelId& p)
{
    if (!m.inputs().contains(p))
        throw InterfaceError("without_input: '" + p.str() + "' is not an input");
    return IntervalTransducer(std::make_shared<WithoutInputMachine>(m, p));
}

IntervalTransducer rename(const IntervalTransducer& m, const ChannelId& from, const ChannelId& to)
{
    bool used = m.inputs().contains(from) || m.outputs().contains(from);
    if (!used)
        throw InterfaceError("rename: '" + from.str() + "' is not on the interface");
    if (from != to && (m.inputs().contains(to) || m.outputs().contains(to)))
        throw InterfaceError("rename: '" + to.str() + "' is already on the interface");
    if (from == to)
        return m;
    return IntervalTransducer(std::make_shared<RenamedMachine>(m, from, to));
}

} // namespace flowrefine
