#pragma once

// Base for transducers whose states are structured values, interned into
// dense StateIds on first use. Emission lists and transitions are computed on
// demand and cached, so only the part of a (possibly huge) state space that a
// check actually visits is ever built.

#include <algorithm>
#include <deque>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "flowrefine/transducer.hpp"

namespace flowrefine {

template <class Key, class Hash = std::hash<Key>>
class InternedMachine : public TransducerImpl {
public:
    using TransducerImpl::TransducerImpl;

    StateId initial() const final { return id_of(start()); }

    const std::vector<Slice>& emit(StateId s) const final
    {
        {
            std::lock_guard lock(mu_);
            if (emits_.at(s))
                return *emits_[s];
        }
        auto out = std::make_unique<std::vector<Slice>>(emissions(key_of(s)));
        std::sort(out->begin(), out->end(), slice_less);
        out->erase(std::unique(out->begin(), out->end()), out->end());
        std::lock_guard lock(mu_);
        if (!emits_[s])
            emits_[s] = std::move(out);
        return *emits_[s];
    }

    const std::vector<StateId>& advance(StateId s, std::size_t choice, const Slice& input) const final
    {
        AdvanceKey k{s, static_cast<std::uint32_t>(choice), input};
        {
            std::lock_guard lock(mu_);
            if (auto it = advances_.find(k); it != advances_.end())
                return it->second;
        }
        const auto& choices = emit(s);
        std::vector<StateId> ids;
        if (choice < choices.size()) {
            for (const auto& next : successors(key_of(s), choices[choice], input))
                ids.push_back(id_of(next));
            std::sort(ids.begin(), ids.end());
            ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        }
        std::lock_guard lock(mu_);
        return advances_.try_emplace(std::move(k), std::move(ids)).first->second;
    }

    std::string state_label(StateId s) const final { return label(key_of(s)); }

    /// Number of states interned so far.
    std::size_t interned_states() const
    {
        std::lock_guard lock(mu_);
        return keys_.size();
    }

protected:
    virtual Key start() const = 0;
    virtual std::vector<Slice> emissions(const Key& k) const = 0;
    virtual std::vector<Key> successors(const Key& k, const Slice& out, const Slice& in) const = 0;
    virtual std::string label(const Key&) const { return "?"; }

    StateId id_of(const Key& k) const
    {
        std::lock_guard lock(mu_);
        auto [it, fresh] = ids_.try_emplace(k, static_cast<StateId>(keys_.size()));
        if (fresh) {
            keys_.push_back(k);
            emits_.emplace_back();
        }
        return it->second;
    }

    Key key_of(StateId s) const
    {
        std::lock_guard lock(mu_);
        return keys_.at(s);
    }

private:
    struct AdvanceKey {
        StateId state;
        std::uint32_t choice;
        Slice input;
        friend bool operator==(const AdvanceKey&, const AdvanceKey&) = default;
    };
    struct AdvanceHash {
        std::size_t operator()(const AdvanceKey& k) const noexcept
        {
            return SliceHash{}(k.input) ^ (std::size_t{k.state} * 0x9E3779B97F4A7C15ULL) ^
                   (std::size_t{k.choice} << 40);
        }
    };

    mutable std::mutex mu_;
    mutable std::unordered_map<Key, StateId, Hash> ids_;
    mutable std::deque<Key> keys_;
    mutable std::deque<std::unique_ptr<std::vector<Slice>>> emits_;
    mutable std::unordered_map<AdvanceKey, std::vector<StateId>, AdvanceHash> advances_;
};

} // namespace flowrefine
