#pragma once

// The data acquisition example: a preprocessor feeding a remote database,
// refined into a pipeline that ships data differences instead of data.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowrefine/rules.hpp"

namespace flowrefine {

/// A data value, or ⊥ (nullopt) for "nothing stored".
using Datum = std::optional<int>;

/// Difference codec over the values 0 .. modulus-1:
/// Δ(x, y) = y - x, ρ(x, δ) = x + δ (mod modulus), with Δ(⊥, d) = d and ρ(⊥, δ) = δ.
struct Codec {
    int modulus = 3;

    /// Throws DomainError if `now` is ⊥ or out of range.
    int delta(Datum old, Datum now) const;
    /// Throws DomainError if `diff` is ⊥ or out of range.
    int rho(Datum old, Datum diff) const;
};

struct Entry {
    std::string key;
    int data = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
    friend auto operator<=>(const Entry&, const Entry&) = default;
};

/// Key -> data; missing keys read as ⊥.
using Database = std::map<std::string, int>;

Datum lookup(const Database& m, const std::string& key);

/// "k:d" message encoding of an entry.
std::string entry_token(const Entry& e);
std::optional<Entry> parse_entry(std::string_view token);
/// "bot" or the decimal value.
std::string datum_token(Datum d);

std::vector<Entry> delta_star(const Codec& codec, Database m, const std::vector<Entry>& x);
std::vector<Entry> rho_star(const Codec& codec, Database m, const std::vector<Entry>& x);

/// Per-datum preprocessing function; identity where unmapped.
using DataMap = std::map<int, int>;

// Machines. All of them may delay their output by any number of steps;
// pending work is queued in arrival order. `burst` caps entries per interval.

/// Emits (k, f(d)) for every entry (k, d) read.
IntervalTransducer preprocessor(const ChannelId& in, const ChannelId& out, std::size_t burst, DataMap f = {});
/// Emits (k, Δ(M(k), d)) and updates its own database M.
IntervalTransducer encoder(const ChannelId& in, const ChannelId& out, std::size_t burst, Codec codec = {});
/// Emits (k, ρ(M(k), δ)) and updates its own database M.
IntervalTransducer decoder(const ChannelId& in, const ChannelId& out, std::size_t burst, Codec codec = {});
/// Emits every entry read, unchanged.
IntervalTransducer copier(const ChannelId& in, const ChannelId& out, std::size_t burst);
/// Stores entries from `store` (through ρ when `decode`) and answers every
/// key read on `key` with the stored datum on `data`.
IntervalTransducer database(const ChannelId& store, const ChannelId& key, const ChannelId& data, std::size_t burst,
                            bool decode = false, Codec codec = {});

/// Ψ: the entries on `r` are, in order, a prefix of ρ*(Δ*(entries on `i`)).
InvariantPtr roundtrip_invariant(const ChannelId& i, const ChannelId& r, Codec codec = {});

struct CaseStudyProfile {
    std::vector<std::string> keys{"a"};
    Codec codec{};
    DataMap f{};
    std::size_t horizon = 4;
    std::size_t burst = 1;
    /// Replace the decoder by a plain copier (the decoder "forgets" ρ).
    bool mutant_decoder = false;
};

EnumerationBounds case_study_bounds(const CaseStudyProfile& p);

Component make_pre(const CaseStudyProfile& p);
/// RDB storing entries from `store`.
Component make_rdb(const CaseStudyProfile& p, const ChannelId& store, bool decode = false);
Component make_enc(const CaseStudyProfile& p);
Component make_dec(const CaseStudyProfile& p);

/// PRE and RDB between In, Key and Data.
System original_system(const CaseStudyProfile& p);

/// The thirteen rule applications, grouped into eight stages.
std::vector<RefinementStep> case_study_script(const CaseStudyProfile& p);

struct CaseStudyResult {
    ReplayResult replay;
    /// ⟦final⟧ ⊆ ⟦original⟧, when every step succeeded.
    std::optional<InclusionResult> final_check;

    bool ok() const noexcept { return replay.ok() && final_check && final_check->holds; }
};

CaseStudyResult run_case_study(const CaseStudyProfile& p, bool verify_steps = true);

} // namespace flowrefine
