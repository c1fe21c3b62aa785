#include "flowrefine/case_study.hpp"

#include <charconv>

#include "flowrefine/interned_machine.hpp"

namespace flowrefine {

// ---------------------------------------------------------------------------
// Codec

namespace {

int checked_value(const Codec& c, Datum d, const char* what)
{
    if (!d)
        throw DomainError(std::string(what) + " must not be bot");
    if (*d < 0 || *d >= c.modulus)
        throw DomainError(std::string(what) + " " + std::to_string(*d) + " out of range");
    return *d;
}

int mod(int v, int m)
{
    return ((v % m) + m) % m;
}

} // namespace

int Codec::delta(Datum old, Datum now) const
{
    int n = checked_value(*this, now, "new datum");
    if (!old)
        return n;
    return mod(n - checked_value(*this, old, "old datum"), modulus);
}

int Codec::rho(Datum old, Datum diff) const
{
    int d = checked_value(*this, diff, "difference");
    if (!old)
        return d;
    return mod(checked_value(*this, old, "old datum") + d, modulus);
}

Datum lookup(const Database& m, const std::string& key)
{
    auto it = m.find(key);
    if (it == m.end())
        return std::nullopt;
    return it->second;
}

std::string entry_token(const Entry& e)
{
    return e.key + ":" + std::to_string(e.data);
}

std::optional<Entry> parse_entry(std::string_view token)
{
    auto colon = token.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == token.size())
        return std::nullopt;
    Entry e;
    e.key = std::string(token.substr(0, colon));
    auto digits = token.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), e.data);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || !is_valid_token(e.key))
        return std::nullopt;
    return e;
}

std::string datum_token(Datum d)
{
    return d ? std::to_string(*d) : "bot";
}

std::vector<Entry> delta_star(const Codec& codec, Database m, const std::vector<Entry>& x)
{
    std::vector<Entry> out;
    out.reserve(x.size());
    for (const auto& [k, d] : x) {
        out.push_back({k, codec.delta(lookup(m, k), d)});
        m[k] = d;
    }
    return out;
}

std::vector<Entry> rho_star(const Codec& codec, Database m, const std::vector<Entry>& x)
{
    std::vector<Entry> out;
    out.reserve(x.size());
    for (const auto& [k, delta] : x) {
        int d = codec.rho(lookup(m, k), delta);
        out.push_back({k, d});
        m[k] = d;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Machines

namespace {

std::size_t hash_strings(std::size_t h, const std::string& s)
{
    return (h ^ std::hash<std::string>{}(s)) * 0x100000001b3ULL;
}

Entry entry_of(const std::string& token, const Codec& codec)
{
    auto e = parse_entry(token);
    if (!e || e->data < 0 || e->data >= codec.modulus)
        throw DomainError("'" + token + "' is not an entry");
    return *e;
}

Interval first(const std::vector<std::string>& q, std::size_t n)
{
    return Interval(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(n));
}

struct Pipe {
    Database db;
    std::vector<std::string> queue;
    friend bool operator==(const Pipe&, const Pipe&) = default;
};

struct PipeHash {
    std::size_t operator()(const Pipe& p) const noexcept
    {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (const auto& [k, v] : p.db)
            h = hash_strings(h, k) ^ static_cast<std::size_t>(v);
        for (const auto& t : p.queue)
            h = hash_strings(h, t);
        return h;
    }
};

enum class PipeKind { map, encode, decode, copy };

class PipeMachine final : public InternedMachine<Pipe, PipeHash> {
public:
    PipeMachine(PipeKind kind, const ChannelId& in, const ChannelId& out, std::size_t burst, DataMap f, Codec codec)
        : InternedMachine(ChannelSet{in}, ChannelSet{out}), kind_(kind), in_(in), out_(out), burst_(burst),
          f_(std::move(f)), codec_(codec)
    {
    }

    std::string describe() const override
    {
        auto args = in_.str() + ", " + out_.str();
        switch (kind_) {
        case PipeKind::map: {
            std::string pairs;
            for (const auto& [a, b] : f_)
                if (a != b)
                    pairs += (pairs.empty() ? "" : ", ") + std::to_string(a) + ":" + std::to_string(b);
            return "preprocessor(" + args + (pairs.empty() ? "" : ", {" + pairs + "}") + ")";
        }
        case PipeKind::encode:
            return "encoder(" + args + ")";
        case PipeKind::decode:
            return "decoder(" + args + ")";
        case PipeKind::copy:
            return "copier(" + args + ")";
        }
        return "?";
    }

protected:
    Pipe start() const override { return {}; }

    std::vector<Slice> emissions(const Pipe& p) const override
    {
        std::vector<Slice> out;
        for (std::size_t j = 0; j <= std::min(burst_, p.queue.size()); ++j)
            out.push_back(Slice{intern(first(p.queue, j))});
        return out;
    }

    std::vector<Pipe> successors(const Pipe& p, const Slice& out, const Slice& in) const override
    {
        Pipe next = p;
        next.queue.erase(next.queue.begin(), next.queue.begin() + static_cast<std::ptrdiff_t>(interval_of(out[0]).size()));
        for (const auto& token : interval_of(in[0])) {
            auto e = entry_of(token, codec_);
            switch (kind_) {
            case PipeKind::map:
                if (auto it = f_.find(e.data); it != f_.end())
                    e.data = it->second;
                break;
            case PipeKind::encode: {
                int d = e.data;
                e.data = codec_.delta(lookup(next.db, e.key), d);
                next.db[e.key] = d;
                break;
            }
            case PipeKind::decode:
                e.data = codec_.rho(lookup(next.db, e.key), e.data);
                next.db[e.key] = e.data;
                break;
            case PipeKind::copy:
                break;
            }
            next.queue.push_back(entry_token(e));
        }
        return {next};
    }

    std::string label(const Pipe& p) const override
    {
        std::string s = "[";
        for (const auto& [k, v] : p.db)
            s += k + "=" + std::to_string(v) + " ";
        s += "|";
        for (const auto& t : p.queue)
            s += " " + t;
        return s + "]";
    }

private:
    PipeKind kind_;
    ChannelId in_;
    ChannelId out_;
    std::size_t burst_;
    DataMap f_;
    Codec codec_;
};

struct Store {
    Database m;
    std::vector<std::string> stores;
    std::vector<std::string> queries;
    friend bool operator==(const Store&, const Store&) = default;
};

struct StoreHash {
    std::size_t operator()(const Store& s) const noexcept
    {
        std::size_t h = 0x84222325cbf29ce4ULL;
        for (const auto& [k, v] : s.m)
            h = hash_strings(h, k) ^ static_cast<std::size_t>(v);
        h = hash_strings(h, "|");
        for (const auto& t : s.stores)
            h = hash_strings(h, t);
        h = hash_strings(h, "|");
        for (const auto& t : s.queries)
            h = hash_strings(h, t);
        return h;
    }
};

class DatabaseMachine final : public InternedMachine<Store, StoreHash> {
public:
    DatabaseMachine(const ChannelId& store, const ChannelId& key, const ChannelId& data, std::size_t burst,
                    bool decode, Codec codec)
        : InternedMachine(ChannelSet{store, key}, ChannelSet{data}), store_(store), key_(key), data_(data),
          burst_(burst), decode_(decode), codec_(codec), store_pos_(inputs().index_of(store)),
          key_pos_(inputs().index_of(key))
    {
        if (store == key)
            throw InterfaceError("database: store and key channels must differ");
    }

    std::string describe() const override
    {
        return std::string(decode_ ? "decoding_database(" : "database(") + store_.str() + ", " + key_.str() + ", " +
               data_.str() + ")";
    }

protected:
    Store start() const override { return {}; }

    std::vector<Slice> emissions(const Store& s) const override
    {
        std::vector<Slice> out;
        Interval answers;
        out.push_back(Slice{empty_interval()});
        for (std::size_t j = 0; j < std::min(burst_, s.queries.size()); ++j) {
            answers.push_back(datum_token(lookup(s.m, s.queries[j])));
            out.push_back(Slice{intern(answers)});
        }
        return out;
    }

    std::vector<Store> successors(const Store& s, const Slice& out, const Slice& in) const override
    {
        Store base = s;
        base.queries.erase(base.queries.begin(),
                           base.queries.begin() + static_cast<std::ptrdiff_t>(interval_of(out[0]).size()));
        for (const auto& k : interval_of(in[key_pos_]))
            base.queries.push_back(k);
        for (const auto& t : interval_of(in[store_pos_])) {
            entry_of(t, codec_);
            base.stores.push_back(t);
        }
        // Pending stores take effect in order, any number of them now.
        std::vector<Store> next{base};
        Store cur = base;
        while (!cur.stores.empty()) {
            auto e = entry_of(cur.stores.front(), codec_);
            cur.stores.erase(cur.stores.begin());
            cur.m[e.key] = decode_ ? codec_.rho(lookup(cur.m, e.key), e.data) : e.data;
            next.push_back(cur);
        }
        return next;
    }

    std::string label(const Store& s) const override
    {
        std::string out = "[";
        for (const auto& [k, v] : s.m)
            out += k + "=" + std::to_string(v) + " ";
        out += "| stores";
        for (const auto& t : s.stores)
            out += " " + t;
        out += " | queries";
        for (const auto& t : s.queries)
            out += " " + t;
        return out + "]";
    }

private:
    ChannelId store_;
    ChannelId key_;
    ChannelId data_;
    std::size_t burst_;
    bool decode_;
    Codec codec_;
    std::size_t store_pos_;
    std::size_t key_pos_;
};

/// Monitor state: the codec's view on both sides plus the entries still
/// expected on R, serialized as "k=v,..|k=v,..|tok tok".
struct Roundtrip {
    Database enc;
    Database dec;
    std::vector<std::string> expected;

    static Database parse_db(std::string_view s)
    {
        Database m;
        while (!s.empty()) {
            auto comma = s.find(',');
            auto item = s.substr(0, comma);
            auto eq = item.find('=');
            int v = 0;
            std::from_chars(item.data() + eq + 1, item.data() + item.size(), v);
            m[std::string(item.substr(0, eq))] = v;
            s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
        }
        return m;
    }

    static std::string show_db(const Database& m)
    {
        std::string s;
        for (const auto& [k, v] : m)
            s += (s.empty() ? "" : ",") + k + "=" + std::to_string(v);
        return s;
    }

    static Roundtrip parse(const std::string& s)
    {
        Roundtrip r;
        auto a = s.find('|');
        auto b = s.find('|', a + 1);
        r.enc = parse_db(std::string_view(s).substr(0, a));
        r.dec = parse_db(std::string_view(s).substr(a + 1, b - a - 1));
        std::string_view rest = std::string_view(s).substr(b + 1);
        while (!rest.empty()) {
            auto sp = rest.find(' ');
            r.expected.emplace_back(rest.substr(0, sp));
            rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
        }
        return r;
    }

    std::string show() const
    {
        std::string q;
        for (const auto& t : expected)
            q += (q.empty() ? "" : " ") + t;
        return show_db(enc) + "|" + show_db(dec) + "|" + q;
    }
};

class RoundtripInvariant final : public Invariant {
public:
    RoundtripInvariant(ChannelId i, ChannelId r, Codec codec)
        : i_(std::move(i)), r_(std::move(r)), codec_(codec), reads_{i_, r_}, i_pos_(reads_.index_of(i_)),
          r_pos_(reads_.index_of(r_))
    {
        if (i_ == r_)
            throw DomainError("roundtrip: channels must differ");
    }

    ChannelSet reads() const override { return reads_; }
    std::string initial() const override { return Roundtrip{}.show(); }

    std::optional<std::string> step(const std::string& state, const Slice& letter) const override
    {
        auto st = Roundtrip::parse(state);
        for (const auto& token : interval_of(letter[i_pos_])) {
            auto e = parse_entry(token);
            if (!e || e->data < 0 || e->data >= codec_.modulus)
                return std::nullopt;
            int diff = codec_.delta(lookup(st.enc, e->key), e->data);
            st.enc[e->key] = e->data;
            int back = codec_.rho(lookup(st.dec, e->key), diff);
            st.dec[e->key] = back;
            st.expected.push_back(entry_token({e->key, back}));
        }
        for (const auto& token : interval_of(letter[r_pos_])) {
            if (st.expected.empty() || st.expected.front() != token)
                return std::nullopt;
            st.expected.erase(st.expected.begin());
        }
        return st.show();
    }

    std::string describe() const override { return "roundtrip(" + i_.str() + ", " + r_.str() + ")"; }

private:
    ChannelId i_;
    ChannelId r_;
    Codec codec_;
    ChannelSet reads_;
    std::size_t i_pos_;
    std::size_t r_pos_;
};

} // namespace

IntervalTransducer preprocessor(const ChannelId& in, const ChannelId& out, std::size_t burst, DataMap f)
{
    return IntervalTransducer(std::make_shared<PipeMachine>(PipeKind::map, in, out, burst, std::move(f), Codec{}));
}

IntervalTransducer encoder(const ChannelId& in, const ChannelId& out, std::size_t burst, Codec codec)
{
    return IntervalTransducer(std::make_shared<PipeMachine>(PipeKind::encode, in, out, burst, DataMap{}, codec));
}

IntervalTransducer decoder(const ChannelId& in, const ChannelId& out, std::size_t burst, Codec codec)
{
    return IntervalTransducer(std::make_shared<PipeMachine>(PipeKind::decode, in, out, burst, DataMap{}, codec));
}

IntervalTransducer copier(const ChannelId& in, const ChannelId& out, std::size_t burst)
{
    return IntervalTransducer(std::make_shared<PipeMachine>(PipeKind::copy, in, out, burst, DataMap{}, Codec{}));
}

IntervalTransducer database(const ChannelId& store, const ChannelId& key, const ChannelId& data, std::size_t burst,
                            bool decode, Codec codec)
{
    return IntervalTransducer(std::make_shared<DatabaseMachine>(store, key, data, burst, decode, codec));
}

InvariantPtr roundtrip_invariant(const ChannelId& i, const ChannelId& r, Codec codec)
{
    return std::make_shared<RoundtripInvariant>(i, r, codec);
}

// ---------------------------------------------------------------------------
// The example system and its refinement

EnumerationBounds case_study_bounds(const CaseStudyProfile& p)
{
    std::vector<Message> entries;
    for (const auto& k : p.keys)
        for (int d = 0; d < p.codec.modulus; ++d)
            entries.push_back(entry_token({k, d}));
    std::vector<Message> data{"bot"};
    for (int d = 0; d < p.codec.modulus; ++d)
        data.push_back(std::to_string(d));
    return EnumerationBounds(p.horizon, p.burst,
                             {{"In", entries},
                              {"I", entries},
                              {"D", entries},
                              {"R", entries},
                              {"Key", p.keys},
                              {"Data", data}});
}

Component make_pre(const CaseStudyProfile& p)
{
    return make_component("PRE", preprocessor("In", "I", p.burst, p.f));
}

Component make_rdb(const CaseStudyProfile& p, const ChannelId& store, bool decode)
{
    return make_component("RDB", database(store, "Key", "Data", p.burst, decode, p.codec));
}

Component make_enc(const CaseStudyProfile& p)
{
    return make_component("ENC", encoder("I", "D", p.burst, p.codec));
}

Component make_dec(const CaseStudyProfile& p)
{
    if (p.mutant_decoder)
        return make_component("DEC", copier("D", "R", p.burst));
    return make_component("DEC", decoder("D", "R", p.burst, p.codec));
}

System original_system(const CaseStudyProfile& p)
{
    return System({"In", "Key"}, {"Data"}, {make_pre(p), make_rdb(p, "I")}, case_study_bounds(p));
}

std::vector<RefinementStep> case_study_script(const CaseStudyProfile& p)
{
    std::vector<RefinementStep> steps;
    auto step = [&](int stage, Rule rule, std::string component) -> RefinementStep& {
        RefinementStep s;
        s.stage = stage;
        s.rule = rule;
        s.component = std::move(component);
        steps.push_back(std::move(s));
        return steps.back();
    };
    step(1, Rule::add_component, "ENC");
    step(1, Rule::add_component, "DEC");
    step(2, Rule::add_output, "ENC").channel = ChannelId("D");
    step(2, Rule::add_output, "DEC").channel = ChannelId("R");
    step(3, Rule::add_input, "ENC").channel = ChannelId("I");
    step(3, Rule::add_input, "DEC").channel = ChannelId("D");
    step(4, Rule::refine_behavior, "ENC").machine = make_enc(p).behav;
    step(4, Rule::refine_behavior, "DEC").machine = make_dec(p).behav;
    step(5, Rule::add_input, "RDB").channel = ChannelId("R");
    auto& s6 = step(6, Rule::refine_with_invariant, "RDB");
    s6.machine = adapt(database("R", "Key", "Data", p.burst, false, p.codec), {"I", "Key", "R"}, {"Data"});
    s6.invariant = roundtrip_invariant("I", "R", p.codec);
    step(7, Rule::remove_input, "RDB").channel = ChannelId("I");
    auto& f1 = step(8, Rule::fold, "PRE'");
    f1.members = {"PRE", "ENC"};
    f1.in = {"In"};
    f1.out = {"D"};
    auto& f2 = step(8, Rule::fold, "RDB'");
    f2.members = {"DEC", "RDB"};
    f2.in = {"D", "Key"};
    f2.out = {"Data"};
    return steps;
}

CaseStudyResult run_case_study(const CaseStudyProfile& p, bool verify_steps)
{
    auto original = original_system(p);
    CaseStudyResult result{replay(original, case_study_script(p), ReplayOptions{verify_steps}), std::nullopt};
    if (result.replay.ok())
        result.final_check = check_system_refinement(original, result.replay.final_system, original.bounds());
    return result;
}

} // namespace flowrefine
