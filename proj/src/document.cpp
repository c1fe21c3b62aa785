#include "flowrefine/document.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "flowrefine/case_study.hpp"

namespace flowrefine {

namespace {

// ---------------------------------------------------------------------------
// Lexing

struct Token {
    enum class Kind { word, punct };
    Kind kind = Kind::word;
    std::string text;
    std::size_t column = 0;
};

struct Line {
    std::size_t number = 0;
    std::vector<Token> tokens;
};

struct Failure {
    Diagnostic diagnostic;
};

[[noreturn]] void fail_at(std::size_t line, std::size_t column, std::string message)
{
    throw Failure{Diagnostic{line, column, std::move(message)}};
}

bool word_char(char ch)
{
    auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || ch == '_' || ch == '\'' || ch == '.' || ch == ':' || ch == '-' || ch == '+' ||
           ch == '/';
}

std::vector<Token> tokenize(std::string_view text, std::size_t line)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char ch = text[i];
        if (ch == '#')
            break;
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        if (text.substr(i, 2) == "->") {
            out.push_back({Token::Kind::punct, "->", i + 1});
            i += 2;
            continue;
        }
        if (std::string_view("{}()<>,=*").find(ch) != std::string_view::npos) {
            out.push_back({Token::Kind::punct, std::string(1, ch), i + 1});
            ++i;
            continue;
        }
        if (!word_char(ch))
            fail_at(line, i + 1, std::string("unexpected character '") + ch + "'");
        std::size_t start = i;
        while (i < text.size() && word_char(text[i]) && text.substr(i, 2) != "->")
            ++i;
        out.push_back({Token::Kind::word, std::string(text.substr(start, i - start)), start + 1});
    }
    return out;
}

std::vector<Line> lex(std::string_view text, std::vector<Diagnostic>& diags)
{
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++number;
        try {
            auto toks = tokenize(raw, number);
            if (!toks.empty())
                lines.push_back({number, std::move(toks)});
        } catch (const Failure& f) {
            diags.push_back(f.diagnostic);
        }
        if (nl == std::string_view::npos)
            break;
        pos = nl + 1;
    }
    return lines;
}

class Cursor {
public:
    explicit Cursor(const Line& line) : line_(line) {}

    bool done() const { return pos_ >= line_.tokens.size(); }
    std::size_t line() const { return line_.number; }
    std::size_t column() const
    {
        if (!done())
            return line_.tokens[pos_].column;
        return line_.tokens.empty() ? 1 : line_.tokens.back().column + line_.tokens.back().text.size();
    }
    const Token* peek(std::size_t ahead = 0) const
    {
        return pos_ + ahead < line_.tokens.size() ? &line_.tokens[pos_ + ahead] : nullptr;
    }
    bool at_punct(std::string_view p, std::size_t ahead = 0) const
    {
        auto* t = peek(ahead);
        return t && t->kind == Token::Kind::punct && t->text == p;
    }
    bool at_word(std::string_view w) const
    {
        auto* t = peek();
        return t && t->kind == Token::Kind::word && t->text == w;
    }
    bool at_any_word() const
    {
        auto* t = peek();
        return t && t->kind == Token::Kind::word;
    }
    const Token& next() { return line_.tokens[pos_++]; }

    [[noreturn]] void fail(const std::string& message) const { fail_at(line(), column(), message); }

    std::string word(const std::string& what)
    {
        if (!at_any_word())
            fail("expected " + what + (done() ? " at end of line" : ", found '" + peek()->text + "'"));
        return next().text;
    }
    void keyword(std::string_view kw)
    {
        if (!at_word(kw))
            fail("expected '" + std::string(kw) + "'" + (done() ? " at end of line" : ", found '" + peek()->text + "'"));
        next();
    }
    void punct(std::string_view p)
    {
        if (!at_punct(p))
            fail("expected '" + std::string(p) + "'" + (done() ? " at end of line" : ", found '" + peek()->text + "'"));
        next();
    }
    void finish() const
    {
        if (!done())
            fail("unexpected '" + peek()->text + "'");
    }

private:
    const Line& line_;
    std::size_t pos_ = 0;
};

ChannelId channel(Cursor& c, const std::string& what = "channel name")
{
    auto col = c.column();
    auto name = c.word(what);
    try {
        return ChannelId(name);
    } catch (const Error& e) {
        fail_at(c.line(), col, e.what());
    }
}

std::size_t number(Cursor& c, const std::string& what)
{
    auto col = c.column();
    auto text = c.word(what);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail_at(c.line(), col, "expected a non-negative number for " + what + ", found '" + text + "'");
    return value;
}

/// `{a, b}` or `{a b}`.
std::vector<std::string> word_set(Cursor& c)
{
    c.punct("{");
    std::vector<std::string> items;
    while (!c.at_punct("}")) {
        if (c.done())
            c.fail("unterminated set");
        if (c.at_punct(",")) {
            c.next();
            continue;
        }
        items.push_back(c.word("set member"));
    }
    c.next();
    return items;
}

ChannelSet channel_set(Cursor& c)
{
    auto col = c.column();
    std::vector<ChannelId> ids;
    for (auto& w : word_set(c)) {
        try {
            ids.emplace_back(w);
        } catch (const Error& e) {
            fail_at(c.line(), col, e.what());
        }
    }
    return ChannelSet(std::move(ids));
}

Interval interval(Cursor& c)
{
    c.punct("<");
    Interval iv;
    while (!c.at_punct(">")) {
        if (c.done())
            c.fail("unterminated interval");
        iv.push_back(c.word("message"));
    }
    c.next();
    return iv;
}

Expr expression(Cursor& c)
{
    Expr e;
    e.line = c.line();
    e.column = c.column();
    if (c.at_punct("{")) {
        e.kind = Expr::Kind::set;
        for (auto& w : word_set(c))
            e.args.push_back(Expr{Expr::Kind::atom, w, {}, e.line, e.column});
        return e;
    }
    e.text = c.word("expression");
    if (!c.at_punct("("))
        return e;
    e.kind = Expr::Kind::call;
    c.next();
    if (c.at_punct(")")) {
        c.next();
        return e;
    }
    while (true) {
        e.args.push_back(expression(c));
        if (c.at_punct(",")) {
            c.next();
            continue;
        }
        c.punct(")");
        return e;
    }
}

/// `ch=<..>` or `ch=*` entries; wildcards are dropped.
std::vector<std::pair<ChannelId, Interval>> assignments(Cursor& c)
{
    std::vector<std::pair<ChannelId, Interval>> out;
    while (c.at_any_word() && c.at_punct("=", 1)) {
        auto ch = channel(c);
        c.next();
        if (c.at_punct("*")) {
            c.next();
            continue;
        }
        out.emplace_back(ch, interval(c));
    }
    return out;
}

std::string render_interval(const Interval& iv)
{
    return to_string(iv);
}

std::string render_assignments(const std::vector<std::pair<ChannelId, Interval>>& as)
{
    std::string s;
    for (const auto& [ch, iv] : as)
        s += " " + ch.str() + "=" + render_interval(iv);
    return s;
}

// ---------------------------------------------------------------------------
// Blocks shared by architectures and scripts

struct Located {
    TableSpec spec;
    std::size_t line = 0;
};

/// lines[i] is the `machine NAME` header; leaves i on the `end` line.
Located machine_block(const std::vector<Line>& lines, std::size_t& i, std::vector<Diagnostic>& diags)
{
    Located out;
    out.line = lines[i].number;
    try {
        Cursor c(lines[i]);
        c.keyword("machine");
        out.spec.name = c.word("machine name");
        c.finish();
    } catch (const Failure& f) {
        diags.push_back(f.diagnostic);
    }
    bool seen_in = false, seen_out = false;
    for (++i; i < lines.size(); ++i) {
        Cursor c(lines[i]);
        try {
            auto kw = c.word("machine entry");
            if (kw == "end") {
                c.finish();
                if (!seen_in || !seen_out)
                    diags.push_back({out.line, 1, "machine '" + out.spec.name + "' must declare 'in' and 'out'"});
                return out;
            }
            if (kw == "in") {
                out.spec.inputs = channel_set(c);
                seen_in = true;
            } else if (kw == "out") {
                out.spec.outputs = channel_set(c);
                seen_out = true;
            } else if (kw == "states") {
                while (!c.done())
                    out.spec.states.push_back(c.word("state"));
            } else if (kw == "initial") {
                out.spec.initial = c.word("state");
            } else if (kw == "emit") {
                auto state = c.word("state");
                std::map<ChannelId, Interval> slice;
                for (auto& [ch, iv] : assignments(c))
                    slice[ch] = iv;
                out.spec.emits.emplace_back(state, std::move(slice));
            } else if (kw == "advance") {
                TableSpec::Rule rule;
                rule.from = c.word("state");
                if (c.at_word("emit") && !c.at_punct("=", 1)) {
                    c.next();
                    rule.emitted.fixed = assignments(c);
                }
                if (c.at_word("read") && !c.at_punct("=", 1)) {
                    c.next();
                    rule.read.fixed = assignments(c);
                }
                c.punct("->");
                while (!c.done())
                    rule.targets.push_back(c.word("target state"));
                if (rule.targets.empty())
                    c.fail("advance needs at least one target state");
                out.spec.rules.push_back(std::move(rule));
            } else {
                fail_at(lines[i].number, lines[i].tokens.front().column, "unknown machine entry '" + kw + "'");
            }
            c.finish();
        } catch (const Failure& f) {
            diags.push_back(f.diagnostic);
        }
    }
    diags.push_back({out.line, 1, "machine '" + out.spec.name + "' is missing 'end'"});
    return out;
}

std::string render_machine(const TableSpec& m)
{
    std::string s = "machine " + m.name + "\n";
    s += "  in " + to_string(m.inputs) + "\n";
    s += "  out " + to_string(m.outputs) + "\n";
    s += "  states";
    for (const auto& st : m.states)
        s += " " + st;
    s += "\n  initial " + m.initial + "\n";
    for (const auto& [st, slice] : m.emits) {
        s += "  emit " + st;
        for (const auto& [ch, iv] : slice)
            s += " " + ch.str() + "=" + render_interval(iv);
        s += "\n";
    }
    for (const auto& r : m.rules) {
        s += "  advance " + r.from;
        if (!r.emitted.fixed.empty())
            s += " emit" + render_assignments(r.emitted.fixed);
        if (!r.read.fixed.empty())
            s += " read" + render_assignments(r.read.fixed);
        s += " ->";
        for (const auto& t : r.targets)
            s += " " + t;
        s += "\n";
    }
    return s + "end\n";
}

/// `component NAME in {..} out {..} behavior EXPR`
ComponentDecl component_line(Cursor& c)
{
    ComponentDecl d;
    d.line = c.line();
    c.keyword("component");
    d.name = c.word("component name");
    c.keyword("in");
    d.in = channel_set(c);
    c.keyword("out");
    d.out = channel_set(c);
    c.keyword("behavior");
    d.behavior = expression(c);
    c.finish();
    return d;
}

std::string render_component(const ComponentDecl& d)
{
    return "component " + d.name + " in " + to_string(d.in) + " out " + to_string(d.out) + " behavior " +
           to_string(d.behavior);
}

/// `system in {..} out {..}`
std::pair<ChannelSet, ChannelSet> system_line(Cursor& c)
{
    c.keyword("system");
    c.keyword("in");
    auto in = channel_set(c);
    c.keyword("out");
    auto out = channel_set(c);
    c.finish();
    return {in, out};
}

// ---------------------------------------------------------------------------
// Expression builder

[[noreturn]] void expr_fail(const Expr& e, const std::string& message)
{
    fail_at(e.line, e.column, message);
}

void arity(const Expr& e, std::size_t n)
{
    if (e.args.size() != n)
        expr_fail(e, e.text + " takes " + std::to_string(n) + " argument" + (n == 1 ? "" : "s") + ", got " +
                         std::to_string(e.args.size()));
}

ChannelId channel_arg(const Expr& e)
{
    if (e.kind != Expr::Kind::atom)
        expr_fail(e, "expected a channel name, found " + to_string(e));
    try {
        return ChannelId(e.text);
    } catch (const Error& err) {
        expr_fail(e, err.what());
    }
}

ChannelSet set_arg(const Expr& e)
{
    if (e.kind != Expr::Kind::set)
        expr_fail(e, "expected a channel set, found " + to_string(e));
    std::vector<ChannelId> ids;
    for (const auto& a : e.args)
        ids.push_back(channel_arg(a));
    return ChannelSet(std::move(ids));
}

DataMap data_map_arg(const Expr& e)
{
    if (e.kind != Expr::Kind::set)
        expr_fail(e, "expected a set of a:b pairs, found " + to_string(e));
    DataMap f;
    for (const auto& a : e.args) {
        auto colon = a.text.find(':');
        int from = 0, to = 0;
        bool ok = colon != std::string::npos;
        if (ok) {
            auto r1 = std::from_chars(a.text.data(), a.text.data() + colon, from);
            auto r2 = std::from_chars(a.text.data() + colon + 1, a.text.data() + a.text.size(), to);
            ok = r1.ec == std::errc() && r1.ptr == a.text.data() + colon && r2.ec == std::errc() &&
                 r2.ptr == a.text.data() + a.text.size();
        }
        if (!ok)
            expr_fail(a, "expected a pair like 0:1, found '" + a.text + "'");
        f[from] = to;
    }
    return f;
}

IntervalTransducer build(const Expr& e, const BuildContext& ctx)
{
    if (e.kind == Expr::Kind::set)
        expr_fail(e, "expected a machine, found a set");
    if (e.kind == Expr::Kind::atom) {
        auto it = ctx.machines.find(e.text);
        if (it == ctx.machines.end())
            expr_fail(e, "unknown machine '" + e.text + "'");
        return make_table(it->second);
    }
    const auto& a = e.args;
    const auto& name = e.text;
    auto burst = ctx.bounds.burst();
    if (name == "chaos") {
        arity(e, 2);
        return chaos(set_arg(a[0]), set_arg(a[1]), ctx.bounds);
    }
    if (name == "silent") {
        arity(e, 2);
        return silent(set_arg(a[0]), set_arg(a[1]));
    }
    if (name == "delay_copy") {
        arity(e, 2);
        return delay_copy(channel_arg(a[0]), channel_arg(a[1]));
    }
    if (name == "compose") {
        if (a.empty())
            expr_fail(e, "compose needs at least one machine");
        std::vector<IntervalTransducer> parts;
        for (const auto& x : a)
            parts.push_back(build(x, ctx));
        return compose(parts);
    }
    if (name == "adapt") {
        arity(e, 3);
        return adapt(build(a[0], ctx), set_arg(a[1]), set_arg(a[2]));
    }
    if (name == "with_free_output") {
        arity(e, 2);
        return with_free_output(build(a[0], ctx), channel_arg(a[1]), ctx.bounds);
    }
    if (name == "without_input") {
        arity(e, 2);
        return without_input(build(a[0], ctx), channel_arg(a[1]));
    }
    if (name == "rename") {
        arity(e, 3);
        return rename(build(a[0], ctx), channel_arg(a[1]), channel_arg(a[2]));
    }
    if (name == "preprocessor") {
        if (a.size() != 2 && a.size() != 3)
            expr_fail(e, "preprocessor takes 2 or 3 arguments, got " + std::to_string(a.size()));
        return preprocessor(channel_arg(a[0]), channel_arg(a[1]), burst, a.size() == 3 ? data_map_arg(a[2]) : DataMap{});
    }
    if (name == "encoder") {
        arity(e, 2);
        return encoder(channel_arg(a[0]), channel_arg(a[1]), burst);
    }
    if (name == "decoder") {
        arity(e, 2);
        return decoder(channel_arg(a[0]), channel_arg(a[1]), burst);
    }
    if (name == "copier") {
        arity(e, 2);
        return copier(channel_arg(a[0]), channel_arg(a[1]), burst);
    }
    if (name == "database" || name == "decoding_database") {
        arity(e, 3);
        return database(channel_arg(a[0]), channel_arg(a[1]), channel_arg(a[2]), burst, name == "decoding_database");
    }
    expr_fail(e, "unknown machine constructor '" + name + "'");
}

InvariantPtr build_inv(const Expr& e)
{
    if (e.kind == Expr::Kind::atom && e.text == "true")
        return true_invariant();
    if (e.kind == Expr::Kind::call && e.text == "silent") {
        arity(e, 1);
        return silent_invariant(channel_arg(e.args[0]));
    }
    if (e.kind == Expr::Kind::call && e.text == "roundtrip") {
        arity(e, 2);
        return roundtrip_invariant(channel_arg(e.args[0]), channel_arg(e.args[1]));
    }
    expr_fail(e, "unknown invariant " + to_string(e));
}

/// Runs `f`, turning located failures and library errors into diagnostics.
template <class F>
void collect(std::vector<Diagnostic>& diags, std::size_t line, std::size_t column, F&& f)
{
    try {
        f();
    } catch (const Failure& fl) {
        diags.push_back(fl.diagnostic);
    } catch (const Error& e) {
        diags.push_back({line, column, e.what()});
    }
}

Component build_component(const ComponentDecl& d, const BuildContext& ctx)
{
    return make_component(d.name, d.in, d.out, build(d.behavior, ctx));
}

} // namespace

// ---------------------------------------------------------------------------
// Expressions

std::string to_string(const Expr& e)
{
    switch (e.kind) {
    case Expr::Kind::atom:
        return e.text;
    case Expr::Kind::set: {
        std::string s = "{";
        for (std::size_t i = 0; i < e.args.size(); ++i)
            s += (i ? ", " : "") + to_string(e.args[i]);
        return s + "}";
    }
    case Expr::Kind::call: {
        std::string s = e.text + "(";
        for (std::size_t i = 0; i < e.args.size(); ++i)
            s += (i ? ", " : "") + to_string(e.args[i]);
        return s + ")";
    }
    }
    return {};
}

Expr parse_expression(std::string_view text)
{
    std::vector<Diagnostic> diags;
    auto lines = lex(text, diags);
    if (diags.empty() && lines.size() != 1)
        diags.push_back({lines.empty() ? 1 : lines[1].number, 1, "expected one expression on one line"});
    if (!diags.empty())
        throw ParseError(diags);
    try {
        Cursor c(lines.front());
        auto e = expression(c);
        c.finish();
        return e;
    } catch (const Failure& f) {
        throw ParseError({f.diagnostic});
    }
}

IntervalTransducer build_machine(const Expr& e, const BuildContext& ctx)
{
    try {
        return build(e, ctx);
    } catch (const Failure& f) {
        throw DomainError(std::to_string(f.diagnostic.line) + ":" + std::to_string(f.diagnostic.column) + ": " +
                          f.diagnostic.message);
    }
}

InvariantPtr build_invariant(const Expr& e, const BuildContext&)
{
    try {
        return build_inv(e);
    } catch (const Failure& f) {
        throw DomainError(std::to_string(f.diagnostic.line) + ":" + std::to_string(f.diagnostic.column) + ": " +
                          f.diagnostic.message);
    }
}

// ---------------------------------------------------------------------------
// Architectures

ArchitectureDocument parse_architecture(std::string_view text)
{
    std::vector<Diagnostic> diags;
    auto lines = lex(text, diags);
    ArchitectureDocument doc;
    std::vector<std::size_t> machine_lines;
    bool have_system = false, have_bounds = false;
    std::size_t system_line_no = 0;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& first = lines[i].tokens.front();
        if (first.kind == Token::Kind::word && first.text == "machine") {
            auto m = machine_block(lines, i, diags);
            doc.machines.push_back(std::move(m.spec));
            machine_lines.push_back(m.line);
            continue;
        }
        Cursor c(lines[i]);
        collect(diags, lines[i].number, 1, [&] {
            auto kw = c.word("declaration");
            if (kw == "bounds") {
                if (have_bounds)
                    fail_at(lines[i].number, 1, "duplicate bounds declaration");
                have_bounds = true;
                while (!c.done()) {
                    auto key = c.word("'horizon' or 'burst'");
                    if (key == "horizon")
                        doc.horizon = number(c, "horizon");
                    else if (key == "burst")
                        doc.burst = number(c, "burst");
                    else
                        fail_at(lines[i].number, c.column(), "unknown bound '" + key + "'");
                }
            } else if (kw == "alphabet") {
                auto col = c.column();
                auto ch = channel(c);
                std::vector<Message> msgs;
                while (!c.done())
                    msgs.push_back(c.word("message"));
                std::sort(msgs.begin(), msgs.end());
                msgs.erase(std::unique(msgs.begin(), msgs.end()), msgs.end());
                if (!doc.alphabets.emplace(ch, std::move(msgs)).second)
                    fail_at(lines[i].number, col, "duplicate alphabet for channel '" + ch.str() + "'");
            } else if (kw == "component") {
                Cursor again(lines[i]);
                doc.components.push_back(component_line(again));
            } else if (kw == "system") {
                Cursor again(lines[i]);
                auto [in, out] = system_line(again);
                if (have_system)
                    fail_at(lines[i].number, 1, "duplicate system declaration");
                have_system = true;
                system_line_no = lines[i].number;
                doc.system_in = in;
                doc.system_out = out;
            } else if (kw == "end") {
                fail_at(lines[i].number, 1, "'end' outside a block");
            } else {
                fail_at(lines[i].number, 1, "unknown declaration '" + kw + "'");
            }
        });
    }
    if (!have_system)
        diags.push_back({lines.empty() ? 1 : lines.back().number, 1, "no system defined"});
    if (!diags.empty())
        throw ParseError(diags);

    // Resolution: names, alphabets, machines and component interfaces.
    std::set<std::string> names;
    for (const auto& d : doc.components)
        if (!names.insert(d.name).second)
            diags.push_back({d.line, 1, "duplicate component name '" + d.name +
                                            "' violates consistency condition (1): component names are unique"});
    std::set<std::string> machine_names;
    for (std::size_t k = 0; k < doc.machines.size(); ++k) {
        const auto& m = doc.machines[k];
        if (!machine_names.insert(m.name).second)
            diags.push_back({machine_lines[k], 1, "duplicate machine name '" + m.name + "'"});
        collect(diags, machine_lines[k], 1, [&] { make_table(m); });
        auto check = [&](const ChannelId& ch, const Interval& iv) {
            auto it = doc.alphabets.find(ch);
            if (it == doc.alphabets.end()) {
                diags.push_back({machine_lines[k], 1,
                                 "machine '" + m.name + "' uses channel '" + ch.str() + "' which has no alphabet"});
                return;
            }
            for (const auto& msg : iv)
                if (!std::binary_search(it->second.begin(), it->second.end(), msg))
                    diags.push_back({machine_lines[k], 1,
                                     "machine '" + m.name + "' sends '" + msg + "' outside the alphabet of '" +
                                         ch.str() + "'"});
        };
        for (const auto& [st, slice] : m.emits)
            for (const auto& [ch, iv] : slice)
                check(ch, iv);
        for (const auto& r : m.rules) {
            for (const auto& [ch, iv] : r.emitted.fixed)
                check(ch, iv);
            for (const auto& [ch, iv] : r.read.fixed)
                check(ch, iv);
        }
    }
    auto need_alphabet = [&](const ChannelSet& set, std::size_t line, const std::string& where) {
        for (const auto& ch : set)
            if (!doc.alphabets.contains(ch))
                diags.push_back({line, 1, "channel '" + ch.str() + "' of " + where + " has no alphabet"});
    };
    need_alphabet(doc.system_in, system_line_no, "the system");
    need_alphabet(doc.system_out, system_line_no, "the system");
    if (diags.empty()) {
        auto ctx = context_of(doc);
        for (const auto& d : doc.components) {
            need_alphabet(d.in, d.line, "component '" + d.name + "'");
            need_alphabet(d.out, d.line, "component '" + d.name + "'");
            collect(diags, d.line, d.behavior.column, [&] { build_component(d, ctx); });
        }
    }
    if (!diags.empty())
        throw ParseError(diags);
    return doc;
}

std::string render_architecture(const ArchitectureDocument& doc)
{
    std::string s = "bounds horizon " + std::to_string(doc.horizon) + " burst " + std::to_string(doc.burst) + "\n";
    if (!doc.alphabets.empty())
        s += "\n";
    for (const auto& [ch, msgs] : doc.alphabets) {
        s += "alphabet " + ch.str();
        for (const auto& m : msgs)
            s += " " + m;
        s += "\n";
    }
    for (const auto& m : doc.machines)
        s += "\n" + render_machine(m);
    if (!doc.components.empty())
        s += "\n";
    for (const auto& d : doc.components)
        s += render_component(d) + "\n";
    s += "\nsystem in " + to_string(doc.system_in) + " out " + to_string(doc.system_out) + "\n";
    return s;
}

EnumerationBounds bounds_of(const ArchitectureDocument& doc, const BoundsOverride& override)
{
    return EnumerationBounds(override.horizon.value_or(doc.horizon), override.burst.value_or(doc.burst),
                             doc.alphabets);
}

BuildContext context_of(const ArchitectureDocument& doc, const BoundsOverride& override)
{
    BuildContext ctx{bounds_of(doc, override), {}};
    for (const auto& m : doc.machines)
        ctx.machines.emplace(m.name, m);
    return ctx;
}

System build_system(const ArchitectureDocument& doc, const BoundsOverride& override)
{
    auto ctx = context_of(doc, override);
    std::vector<Component> comps;
    for (const auto& d : doc.components)
        comps.push_back(make_component(d.name, d.in, d.out, build_machine(d.behavior, ctx)));
    return System(doc.system_in, doc.system_out, std::move(comps), ctx.bounds);
}

namespace {

void add_tables(std::vector<TableSpec>& out, const IntervalTransducer& m)
{
    for (auto& t : tables_used(m))
        if (std::none_of(out.begin(), out.end(), [&](const TableSpec& x) { return x.name == t.name; }))
            out.push_back(std::move(t));
}

ComponentDecl decl_of(const Component& c)
{
    return ComponentDecl{c.name, c.in, c.out, parse_expression(c.behav.describe()), 0};
}

} // namespace

ArchitectureDocument document_of(const System& s)
{
    ArchitectureDocument doc;
    doc.horizon = s.bounds().horizon();
    doc.burst = s.bounds().burst();
    doc.alphabets = s.bounds().alphabets();
    for (const auto& c : s.components()) {
        add_tables(doc.machines, c.behav);
        doc.components.push_back(decl_of(c));
    }
    doc.system_in = s.in();
    doc.system_out = s.out();
    return doc;
}

// ---------------------------------------------------------------------------
// Scripts

std::vector<int> ScriptDocument::stages() const
{
    std::vector<int> out;
    for (const auto& s : steps)
        if (std::find(out.begin(), out.end(), s.stage) == out.end())
            out.push_back(s.stage);
    return out;
}

namespace {

/// Parses the rule arguments of a `step` line; `lines[i]` is that line.
ScriptStep step_line(const std::vector<Line>& lines, std::size_t& i, std::vector<Diagnostic>& diags)
{
    Cursor c(lines[i]);
    ScriptStep st;
    st.line = lines[i].number;
    c.keyword("step");
    auto stage_col = c.column();
    auto stage = number(c, "stage number");
    if (stage > 1000000)
        fail_at(st.line, stage_col, "stage number too large");
    st.stage = static_cast<int>(stage);
    auto rule_col = c.column();
    auto rule_text = c.word("rule name");
    auto rule = parse_rule_name(rule_text);
    if (!rule)
        fail_at(st.line, rule_col, "unknown rule '" + rule_text + "'");
    st.rule = *rule;
    switch (st.rule) {
    case Rule::refine_behavior:
        st.component = c.word("component name");
        st.machine = expression(c);
        break;
    case Rule::refine_with_invariant:
        st.component = c.word("component name");
        st.machine = expression(c);
        if (c.at_word("invariant")) {
            c.next();
            st.invariant = expression(c);
        }
        break;
    case Rule::add_output:
    case Rule::remove_output:
    case Rule::add_input:
    case Rule::remove_input:
        st.component = c.word("component name");
        st.channel = channel(c);
        break;
    case Rule::add_component:
    case Rule::remove_component:
        st.component = c.word("component name");
        break;
    case Rule::fold:
        st.component = c.word("new component name");
        st.members = word_set(c);
        c.keyword("in");
        st.in = channel_set(c);
        c.keyword("out");
        st.out = channel_set(c);
        break;
    case Rule::rename:
        st.channel = channel(c);
        st.new_channel = channel(c);
        break;
    case Rule::expand: {
        st.component = c.word("component name");
        c.finish();
        bool have_system = false;
        for (++i; i < lines.size(); ++i) {
            Cursor b(lines[i]);
            try {
                if (b.at_word("end")) {
                    b.next();
                    b.finish();
                    if (!have_system)
                        fail_at(lines[i].number, 1, "expand block lacks a system line");
                    return st;
                }
                if (b.at_word("component")) {
                    st.sub_components.push_back(component_line(b));
                } else if (b.at_word("system")) {
                    auto [in, out] = system_line(b);
                    st.sub_in = in;
                    st.sub_out = out;
                    have_system = true;
                } else {
                    b.fail("expected 'component', 'system' or 'end' in an expand block");
                }
            } catch (const Failure& f) {
                diags.push_back(f.diagnostic);
            }
        }
        fail_at(st.line, 1, "expand block is missing 'end'");
    }
    }
    c.finish();
    return st;
}

std::string render_step(const ScriptStep& st)
{
    std::string s = "step " + std::to_string(st.stage) + " " + rule_name(st.rule);
    auto ch = [](const std::optional<ChannelId>& c) { return c ? c->str() : std::string("?"); };
    switch (st.rule) {
    case Rule::refine_behavior:
    case Rule::refine_with_invariant:
        s += " " + st.component + " " + (st.machine ? to_string(*st.machine) : "?");
        if (st.invariant)
            s += " invariant " + to_string(*st.invariant);
        break;
    case Rule::add_output:
    case Rule::remove_output:
    case Rule::add_input:
    case Rule::remove_input:
        s += " " + st.component + " " + ch(st.channel);
        break;
    case Rule::add_component:
    case Rule::remove_component:
        s += " " + st.component;
        break;
    case Rule::fold: {
        s += " " + st.component + " {";
        for (std::size_t k = 0; k < st.members.size(); ++k)
            s += (k ? ", " : "") + st.members[k];
        s += "} in " + to_string(st.in) + " out " + to_string(st.out);
        break;
    }
    case Rule::rename:
        s += " " + ch(st.channel) + " " + ch(st.new_channel);
        break;
    case Rule::expand:
        s += " " + st.component + "\n";
        for (const auto& d : st.sub_components)
            s += "  " + render_component(d) + "\n";
        s += "  system in " + to_string(st.sub_in) + " out " + to_string(st.sub_out) + "\nend";
        break;
    }
    return s + "\n";
}

} // namespace

ScriptDocument parse_script(std::string_view text)
{
    std::vector<Diagnostic> diags;
    auto lines = lex(text, diags);
    ScriptDocument doc;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& first = lines[i].tokens.front();
        if (first.kind == Token::Kind::word && first.text == "machine") {
            doc.machines.push_back(machine_block(lines, i, diags).spec);
            continue;
        }
        if (first.kind == Token::Kind::word && first.text == "step") {
            try {
                doc.steps.push_back(step_line(lines, i, diags));
            } catch (const Failure& f) {
                diags.push_back(f.diagnostic);
            }
            continue;
        }
        diags.push_back({lines[i].number, first.column, "expected 'step' or 'machine', found '" + first.text + "'"});
    }
    if (!diags.empty())
        throw ParseError(diags);
    return doc;
}

std::string render_script(const ScriptDocument& doc)
{
    std::string s;
    for (const auto& m : doc.machines)
        s += render_machine(m) + "\n";
    for (const auto& st : doc.steps)
        s += render_step(st);
    return s;
}

void resolve_script(const ScriptDocument& script, const ArchitectureDocument& arch)
{
    std::vector<std::string> names;
    for (const auto& d : arch.components)
        names.push_back(d.name);
    auto has = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
    auto drop = [&](const std::string& n) { names.erase(std::remove(names.begin(), names.end(), n), names.end()); };
    std::vector<Diagnostic> diags;
    auto unknown = [&](const ScriptStep& st, const std::string& n) {
        diags.push_back({st.line, 1,
                         "step " + std::to_string(st.stage) + " " + rule_name(st.rule) + ": no component named '" + n +
                             "' at this point of the script"});
    };
    for (const auto& st : script.steps) {
        switch (st.rule) {
        case Rule::add_component:
            if (!has(st.component))
                names.push_back(st.component);
            break;
        case Rule::remove_component:
            if (!has(st.component))
                unknown(st, st.component);
            drop(st.component);
            break;
        case Rule::expand:
            if (!has(st.component))
                unknown(st, st.component);
            drop(st.component);
            for (const auto& d : st.sub_components)
                names.push_back(d.name);
            break;
        case Rule::fold:
            for (const auto& m : st.members) {
                if (!has(m))
                    unknown(st, m);
                drop(m);
            }
            names.push_back(st.component);
            break;
        case Rule::rename:
            break;
        default:
            if (!has(st.component))
                unknown(st, st.component);
            break;
        }
    }
    if (!diags.empty())
        throw ParseError(diags);
}

std::vector<RefinementStep> build_steps(const ScriptDocument& script, const ArchitectureDocument& arch,
                                        const BoundsOverride& override)
{
    auto ctx = context_of(arch, override);
    for (const auto& m : script.machines)
        ctx.machines.insert_or_assign(m.name, m);
    std::vector<Diagnostic> diags;
    std::vector<RefinementStep> out;
    for (const auto& st : script.steps) {
        RefinementStep r;
        r.rule = st.rule;
        r.stage = st.stage;
        r.component = st.component;
        r.channel = st.channel;
        r.new_channel = st.new_channel;
        r.members = st.members;
        r.in = st.in;
        r.out = st.out;
        collect(diags, st.line, 1, [&] {
            if (st.machine)
                r.machine = build(*st.machine, ctx);
            if (st.invariant)
                r.invariant = build_inv(*st.invariant);
            if (st.rule == Rule::expand) {
                std::vector<Component> comps;
                for (const auto& d : st.sub_components)
                    comps.push_back(build_component(d, ctx));
                r.subsystem = System(st.sub_in, st.sub_out, std::move(comps), ctx.bounds);
            }
        });
        out.push_back(std::move(r));
    }
    if (!diags.empty())
        throw ParseError(diags);
    return out;
}

ScriptDocument script_of(const std::vector<RefinementStep>& steps)
{
    ScriptDocument doc;
    for (const auto& r : steps) {
        ScriptStep st;
        st.stage = r.stage;
        st.rule = r.rule;
        st.component = r.component;
        st.channel = r.channel;
        st.new_channel = r.new_channel;
        st.members = r.members;
        st.in = r.in;
        st.out = r.out;
        if (r.machine) {
            add_tables(doc.machines, *r.machine);
            st.machine = parse_expression(r.machine->describe());
        }
        if (r.invariant)
            st.invariant = parse_expression(r.invariant->describe());
        if (r.subsystem) {
            for (const auto& c : r.subsystem->components()) {
                add_tables(doc.machines, c.behav);
                st.sub_components.push_back(decl_of(c));
            }
            st.sub_in = r.subsystem->in();
            st.sub_out = r.subsystem->out();
        }
        doc.steps.push_back(std::move(st));
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Environments

NamedStreamTuple parse_environment(std::string_view text, const ChannelSet& in, std::size_t horizon)
{
    std::vector<Diagnostic> diags;
    auto lines = lex(text, diags);
    std::map<ChannelId, TimedStream> streams;
    for (const auto& line : lines) {
        Cursor c(line);
        collect(diags, line.number, 1, [&] {
            c.keyword("stream");
            auto col = c.column();
            auto ch = channel(c);
            if (!in.contains(ch))
                fail_at(line.number, col, "channel '" + ch.str() + "' is not a system input " + to_string(in));
            if (streams.contains(ch))
                fail_at(line.number, col, "duplicate stream for channel '" + ch.str() + "'");
            std::vector<Interval> ivs;
            while (!c.done())
                ivs.push_back(interval(c));
            ivs.resize(horizon);
            streams.emplace(ch, TimedStream(std::move(ivs)));
        });
    }
    if (!diags.empty())
        throw ParseError(diags);
    for (const auto& ch : in)
        if (!streams.contains(ch))
            streams.emplace(ch, TimedStream::silent(horizon));
    return NamedStreamTuple(horizon, std::move(streams));
}

std::string render_environment(const NamedStreamTuple& env)
{
    std::string s;
    for (const auto& [ch, x] : env.bindings()) {
        s += "stream " + ch.str();
        for (const auto& iv : x.intervals())
            s += " " + render_interval(iv);
        s += "\n";
    }
    return s;
}

} // namespace flowrefine
