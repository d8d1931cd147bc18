#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "lr1/grammar.hpp"

namespace lr1 {

const char* to_string(SymbolKind kind) {
    switch (kind) {
    case SymbolKind::nonterminal: return "nonterminal";
    case SymbolKind::plain: return "plain";
    case SymbolKind::reserved: return "reserved";
    case SymbolKind::generic: return "generic";
    case SymbolKind::error: return "builtin-error";
    case SymbolKind::eof: return "builtin-eof";
    }
    return "?";
}

std::optional<SymbolKind> symbol_kind_from_string(std::string_view s) {
    for (auto k : {SymbolKind::nonterminal, SymbolKind::plain, SymbolKind::reserved, SymbolKind::generic,
                   SymbolKind::error, SymbolKind::eof})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

const char* to_string(Assoc a) {
    switch (a) {
    case Assoc::left: return "left";
    case Assoc::right: return "right";
    case Assoc::nonassoc: return "noassoc";
    }
    return "?";
}

int Symbol::subtoken_number(std::string_view literal) const {
    for (std::size_t i = 0; i < subtokens.size(); ++i)
        if (subtokens[i] == literal) return static_cast<int>(i);
    return -1;
}

int Production::selector_position() const {
    for (std::size_t i = 0; i < rhs.size(); ++i)
        if (rhs[i].selector != Selector::none) return static_cast<int>(i) + 1;
    return 0;
}

Selector Production::selector() const {
    int pos = selector_position();
    return pos ? rhs[pos - 1].selector : Selector::none;
}

int Production::selector_stack_offset() const {
    int pos = selector_position();
    return pos ? static_cast<int>(rhs.size()) - pos : -1;
}

const MapEntry* MapRule::find(TokenRef ref) const {
    for (const auto& e : entries)
        if (e.subtoken == ref) return &e;
    return nullptr;
}

std::optional<SymbolId> GrammarModel::find(SymbolKind kind, std::string_view name) const {
    for (const auto& s : symbols)
        if (s.kind == kind && s.name == name) return s.id;
    return std::nullopt;
}

std::optional<SymbolId> GrammarModel::find_terminal(std::string_view name) const {
    for (int i = 0; i < terminal_count; ++i)
        if (symbols[i].name == name && symbols[i].kind != SymbolKind::reserved) return i;
    for (int i = 0; i < terminal_count; ++i)
        if (symbols[i].name == name) return i;
    return std::nullopt;
}

const MapRule* GrammarModel::find_map(std::string_view name) const {
    for (const auto& m : maps)
        if (m.name == name) return &m;
    return nullptr;
}

std::optional<int> GrammarModel::level_of(TokenRef ref) const {
    for (std::size_t i = 0; i < precedence.size(); ++i)
        for (const auto& r : precedence[i].members)
            if (r == ref) return static_cast<int>(i);
    return std::nullopt;
}

int GrammarModel::user_production_count() const {
    return static_cast<int>(productions.size()) - (augmented ? 1 : 0);
}

std::vector<int> GrammarModel::productions_of(SymbolId nonterminal) const {
    std::vector<int> out;
    for (const auto& p : productions)
        if (p.lhs == nonterminal) out.push_back(p.index);
    return out;
}

namespace {

std::string quote(std::string_view lit) {
    std::string out = "'";
    for (char c : lit) {
        switch (c) {
        case '\'': out += "\\'"; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "'";
}

}  // namespace

std::string GrammarModel::spell(SymbolId id) const {
    const auto& s = symbol(id);
    return s.kind == SymbolKind::reserved ? quote(s.name) : s.name;
}

std::string GrammarModel::spell(TokenRef ref) const {
    if (!ref.is_subtoken()) return spell(ref.symbol);
    const auto& s = symbol(ref.symbol);
    auto lit = ref.subtoken < static_cast<int>(s.subtokens.size()) ? s.subtokens[ref.subtoken] : "?";
    return s.name + "." + quote(lit);
}

std::string GrammarModel::display(SymbolId id) const { return symbol(id).name; }

GrammarModel augment(GrammarModel model) {
    if (model.augmented) return model;
    if (model.productions.empty()) throw GrammarError({1, 1}, "grammar has no productions");
    auto first_lhs = model.productions.front().lhs;
    if (model.symbol(first_lhs).kind != SymbolKind::nonterminal)
        throw GrammarError(model.productions.front().pos, "the first production must define a nonterminal");
    if (model.find(SymbolKind::nonterminal, "<GOAL>"))
        throw GrammarError({1, 1}, "<GOAL> is reserved for the augmented start production");

    Symbol goal;
    goal.id = static_cast<SymbolId>(model.symbols.size());
    goal.name = "<GOAL>";
    goal.kind = SymbolKind::nonterminal;
    model.symbols.push_back(goal);

    Production p0;
    p0.index = 0;
    p0.lhs = goal.id;
    p0.rhs = {{eof_symbol, Selector::none, -1}, {first_lhs, Selector::none, -1}, {eof_symbol, Selector::none, -1}};
    model.productions.insert(model.productions.begin(), std::move(p0));
    for (std::size_t i = 0; i < model.productions.size(); ++i) model.productions[i].index = static_cast<int>(i);
    model.goal = goal.id;
    model.user_goal = first_lhs;
    model.augmented = true;
    return model;
}

namespace {

bool oracle_spelling_ok(const GrammarModel& m, const OracleRule& r) {
    const auto& x = m.symbol(r.x.symbol);
    const auto& y = m.symbol(r.y.symbol);
    if (r.x.is_subtoken()) {
        if (r.y.is_subtoken() || y.kind != SymbolKind::reserved) return false;
        return r.x.subtoken < static_cast<int>(x.subtokens.size()) && x.subtokens[r.x.subtoken] == y.name;
    }
    if (x.kind == SymbolKind::plain || x.kind == SymbolKind::generic)
        return !r.y.is_subtoken() && y.kind == SymbolKind::plain;
    if (x.kind == SymbolKind::reserved) {
        if (y.kind != SymbolKind::generic) return false;
        if (r.y.is_subtoken())
            return r.y.subtoken < static_cast<int>(y.subtokens.size()) && y.subtokens[r.y.subtoken] == x.name;
        return y.subtoken_number(x.name) >= 0;
    }
    return false;
}

std::string listing_name(const GrammarModel& m, TokenRef r) {
    if (r.is_subtoken()) {
        const auto& s = m.symbol(r.symbol);
        if (r.subtoken < static_cast<int>(s.subtokens.size())) return "'" + s.subtokens[r.subtoken] + "'";
    }
    const auto& s = m.symbol(r.symbol);
    return s.kind == SymbolKind::reserved ? "'" + s.name + "'" : s.name;
}

}  // namespace

std::vector<Diagnostic> validate(const GrammarModel& m) {
    std::vector<Diagnostic> out = m.deferred;
    auto err = [&](std::string code, SourcePos pos, std::string msg) {
        out.push_back({Severity::error, std::move(code), pos, std::move(msg)});
    };

    if (m.user_production_count() == 0) err("empty-grammar", {1, 1}, "grammar has no productions");

    std::set<SymbolId> defined;
    for (const auto& p : m.productions) defined.insert(p.lhs);

    for (const auto& p : m.productions) {
        if (m.symbol(p.lhs).kind == SymbolKind::error)
            err("error-lhs", p.pos, "ERROR cannot be the left-hand side of a production");
        int selectors = 0;
        for (const auto& e : p.rhs) {
            const auto& s = m.symbol(e.symbol);
            if (e.misplaced_subtoken >= 0)
                err("subtoken-in-production", p.pos,
                    "subtoken " + m.spell(TokenRef{e.symbol, e.misplaced_subtoken}) +
                        " cannot appear in a production; use %use/%ref " + s.name);
            if (s.kind == SymbolKind::nonterminal && !defined.count(e.symbol))
                err("undefined-nonterminal", p.pos, s.name + " has no productions");
            if (e.selector != Selector::none) ++selectors;
        }
        if (selectors > 1) err("multiple-selectors", p.pos, "a production may select at most one generic token");
        if (p.prec && !m.level_of(*p.prec))
            err("prec-without-level", p.pos, "%prec target " + m.spell(*p.prec) + " has no precedence level");
        if (p.action.kind == TreeAction::Kind::map) {
            const auto* map = m.find_map(p.action.name);
            if (!map) {
                err("unknown-map", p.pos, "tree action names undeclared map '" + p.action.name + "'");
            } else if (!p.selector_position()) {
                err("map-without-selector", p.pos, "=> %map " + p.action.name + " needs a %use or %ref element");
            } else {
                auto gen = p.rhs[p.selector_position() - 1].symbol;
                const auto& g = m.symbol(gen);
                std::string missing;
                for (std::size_t k = 0; k < g.subtokens.size(); ++k)
                    if (!map->find({gen, static_cast<int>(k)})) missing += " " + m.spell(TokenRef{gen, int(k)});
                if (!missing.empty())
                    err("map-coverage", p.pos, "map '" + map->name + "' lacks entries for" + missing);
            }
        }
    }

    for (const auto& mr : m.maps) {
        std::set<TokenRef> seen;
        for (const auto& e : mr.entries) {
            if (e.subtoken.subtoken < 0) {
                err("undeclared-subtoken", e.pos,
                    "map '" + mr.name + "' entry " + m.symbol(e.subtoken.symbol).name + ".'" + e.literal +
                        "' is not a declared subtoken");
                continue;
            }
            if (!seen.insert(e.subtoken).second)
                err("duplicate-map-entry", e.pos, "map '" + mr.name + "' lists " + m.spell(e.subtoken) + " twice");
        }
    }

    std::map<TokenRef, int> level_seen;
    for (std::size_t i = 0; i < m.precedence.size(); ++i)
        for (const auto& r : m.precedence[i].members) {
            if (r.symbol == error_symbol || r.symbol == eof_symbol ||
                m.symbol(r.symbol).kind == SymbolKind::nonterminal)
                err("bad-precedence-member", m.precedence[i].pos, m.spell(r) + " cannot have a precedence");
            if (!level_seen.emplace(r, static_cast<int>(i)).second)
                err("duplicate-precedence", m.precedence[i].pos, m.spell(r) + " appears in more than one level");
        }

    for (const auto& o : m.oracles)
        if (!oracle_spelling_ok(m, o))
            err("oracle-spelling", o.pos,
                listing_name(m, o.x) + " cannot be changed to " + listing_name(m, o.y) +
                    ": the scanned text is immutable");

    return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const auto& d) { return d.severity == Severity::error; });
}

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
    std::ostringstream os;
    os << file << ":" << d.pos.line << ":" << d.pos.column << ": "
       << (d.severity == Severity::error ? "error" : d.severity == Severity::warning ? "warning" : "note") << ": "
       << d.message << " [" << d.code << "]";
    return os.str();
}

std::string to_text(const GrammarModel& m) {
    std::ostringstream os;
    for (const auto& s : m.symbols)
        if (s.kind == SymbolKind::generic) {
            os << "%generic " << s.name << " :";
            for (const auto& lit : s.subtokens) os << " " << quote(lit);
            os << " ;\n";
        }
    const Production* prev = nullptr;
    for (const auto& p : m.productions) {
        if (m.augmented && p.index == 0) continue;
        if (prev && prev->lhs == p.lhs) {
            os << "\n  |";
        } else {
            if (prev) os << " ;\n";
            os << (p.lhs == error_symbol ? "ERROR" : m.symbol(p.lhs).name) << " :";
        }
        for (const auto& e : p.rhs) {
            if (e.selector == Selector::use) os << " %use";
            if (e.selector == Selector::ref) os << " %ref";
            if (e.misplaced_subtoken >= 0) os << " " << m.spell(TokenRef{e.symbol, e.misplaced_subtoken});
            else os << " " << m.spell(e.symbol);
        }
        if (p.prec) os << " %prec " << m.spell(*p.prec);
        if (p.action.kind == TreeAction::Kind::node) os << " => " << p.action.name;
        if (p.action.kind == TreeAction::Kind::map) os << " => %map " << p.action.name;
        prev = &p;
    }
    if (prev) os << " ;\n";
    for (const auto& lvl : m.precedence) {
        os << "%" << to_string(lvl.assoc) << " :";
        for (const auto& r : lvl.members) os << " " << m.spell(r);
        os << " ;\n";
    }
    for (const auto& mr : m.maps) {
        os << "%map " << mr.name << " :";
        bool first = true;
        for (const auto& e : mr.entries) {
            os << (first ? " " : "\n  | ") << m.symbol(e.subtoken.symbol).name << "." << quote(e.literal) << " => "
               << e.node;
            first = false;
        }
        os << " ;\n";
    }
    for (const auto& o : m.oracles) {
        os << "%oracle " << m.spell(o.x) << " : " << m.spell(o.y);
        if (!o.body.empty()) os << " %{" << o.body << "%}";
        os << " ;\n";
    }
    return os.str();
}

}  // namespace lr1
