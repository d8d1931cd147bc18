#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lr1/tables.hpp"

namespace lr1 {

using nlohmann::json;

const std::string* TableMap::lookup(TokenRef subtoken) const {
    for (const auto& e : entries)
        if (e.subtoken == subtoken) return &e.node;
    return nullptr;
}

std::optional<int> ParseTables::level_of(TokenRef ref) const {
    auto it = levels_.find(ref);
    if (it == levels_.end()) return std::nullopt;
    return it->second;
}

const TableMap* ParseTables::find_map(std::string_view name) const {
    for (const auto& m : maps)
        if (m.name == name) return &m;
    return nullptr;
}

void ParseTables::reindex() {
    terminal_count_ = 0;
    while (terminal_count_ < static_cast<int>(symbols.size()) &&
           symbols[terminal_count_].kind != SymbolKind::nonterminal)
        ++terminal_count_;
    nonterminal_count_ = static_cast<int>(symbols.size()) - terminal_count_;
    auto n = actions.size();
    dense_actions_.assign(n * terminal_count_, Action{});
    dense_gotos_.assign(n * nonterminal_count_, -1);
    default_reduction_.assign(n, -1);
    for (std::size_t s = 0; s < n; ++s) {
        for (const auto& [t, a] : actions[s]) dense_actions_[s * terminal_count_ + t] = a;
        if (s < gotos.size())
            for (const auto& [nt, target] : gotos[s]) dense_gotos_[s * nonterminal_count_ + (nt - terminal_count_)] = target;
        // A state reduces by default when its whole FIRST(1) maps to one reduction.
        int p = -1;
        bool uniform = !actions[s].empty();
        for (const auto& [t, a] : actions[s]) {
            if (a.kind != ActionKind::reduce || (p >= 0 && a.production != p)) {
                uniform = false;
                break;
            }
            p = a.production;
        }
        if (uniform && s < first1.size() && first1[s].size() == static_cast<int>(actions[s].size()))
            default_reduction_[s] = p;
    }
    levels_.clear();
    for (std::size_t i = 0; i < precedence.size(); ++i)
        for (const auto& r : precedence[i].members) levels_.emplace(r, static_cast<int>(i));
}

ParseTables make_tables(const Machine& m, const GrammarModel& model) {
    if (m.actions.size() != m.states.size()) throw TableError("machine has no resolved action table");
    ParseTables t;
    for (const auto& s : model.symbols) t.symbols.push_back({s.name, s.kind, s.subtokens});
    for (const auto& p : model.productions) {
        TableProduction tp;
        tp.lhs = p.lhs;
        for (const auto& e : p.rhs) tp.rhs.push_back(e.symbol);
        tp.action = p.action;
        tp.selector = p.selector();
        tp.selector_position = p.selector_position();
        tp.stack_offset = p.selector_stack_offset();
        tp.prec = p.prec;
        t.productions.push_back(std::move(tp));
    }
    t.actions = m.actions;
    for (const auto& s : m.states) {
        std::map<SymbolId, int> g;
        for (const auto& [sym, target] : s.transitions)
            if (sym >= model.terminal_count) g.emplace(sym, target);
        t.gotos.push_back(std::move(g));
        t.first1.push_back(s.first1);
    }
    for (const auto& o : model.oracles) t.oracles.push_back({o.index, o.x, o.y, o.body});
    for (const auto& mr : model.maps) {
        TableMap tm{mr.name, {}};
        for (const auto& e : mr.entries) tm.entries.push_back({e.subtoken, e.node});
        t.maps.push_back(std::move(tm));
    }
    for (const auto& lvl : model.precedence) t.precedence.push_back({lvl.assoc, lvl.members});
    t.start_state = m.start_state;
    t.reindex();
    return t;
}

namespace {

json ref_json(TokenRef r) { return json::array({r.symbol, r.subtoken}); }

json prec_json(const PrecSource& p) {
    switch (p.kind) {
    case PrecSource::Kind::level: return json::array({"lvl", p.level, to_string(p.assoc)});
    case PrecSource::Kind::stack_offset: return json::array({"off", p.offset});
    case PrecSource::Kind::lookahead: return json::array({"la"});
    case PrecSource::Kind::none: break;
    }
    return json::array({"none"});
}

json action_json(const Action& a) {
    switch (a.kind) {
    case ActionKind::shift: return json::array({"s", a.state});
    case ActionKind::reduce: return json::array({"r", a.production});
    case ActionKind::accept: return json::array({"acc"});
    case ActionKind::dynamic:
        return json::array({"dyn", a.state, a.production, prec_json(a.rule_prec), prec_json(a.la_prec)});
    case ActionKind::error: break;
    }
    return json::array({"err"});
}

const char* selector_name(Selector s) { return s == Selector::use ? "use" : "ref"; }

json to_json(const ParseTables& t) {
    json j;
    j["version"] = t.version;
    j["start_state"] = t.start_state;
    j["symbols"] = json::array();
    for (const auto& s : t.symbols) {
        json js = {{"name", s.name}, {"kind", to_string(s.kind)}};
        if (s.kind == SymbolKind::generic) js["subtokens"] = s.subtokens;
        j["symbols"].push_back(std::move(js));
    }
    j["productions"] = json::array();
    for (const auto& p : t.productions) {
        json jp = {{"lhs", p.lhs}, {"rhs", p.rhs}};
        if (p.action.kind == TreeAction::Kind::node) jp["action"] = json::array({"node", p.action.name});
        if (p.action.kind == TreeAction::Kind::map) jp["action"] = json::array({"map", p.action.name});
        if (p.selector != Selector::none)
            jp["selector"] = json::array({selector_name(p.selector), p.selector_position, p.stack_offset});
        if (p.prec) jp["prec"] = ref_json(*p.prec);
        j["productions"].push_back(std::move(jp));
    }
    j["actions"] = json::array();
    for (const auto& row : t.actions) {
        json jr = json::array();
        for (const auto& [term, a] : row) jr.push_back(json::array({term, action_json(a)}));
        j["actions"].push_back(std::move(jr));
    }
    j["gotos"] = json::array();
    for (const auto& row : t.gotos) {
        json jr = json::array();
        for (const auto& [nt, s] : row) jr.push_back(json::array({nt, s}));
        j["gotos"].push_back(std::move(jr));
    }
    j["first1"] = json::array();
    for (const auto& f : t.first1) j["first1"].push_back(f.members());
    j["oracles"] = json::array();
    for (const auto& o : t.oracles)
        j["oracles"].push_back({{"index", o.index}, {"x", ref_json(o.x)}, {"y", ref_json(o.y)}, {"body", o.body}});
    j["maps"] = json::array();
    for (const auto& m : t.maps) {
        json entries = json::array();
        for (const auto& e : m.entries) entries.push_back(json::array({e.subtoken.symbol, e.subtoken.subtoken, e.node}));
        j["maps"].push_back({{"name", m.name}, {"entries", std::move(entries)}});
    }
    j["precedence"] = json::array();
    for (const auto& lvl : t.precedence) {
        json members = json::array();
        for (const auto& r : lvl.members) members.push_back(ref_json(r));
        j["precedence"].push_back({{"assoc", to_string(lvl.assoc)}, {"members", std::move(members)}});
    }
    return j;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw TableError("invalid table file: " + field + ": " + what);
}

const json& member(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) fail(where + key, "missing");
    return j.at(key);
}

int as_int(const json& j, const std::string& field) {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& field) {
    if (!j.is_string()) fail(field, "expected a string");
    return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& field, std::size_t min_size = 0) {
    if (!j.is_array() || j.size() < min_size) fail(field, "expected an array");
    return j;
}

Assoc parse_assoc(const json& j, const std::string& field) {
    auto s = as_string(j, field);
    if (s == "left") return Assoc::left;
    if (s == "right") return Assoc::right;
    if (s == "noassoc") return Assoc::nonassoc;
    fail(field, "unknown associativity '" + s + "'");
}

PrecSource parse_prec(const json& j, const std::string& field) {
    as_array(j, field, 1);
    auto tag = as_string(j[0], field + "[0]");
    if (tag == "lvl") {
        as_array(j, field, 3);
        return PrecSource::static_level(as_int(j[1], field + "[1]"), parse_assoc(j[2], field + "[2]"));
    }
    if (tag == "off") {
        as_array(j, field, 2);
        return PrecSource::from_stack(as_int(j[1], field + "[1]"));
    }
    if (tag == "la") return PrecSource::from_lookahead();
    if (tag == "none") return {};
    fail(field, "unknown precedence source '" + tag + "'");
}

Action parse_action(const json& j, const std::string& field) {
    as_array(j, field, 1);
    auto tag = as_string(j[0], field + "[0]");
    if (tag == "s") return Action::shift(as_int(as_array(j, field, 2)[1], field + "[1]"));
    if (tag == "r") return Action::reduce(as_int(as_array(j, field, 2)[1], field + "[1]"));
    if (tag == "acc") return Action::accept();
    if (tag == "dyn") {
        as_array(j, field, 5);
        return Action::dynamic(as_int(j[1], field + "[1]"), as_int(j[2], field + "[2]"),
                               parse_prec(j[3], field + "[3]"), parse_prec(j[4], field + "[4]"));
    }
    fail(field, "unknown action '" + tag + "'");
}

TokenRef parse_ref(const json& j, const std::string& field) {
    as_array(j, field, 2);
    return {as_int(j[0], field + "[0]"), as_int(j[1], field + "[1]")};
}

void check_ref(const ParseTables& t, TokenRef r, const std::string& field) {
    if (r.symbol < 0 || r.symbol >= t.terminal_count()) fail(field, "symbol " + std::to_string(r.symbol) + " is not a terminal");
    if (r.subtoken < -1 ||
        (r.subtoken >= 0 && r.subtoken >= static_cast<int>(t.symbols[r.symbol].subtokens.size())))
        fail(field, "subtoken " + std::to_string(r.subtoken) + " out of range");
}

void check_invariants(const ParseTables& t) {
    int nsym = static_cast<int>(t.symbols.size());
    int nterm = t.terminal_count();
    int nstate = t.state_count();
    int nprod = static_cast<int>(t.productions.size());
    if (nsym < 2 || t.symbols[0].kind != SymbolKind::eof || t.symbols[1].kind != SymbolKind::error)
        fail("symbols", "EOF and ERROR must be symbols 0 and 1");
    for (int i = nterm; i < nsym; ++i)
        if (t.symbols[i].kind != SymbolKind::nonterminal) fail("symbols[" + std::to_string(i) + "]", "terminals must precede nonterminals");
    for (int i = 0; i < nsym; ++i)
        if ((t.symbols[i].kind == SymbolKind::generic) == t.symbols[i].subtokens.empty())
            fail("symbols[" + std::to_string(i) + "].subtokens", "generic tokens and only they carry subtokens");
    if (nprod == 0) fail("productions", "empty");
    if (t.productions[0].rhs.size() != 3 || t.productions[0].rhs[0] != eof_symbol || t.productions[0].rhs[2] != eof_symbol)
        fail("productions[0]", "must be <GOAL> : EOF <user goal> EOF");
    for (int i = 0; i < nprod; ++i) {
        const auto& p = t.productions[i];
        auto f = "productions[" + std::to_string(i) + "]";
        if (p.lhs < nterm || p.lhs >= nsym) fail(f + ".lhs", "not a nonterminal");
        for (auto s : p.rhs)
            if (s < 0 || s >= nsym) fail(f + ".rhs", "symbol " + std::to_string(s) + " out of range");
        if (p.selector != Selector::none) {
            int n = static_cast<int>(p.rhs.size());
            if (p.selector_position < 1 || p.selector_position > n) fail(f + ".selector", "position out of range");
            if (p.stack_offset != n - p.selector_position) fail(f + ".selector", "stack offset disagrees with position");
            if (t.symbols[p.rhs[p.selector_position - 1]].kind != SymbolKind::generic)
                fail(f + ".selector", "selected element is not generic");
        }
        if (p.prec) check_ref(t, *p.prec, f + ".prec");
        if (p.action.kind == TreeAction::Kind::map && !t.find_map(p.action.name))
            fail(f + ".action", "unknown map '" + p.action.name + "'");
    }
    if (nstate == 0) fail("actions", "no states");
    if (static_cast<int>(t.gotos.size()) != nstate) fail("gotos", "state count differs from actions");
    if (static_cast<int>(t.first1.size()) != nstate) fail("first1", "state count differs from actions");
    if (t.start_state < 0 || t.start_state >= nstate) fail("start_state", "no such state");
    for (int s = 0; s < nstate; ++s) {
        for (const auto& [term, a] : t.actions[s]) {
            auto f = "actions[" + std::to_string(s) + "][" + std::to_string(term) + "]";
            if (term < 0 || term >= nterm) fail(f, "column is not a terminal");
            if ((a.kind == ActionKind::shift || a.kind == ActionKind::dynamic) && (a.state < 0 || a.state >= nstate))
                fail(f, "shift to nonexistent state " + std::to_string(a.state));
            if ((a.kind == ActionKind::reduce || a.kind == ActionKind::dynamic) &&
                (a.production < 1 || a.production >= nprod))
                fail(f, "reduce by nonexistent production " + std::to_string(a.production));
            if (a.kind == ActionKind::dynamic) {
                for (const auto* src : {&a.rule_prec, &a.la_prec}) {
                    if (src->kind == PrecSource::Kind::none) fail(f, "dynamic entry without precedence source");
                    if (src->kind == PrecSource::Kind::level &&
                        (src->level < 0 || src->level >= static_cast<int>(t.precedence.size())))
                        fail(f, "precedence level out of range");
                }
                if (a.rule_prec.kind == PrecSource::Kind::stack_offset &&
                    (a.rule_prec.offset < 0 ||
                     a.rule_prec.offset >= static_cast<int>(t.productions[a.production].rhs.size())))
                    fail(f, "stack offset " + std::to_string(a.rule_prec.offset) +
                                " not below the rhs length of production " + std::to_string(a.production));
                if (a.la_prec.kind == PrecSource::Kind::lookahead && t.symbols[term].kind != SymbolKind::generic)
                    fail(f, "lookahead precedence on a non-generic column");
            }
        }
        for (const auto& [nt, target] : t.gotos[s]) {
            auto f = "gotos[" + std::to_string(s) + "][" + std::to_string(nt) + "]";
            if (nt < nterm || nt >= nsym) fail(f, "column is not a nonterminal");
            if (target < 0 || target >= nstate) fail(f, "goto to nonexistent state " + std::to_string(target));
        }
    }
    for (std::size_t i = 0; i < t.oracles.size(); ++i) {
        check_ref(t, t.oracles[i].x, "oracles[" + std::to_string(i) + "].x");
        check_ref(t, t.oracles[i].y, "oracles[" + std::to_string(i) + "].y");
    }
    for (std::size_t i = 0; i < t.maps.size(); ++i)
        for (const auto& e : t.maps[i].entries) {
            check_ref(t, e.subtoken, "maps[" + std::to_string(i) + "].entries");
            if (!e.subtoken.is_subtoken()) fail("maps[" + std::to_string(i) + "].entries", "entry is not a subtoken");
        }
    for (std::size_t i = 0; i < t.precedence.size(); ++i)
        for (const auto& r : t.precedence[i].members) check_ref(t, r, "precedence[" + std::to_string(i) + "].members");
}

}  // namespace

std::string serialize(const ParseTables& t) {
    auto j = to_json(t);
    // One top-level key per line and one row per line keeps golden diffs readable.
    std::ostringstream os;
    os << "{\n";
    bool first_key = true;
    for (const auto& [key, value] : j.items()) {
        if (!first_key) os << ",\n";
        first_key = false;
        os << json(key).dump() << ": ";
        if (value.is_array() && !value.empty()) {
            os << "[\n";
            for (std::size_t i = 0; i < value.size(); ++i) os << "  " << value[i].dump() << (i + 1 < value.size() ? ",\n" : "\n");
            os << "]";
        } else {
            os << value.dump();
        }
    }
    os << "\n}\n";
    return os.str();
}

ParseTables deserialize(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw TableError(std::string("malformed table file: ") + e.what());
    }
    if (!j.is_object()) fail("(top level)", "expected an object");
    auto version = as_int(member(j, "version", ""), "version");
    if (version != table_format_version)
        throw TableError("table file version " + std::to_string(version) + " does not match supported version " +
                         std::to_string(table_format_version));
    ParseTables t;
    t.version = version;
    t.start_state = as_int(member(j, "start_state", ""), "start_state");

    const auto& syms = as_array(member(j, "symbols", ""), "symbols");
    for (std::size_t i = 0; i < syms.size(); ++i) {
        auto f = "symbols[" + std::to_string(i) + "]";
        TableSymbol s;
        s.name = as_string(member(syms[i], "name", f + "."), f + ".name");
        auto kind = symbol_kind_from_string(as_string(member(syms[i], "kind", f + "."), f + ".kind"));
        if (!kind) fail(f + ".kind", "unknown symbol kind");
        s.kind = *kind;
        if (syms[i].contains("subtokens"))
            for (const auto& lit : as_array(syms[i]["subtokens"], f + ".subtokens")) s.subtokens.push_back(as_string(lit, f + ".subtokens"));
        t.symbols.push_back(std::move(s));
    }

    const auto& prods = as_array(member(j, "productions", ""), "productions");
    for (std::size_t i = 0; i < prods.size(); ++i) {
        auto f = "productions[" + std::to_string(i) + "]";
        TableProduction p;
        p.lhs = as_int(member(prods[i], "lhs", f + "."), f + ".lhs");
        for (const auto& s : as_array(member(prods[i], "rhs", f + "."), f + ".rhs")) p.rhs.push_back(as_int(s, f + ".rhs"));
        if (prods[i].contains("action")) {
            const auto& a = as_array(prods[i]["action"], f + ".action", 2);
            auto kind = as_string(a[0], f + ".action");
            if (kind != "node" && kind != "map") fail(f + ".action", "unknown tree action kind");
            p.action = {kind == "node" ? TreeAction::Kind::node : TreeAction::Kind::map, as_string(a[1], f + ".action")};
        }
        if (prods[i].contains("selector")) {
            const auto& sel = as_array(prods[i]["selector"], f + ".selector", 3);
            auto kind = as_string(sel[0], f + ".selector");
            if (kind != "use" && kind != "ref") fail(f + ".selector", "unknown selector");
            p.selector = kind == "use" ? Selector::use : Selector::ref;
            p.selector_position = as_int(sel[1], f + ".selector");
            p.stack_offset = as_int(sel[2], f + ".selector");
        }
        if (prods[i].contains("prec")) p.prec = parse_ref(prods[i]["prec"], f + ".prec");
        t.productions.push_back(std::move(p));
    }

    const auto& acts = as_array(member(j, "actions", ""), "actions");
    for (std::size_t s = 0; s < acts.size(); ++s) {
        std::map<SymbolId, Action> row;
        for (const auto& cell : as_array(acts[s], "actions[" + std::to_string(s) + "]")) {
            auto f = "actions[" + std::to_string(s) + "]";
            as_array(cell, f, 2);
            row[as_int(cell[0], f)] = parse_action(cell[1], f);
        }
        t.actions.push_back(std::move(row));
    }
    const auto& gotos = as_array(member(j, "gotos", ""), "gotos");
    for (std::size_t s = 0; s < gotos.size(); ++s) {
        std::map<SymbolId, int> row;
        for (const auto& cell : as_array(gotos[s], "gotos[" + std::to_string(s) + "]")) {
            auto f = "gotos[" + std::to_string(s) + "]";
            as_array(cell, f, 2);
            row[as_int(cell[0], f)] = as_int(cell[1], f);
        }
        t.gotos.push_back(std::move(row));
    }

    // Terminal count is needed to size FIRST(1) sets and validate references.
    t.reindex();
    const auto& first1 = as_array(member(j, "first1", ""), "first1");
    for (std::size_t s = 0; s < first1.size(); ++s) {
        TerminalSet set(t.terminal_count());
        for (const auto& term : as_array(first1[s], "first1[" + std::to_string(s) + "]")) {
            int id = as_int(term, "first1");
            if (id < 0 || id >= t.terminal_count()) fail("first1[" + std::to_string(s) + "]", "not a terminal");
            set.insert(id);
        }
        t.first1.push_back(std::move(set));
    }
    const auto& oracles = as_array(member(j, "oracles", ""), "oracles");
    for (std::size_t i = 0; i < oracles.size(); ++i) {
        auto f = "oracles[" + std::to_string(i) + "]";
        TableOracle o;
        o.index = as_int(member(oracles[i], "index", f + "."), f + ".index");
        o.x = parse_ref(member(oracles[i], "x", f + "."), f + ".x");
        o.y = parse_ref(member(oracles[i], "y", f + "."), f + ".y");
        o.body = as_string(member(oracles[i], "body", f + "."), f + ".body");
        t.oracles.push_back(std::move(o));
    }
    const auto& maps = as_array(member(j, "maps", ""), "maps");
    for (std::size_t i = 0; i < maps.size(); ++i) {
        auto f = "maps[" + std::to_string(i) + "]";
        TableMap m;
        m.name = as_string(member(maps[i], "name", f + "."), f + ".name");
        for (const auto& e : as_array(member(maps[i], "entries", f + "."), f + ".entries")) {
            as_array(e, f + ".entries", 3);
            m.entries.push_back({{as_int(e[0], f), as_int(e[1], f)}, as_string(e[2], f)});
        }
        t.maps.push_back(std::move(m));
    }
    const auto& prec = as_array(member(j, "precedence", ""), "precedence");
    for (std::size_t i = 0; i < prec.size(); ++i) {
        auto f = "precedence[" + std::to_string(i) + "]";
        TablePrecLevel lvl;
        lvl.assoc = parse_assoc(member(prec[i], "assoc", f + "."), f + ".assoc");
        for (const auto& r : as_array(member(prec[i], "members", f + "."), f + ".members")) lvl.members.push_back(parse_ref(r, f));
        t.precedence.push_back(std::move(lvl));
    }
    // Validate before building dense tables so bad ids cannot index out of range.
    check_invariants(t);
    t.reindex();
    return t;
}

namespace {

std::string c_string_literal(std::string_view text) {
    std::string out;
    std::string line = "\"";
    for (char c : text) {
        switch (c) {
        case '"': line += "\\\""; break;
        case '\\': line += "\\\\"; break;
        case '\t': line += "\\t"; break;
        case '\n':
            line += "\\n\"";
            out += line + "\n";
            line = "\"";
            continue;
        default: line += c;
        }
    }
    if (line.size() > 1 || out.empty()) out += line + "\"";
    else if (!out.empty()) out.pop_back();
    return out;
}

std::string token_defs(const ParseTables& t) {
    std::string out;
    for (int i = 0; i < t.terminal_count(); ++i) {
        const auto& s = t.symbols[i];
        if (!out.empty()) out += "\n";
        out += (s.kind == SymbolKind::reserved ? "'" + s.name + "'" : s.name) + " = " + std::to_string(i);
    }
    return out;
}

std::string oracle_bodies(const ParseTables& t) {
    std::string out;
    for (const auto& o : t.oracles) {
        if (!out.empty()) out += "\n";
        out += "/* oracle " + std::to_string(o.index) + " begin */\n" + o.body + "\n/* oracle " +
               std::to_string(o.index) + " end */";
    }
    return out;
}

}  // namespace

std::string inject(std::string_view skeleton, const ParseTables& tables) {
    static const std::regex placeholder("@[A-Z][A-Z_]*@");
    static const std::set<std::string> known = {"@TABLES@", "@TOKEN_DEFS@", "@ORACLE_BODIES@", "@VERSION@"};
    std::string text(skeleton);
    std::vector<std::string> unknown;
    std::set<std::string> seen;
    std::vector<std::string> repeated;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), placeholder); it != std::sregex_iterator(); ++it) {
        auto name = it->str();
        if (!known.count(name)) unknown.push_back(name);
        else if (!seen.insert(name).second) repeated.push_back(name);
    }
    if (!unknown.empty()) {
        std::string list;
        for (const auto& u : unknown) list += " " + u;
        throw InjectError("unknown skeleton placeholder:" + list, unknown);
    }
    if (!repeated.empty()) throw InjectError("placeholder appears more than once: " + repeated.front(), repeated);

    std::string out;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), placeholder); it != std::sregex_iterator(); ++it) {
        out.append(text, last, it->position() - last);
        auto name = it->str();
        if (name == "@TABLES@") out += c_string_literal(serialize(tables));
        else if (name == "@TOKEN_DEFS@") out += token_defs(tables);
        else if (name == "@ORACLE_BODIES@") out += oracle_bodies(tables);
        else out += std::to_string(tables.version);
        last = it->position() + it->length();
    }
    out.append(text, last, std::string::npos);
    return out;
}

}  // namespace lr1
