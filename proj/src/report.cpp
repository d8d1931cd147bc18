#include <sstream>

#include "lr1/analysis.hpp"

namespace lr1 {

namespace {

std::string set_to_string(const TerminalSet& s, const GrammarModel& model) {
    std::string out = "[";
    bool first = true;
    for (auto t : s.members()) {
        if (!first) out += " ";
        out += model.spell(t);
        first = false;
    }
    return out + "]";
}

std::string production_to_string(const GrammarModel& model, int index, int dot) {
    const auto& p = model.productions[index];
    std::string out = model.symbol(p.lhs).name + " ->";
    for (std::size_t i = 0; i < p.rhs.size(); ++i) {
        if (static_cast<int>(i) == dot) out += " .";
        if (p.rhs[i].selector == Selector::use) out += " %use";
        if (p.rhs[i].selector == Selector::ref) out += " %ref";
        out += " " + model.spell(p.rhs[i].symbol);
    }
    if (dot == static_cast<int>(p.rhs.size())) out += " .";
    return out;
}

}  // namespace

std::string item_to_string(const Item& item, const GrammarModel& model, bool with_lookahead) {
    auto out = production_to_string(model, item.production, item.dot);
    if (with_lookahead) out += "   " + set_to_string(item.lookahead, model);
    return out;
}

std::string conflict_to_string(const Conflict& c, const Machine& m, const GrammarModel& model) {
    std::ostringstream os;
    os << "state " << c.state << ": "
       << (c.kind == Conflict::Kind::shift_reduce ? "shift/reduce" : "reduce/reduce") << " conflict on "
       << model.spell(c.terminal) << " between";
    if (c.shift_state >= 0) os << " shift " << c.shift_state;
    for (std::size_t i = 0; i < c.productions.size(); ++i) {
        if (i || c.shift_state >= 0) os << " and";
        os << " reduce " << c.productions[i];
    }
    os << (c.resolution.empty() ? " (unresolved)" : " resolved as " + c.resolution);
    if (c.state >= 0 && c.state < static_cast<int>(m.states.size())) {
        for (const auto& it : m.states[c.state].kernel) os << "\n    " << item_to_string(it, model);
    }
    return os.str();
}

std::string state_report(const Machine& m, const GrammarModel& model) {
    std::ostringstream os;
    os << (m.merged ? "merged" : "canonical") << " LR(1) machine: " << m.states.size() << " states\n";
    for (const auto& s : m.states) {
        os << "\nstate " << s.id;
        if (s.accessing >= 0) os << " (on " << model.spell(s.accessing) << ")";
        os << "\n  kernel:\n";
        for (const auto& it : s.kernel) os << "    " << item_to_string(it, model) << "\n";
        if (!s.transitions.empty() || s.accepts) {
            os << "  transitions:\n";
            if (s.accepts) os << "    EOF -> accept\n";
            for (const auto& [sym, t] : s.transitions) os << "    " << model.spell(sym) << " -> " << t << "\n";
        }
        if (!s.reductions.empty()) {
            os << "  reductions:\n";
            for (const auto& [p, la] : s.reductions)
                os << "    " << p << ": " << production_to_string(model, p, -1) << "   on "
                   << set_to_string(la, model) << "\n";
        }
        os << "  FIRST(1): " << set_to_string(s.first1, model) << "\n";
        for (const auto* list : {&m.resolved, &m.residual})
            for (const auto& c : *list)
                if (c.state == s.id) {
                    os << "  conflict: " << (c.kind == Conflict::Kind::shift_reduce ? "shift/reduce" : "reduce/reduce")
                       << " on " << model.spell(c.terminal)
                       << (c.resolution.empty() ? " unresolved" : " -> " + c.resolution) << "\n";
                }
    }
    return os.str();
}

}  // namespace lr1
