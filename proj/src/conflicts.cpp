#include <algorithm>
#include <set>
#include <sstream>

#include "lr1/analysis.hpp"

namespace lr1 {

PrecSource rule_precedence(const GrammarModel& model, const Production& p) {
    if (p.prec) {
        if (auto lvl = model.level_of(*p.prec)) return PrecSource::static_level(*lvl, model.precedence[*lvl].assoc);
        return {};
    }
    if (p.selector() == Selector::use) return PrecSource::from_stack(p.selector_stack_offset());
    for (auto it = p.rhs.rbegin(); it != p.rhs.rend(); ++it) {
        if (!model.symbol(it->symbol).is_terminal()) continue;
        if (auto lvl = model.level_of({it->symbol, -1}))
            return PrecSource::static_level(*lvl, model.precedence[*lvl].assoc);
    }
    return {};
}

PrecSource lookahead_precedence(const GrammarModel& model, SymbolId terminal) {
    if (model.symbol(terminal).kind == SymbolKind::generic) return PrecSource::from_lookahead();
    if (auto lvl = model.level_of({terminal, -1})) return PrecSource::static_level(*lvl, model.precedence[*lvl].assoc);
    return {};
}

namespace {

std::string uncovered_subtokens(const GrammarModel& model, SymbolId generic) {
    std::string out;
    const auto& g = model.symbol(generic);
    for (std::size_t k = 0; k < g.subtokens.size(); ++k)
        if (!model.level_of({generic, static_cast<int>(k)})) out += " " + model.spell(TokenRef{generic, int(k)});
    return out;
}

}  // namespace

Machine resolve_conflicts(Machine m, const GrammarModel& model) {
    m.actions.assign(m.states.size(), {});
    m.residual.clear();
    m.resolved.clear();
    m.warnings.clear();
    std::set<std::pair<int, SymbolId>> warned;

    for (const auto& s : m.states) {
        auto& row = m.actions[s.id];
        for (SymbolId t = 0; t < m.terminal_count; ++t) {
            std::optional<int> shift;
            if (auto it = s.transitions.find(t); it != s.transitions.end()) shift = it->second;
            bool accept = s.accepts && t == eof_symbol;
            std::vector<int> reduces;
            for (const auto& [p, la] : s.reductions)
                if (la.contains(t)) reduces.push_back(p);
            if (!shift && !accept && reduces.empty()) continue;

            if (reduces.empty()) {
                row[t] = accept ? Action::accept() : Action::shift(*shift);
                continue;
            }
            if (!shift && !accept && reduces.size() == 1) {
                row[t] = Action::reduce(reduces.front());
                continue;
            }
            if (reduces.size() > 1) {
                Conflict c{Conflict::Kind::reduce_reduce, s.id, t, shift.value_or(-1), reduces, ""};
                m.residual.push_back(c);
                if (shift) {
                    m.residual.push_back({Conflict::Kind::shift_reduce, s.id, t, *shift, reduces, ""});
                    row[t] = Action::shift(*shift);
                } else {
                    row[t] = accept ? Action::accept() : Action::reduce(reduces.front());
                }
                continue;
            }
            int p = reduces.front();
            if (accept) {
                m.residual.push_back({Conflict::Kind::shift_reduce, s.id, t, -1, reduces, ""});
                row[t] = Action::accept();
                continue;
            }
            Conflict c{Conflict::Kind::shift_reduce, s.id, t, *shift, reduces, ""};
            auto rp = rule_precedence(model, model.productions[p]);
            auto lp = lookahead_precedence(model, t);
            if (rp.kind == PrecSource::Kind::none || lp.kind == PrecSource::Kind::none) {
                m.residual.push_back(c);
                row[t] = Action::shift(*shift);
                continue;
            }
            if (rp.dynamic() || lp.dynamic()) {
                row[t] = Action::dynamic(*shift, p, rp, lp);
                c.resolution = "dynamic";
                m.resolved.push_back(c);
                std::string missing;
                if (rp.kind == PrecSource::Kind::stack_offset) {
                    const auto& prod = model.productions[p];
                    missing += uncovered_subtokens(model, prod.rhs[prod.selector_position() - 1].symbol);
                }
                if (lp.kind == PrecSource::Kind::lookahead) missing += uncovered_subtokens(model, t);
                if (!missing.empty() && warned.emplace(p, t).second)
                    m.warnings.push_back({Severity::warning, "dynamic-precedence-gap", model.productions[p].pos,
                                          "dynamic precedence between production " + std::to_string(p) +
                                              " and " + model.spell(t) +
                                              " may consult subtokens without a level:" + missing});
                continue;
            }
            if (rp.level > lp.level) {
                row[t] = Action::reduce(p);
                c.resolution = "reduce (higher rule precedence)";
            } else if (rp.level < lp.level) {
                row[t] = Action::shift(*shift);
                c.resolution = "shift (higher lookahead precedence)";
            } else if (rp.assoc == Assoc::left) {
                row[t] = Action::reduce(p);
                c.resolution = "reduce (left associative)";
            } else if (rp.assoc == Assoc::right) {
                row[t] = Action::shift(*shift);
                c.resolution = "shift (right associative)";
            } else {
                row.erase(t);
                c.resolution = "error (non associative)";
            }
            m.resolved.push_back(c);
        }
    }
    return m;
}

std::vector<Diagnostic> check_error_ambiguity(const Machine& m, const GrammarModel& model) {
    std::vector<Diagnostic> out;
    auto report = [&](int state, const std::string& why) {
        out.push_back({Severity::error, "error-ambiguity", {0, 0},
                       "state " + std::to_string(state) + " is ambiguous on ERROR: " + why});
    };
    auto mentions_error = [&](int p) {
        for (const auto& e : model.productions[p].rhs)
            if (e.symbol == error_symbol) return true;
        return false;
    };
    for (const auto& c : m.residual) {
        if (c.terminal == error_symbol) {
            report(c.state, c.kind == Conflict::Kind::shift_reduce ? "shift/reduce conflict on ERROR"
                                                                   : "reduce/reduce conflict on ERROR");
        } else if (c.kind == Conflict::Kind::reduce_reduce &&
                   std::any_of(c.productions.begin(), c.productions.end(), mentions_error)) {
            report(c.state, "reduce/reduce conflict between error productions on " + model.spell(c.terminal));
        }
    }
    for (const auto& s : m.states) {
        std::map<SymbolId, std::vector<int>> by_lhs;
        for (const auto& it : s.items) {
            const auto& p = model.productions[it.production];
            if (it.dot < static_cast<int>(p.rhs.size()) && p.rhs[it.dot].symbol == error_symbol)
                by_lhs[p.lhs].push_back(p.index);
        }
        for (const auto& [lhs, prods] : by_lhs)
            if (prods.size() > 1) {
                std::string list;
                for (int p : prods) list += " " + std::to_string(p);
                report(s.id, "productions" + list + " of " + model.symbol(lhs).name +
                                 " all recover on ERROR from the same context");
            }
    }
    return out;
}

std::vector<Diagnostic> check_error_reduction_termination(const Machine& m, const GrammarModel& model) {
    std::vector<Diagnostic> out;
    if (m.actions.empty()) return out;
    std::vector<std::vector<int>> preds(m.states.size());
    for (const auto& s : m.states)
        for (const auto& [sym, t] : s.transitions) preds[t].push_back(s.id);

    auto error_reduce = [&](int s) -> int {
        auto it = m.actions[s].find(error_symbol);
        return it != m.actions[s].end() && it->second.kind == ActionKind::reduce ? it->second.production : -1;
    };

    const std::size_t step_limit = 4 * m.states.size() + 64;
    std::size_t budget = 2'000'000;
    bool gave_up = false;

    // Depth-first over stack contents; the part below the first known entry is
    // filled in lazily from the predecessor relation.
    struct Frame {
        std::vector<int> stack;
        std::size_t steps;
    };
    std::set<int> flagged;
    for (const auto& s : m.states) {
        if (error_reduce(s.id) < 0) continue;
        std::vector<Frame> todo{{{s.id}, 0}};
        while (!todo.empty() && !gave_up) {
            auto f = std::move(todo.back());
            todo.pop_back();
            if (budget-- == 0) {
                gave_up = true;
                break;
            }
            int top = f.stack.back();
            int p = error_reduce(top);
            if (p < 0) continue;
            if (f.steps > step_limit) {
                flagged.insert(s.id);
                break;
            }
            auto n = model.productions[p].rhs.size();
            if (f.stack.size() <= n) {
                int bottom = f.stack.front();
                for (int v : preds[bottom]) {
                    auto grown = f.stack;
                    grown.insert(grown.begin(), v);
                    todo.push_back({std::move(grown), f.steps});
                }
                continue;
            }
            f.stack.resize(f.stack.size() - n);
            auto next = m.transition(f.stack.back(), model.productions[p].lhs);
            if (!next) continue;
            f.stack.push_back(*next);
            todo.push_back({std::move(f.stack), f.steps + 1});
        }
    }
    for (int s : flagged)
        out.push_back({Severity::error, "error-reduction-loop", {0, 0},
                       "ERROR-context reductions starting in state " + std::to_string(s) + " do not terminate"});
    if (gave_up)
        out.push_back({Severity::warning, "error-reduction-unchecked", {0, 0},
                       "termination of ERROR-context reductions was not fully checked (search budget exhausted)"});
    return out;
}

AnalysisResult analyze_grammar(std::string_view text, const AnalyzeOptions& options) {
    AnalysisResult r;
    try {
        r.model = parse_grammar(text);
    } catch (const GrammarError& e) {
        r.diagnostics.push_back({Severity::error, "syntax", e.pos(), e.what()});
        return r;
    }
    r.diagnostics = validate(r.model);
    if (has_errors(r.diagnostics)) return r;
    r.model = augment(std::move(r.model));
    try {
        auto m = options.canonical ? build_canonical(r.model, options.build) : build_pager(r.model, options.build);
        r.machine = resolve_conflicts(std::move(m), r.model);
    } catch (const StateCapExceeded& e) {
        r.diagnostics.push_back({Severity::error, "state-cap", {0, 0}, e.what()});
        return r;
    }
    const auto& m = *r.machine;
    for (const auto& w : m.warnings) r.diagnostics.push_back(w);
    for (const auto& c : m.residual)
        r.diagnostics.push_back({Severity::error, "conflict", {0, 0}, conflict_to_string(c, m, r.model)});
    for (auto& d : check_error_ambiguity(m, r.model)) r.diagnostics.push_back(std::move(d));
    for (auto& d : check_error_reduction_termination(m, r.model)) r.diagnostics.push_back(std::move(d));
    return r;
}

}  // namespace lr1
