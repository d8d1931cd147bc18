#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lr1/grammar.hpp"

namespace lr1 {

/// FIRST sets and nullability, indexed by symbol id. A terminal's FIRST set is itself.
struct FirstSets {
    std::vector<TerminalSet> first;
    std::vector<bool> nullable;

    /// FIRST(rhs[from..] tail): terminals that can start the suffix, plus `tail` when the suffix is nullable.
    TerminalSet of_suffix(const Production& p, std::size_t from, const TerminalSet& tail) const;
};

FirstSets first_sets(const GrammarModel& model);

struct Item {
    int production = 0;
    int dot = 0;
    TerminalSet lookahead;  // right context set

    friend bool operator==(const Item&, const Item&) = default;
    friend auto operator<=>(const Item&, const Item&) = default;
};

/// Items sorted by (production, dot), one item per core.
using ItemSet = std::vector<Item>;

ItemSet closure(const ItemSet& kernel, const GrammarModel& model, const FirstSets& first);
ItemSet goto_step(const ItemSet& items, SymbolId symbol, const GrammarModel& model);

struct PrecSource {
    enum class Kind { none, level, stack_offset, lookahead };
    Kind kind = Kind::none;
    int level = -1;
    Assoc assoc = Assoc::left;
    int offset = -1;

    static PrecSource static_level(int level, Assoc assoc) { return {Kind::level, level, assoc, -1}; }
    static PrecSource from_stack(int offset) { return {Kind::stack_offset, -1, Assoc::left, offset}; }
    static PrecSource from_lookahead() { return {Kind::lookahead, -1, Assoc::left, -1}; }
    bool dynamic() const { return kind == Kind::stack_offset || kind == Kind::lookahead; }
    friend bool operator==(const PrecSource&, const PrecSource&) = default;
};

enum class ActionKind { error, shift, reduce, accept, dynamic };

struct Action {
    ActionKind kind = ActionKind::error;
    int state = -1;       // shift, dynamic
    int production = -1;  // reduce, dynamic
    PrecSource rule_prec;
    PrecSource la_prec;

    static Action shift(int s) { return {ActionKind::shift, s, -1, {}, {}}; }
    static Action reduce(int p) { return {ActionKind::reduce, -1, p, {}, {}}; }
    static Action accept() { return {ActionKind::accept, -1, -1, {}, {}}; }
    static Action dynamic(int s, int p, PrecSource rule, PrecSource la) {
        return {ActionKind::dynamic, s, p, rule, la};
    }
    friend bool operator==(const Action&, const Action&) = default;
};

struct Conflict {
    enum class Kind { shift_reduce, reduce_reduce };
    Kind kind = Kind::shift_reduce;
    int state = -1;
    SymbolId terminal = -1;
    int shift_state = -1;
    std::vector<int> productions;
    std::string resolution;  // how it was settled, empty when residual
};

struct State {
    int id = -1;
    SymbolId accessing = -1;  // symbol of every inbound transition; -1 for the start state
    ItemSet kernel;
    ItemSet items;  // closure of kernel
    std::map<SymbolId, int> transitions;
    bool accepts = false;  // `<GOAL> -> EOF <user goal> . EOF` is here
    std::map<int, TerminalSet> reductions;
    TerminalSet first1;
};

struct Machine {
    std::vector<State> states;
    int start_state = 0;
    int terminal_count = 0;
    bool merged = false;  // built by build_pager

    // Filled by resolve_conflicts.
    std::vector<std::map<SymbolId, Action>> actions;
    std::vector<Conflict> residual;
    std::vector<Conflict> resolved;
    std::vector<Diagnostic> warnings;

    std::optional<int> transition(int state, SymbolId symbol) const;
};

class StateCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BuildOptions {
    std::size_t state_cap = 250000;
};

/// Knuth's machine: one state per distinct LR(1) kernel. Used as the
/// reference for the merged machine.
Machine build_canonical(const GrammarModel& model, const BuildOptions& options = {});

/// Same-core states are merged on the fly when weakly compatible.
Machine build_pager(const GrammarModel& model, const BuildOptions& options = {});

/// Union of terminal read transitions (EOF when accepting) and reduction right-context sets.
TerminalSet state_first1(const State& state, int terminal_count);

/// Precedence source of a production when it is reduced.
PrecSource rule_precedence(const GrammarModel& model, const Production& p);
/// Precedence source of a lookahead terminal.
PrecSource lookahead_precedence(const GrammarModel& model, SymbolId terminal);

Machine resolve_conflicts(Machine machine, const GrammarModel& model);

std::vector<Diagnostic> check_error_ambiguity(const Machine& machine, const GrammarModel& model);

/// Walks the ERROR-context reductions that error recovery performs from every
/// state over every possible stack below it and reports any that would not stop.
std::vector<Diagnostic> check_error_reduction_termination(const Machine& machine, const GrammarModel& model);

std::string item_to_string(const Item& item, const GrammarModel& model, bool with_lookahead = true);
std::string state_report(const Machine& machine, const GrammarModel& model);
std::string conflict_to_string(const Conflict& c, const Machine& machine, const GrammarModel& model);

struct AnalyzeOptions {
    bool canonical = false;
    BuildOptions build;
};

struct AnalysisResult {
    GrammarModel model;
    std::optional<Machine> machine;
    std::vector<Diagnostic> diagnostics;

    bool has_conflicts() const { return machine && !machine->residual.empty(); }
    bool ok() const { return machine && !has_errors(diagnostics); }
};

/// Parse, augment, validate, build, resolve and check. Grammar errors end up
/// in `diagnostics`; `machine` is empty when the grammar could not be built.
AnalysisResult analyze_grammar(std::string_view text, const AnalyzeOptions& options = {});

}  // namespace lr1
