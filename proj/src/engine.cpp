#include <stdexcept>

#include "lr1/engine.hpp"

namespace lr1 {

Token VectorTokenSource::next() {
    if (at_ < tokens_.size()) return tokens_[at_++];
    Token eof;
    if (!tokens_.empty()) {
        const auto& last = tokens_.back();
        eof.pos = last.symbol == eof_symbol ? last.pos : SourcePos{last.pos.line, last.pos.column + last.length};
    } else {
        eof.pos = {1, 1};
    }
    return eof;
}

namespace {

void append_sexpr(const ParseTree& t, std::string& out) {
    if (t.leaf) {
        out += "'" + t.text + "'";
        return;
    }
    out += "(" + t.name;
    bool first = t.name.empty();
    for (const auto& c : t.children) {
        if (!first) out += " ";
        first = false;
        append_sexpr(c, out);
    }
    out += ")";
}

std::string spell_ref(const ParseTables& t, TokenRef r) {
    const auto& s = t.symbols[r.symbol];
    if (r.subtoken >= 0 && r.subtoken < static_cast<int>(s.subtokens.size()))
        return s.name + ".'" + s.subtokens[r.subtoken] + "'";
    return s.name;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

struct Entry {
    int state = -1;
    std::optional<ParseTree> tree;
    SymbolId symbol = -1;
    int subtoken = -1;
};

class Engine {
public:
    Engine(const ParseTables& t, TokenSource& src, const Callbacks& cb, const ParseOptions& opt)
        : tables_(t), source_(src), callbacks_(cb), options_(opt) {}

    ParseOutcome run() {
        stack_.push_back({tables_.start_state, std::nullopt, -1, -1});
        // Production 0 starts with EOF; the scanner never supplies it.
        const auto& lead = tables_.action(tables_.start_state, eof_symbol);
        if (lead.kind != ActionKind::shift) {
            abort("tables have no transition on the leading EOF");
            return std::move(out_);
        }
        stack_.push_back({lead.state, std::nullopt, eof_symbol, -1});

        Token t;
        bool have = false;
        for (;;) {
            int s = stack_.back().state;
            if (!have) {
                if (int d = tables_.default_reduction(s); d >= 0) {
                    std::string msg;
                    if (!reduce(d, msg, false)) {
                        if (!handle_error(fetch_into(t, have), msg)) return std::move(out_);
                    }
                    continue;
                }
                t = fetch();
                have = true;
                if (!ask_oracle(t)) return std::move(out_);
                continue;
            }
            Action a = tables_.action(s, t.symbol);
            std::string msg;
            if (a.kind == ActionKind::dynamic) {
                auto shift = dynamic_resolve(a, t, msg);
                if (!shift) a = Action{};
                else a = *shift ? Action::shift(a.state) : Action::reduce(a.production);
                if (shift && options_.record_events) {
                    ParseEvent e{ParseEvent::Kind::dyn_resolved};
                    e.state = s;
                    e.production = a.production;
                    e.shifted = *shift;
                    emit(std::move(e));
                }
            }
            switch (a.kind) {
            case ActionKind::shift:
                shift(a.state, t);
                have = false;
                break;
            case ActionKind::reduce:
                if (reduce(a.production, msg, false)) break;
                if (!handle_error(t, msg)) return std::move(out_);
                break;
            case ActionKind::accept: {
                emit(ParseEvent{ParseEvent::Kind::accept, s});
                out_.status = out_.recoveries ? ParseOutcome::Status::recovered : ParseOutcome::Status::accepted;
                if (options_.build_tree && stack_.size() >= 3) out_.tree = std::move(stack_.back().tree);
                return std::move(out_);
            }
            case ActionKind::error:
            case ActionKind::dynamic:
                if (!handle_error(t, msg)) return std::move(out_);
                break;
            }
        }
    }

private:
    void emit(ParseEvent e) {
        if (options_.record_events) out_.events.push_back(std::move(e));
    }

    void abort(const std::string& why) {
        ParseEvent e{ParseEvent::Kind::abort};
        e.message = why;
        emit(std::move(e));
        out_.status = ParseOutcome::Status::aborted;
        out_.abort_reason = why;
        out_.tree.reset();
    }

    Token fetch() {
        Token t = source_.next();
        if (t.symbol < 0 || t.symbol >= tables_.terminal_count() || t.symbol == error_symbol)
            throw std::invalid_argument("token source produced symbol " + std::to_string(t.symbol) +
                                        ", which is not a scanner terminal");
        if (options_.record_events) {
            ParseEvent e{ParseEvent::Kind::token_read};
            e.token = t;
            emit(std::move(e));
        }
        return t;
    }

    // A reduction that fails before any token was fetched still needs a current token to report.
    Token& fetch_into(Token& t, bool& have) {
        if (!have) {
            t = fetch();
            have = true;
        }
        return t;
    }

    bool ask_oracle(Token& t) {
        int state = stack_.back().state;
        auto kind = tables_.symbols[t.symbol].kind;
        bool relevant = kind == SymbolKind::plain || kind == SymbolKind::generic;
        for (const auto& o : tables_.oracles) relevant = relevant || o.x.symbol == t.symbol;
        if (!relevant) return true;
        {
            ParseEvent e{ParseEvent::Kind::oracle_asked, state};
            e.from = t.symbol;
            emit(std::move(e));
        }
        SymbolId from = t.symbol;
        for (const auto& o : tables_.oracles) {
            if (o.x.symbol != t.symbol || (o.x.subtoken >= 0 && o.x.subtoken != t.subtoken)) continue;
            if (!tables_.first1[state].contains(o.y.symbol)) continue;
            bool verdict;
            if (auto it = callbacks_.oracles.find(o.index); it != callbacks_.oracles.end()) {
                verdict = it->second(OracleQuery{o.index, state, t});
            } else if (blank(o.body)) {
                verdict = true;
            } else {
                abort("no handler registered for oracle rule " + std::to_string(o.index));
                return false;
            }
            if (!verdict) break;
            t.symbol = o.y.symbol;
            const auto& y = tables_.symbols[o.y.symbol];
            if (o.y.subtoken >= 0) {
                t.subtoken = o.y.subtoken;
            } else if (y.kind == SymbolKind::generic) {
                t.subtoken = -1;
                for (std::size_t k = 0; k < y.subtokens.size(); ++k)
                    if (t.text && y.subtokens[k] == *t.text) t.subtoken = static_cast<int>(k);
            } else {
                t.subtoken = -1;
            }
            ParseEvent e{ParseEvent::Kind::oracle_changed, state};
            e.from = from;
            e.to = t.symbol;
            emit(std::move(e));
            return true;
        }
        ParseEvent e{ParseEvent::Kind::oracle_unchanged, state};
        e.from = from;
        emit(std::move(e));
        return true;
    }

    void shift(int target, const Token& t) {
        Entry e{target, std::nullopt, t.symbol, t.subtoken};
        if (options_.build_tree && tables_.symbols[t.symbol].kind == SymbolKind::plain) {
            ParseTree leaf;
            leaf.leaf = true;
            leaf.name = tables_.symbols[t.symbol].name;
            leaf.symbol = t.symbol;
            leaf.text = t.text.value_or("");
            leaf.pos = t.pos;
            e.tree = std::move(leaf);
        }
        stack_.push_back(std::move(e));
        if (options_.record_events) {
            ParseEvent ev{ParseEvent::Kind::shift, target};
            ev.token = t;
            emit(std::move(ev));
        }
    }

    // Returns false, leaving the stack untouched, when the tree action cannot be applied.
    bool reduce(int p, std::string& msg, bool lenient) {
        const auto& prod = tables_.productions[p];
        std::size_t n = prod.rhs.size();
        std::size_t first = stack_.size() - n;
        std::string node;
        if (prod.action.kind == TreeAction::Kind::node) {
            node = prod.action.name;
        } else if (prod.action.kind == TreeAction::Kind::map) {
            const auto& sel = stack_[first + prod.selector_position - 1];
            const auto* map = tables_.find_map(prod.action.name);
            const std::string* name = map ? map->lookup({sel.symbol, sel.subtoken}) : nullptr;
            if (name) {
                node = *name;
            } else if (!lenient) {
                msg = "map " + prod.action.name + " has no entry for " + spell_ref(tables_, {sel.symbol, sel.subtoken});
                return false;
            }
        }
        std::optional<ParseTree> tree;
        if (options_.build_tree) {
            std::vector<ParseTree> children;
            for (std::size_t i = first; i < stack_.size(); ++i)
                if (stack_[i].tree) children.push_back(std::move(*stack_[i].tree));
            if (prod.action.kind != TreeAction::Kind::none) {
                tree = ParseTree::node(node, std::move(children));
            } else if (children.size() == 1) {
                tree = std::move(children.front());
            } else if (!children.empty()) {
                tree = ParseTree::node("", std::move(children));
            }
        }
        stack_.resize(first);
        int target = tables_.goto_state(stack_.back().state, prod.lhs);
        if (target < 0) throw std::logic_error("missing goto for production " + std::to_string(p));
        stack_.push_back({target, std::move(tree), prod.lhs, -1});
        if (callbacks_.on_reduce) callbacks_.on_reduce(p, stack_.back().tree ? &*stack_.back().tree : nullptr);
        if (options_.record_events) {
            ParseEvent e{ParseEvent::Kind::reduce, target};
            e.production = p;
            emit(std::move(e));
        }
        return true;
    }

    std::optional<std::pair<int, Assoc>> level(const PrecSource& src, const Token& t, std::string& msg) {
        TokenRef ref;
        switch (src.kind) {
        case PrecSource::Kind::level: return std::pair{src.level, src.assoc};
        case PrecSource::Kind::stack_offset: {
            const auto& e = stack_[stack_.size() - 1 - src.offset];
            ref = {e.symbol, e.subtoken};
            break;
        }
        case PrecSource::Kind::lookahead: ref = t.ref(); break;
        case PrecSource::Kind::none: msg = "missing precedence source"; return std::nullopt;
        }
        auto lvl = tables_.level_of(ref);
        if (!lvl) {
            msg = spell_ref(tables_, ref) + " has no precedence level";
            return std::nullopt;
        }
        return std::pair{*lvl, tables_.precedence[*lvl].assoc};
    }

    // true = shift, false = reduce, nullopt = error.
    std::optional<bool> dynamic_resolve(const Action& a, const Token& t, std::string& msg) {
        auto rule = level(a.rule_prec, t, msg);
        if (!rule) return std::nullopt;
        auto look = level(a.la_prec, t, msg);
        if (!look) return std::nullopt;
        if (rule->first != look->first) return rule->first < look->first;
        if (rule->second == Assoc::left) return false;
        if (rule->second == Assoc::right) return true;
        msg = spell_ref(tables_, t.ref()) + " is non-associative";
        return std::nullopt;
    }

    std::vector<SymbolId> expected(int state) const {
        std::vector<SymbolId> out;
        for (auto s : tables_.first1[state].members())
            if (s != error_symbol) out.push_back(s);
        return out;
    }

    bool handle_error(Token& t, const std::string& msg) {
        ErrorReport rep;
        rep.state = stack_.back().state;
        rep.token = t;
        rep.expected = expected(rep.state);
        rep.message = msg;
        {
            ParseEvent e{ParseEvent::Kind::error_detected, rep.state};
            e.token = t;
            e.message = msg;
            emit(std::move(e));
        }
        out_.errors.push_back(rep);
        auto& report = out_.errors.back();
        if (!options_.error_recovery) {
            abort("syntax error");
            return false;
        }
        if (options_.max_errors > 0 && static_cast<int>(out_.errors.size()) > options_.max_errors) {
            abort("too many errors");
            return false;
        }

        std::size_t guard = 0, limit = 4 * static_cast<std::size_t>(tables_.state_count()) + 64;
        for (;;) {
            const auto& a = tables_.action(stack_.back().state, error_symbol);
            if (a.kind != ActionKind::reduce) break;
            std::string ignored;
            reduce(a.production, ignored, true);
            if (++guard > limit) {
                abort("ERROR-context reductions did not terminate");
                return false;
            }
        }

        for (;;) {
            for (std::size_t i = stack_.size(); i-- > 0;) {
                const auto& a = tables_.action(stack_[i].state, error_symbol);
                int succ = a.kind == ActionKind::shift || a.kind == ActionKind::dynamic ? a.state : -1;
                if (succ < 0 || !tables_.first1[succ].contains(t.symbol)) continue;
                std::optional<ParseTree> kept;
                if (options_.build_tree && options_.retain_error_trees) {
                    auto err = ParseTree::node("error", {});
                    for (std::size_t j = i + 1; j < stack_.size(); ++j)
                        if (stack_[j].tree) err.children.push_back(std::move(*stack_[j].tree));
                    kept = std::move(err);
                }
                stack_.resize(i + 1);
                stack_.push_back({succ, std::move(kept), error_symbol, -1});
                ++out_.recoveries;
                report.resume = t;
                report.recover_state = succ;
                ParseEvent e{ParseEvent::Kind::recover, succ};
                e.token = t;
                emit(std::move(e));
                return ask_oracle(t);
            }
            if (t.symbol == eof_symbol) {
                abort("error recovery reached EOF");
                return false;
            }
            ParseEvent e{ParseEvent::Kind::discard, stack_.back().state};
            e.token = t;
            emit(std::move(e));
            report.discarded.push_back(t);
            t = fetch();
        }
    }

    const ParseTables& tables_;
    TokenSource& source_;
    const Callbacks& callbacks_;
    const ParseOptions& options_;
    std::vector<Entry> stack_;
    ParseOutcome out_;
};

}  // namespace

std::string to_sexpr(const ParseTree& tree) {
    std::string out;
    append_sexpr(tree, out);
    return out;
}

ParseOutcome run(const ParseTables& tables, TokenSource& source, const Callbacks& callbacks,
                 const ParseOptions& options) {
    return Engine(tables, source, callbacks, options).run();
}

ParseOutcome run(const ParseTables& tables, const std::vector<Token>& tokens, const Callbacks& callbacks,
                 const ParseOptions& options) {
    VectorTokenSource src(tokens);
    return run(tables, src, callbacks, options);
}

std::string token_trace_line(const ParseTables& tables, const Token& token) {
    const auto& s = tables.symbols[token.symbol];
    std::string out = "Token: " + s.name;
    if (s.kind == SymbolKind::plain && token.text) out += " = '" + *token.text + "'";
    if (s.kind == SymbolKind::generic && token.subtoken >= 0 && token.subtoken < static_cast<int>(s.subtokens.size()))
        out += " Subtoken: " + s.subtokens[token.subtoken];
    out += " [" + std::to_string(token.pos.line) + ":" + std::to_string(token.pos.column + token.length) + "]";
    return out;
}

std::string token_listing_name(const ParseTables& tables, const Token& token) {
    const auto& s = tables.symbols[token.symbol];
    if (s.kind == SymbolKind::plain && token.text) return s.name + "='" + *token.text + "'";
    if (s.kind == SymbolKind::generic && token.subtoken >= 0 && token.subtoken < static_cast<int>(s.subtokens.size()))
        return s.subtokens[token.subtoken];
    return s.name;
}

std::string format_trace(const ParseTables& tables, const std::vector<ParseEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        switch (e.kind) {
        case ParseEvent::Kind::token_read: out += token_trace_line(tables, e.token) + "\n"; break;
        case ParseEvent::Kind::oracle_asked:
            out += "In ask_oracle with state " + std::to_string(e.state) + " and token " + tables.display(e.from) + "\n";
            break;
        case ParseEvent::Kind::oracle_changed:
            out += "Token: " + tables.display(e.from) + " changed to Token: " + tables.display(e.to) + "\n";
            break;
        case ParseEvent::Kind::oracle_unchanged: out += tables.display(e.from) + " not changed\n"; break;
        default: break;
        }
    }
    return out;
}

}  // namespace lr1
