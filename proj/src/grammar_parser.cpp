#include <cctype>
#include <map>
#include <utility>

#include "lr1/grammar.hpp"

namespace lr1 {

namespace {

enum class Tok { nonterm, literal, ident, directive, code, colon, bar, semi, dot, arrow, end };

struct Lexeme {
    Tok kind = Tok::end;
    std::string text;
    SourcePos pos;
};

const char* describe(Tok t) {
    switch (t) {
    case Tok::nonterm: return "nonterminal";
    case Tok::literal: return "literal";
    case Tok::ident: return "identifier";
    case Tok::directive: return "directive";
    case Tok::code: return "code block";
    case Tok::colon: return "':'";
    case Tok::bar: return "'|'";
    case Tok::semi: return "';'";
    case Tok::dot: return "'.'";
    case Tok::arrow: return "'=>'";
    case Tok::end: return "end of input";
    }
    return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Lexeme next() {
        skip_blank();
        Lexeme lx;
        lx.pos = {line_, col_};
        if (at_end()) return lx;
        char c = peek();
        if (c == '<') {
            std::string name(1, get());
            while (!at_end() && peek() != '>' && peek() != '\n') name += get();
            if (at_end() || peek() != '>') throw GrammarError(lx.pos, "unterminated nonterminal name");
            name += get();
            if (name.size() == 2) throw GrammarError(lx.pos, "empty nonterminal name");
            lx.kind = Tok::nonterm;
            lx.text = std::move(name);
        } else if (c == '\'') {
            get();
            std::string lit;
            for (;;) {
                if (at_end() || peek() == '\n') throw GrammarError(lx.pos, "unterminated literal");
                char d = get();
                if (d == '\'') break;
                if (d == '\\') {
                    if (at_end()) throw GrammarError(lx.pos, "unterminated literal");
                    char e = get();
                    switch (e) {
                    case 'n': d = '\n'; break;
                    case 't': d = '\t'; break;
                    default: d = e;
                    }
                }
                lit += d;
            }
            if (lit.empty()) throw GrammarError(lx.pos, "empty literal");
            lx.kind = Tok::literal;
            lx.text = std::move(lit);
        } else if (ident_start(c)) {
            while (!at_end() && ident_char(peek())) lx.text += get();
            lx.kind = Tok::ident;
        } else if (c == '%') {
            get();
            if (!at_end() && peek() == '{') {
                get();
                auto close = text_.find("%}", pos_);
                if (close == std::string_view::npos) throw GrammarError(lx.pos, "unterminated %{ block");
                lx.text = std::string(text_.substr(pos_, close - pos_));
                while (pos_ < close) get();
                get();
                get();
                lx.kind = Tok::code;
            } else {
                while (!at_end() && ident_char(peek())) lx.text += get();
                if (lx.text.empty()) throw GrammarError(lx.pos, "stray '%'");
                lx.kind = Tok::directive;
            }
        } else if (c == '=' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            get();
            get();
            lx.kind = Tok::arrow;
        } else {
            get();
            switch (c) {
            case ':': lx.kind = Tok::colon; break;
            case '|': lx.kind = Tok::bar; break;
            case ';': lx.kind = Tok::semi; break;
            case '.': lx.kind = Tok::dot; break;
            default:
                throw GrammarError(lx.pos, std::string("unexpected character '") + c + "'");
            }
        }
        return lx;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char get() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_blank() {
        while (!at_end()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (!at_end() && peek() != '\n') get();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

enum class Ns { nonterm, literal, ident };

// Symbols are numbered provisionally in order of first appearance and
// renumbered (terminals first) once the whole file has been read.
struct Provisional {
    Ns ns;
    std::string name;
    std::vector<std::string> subtokens;
    bool closed = false;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) {
        intern(Ns::ident, "EOF");
        intern(Ns::ident, "ERROR");
        advance();
    }

    GrammarModel run() {
        while (cur_.kind != Tok::end) rule();
        return finish();
    }

private:
    void advance() { cur_ = lexer_.next(); }

    Lexeme expect(Tok kind, const char* context) {
        if (cur_.kind != kind)
            throw GrammarError(cur_.pos, std::string("expected ") + describe(kind) + " " + context +
                                             ", found " + describe(cur_.kind) +
                                             (cur_.text.empty() ? "" : " '" + cur_.text + "'"));
        Lexeme lx = cur_;
        advance();
        return lx;
    }

    int intern(Ns ns, const std::string& name) {
        auto key = std::make_pair(ns, name);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(prov_.size());
        prov_.push_back({ns, name, {}, false});
        index_.emplace(key, id);
        return id;
    }

    bool is_builtin_name(const std::string& s) const { return s == "EOF" || s == "ERROR"; }

    // Registers `literal` on generic `pid`; -1 when the set is closed and lacks it.
    int subtoken(int pid, const std::string& literal) {
        auto& p = prov_[pid];
        for (std::size_t i = 0; i < p.subtokens.size(); ++i)
            if (p.subtokens[i] == literal) return static_cast<int>(i);
        if (p.closed) return -1;
        p.subtokens.push_back(literal);
        return static_cast<int>(p.subtokens.size()) - 1;
    }

    // tokref := PLAIN | LITERAL | PLAIN '.' LITERAL
    TokenRef tokref(const char* context) {
        TokenRef ref;
        if (cur_.kind == Tok::literal) {
            ref.symbol = intern(Ns::literal, cur_.text);
            advance();
            return ref;
        }
        auto id = expect(Tok::ident, context);
        ref.symbol = intern(Ns::ident, id.text);
        if (cur_.kind == Tok::dot) {
            if (is_builtin_name(id.text))
                throw GrammarError(id.pos, id.text + " cannot have subtokens");
            advance();
            auto lit = expect(Tok::literal, "after '.'");
            ref.subtoken = subtoken(ref.symbol, lit.text);
            if (ref.subtoken < 0)
                deferred_.push_back({Severity::error, "undeclared-subtoken", lit.pos,
                                     "subtoken " + id.text + ".'" + lit.text + "' is not declared by %generic " +
                                         id.text});
        }
        return ref;
    }

    void rule() {
        if (cur_.kind == Tok::nonterm) {
            production(intern(Ns::nonterm, cur_.text));
            return;
        }
        if (cur_.kind == Tok::ident && cur_.text == "ERROR") {
            production(1);
            return;
        }
        if (cur_.kind != Tok::directive)
            throw GrammarError(cur_.pos, std::string("expected a rule, found ") + describe(cur_.kind));
        const auto& d = cur_.text;
        if (d == "oracle") oracle();
        else if (d == "map") map();
        else if (d == "left" || d == "right" || d == "noassoc") prec();
        else if (d == "generic") generic();
        else throw GrammarError(cur_.pos, "unknown directive %" + d);
    }

    void production(int lhs) {
        auto start = cur_.pos;
        advance();
        expect(Tok::colon, "after production left-hand side");
        for (;;) {
            alternative(lhs, start);
            if (cur_.kind == Tok::bar) {
                advance();
                continue;
            }
            expect(Tok::semi, "to end production");
            break;
        }
    }

    void alternative(int lhs, SourcePos pos) {
        Production p;
        p.lhs = lhs;
        p.pos = pos;
        for (;;) {
            if (cur_.kind == Tok::nonterm) {
                p.rhs.push_back({intern(Ns::nonterm, cur_.text), Selector::none, -1});
                advance();
            } else if (cur_.kind == Tok::literal) {
                p.rhs.push_back({intern(Ns::literal, cur_.text), Selector::none, -1});
                advance();
            } else if (cur_.kind == Tok::ident) {
                auto id = cur_;
                advance();
                RhsElement e{intern(Ns::ident, id.text), Selector::none, -1};
                if (cur_.kind == Tok::dot) {
                    advance();
                    auto lit = expect(Tok::literal, "after '.'");
                    misplaced_.push_back({e.symbol, lit.text});
                    e.misplaced_subtoken = static_cast<int>(misplaced_.size()) - 1;
                }
                p.rhs.push_back(e);
            } else if (cur_.kind == Tok::directive && (cur_.text == "use" || cur_.text == "ref")) {
                auto sel = cur_.text == "use" ? Selector::use : Selector::ref;
                auto at = cur_.pos;
                advance();
                auto id = expect(Tok::ident, "after %use/%ref");
                if (is_builtin_name(id.text))
                    throw GrammarError(id.pos, "%use/%ref must be followed by a generic token, not " + id.text);
                p.rhs.push_back({intern(Ns::ident, id.text), sel, -1});
                selector_checks_.push_back({p.rhs.back().symbol, at});
            } else {
                break;
            }
        }
        if (cur_.kind == Tok::directive && cur_.text == "prec") {
            advance();
            p.prec = tokref("after %prec");
        }
        if (cur_.kind == Tok::arrow) {
            advance();
            if (cur_.kind == Tok::directive && cur_.text == "map") {
                advance();
                p.action = {TreeAction::Kind::map, expect(Tok::ident, "after => %map").text};
            } else {
                p.action = {TreeAction::Kind::node, expect(Tok::ident, "after =>").text};
            }
        }
        productions_.push_back(std::move(p));
    }

    void oracle() {
        OracleRule r;
        r.pos = cur_.pos;
        r.index = static_cast<int>(oracles_.size());
        advance();
        r.x = tokref("in %oracle");
        expect(Tok::colon, "in %oracle");
        r.y = tokref("in %oracle");
        if (cur_.kind == Tok::code) {
            r.body = cur_.text;
            advance();
        }
        expect(Tok::semi, "to end %oracle");
        oracles_.push_back(std::move(r));
    }

    void map() {
        MapRule m;
        m.pos = cur_.pos;
        advance();
        auto name = expect(Tok::ident, "after %map");
        m.name = name.text;
        for (const auto& other : maps_)
            if (other.name == m.name) throw GrammarError(name.pos, "duplicate map name '" + m.name + "'");
        expect(Tok::colon, "in %map");
        for (;;) {
            MapEntry e;
            e.pos = cur_.pos;
            auto gen = expect(Tok::ident, "in %map entry");
            if (is_builtin_name(gen.text)) throw GrammarError(gen.pos, gen.text + " cannot have subtokens");
            expect(Tok::dot, "in %map entry");
            auto lit = expect(Tok::literal, "in %map entry");
            expect(Tok::arrow, "in %map entry");
            e.node = expect(Tok::ident, "after => in %map entry").text;
            e.literal = lit.text;
            e.subtoken.symbol = intern(Ns::ident, gen.text);
            e.subtoken.subtoken = subtoken(e.subtoken.symbol, lit.text);
            m.entries.push_back(std::move(e));
            if (cur_.kind == Tok::bar) {
                advance();
                continue;
            }
            expect(Tok::semi, "to end %map");
            break;
        }
        maps_.push_back(std::move(m));
    }

    void prec() {
        PrecLevel level;
        level.pos = cur_.pos;
        level.assoc = cur_.text == "left" ? Assoc::left : cur_.text == "right" ? Assoc::right : Assoc::nonassoc;
        advance();
        expect(Tok::colon, "in precedence rule");
        do {
            level.members.push_back(tokref("in precedence rule"));
        } while (cur_.kind != Tok::semi && cur_.kind != Tok::end);
        expect(Tok::semi, "to end precedence rule");
        precedence_.push_back(std::move(level));
    }

    void generic() {
        advance();
        auto name = expect(Tok::ident, "after %generic");
        if (is_builtin_name(name.text)) throw GrammarError(name.pos, name.text + " cannot be generic");
        int pid = intern(Ns::ident, name.text);
        if (prov_[pid].closed) throw GrammarError(name.pos, "duplicate %generic for " + name.text);
        expect(Tok::colon, "in %generic");
        std::vector<std::string> declared;
        do {
            auto lit = expect(Tok::literal, "in %generic");
            for (const auto& d : declared)
                if (d == lit.text) throw GrammarError(lit.pos, "duplicate subtoken '" + lit.text + "'");
            declared.push_back(lit.text);
        } while (cur_.kind == Tok::literal);
        expect(Tok::semi, "to end %generic");
        auto& p = prov_[pid];
        for (const auto& earlier : p.subtokens) {
            bool found = false;
            for (const auto& d : declared) found |= d == earlier;
            if (!found)
                deferred_.push_back({Severity::error, "undeclared-subtoken", name.pos,
                                     "subtoken " + name.text + ".'" + earlier + "' used before %generic " +
                                         name.text + " but not declared there"});
        }
        for (const auto& d : declared) subtoken(pid, d);
        p.closed = true;
    }

    GrammarModel finish() {
        GrammarModel m;
        std::vector<int> remap(prov_.size(), -1);
        int next = 0;
        for (std::size_t i = 0; i < prov_.size(); ++i)
            if (prov_[i].ns != Ns::nonterm) remap[i] = next++;
        m.terminal_count = next;
        for (std::size_t i = 0; i < prov_.size(); ++i)
            if (prov_[i].ns == Ns::nonterm) remap[i] = next++;
        m.symbols.resize(prov_.size());
        for (std::size_t i = 0; i < prov_.size(); ++i) {
            auto& p = prov_[i];
            Symbol s;
            s.id = remap[i];
            s.name = p.name;
            s.subtokens = p.subtokens;
            s.closed = p.closed;
            switch (p.ns) {
            case Ns::nonterm: s.kind = SymbolKind::nonterminal; break;
            case Ns::literal: s.kind = SymbolKind::reserved; break;
            case Ns::ident:
                s.kind = i == 0 ? SymbolKind::eof
                         : i == 1 ? SymbolKind::error
                         : p.subtokens.empty() ? SymbolKind::plain
                                               : SymbolKind::generic;
                break;
            }
            m.symbols[s.id] = std::move(s);
        }
        auto fix = [&](TokenRef& r) { r.symbol = remap[r.symbol]; };

        for (const auto& [pid, pos] : selector_checks_)
            if (prov_[pid].subtokens.empty())
                throw GrammarError(pos, "%use/%ref must be followed by a generic token; '" + prov_[pid].name +
                                            "' has no subtokens");

        int index = 1;
        for (auto& p : productions_) {
            p.index = index++;
            p.lhs = remap[p.lhs];
            for (auto& e : p.rhs) {
                if (e.misplaced_subtoken >= 0) {
                    const auto& [gid, lit] = misplaced_[e.misplaced_subtoken];
                    const auto& sub = prov_[gid].subtokens;
                    int number = -1;
                    for (std::size_t k = 0; k < sub.size(); ++k)
                        if (sub[k] == lit) number = static_cast<int>(k);
                    // Keep the literal reachable even when it names no declared subtoken.
                    e.misplaced_subtoken = number >= 0 ? number : static_cast<int>(sub.size());
                }
                e.symbol = remap[e.symbol];
            }
            if (p.prec) fix(*p.prec);
        }
        for (auto& o : oracles_) {
            fix(o.x);
            fix(o.y);
        }
        for (auto& mr : maps_)
            for (auto& e : mr.entries) fix(e.subtoken);
        for (auto& lvl : precedence_)
            for (auto& r : lvl.members) fix(r);

        m.productions = std::move(productions_);
        m.oracles = std::move(oracles_);
        m.maps = std::move(maps_);
        m.precedence = std::move(precedence_);
        m.deferred = std::move(deferred_);
        if (!m.productions.empty()) m.user_goal = m.productions.front().lhs;
        return m;
    }

    Lexer lexer_;
    Lexeme cur_;
    std::vector<Provisional> prov_;
    std::map<std::pair<Ns, std::string>, int> index_;
    std::vector<Production> productions_;
    std::vector<OracleRule> oracles_;
    std::vector<MapRule> maps_;
    std::vector<PrecLevel> precedence_;
    std::vector<Diagnostic> deferred_;
    std::vector<std::pair<int, SourcePos>> selector_checks_;
    std::vector<std::pair<int, std::string>> misplaced_;
};

}  // namespace

GrammarModel parse_grammar(std::string_view text) { return Parser(text).run(); }

}  // namespace lr1
