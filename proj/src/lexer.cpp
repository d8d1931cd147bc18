#include <cctype>

#include "lr1/lexer.hpp"

namespace lr1 {

ScannerSpec derive_spec(const ParseTables& tables) {
    ScannerSpec spec;
    for (int i = 0; i < tables.terminal_count(); ++i) {
        const auto& s = tables.symbols[i];
        if (s.kind == SymbolKind::reserved) spec.literals.emplace(s.name, TokenRef{i, -1});
    }
    for (int i = 0; i < tables.terminal_count(); ++i) {
        const auto& s = tables.symbols[i];
        if (s.kind != SymbolKind::generic) continue;
        for (std::size_t k = 0; k < s.subtokens.size(); ++k)
            spec.literals.insert_or_assign(s.subtokens[k], TokenRef{i, static_cast<int>(k)});
    }
    for (int i = 0; i < tables.terminal_count(); ++i) {
        const auto& s = tables.symbols[i];
        if (s.kind != SymbolKind::plain) continue;
        if (s.name == "id") spec.identifier = i;
        else if (s.name == "constant") spec.constant = i;
        else if (s.name == "string_literal") spec.string_literal = i;
        else spec.warnings.push_back("terminal " + s.name + " has no scanner rule; only an external token source can produce it");
    }
    return spec;
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Scanner {
public:
    Scanner(std::string_view text, const ScannerSpec& spec) : text_(text), spec_(spec) {
        for (const auto& [lit, ref] : spec.literals) max_literal_ = std::max(max_literal_, lit.size());
    }

    LexResult run() {
        LexResult out;
        for (;;) {
            skip_blanks(out);
            if (at_ >= text_.size()) break;
            SourcePos start{line_, column_};
            std::size_t from = at_;
            TokenRef ref{-1, -1};
            char c = text_[at_];
            if (ident_start(c)) {
                std::size_t end = at_;
                while (end < text_.size() && ident_char(text_[end])) ++end;
                auto word = text_.substr(at_, end - at_);
                if (auto it = spec_.literals.find(word); it != spec_.literals.end()) ref = it->second;
                else if (spec_.identifier >= 0) ref = {spec_.identifier, -1};
                if (ref.symbol >= 0) advance(end - at_);
            } else if (std::isdigit(static_cast<unsigned char>(c)) && spec_.constant >= 0) {
                std::size_t end = at_;
                while (end < text_.size() && (ident_char(text_[end]) || text_[end] == '.')) ++end;
                ref = {spec_.constant, -1};
                advance(end - at_);
            } else if (c == '"' && spec_.string_literal >= 0) {
                ref = {spec_.string_literal, -1};
                quoted('"');
            } else if (c == '\'' && spec_.constant >= 0) {
                ref = {spec_.constant, -1};
                quoted('\'');
            } else {
                for (std::size_t n = std::min(max_literal_, text_.size() - at_); n > 0; --n) {
                    auto it = spec_.literals.find(text_.substr(at_, n));
                    if (it != spec_.literals.end()) {
                        ref = it->second;
                        advance(n);
                        break;
                    }
                }
            }
            if (ref.symbol < 0) {
                std::size_t n = 1;
                if (ident_start(c))
                    while (at_ + n < text_.size() && ident_char(text_[at_ + n])) ++n;
                out.diagnostics.push_back({Severity::error, "lexical", start,
                                           "unrecognized input '" + std::string(text_.substr(at_, n)) + "'"});
                advance(n);
                continue;
            }
            Token t;
            t.symbol = ref.symbol;
            t.subtoken = ref.subtoken;
            t.text = std::string(text_.substr(from, at_ - from));
            t.pos = start;
            t.length = static_cast<int>(at_ - from);
            out.tokens.push_back(std::move(t));
        }
        Token eof;
        eof.pos = {line_, column_};
        out.tokens.push_back(eof);
        return out;
    }

private:
    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && at_ < text_.size(); ++i, ++at_) {
            if (text_[at_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
        }
    }

    void quoted(char quote) {
        std::size_t n = 1;
        while (at_ + n < text_.size() && text_[at_ + n] != quote && text_[at_ + n] != '\n') {
            if (text_[at_ + n] == '\\' && at_ + n + 1 < text_.size()) ++n;
            ++n;
        }
        if (at_ + n < text_.size() && text_[at_ + n] == quote) ++n;
        advance(n);
    }

    void skip_blanks(LexResult& out) {
        while (at_ < text_.size()) {
            char c = text_[at_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
            } else if (text_.substr(at_, 2) == "//") {
                while (at_ < text_.size() && text_[at_] != '\n') advance(1);
            } else if (text_.substr(at_, 2) == "/*") {
                SourcePos start{line_, column_};
                auto end = text_.find("*/", at_ + 2);
                if (end == std::string_view::npos) {
                    out.diagnostics.push_back({Severity::error, "lexical", start, "unterminated comment"});
                    advance(text_.size() - at_);
                } else {
                    advance(end + 2 - at_);
                }
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    const ScannerSpec& spec_;
    std::size_t max_literal_ = 0;
    std::size_t at_ = 0;
    int line_ = 1;
    int column_ = 1;
};

}  // namespace

LexResult tokenize(std::string_view text, const ScannerSpec& spec) { return Scanner(text, spec).run(); }

}  // namespace lr1
