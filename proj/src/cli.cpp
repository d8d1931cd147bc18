#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lr1/analysis.hpp"
#include "lr1/cli.hpp"
#include "lr1/lexer.hpp"
#include "lr1/tables.hpp"

namespace lr1 {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool read_file(const std::string& path, std::string& text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream os;
    os << in.rdbuf();
    text = os.str();
    return !in.bad();
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

std::string source_line(std::string_view source, int line) {
    int current = 1;
    std::size_t start = 0;
    while (current < line) {
        auto nl = source.find('\n', start);
        if (nl == std::string_view::npos) return {};
        start = nl + 1;
        ++current;
    }
    auto end = source.find('\n', start);
    auto text = source.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    return std::string(text);
}

void excerpt(std::ostream& os, std::string_view source, SourcePos pos) {
    auto text = source_line(source, pos.line);
    os << "### " << std::setw(6) << pos.line << " | " << text << "\n";
    std::string pad(10, ' ');
    for (int i = 0; i + 1 < pos.column; ++i)
        pad += i < static_cast<int>(text.size()) && text[i] == '\t' ? '\t' : ' ';
    os << "###" << pad << "^\n";
}

void collect_ids(const ParseTree& t, std::set<std::string>& names) {
    if (t.leaf) {
        if (t.name == "id") names.insert(t.text);
        return;
    }
    for (const auto& c : t.children) collect_ids(c, names);
}

struct ParseCommand {
    std::string tables;
    std::string input;
    bool trace = false;
    bool tree = false;
    int max_errors = 0;
};

int cmd_parse(const ParseCommand& c, std::ostream& out, std::ostream& err) {
    std::string table_text, input;
    if (!read_file(c.tables, table_text)) {
        err << "error: cannot read table file " << c.tables << "\n";
        return 3;
    }
    if (!read_file(c.input, input)) {
        err << "error: cannot read input file " << c.input << "\n";
        return 3;
    }
    ParseTables tables;
    try {
        tables = deserialize(table_text);
    } catch (const TableError& e) {
        err << "error: " << c.tables << ": " << e.what() << "\n";
        return 3;
    }
    auto lex = tokenize(input, derive_spec(tables));
    for (const auto& d : lex.diagnostics)
        err << "#E \"" << c.input << "\", line " << d.pos.line << "/" << d.pos.column << ": " << d.message << "\n";
    auto oracles = builtin_oracles(tables);
    ParseOptions options;
    options.max_errors = c.max_errors;
    auto outcome = run(tables, lex.tokens, oracles.callbacks, options);
    if (c.trace) out << format_trace(tables, outcome.events);
    for (std::size_t i = 0; i < outcome.errors.size(); ++i) {
        bool last = i + 1 == outcome.errors.size();
        err << error_listing(c.input, input, tables, outcome.errors[i],
                             last && !outcome.accepted() ? outcome.abort_reason : std::string());
    }
    if (!outcome.accepted() && outcome.errors.empty()) err << "### Parse aborted: " << outcome.abort_reason << "\n";
    if (c.tree && outcome.tree) out << to_sexpr(*outcome.tree) << "\n";
    switch (outcome.status) {
    case ParseOutcome::Status::accepted: return lex.diagnostics.empty() ? 0 : 1;
    case ParseOutcome::Status::recovered: return 1;
    case ParseOutcome::Status::aborted: break;
    }
    return 2;
}

struct AnalyzeCommand {
    std::string grammar;
    std::string out_path;
    std::string report_path;
    bool canonical = false;
    bool force = false;
};

// Returns the exit code; `result` is filled whenever a machine was built.
int analyze_file(const AnalyzeCommand& c, std::ostream& err, AnalysisResult& result) {
    std::string text;
    if (!read_file(c.grammar, text)) {
        err << "error: cannot read grammar file " << c.grammar << "\n";
        return 2;
    }
    AnalyzeOptions options;
    options.canonical = c.canonical;
    result = analyze_grammar(text, options);
    bool fatal = false;
    for (const auto& d : result.diagnostics) {
        err << format_diagnostic(d, c.grammar) << "\n";
        if (d.severity == Severity::error && !(c.force && d.code == "conflict")) fatal = true;
    }
    if (!result.machine) return 1;
    return fatal ? 1 : 0;
}

int cmd_analyze(const AnalyzeCommand& c, std::ostream& out, std::ostream& err) {
    AnalysisResult result;
    int code = analyze_file(c, err, result);
    if (code == 2 || !result.machine) return code;
    if (!c.report_path.empty() && !write_file(c.report_path, state_report(*result.machine, result.model))) {
        err << "error: cannot write report " << c.report_path << "\n";
        return 2;
    }
    if (code != 0) return code;
    std::string tables;
    try {
        tables = serialize(make_tables(*result.machine, result.model));
    } catch (const TableError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    if (c.out_path.empty()) {
        out << tables;
    } else if (!write_file(c.out_path, tables)) {
        err << "error: cannot write table file " << c.out_path << "\n";
        return 2;
    }
    return 0;
}

int cmd_report(const AnalyzeCommand& c, std::ostream& out, std::ostream& err) {
    AnalysisResult result;
    int code = analyze_file(c, err, result);
    if (result.machine) out << state_report(*result.machine, result.model);
    return code;
}

int cmd_inject(const std::string& tables_path, const std::string& skeleton_path, const std::string& out_path,
               std::ostream& err) {
    std::string table_text, skeleton;
    if (!read_file(tables_path, table_text)) {
        err << "error: cannot read table file " << tables_path << "\n";
        return 2;
    }
    if (!read_file(skeleton_path, skeleton)) {
        err << "error: cannot read skeleton " << skeleton_path << "\n";
        return 2;
    }
    try {
        auto text = inject(skeleton, deserialize(table_text));
        if (!write_file(out_path, text)) {
            err << "error: cannot write " << out_path << "\n";
            return 2;
        }
    } catch (const TableError& e) {
        err << "error: " << tables_path << ": " << e.what() << "\n";
        return 2;
    } catch (const InjectError& e) {
        err << "error: " << skeleton_path << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

BuiltinOracles builtin_oracles(const ParseTables& tables) {
    BuiltinOracles b;
    b.typedef_names = std::make_shared<std::set<std::string>>();
    bool uses_typedef = false;
    for (const auto& o : tables.oracles) {
        auto body = trim(o.body);
        if (body.empty() || body == "@always" || body == "oracle = TRUE;") {
            b.callbacks.oracles[o.index] = [](const OracleQuery&) { return true; };
        } else if (body == "@never" || body == "oracle = FALSE;") {
            b.callbacks.oracles[o.index] = [](const OracleQuery&) { return false; };
        } else if (body == "@typedef") {
            uses_typedef = true;
            b.callbacks.oracles[o.index] = [names = b.typedef_names](const OracleQuery& q) {
                return q.token.text && names->count(*q.token.text) > 0;
            };
        } else {
            b.unbound.push_back(o.index);
        }
    }
    if (uses_typedef) {
        std::vector<bool> declares(tables.productions.size(), false);
        for (std::size_t p = 0; p < tables.productions.size(); ++p)
            for (auto s : tables.productions[p].rhs)
                if (tables.symbols[s].kind == SymbolKind::reserved && tables.symbols[s].name == "typedef")
                    declares[p] = true;
        b.callbacks.on_reduce = [declares, names = b.typedef_names](int p, const ParseTree* tree) {
            if (declares[p] && tree) collect_ids(*tree, *names);
        };
    }
    return b;
}

std::string error_listing(std::string_view path, std::string_view source, const ParseTables& tables,
                          const ErrorReport& r, const std::string& abort_reason) {
    std::ostringstream os;
    excerpt(os, source, r.token.pos);
    os << "#E \"" << path << "\", line " << r.token.pos.line << "/" << r.token.pos.column << ": syntax error\n";
    os << "### Saw token: " << token_listing_name(tables, r.token) << "\n";
    os << "### expected:";
    for (auto s : r.expected) os << " " << tables.display(s);
    os << "\n";
    if (!r.message.empty()) os << "### " << r.message << "\n";
    os << "###\n";
    if (r.resume) {
        excerpt(os, source, r.resume->pos);
        os << "### Resuming parse with token: " << token_listing_name(tables, *r.resume) << "\n";
    } else {
        os << "### Parse aborted: " << (abort_reason.empty() ? "no recoverable state" : abort_reason) << "\n";
    }
    return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"LR(1) parser generator and table-driven parser", "lr1"};
    app.require_subcommand(1);

    AnalyzeCommand analyze;
    auto* a = app.add_subcommand("analyze", "Analyze a grammar and write parse tables");
    a->add_option("grammar", analyze.grammar, "Grammar file")->required();
    a->add_option("-o,--out", analyze.out_path, "Table file (default: standard output)");
    a->add_option("--report", analyze.report_path, "Write the state report to this file");
    a->add_flag("--canonical", analyze.canonical, "Build the canonical machine instead of merging states");
    a->add_flag("--force", analyze.force, "Write tables despite unresolved conflicts");

    AnalyzeCommand report;
    auto* r = app.add_subcommand("report", "Print the state report of a grammar");
    r->add_option("grammar", report.grammar, "Grammar file")->required();
    r->add_flag("--canonical", report.canonical, "Report the canonical machine");

    ParseCommand parse;
    auto* p = app.add_subcommand("parse", "Parse an input file with the built-in scanner");
    p->add_option("tables", parse.tables, "Table file")->required();
    p->add_option("input", parse.input, "Input file")->required();
    p->add_flag("--trace-tokens", parse.trace, "Print tokens and oracle decisions");
    p->add_flag("--tree", parse.tree, "Print the parse tree");
    p->add_option("--max-errors", parse.max_errors, "Abort after this many syntax errors (0: no limit)");

    std::string inj_tables, inj_skeleton, inj_out;
    auto* i = app.add_subcommand("inject", "Substitute tables into a skeleton parser source");
    i->add_option("tables", inj_tables, "Table file")->required();
    i->add_option("skeleton", inj_skeleton, "Skeleton file")->required();
    i->add_option("out", inj_out, "Output file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    if (a->parsed()) return cmd_analyze(analyze, out, err);
    if (r->parsed()) return cmd_report(report, out, err);
    if (p->parsed()) return cmd_parse(parse, out, err);
    return cmd_inject(inj_tables, inj_skeleton, inj_out, err);
}

}  // namespace lr1
