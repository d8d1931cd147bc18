#include <stdexcept>

#include "lr1/batch.hpp"

namespace lr1 {

namespace {

ParseOutcome run_one(const ParseTables& tables, const std::vector<Token>& tokens, const ParseOptions& options) {
    try {
        return run(tables, tokens, {}, options);
    } catch (const std::exception& e) {
        ParseOutcome bad;
        bad.abort_reason = e.what();
        return bad;
    }
}

}  // namespace

std::vector<ParseOutcome> parse_batch(const ParseTables& tables, const std::vector<std::vector<Token>>& inputs,
                                      const ParseOptions& options) {
    std::vector<ParseOutcome> out(inputs.size());
    const long n = static_cast<long>(inputs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (long i = 0; i < n; ++i) out[i] = run_one(tables, inputs[i], options);
    return out;
}

std::vector<ParseOutcome> parse_batch_serial(const ParseTables& tables,
                                             const std::vector<std::vector<Token>>& inputs,
                                             const ParseOptions& options) {
    std::vector<ParseOutcome> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) out.push_back(run_one(tables, in, options));
    return out;
}

}  // namespace lr1
