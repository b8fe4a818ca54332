#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scholarlink/workflow.hpp"

namespace scholarlink {

/// Ground truth attached to one mention.
struct GoldLabel {
    bool profile_found = false;              // does a real profile exist to find?
    std::optional<std::string> native_name;  // gold native-script rendering
    std::optional<std::string> same_as;      // partner mention id (symmetric)
    std::optional<std::string> workplace;    // gold workplace, for correctness
};

struct LabeledItem {
    std::string id;
    ScholarMention mention;
    GoldLabel gold;
};

/// A labeled mention set, loaded from line-delimited JSON records of the form
/// {"id", "mention": {...}, "gold": {...}}.
struct LabeledDataset {
    std::string name;
    std::string description;
    std::vector<LabeledItem> items;

    static LabeledDataset load(const std::string& path);
    /// DatasetError on duplicate ids or asymmetric/dangling same_as links.
    void validate() const;
};

/// A gold-labeled profile pair for disambiguation accuracy.
struct LabeledPair {
    std::string id;
    ScholarProfile a;
    ScholarProfile b;
    bool same = false;
};

struct PairDataset {
    std::string name;
    std::string description;
    std::vector<LabeledPair> items;

    static PairDataset load(const std::string& path);
    void validate() const;  // DatasetError on duplicate ids
};

/// num/den with the division deferred so reports can show the counts.
struct Rate {
    int num = 0;
    int den = 0;
    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / den; }
};

/// One-decimal percent rendering, e.g. 0.86667 -> "86.7%".
std::string percent(double value);

/// One grid cell: a (provider, strategy, backend) coordinate with whichever
/// metrics apply.
struct MetricCell {
    std::string provider;
    std::string strategy;  // pipeline plan or query mode
    std::string backend;
    int n = 0;  // items considered in this cell
    int false_positives = 0;
    int undecided = 0;  // pairs the scorer declined to decide
    std::optional<Rate> recall;
    std::optional<Rate> precision;
    std::optional<Rate> accuracy;

    void validate() const;  // rates within [0,1], numerators within range
};

struct MetricReport {
    std::string title;
    std::string dataset;
    std::string note;  // denominator definitions and exclusions
    std::vector<MetricCell> cells;

    std::string render_text() const;
    nlohmann::ordered_json to_json() const;
};

// ---------------------------------------------------------------------------
// Pure scoring layer: deterministic functions of (dataset, pipeline outputs).
// Re-scoring the same outputs reproduces the same cell byte-for-byte.

/// recall = mentions resolved to a profile whose workplace matches gold /
/// mentions with an existing profile. Mentions without a real profile that
/// still resolve count as false positives.
MetricCell score_profile_cell(const LabeledDataset& ds, const ResolutionResult& result,
                              const ScoringOptions& sopts);

/// hyps maps item id -> hypothesis list; items absent from the map were not
/// queried (native-script mentions). recall counts items with gold native
/// names; precision judges the top hypothesis of every queried item.
MetricCell score_native_cell(
    const LabeledDataset& ds,
    const std::map<std::string, std::vector<NativeNameHypothesis>>& hyps);

/// decisions must parallel ds.items. Undecidable pairs leave the accuracy
/// denominator and are counted separately.
MetricCell score_pairs_cell(const PairDataset& ds, const std::vector<MatchDecision>& decisions);

// ---------------------------------------------------------------------------

/// Runs the pipeline across a (plan x backend x provider) grid and assembles
/// table-shaped reports.
class EvalHarness {
public:
    EvalHarness(SearchGateway& search, LlmGateway& llm, const PromptLibrary& prompts,
                const RomanizationTable& table, WorkflowOptions base = {});

    MetricReport eval_profile_recall(const LabeledDataset& ds,
                                     const std::vector<PipelinePlan>& plans,
                                     const std::vector<std::string>& backends,
                                     const std::vector<std::string>& providers) const;

    /// Rows are query modes: "plain" (name + native institution) and "email"
    /// (the same, email-augmented for mentions that carry one).
    MetricReport eval_native_name(const LabeledDataset& ds,
                                  const std::vector<std::string>& backends,
                                  const std::vector<std::string>& providers) const;

    MetricReport eval_disambiguation_accuracy(const PairDataset& ds) const;

private:
    Workflow make_workflow(PipelinePlan plan, const std::string& backend,
                           const std::string& provider) const;

    SearchGateway* search_;
    LlmGateway* llm_;
    const PromptLibrary* prompts_;
    const RomanizationTable* table_;
    WorkflowOptions base_;
};

}  // namespace scholarlink
