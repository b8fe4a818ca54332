#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scholarlink/disambig.hpp"
#include "scholarlink/extract.hpp"
#include "scholarlink/translate.hpp"

namespace scholarlink {

/// Stages of the per-mention resolution state machine.
enum class Step {
    consistency_check,   // classify the mention's script, plan the route
    direct_search,       // native-script mention: search the raw rendering
    translate_enrich,    // latin mention: translate institution, query variants
    native_name_search,  // hypothesize the native name, search it
    multi_identity,      // extraction produced several distinct scholars
    done,
};

std::string to_string(Step s);

/// Which query stages a run is allowed to use (the evaluation grid axis).
enum class PipelinePlan {
    english_only,        // romanized name + source-language institution only
    native_institution,  // + translated-institution queries (and email variant)
    full,                // + native-name hypothesis stage
};

std::string to_string(PipelinePlan p);
PipelinePlan plan_from_string(const std::string& s);

/// Terminal record of one mention's trip through the state machine.
struct WorkflowState {
    ScholarMention mention;
    std::string mention_id;
    Step step = Step::consistency_check;
    std::vector<Step> path;  // visited steps, in order, ending with done
    QueryExtras extras;      // accumulated enrichment
    std::vector<NativeNameHypothesis> hypotheses;
    ExtractionOutcome outcome;
    std::vector<std::string> log;  // one line per event, chronological
};

nlohmann::ordered_json state_to_json(const WorkflowState& s);

struct WorkflowOptions {
    std::string backend = "fixture";
    std::string provider = "stub";
    int k = 3;
    int max_retries = 2;
    int threshold = 7;
    PipelinePlan plan = PipelinePlan::full;
    bool llm_keyword_fallback = false;      // score keyword relatedness via model
    bool llm_institution_fallback = false;  // institution equivalence via model
    const InstitutionLexicon* lexicon = nullptr;
    int workers = 1;  // fan-out width for resolve()
};

/// One logged pairwise comparison made during agglomeration.
struct PairDecisionRecord {
    std::string left;   // existing scholar id (or mention id in evaluations)
    std::string right;  // incoming mention id
    std::string note;   // "agglomeration" | "consolidation"
    MatchDecision decision;
};

struct ResolutionResult {
    std::vector<WorkflowState> states;  // one per input mention, input order
    std::vector<std::pair<std::string, std::string>> mapping;  // mention id -> scholar id
    std::vector<std::string> scholar_ids;                      // parallel to registry
    std::vector<ScholarProfile> registry;
    std::vector<std::string> unresolved;  // mention ids with no profile
    std::vector<PairDecisionRecord> decisions;

    const ScholarProfile* scholar(const std::string& scholar_id) const;
    std::string scholar_of(const std::string& mention_id) const;  // "" when unresolved
};

nlohmann::ordered_json resolution_to_json(const ResolutionResult& r);

/// Writes mapping.jsonl / registry.jsonl / unresolved.jsonl / decisions.jsonl /
/// runlog.jsonl under out_dir (created if missing).
void write_resolution_files(const ResolutionResult& r, const std::string& out_dir);

/// The per-mention state machine plus the cross-mention agglomeration that
/// assembles a consistent scholar registry.
class Workflow {
public:
    Workflow(SearchGateway& search, LlmGateway& llm, const PromptLibrary& prompts,
             const RomanizationTable& table, WorkflowOptions opts = {});

    /// Runs one mention to a terminal state. Never throws for "nothing found";
    /// gateway and configuration failures do propagate.
    WorkflowState run(const ScholarMention& mention) const;

    /// Runs every mention (concurrently when options().workers > 1), then folds
    /// the outcomes into a scholar registry sequentially in input order.
    /// ids must be unique and parallel to mentions; empty means m0, m1, ...
    ResolutionResult resolve(const std::vector<ScholarMention>& mentions,
                             std::vector<std::string> ids = {}) const;

    const WorkflowOptions& options() const { return opts_; }
    ScoringOptions scoring() const;

private:
    ExtractionOutcome attempt(const ScholarMention& m, Strategy strategy,
                              const QueryExtras& extras, WorkflowState& st) const;
    WorkflowState finish(WorkflowState st) const;

    SearchGateway* search_;
    LlmGateway* llm_;
    const PromptLibrary* prompts_;
    const RomanizationTable* table_;
    WorkflowOptions opts_;
    ExtractAgent extract_;
    TranslateAgent translate_;
};

}  // namespace scholarlink
