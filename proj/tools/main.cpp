// scholarlink command-line shell: one static config file drives every
// command; credentials are named by environment variable, never stored.
//
// Exit codes: 0 success (including "nothing found"), 2 usage, 3 configuration,
// 4 gateway/backend/provider failure, 5 data/schema failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scholarlink/config.hpp"
#include "scholarlink/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scholarlink;

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

/// Every command leaves a manifest beside its outputs so a result directory
/// says exactly which configuration produced it. No timestamps: identical
/// config and fixtures must produce identical files.
void write_manifest(const RunConfig& cfg, const std::string& command) {
    fs::create_directories(cfg.out_dir);
    nlohmann::ordered_json m;
    m["command"] = command;
    m["config_hash"] = cfg.hash();
    m["cache_epoch"] = cfg.cache_epoch;
    m["backend"] = cfg.backend;
    m["provider"] = cfg.provider;
    m["plan"] = to_string(cfg.plan);
    m["k"] = cfg.k;
    m["threshold"] = cfg.threshold;
    m["max_retries"] = cfg.max_retries;
    m["workers"] = cfg.workers;
    m["seed"] = cfg.seed;
    write_text_file((fs::path(cfg.out_dir) / "manifest.json").string(), m.dump(2));
}

/// Flags shared by the mention-taking commands.
struct MentionFlags {
    std::string name;
    std::string affiliation;
    std::string email;
    std::string origin = "paper_author";
    std::string source_id = "cli";
    std::string metadata;

    void add_to(CLI::App& cmd, bool need_affiliation) {
        cmd.add_option("--name", name, "romanized or native name, as printed")->required();
        auto* aff = cmd.add_option("--affiliation", affiliation, "affiliation, as printed");
        if (need_affiliation) aff->required();
        cmd.add_option("--email", email, "contact email, when known");
        cmd.add_option("--origin", origin, "paper_author | award_recipient")
            ->default_val("paper_author");
        cmd.add_option("--source-id", source_id, "originating document id")
            ->default_val("cli");
        cmd.add_option("--metadata", metadata, "paper title/abstract text, when known");
    }

    ScholarMention build() const {
        ScholarMention m;
        m.raw_name = name;
        m.affiliation = affiliation;
        if (!email.empty()) m.email = email;
        try {
            m.origin = mention_origin_from_string(origin);
        } catch (const Error&) {
            throw UsageError("unknown origin \"" + origin +
                             "\" (expected paper_author or award_recipient)");
        }
        m.source_id = source_id;
        if (!metadata.empty()) m.paper_metadata = metadata;
        m.validate();
        return m;
    }
};

int cmd_extract(RunConfig cfg, const MentionFlags& flags) {
    const ScholarMention mention = flags.build();
    Runtime rt(cfg);
    Workflow flow = rt.make_workflow();
    WorkflowState st = flow.run(mention);

    write_manifest(cfg, "extract");
    write_text_file((fs::path(cfg.out_dir) / "state.json").string(),
                    state_to_json(st).dump(2));

    if (st.outcome.profile) {
        std::cout << profile_to_json(*st.outcome.profile).dump(2) << "\n";
    } else if (!st.outcome.candidates.empty()) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& c : st.outcome.candidates) arr.push_back(profile_to_json(c));
        std::cout << arr.dump(2) << "\n";
    } else {
        std::cout << "null\n";
    }
    return 0;
}

int cmd_translate_name(RunConfig cfg, const MentionFlags& flags, bool use_email) {
    const ScholarMention mention = flags.build();
    if (use_email && !mention.email)
        throw UsageError("--use-email requires --email");

    Runtime rt(cfg);
    TranslateOptions topts;
    topts.backend = cfg.backend;
    topts.provider = cfg.provider;
    topts.k = cfg.k;
    topts.max_retries = cfg.max_retries;
    TranslateAgent agent(rt.search, rt.llm, rt.prompts, rt.table, rt.lexicon, topts);

    const auto hyps = agent.retrieve_native_name(mention, use_email);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& h : hyps) arr.push_back(hypothesis_to_json(h));

    write_manifest(cfg, "translate-name");
    write_text_file((fs::path(cfg.out_dir) / "hypotheses.json").string(), arr.dump(2));
    std::cout << arr.dump(2) << "\n";
    return 0;
}

int cmd_compare(RunConfig cfg, const std::string& left, const std::string& right) {
    const ScholarProfile a = profile_from_json(read_json_file(left));
    const ScholarProfile b = profile_from_json(read_json_file(right));

    Runtime rt(cfg);
    Workflow flow = rt.make_workflow();
    const MatchDecision d = compare(a, b, flow.scoring());

    write_manifest(cfg, "compare");
    write_text_file((fs::path(cfg.out_dir) / "decision.json").string(), d.to_json().dump(2));
    std::cout << d.render_text() << "\n";
    return 0;
}

int cmd_run(RunConfig cfg, const std::string& mentions_path) {
    std::ifstream in(mentions_path, std::ios::binary);
    if (!in) throw DatasetError("cannot open mention file: " + mentions_path);

    std::vector<ScholarMention> mentions;
    std::vector<std::string> ids;
    size_t with_id = 0;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(mentions_path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (j.contains("id")) {
            ids.push_back(j.at("id").get<std::string>());
            ++with_id;
        } else {
            ids.push_back("m" + std::to_string(mentions.size()));
        }
        mentions.push_back(parse_mention(j));
    }
    if (with_id != 0 && with_id != mentions.size())
        throw DatasetError(mentions_path +
                           ": either every mention line carries an \"id\" or none does");
    if (with_id == 0) ids.clear();  // let resolve() assign its defaults

    Runtime rt(cfg);
    Workflow flow = rt.make_workflow();
    ResolutionResult r = flow.resolve(mentions, ids);

    write_manifest(cfg, "run");
    write_resolution_files(r, cfg.out_dir);

    std::cout << "mentions:   " << mentions.size() << "\n"
              << "scholars:   " << r.registry.size() << "\n"
              << "mapped:     " << r.mapping.size() << "\n"
              << "unresolved: " << r.unresolved.size();
    if (!r.unresolved.empty()) {
        std::cout << " (";
        for (size_t i = 0; i < r.unresolved.size(); ++i)
            std::cout << (i ? ", " : "") << r.unresolved[i];
        std::cout << ")";
    }
    std::cout << "\n"
              << "files:      " << cfg.out_dir << "\n";
    return 0;
}

int cmd_evaluate(RunConfig cfg, const std::string& dataset_path,
                 const std::string& pairs_path) {
    if (dataset_path.empty() && pairs_path.empty())
        throw UsageError("evaluate needs --dataset and/or --pairs");

    Runtime rt(cfg);
    EvalHarness harness = rt.make_harness();
    nlohmann::ordered_json bundle = nlohmann::ordered_json::object();
    std::string text;

    if (!dataset_path.empty()) {
        const LabeledDataset ds = LabeledDataset::load(dataset_path);
        const std::vector<PipelinePlan> plans = {PipelinePlan::english_only,
                                                 PipelinePlan::native_institution,
                                                 PipelinePlan::full};
        const MetricReport recall =
            harness.eval_profile_recall(ds, plans, {cfg.backend}, {cfg.provider});
        const MetricReport native =
            harness.eval_native_name(ds, {cfg.backend}, {cfg.provider});
        bundle["profile_recall"] = recall.to_json();
        bundle["native_name"] = native.to_json();
        text += recall.render_text() + "\n" + native.render_text();
    }
    if (!pairs_path.empty()) {
        const PairDataset pd = PairDataset::load(pairs_path);
        const MetricReport acc = harness.eval_disambiguation_accuracy(pd);
        bundle["disambiguation"] = acc.to_json();
        if (!text.empty()) text += "\n";
        text += acc.render_text();
    }

    write_manifest(cfg, "evaluate");
    write_text_file((fs::path(cfg.out_dir) / "report.json").string(), bundle.dump(2));
    write_text_file((fs::path(cfg.out_dir) / "report.txt").string(), text);
    std::cout << text << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scholarlink: resolve romanized scholar mentions to structured profiles"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags are accepted after the subcommand name too

    std::string config_path;
    app.add_option("--config", config_path, "run configuration file (JSON)")->required();

    std::string backend, provider, strategy, out;
    int k = 0, threshold = 0;
    unsigned long seed = 0;
    auto* backend_opt = app.add_option("--backend", backend, "override configured backend");
    auto* provider_opt = app.add_option("--provider", provider, "override configured provider");
    auto* strategy_opt = app.add_option(
        "--strategy", strategy, "pipeline plan: english_only | native_institution | full");
    auto* k_opt = app.add_option("--k", k, "search depth per query");
    auto* threshold_opt = app.add_option("--threshold", threshold, "same-person score threshold");
    auto* seed_opt = app.add_option("--seed", seed, "randomness seed recorded in the manifest");
    auto* out_opt = app.add_option("--out", out, "output directory");

    MentionFlags extract_flags;
    CLI::App* extract = app.add_subcommand("extract", "resolve one mention to a profile");
    extract_flags.add_to(*extract, /*need_affiliation=*/true);

    MentionFlags tn_flags;
    bool use_email = false;
    CLI::App* translate_name =
        app.add_subcommand("translate-name", "recover native-script name hypotheses");
    tn_flags.add_to(*translate_name, /*need_affiliation=*/true);
    translate_name->add_flag("--use-email", use_email, "add the email to the search query");

    std::string left_path, right_path;
    CLI::App* cmp = app.add_subcommand("compare", "score two stored profiles");
    cmp->add_option("left", left_path, "profile JSON file")->required();
    cmp->add_option("right", right_path, "profile JSON file")->required();

    std::string mentions_path;
    CLI::App* run = app.add_subcommand("run", "resolve a mention file into a registry");
    run->add_option("--mentions", mentions_path, "JSONL file, one mention per line")
        ->required();

    std::string dataset_path, pairs_path;
    CLI::App* evaluate = app.add_subcommand("evaluate", "score the pipeline against labels");
    evaluate->add_option("--dataset", dataset_path, "labeled mention JSONL");
    evaluate->add_option("--pairs", pairs_path, "labeled profile-pair JSONL");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg = RunConfig::load(config_path);
        if (backend_opt->count()) cfg.backend = backend;
        if (provider_opt->count()) cfg.provider = provider;
        if (strategy_opt->count()) {
            try {
                cfg.plan = plan_from_string(strategy);
            } catch (const Error&) {
                throw UsageError("unknown strategy \"" + strategy +
                                 "\" (expected english_only, native_institution, or full)");
            }
        }
        if (k_opt->count()) cfg.k = k;
        if (threshold_opt->count()) cfg.threshold = threshold;
        if (seed_opt->count()) cfg.seed = seed;
        if (out_opt->count()) cfg.out_dir = fs::absolute(out).lexically_normal().string();
        cfg.validate();

        if (extract->parsed()) return cmd_extract(std::move(cfg), extract_flags);
        if (translate_name->parsed())
            return cmd_translate_name(std::move(cfg), tn_flags, use_email);
        if (cmp->parsed()) return cmd_compare(std::move(cfg), left_path, right_path);
        if (run->parsed()) return cmd_run(std::move(cfg), mentions_path);
        if (evaluate->parsed()) return cmd_evaluate(std::move(cfg), dataset_path, pairs_path);
        throw UsageError("no command selected");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.error_class());
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
