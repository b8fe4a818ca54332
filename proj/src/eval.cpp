#include "scholarlink/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "scholarlink/errors.hpp"
#include "scholarlink/strings.hpp"
#include "scholarlink/translit.hpp"

namespace scholarlink {

namespace {

nlohmann::json parse_line(const std::string& line, const std::string& path, size_t lineno) {
    try {
        return nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw DatasetError("bad record in " + path + " line " + std::to_string(lineno) + ": " +
                           e.what());
    }
}

std::optional<std::string> opt_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

}  // namespace

LabeledDataset LabeledDataset::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open dataset: " + path);
    LabeledDataset ds;
    ds.name = std::filesystem::path(path).stem().string();
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (strings::trim(line).empty()) continue;
        auto j = parse_line(line, path, lineno);
        if (j.contains("dataset")) {  // optional header record
            ds.name = j.at("dataset").get<std::string>();
            if (j.contains("description")) ds.description = j.at("description").get<std::string>();
            continue;
        }
        LabeledItem item;
        try {
            item.id = j.at("id").get<std::string>();
            item.mention = parse_mention(j.at("mention"));
            const auto& g = j.at("gold");
            item.gold.profile_found = g.at("profile_found").get<bool>();
            item.gold.native_name = opt_string(g, "native_name");
            item.gold.same_as = opt_string(g, "same_as");
            item.gold.workplace = opt_string(g, "workplace");
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw DatasetError("bad record in " + path + " line " + std::to_string(lineno) +
                               ": " + e.what());
        }
        ds.items.push_back(std::move(item));
    }
    ds.validate();
    return ds;
}

void LabeledDataset::validate() const {
    std::set<std::string> ids;
    for (const auto& item : items) {
        if (item.id.empty()) throw DatasetError("dataset " + name + ": empty item id");
        if (!ids.insert(item.id).second)
            throw DatasetError("dataset " + name + ": duplicate id " + item.id);
    }
    for (const auto& item : items) {
        if (!item.gold.same_as) continue;
        const std::string& partner = *item.gold.same_as;
        auto it = std::find_if(items.begin(), items.end(),
                               [&partner](const LabeledItem& o) { return o.id == partner; });
        if (it == items.end())
            throw DatasetError("dataset " + name + ": " + item.id + " same_as points to missing " +
                               partner);
        if (!it->gold.same_as || *it->gold.same_as != item.id)
            throw DatasetError("dataset " + name + ": same_as not symmetric between " + item.id +
                               " and " + partner);
    }
}

PairDataset PairDataset::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open dataset: " + path);
    PairDataset ds;
    ds.name = std::filesystem::path(path).stem().string();
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (strings::trim(line).empty()) continue;
        auto j = parse_line(line, path, lineno);
        if (j.contains("dataset")) {
            ds.name = j.at("dataset").get<std::string>();
            if (j.contains("description")) ds.description = j.at("description").get<std::string>();
            continue;
        }
        LabeledPair pair;
        try {
            pair.id = j.at("id").get<std::string>();
            pair.a = profile_from_json(j.at("a"));
            pair.b = profile_from_json(j.at("b"));
            pair.same = j.at("same").get<bool>();
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw DatasetError("bad record in " + path + " line " + std::to_string(lineno) +
                               ": " + e.what());
        }
        ds.items.push_back(std::move(pair));
    }
    ds.validate();
    return ds;
}

void PairDataset::validate() const {
    std::set<std::string> ids;
    for (const auto& pair : items) {
        if (pair.id.empty()) throw DatasetError("dataset " + name + ": empty pair id");
        if (!ids.insert(pair.id).second)
            throw DatasetError("dataset " + name + ": duplicate id " + pair.id);
    }
}

std::string percent(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", value * 100.0);
    return buf;
}

void MetricCell::validate() const {
    auto check_rate = [this](const std::optional<Rate>& r, const char* what) {
        if (!r) return;
        if (r->num < 0 || r->den < 0 || r->num > r->den)
            throw DatasetError("metric cell " + provider + "/" + strategy + "/" + backend +
                               ": malformed " + what + " " + std::to_string(r->num) + "/" +
                               std::to_string(r->den));
    };
    check_rate(recall, "recall");
    check_rate(precision, "precision");
    check_rate(accuracy, "accuracy");
    if (n < 0 || false_positives < 0 || undecided < 0)
        throw DatasetError("metric cell " + provider + "/" + strategy + "/" + backend +
                           ": negative count");
}

nlohmann::ordered_json MetricReport::to_json() const {
    nlohmann::ordered_json j;
    j["title"] = title;
    j["dataset"] = dataset;
    j["note"] = note;
    nlohmann::ordered_json cells_json = nlohmann::ordered_json::array();
    for (const auto& c : cells) {
        nlohmann::ordered_json row;
        row["provider"] = c.provider;
        row["strategy"] = c.strategy;
        row["backend"] = c.backend;
        row["n"] = c.n;
        row["false_positives"] = c.false_positives;
        row["undecided"] = c.undecided;
        auto put_rate = [&row](const char* key, const std::optional<Rate>& r) {
            if (!r) return;
            row[key] = nlohmann::ordered_json{
                {"num", r->num}, {"den", r->den}, {"value", r->value()}};
        };
        put_rate("recall", c.recall);
        put_rate("precision", c.precision);
        put_rate("accuracy", c.accuracy);
        cells_json.push_back(std::move(row));
    }
    j["cells"] = std::move(cells_json);
    return j;
}

std::string MetricReport::render_text() const {
    std::vector<std::string> backends;
    for (const auto& c : cells)
        if (std::find(backends.begin(), backends.end(), c.backend) == backends.end())
            backends.push_back(c.backend);
    std::vector<std::pair<std::string, std::string>> rows;  // provider, strategy
    for (const auto& c : cells) {
        std::pair<std::string, std::string> key{c.provider, c.strategy};
        if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
    }
    auto cell_at = [this](const std::string& p, const std::string& s,
                          const std::string& b) -> const MetricCell* {
        for (const auto& c : cells)
            if (c.provider == p && c.strategy == s && c.backend == b) return &c;
        return nullptr;
    };

    struct Block {
        std::string label;
        std::string (*text)(const MetricCell&);
    };
    std::vector<Block> blocks;
    auto has = [this](std::optional<Rate> MetricCell::*m) {
        return std::any_of(cells.begin(), cells.end(),
                           [m](const MetricCell& c) { return (c.*m).has_value(); });
    };
    if (has(&MetricCell::recall))
        blocks.push_back({"recall", [](const MetricCell& c) {
                              return percent(c.recall->value()) + " (" +
                                     std::to_string(c.recall->num) + "/" +
                                     std::to_string(c.recall->den) + ")";
                          }});
    if (has(&MetricCell::precision))
        blocks.push_back({"precision", [](const MetricCell& c) {
                              return percent(c.precision->value()) + " (" +
                                     std::to_string(c.precision->num) + "/" +
                                     std::to_string(c.precision->den) + ")";
                          }});
    if (has(&MetricCell::accuracy))
        blocks.push_back({"accuracy", [](const MetricCell& c) {
                              std::string s = percent(c.accuracy->value()) + " (" +
                                              std::to_string(c.accuracy->num) + "/" +
                                              std::to_string(c.accuracy->den) + ")";
                              if (c.undecided > 0)
                                  s += ", " + std::to_string(c.undecided) + " undecided";
                              return s;
                          }});
    if (std::any_of(cells.begin(), cells.end(),
                    [](const MetricCell& c) { return c.false_positives > 0; }))
        blocks.push_back({"false positives", [](const MetricCell& c) {
                              return std::to_string(c.false_positives);
                          }});

    std::string out = title + "\n";
    out += "dataset: " + dataset + "\n";
    if (!note.empty()) out += "note: " + note + "\n";

    for (const auto& block : blocks) {
        // Assemble the grid, then align columns on their widest entry.
        std::vector<std::vector<std::string>> grid;
        std::vector<std::string> header = {"provider", "strategy"};
        for (const auto& b : backends) header.push_back(b);
        grid.push_back(header);
        for (const auto& [p, s] : rows) {
            std::vector<std::string> line = {p, s};
            for (const auto& b : backends) {
                const MetricCell* c = cell_at(p, s, b);
                line.push_back(c ? block.text(*c) : "-");
            }
            grid.push_back(std::move(line));
        }
        std::vector<size_t> widths(grid[0].size(), 0);
        for (const auto& line : grid)
            for (size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], line[i].size());
        out += "\n[" + block.label + "]\n";
        for (const auto& line : grid) {
            std::string rendered;
            for (size_t i = 0; i < line.size(); ++i) {
                rendered += line[i];
                if (i + 1 < line.size())
                    rendered += std::string(widths[i] - line[i].size() + 2, ' ');
            }
            out += rendered + "\n";
        }
    }
    return out;
}

MetricCell score_profile_cell(const LabeledDataset& ds, const ResolutionResult& result,
                              const ScoringOptions& sopts) {
    MetricCell cell;
    int with_gold = 0;
    int hits = 0;
    for (const auto& item : ds.items) {
        const std::string sid = result.scholar_of(item.id);
        if (!item.gold.profile_found) {
            if (!sid.empty()) ++cell.false_positives;
            continue;
        }
        ++with_gold;
        if (sid.empty()) continue;
        const ScholarProfile* scholar = result.scholar(sid);
        if (!scholar) continue;
        bool correct = true;
        if (item.gold.workplace) {
            correct = scholar->workplace.has_value() &&
                      institutions_equivalent(*scholar->workplace, *item.gold.workplace, sopts);
        }
        if (correct) ++hits;
    }
    cell.n = with_gold;
    cell.recall = Rate{hits, with_gold};
    return cell;
}

MetricCell score_native_cell(
    const LabeledDataset& ds,
    const std::map<std::string, std::vector<NativeNameHypothesis>>& hyps) {
    MetricCell cell;
    int with_gold = 0, hyp_with_gold = 0, with_hyp = 0, top_correct = 0;
    for (const auto& item : ds.items) {
        auto it = hyps.find(item.id);
        if (it == hyps.end()) continue;  // not queried (native-script mention)
        ++cell.n;
        const auto& list = it->second;
        if (item.gold.native_name) {
            ++with_gold;
            if (!list.empty()) ++hyp_with_gold;
        }
        if (!list.empty()) {
            ++with_hyp;
            if (item.gold.native_name && list.front().native_name == *item.gold.native_name)
                ++top_correct;
            else if (!item.gold.native_name)
                ++cell.false_positives;  // hypotheses for a scholar with no native name
        }
    }
    cell.recall = Rate{hyp_with_gold, with_gold};
    cell.precision = Rate{top_correct, with_hyp};
    return cell;
}

MetricCell score_pairs_cell(const PairDataset& ds, const std::vector<MatchDecision>& decisions) {
    if (decisions.size() != ds.items.size())
        throw DatasetError("decision log does not match pair set: " +
                           std::to_string(decisions.size()) + " decisions for " +
                           std::to_string(ds.items.size()) + " pairs");
    MetricCell cell;
    cell.n = static_cast<int>(ds.items.size());
    int decided = 0, correct = 0;
    for (size_t i = 0; i < ds.items.size(); ++i) {
        const Verdict v = decisions[i].verdict;
        if (v == Verdict::undecidable) {
            ++cell.undecided;
            continue;
        }
        ++decided;
        const bool said_same = v == Verdict::same;
        if (said_same == ds.items[i].same) ++correct;
    }
    cell.accuracy = Rate{correct, decided};
    return cell;
}

EvalHarness::EvalHarness(SearchGateway& search, LlmGateway& llm, const PromptLibrary& prompts,
                         const RomanizationTable& table, WorkflowOptions base)
    : search_(&search),
      llm_(&llm),
      prompts_(&prompts),
      table_(&table),
      base_(std::move(base)) {}

Workflow EvalHarness::make_workflow(PipelinePlan plan, const std::string& backend,
                                    const std::string& provider) const {
    WorkflowOptions o = base_;
    o.plan = plan;
    o.backend = backend;
    o.provider = provider;
    return Workflow(*search_, *llm_, *prompts_, *table_, o);
}

MetricReport EvalHarness::eval_profile_recall(const LabeledDataset& ds,
                                              const std::vector<PipelinePlan>& plans,
                                              const std::vector<std::string>& backends,
                                              const std::vector<std::string>& providers) const {
    ds.validate();
    if (ds.items.empty()) throw DatasetError("empty dataset: " + ds.name);

    std::vector<ScholarMention> mentions;
    std::vector<std::string> ids;
    for (const auto& item : ds.items) {
        mentions.push_back(item.mention);
        ids.push_back(item.id);
    }

    MetricReport report;
    report.title = "Scholar profile retrieval recall";
    report.dataset = ds.name;
    report.note =
        "recall = mentions resolved to a profile with the gold workplace / mentions "
        "with an existing profile; resolving a scholar who has no profile counts as "
        "a false positive";
    for (const auto& provider : providers) {
        for (const auto& plan : plans) {
            for (const auto& backend : backends) {
                Workflow wf = make_workflow(plan, backend, provider);
                auto result = wf.resolve(mentions, ids);
                MetricCell cell = score_profile_cell(ds, result, wf.scoring());
                cell.provider = provider;
                cell.strategy = to_string(plan);
                cell.backend = backend;
                cell.validate();
                report.cells.push_back(std::move(cell));
            }
        }
    }
    return report;
}

MetricReport EvalHarness::eval_native_name(const LabeledDataset& ds,
                                           const std::vector<std::string>& backends,
                                           const std::vector<std::string>& providers) const {
    ds.validate();
    if (ds.items.empty()) throw DatasetError("empty dataset: " + ds.name);

    MetricReport report;
    report.title = "Native-name retrieval";
    report.dataset = ds.name;
    report.note =
        "recall = queried mentions yielding a hypothesis / mentions with a gold native "
        "name; precision = top hypothesis equal to gold / mentions yielding any; "
        "native-script mentions are exempt; the email mode augments queries for "
        "mentions that carry an address";

    static const InstitutionLexicon empty_lexicon;
    for (const auto& provider : providers) {
        for (const std::string mode : {"plain", "email"}) {
            for (const auto& backend : backends) {
                TranslateOptions topts;
                topts.backend = backend;
                topts.provider = provider;
                topts.k = base_.k;
                topts.max_retries = base_.max_retries;
                TranslateAgent agent(*search_, *llm_, *prompts_, *table_,
                                     base_.lexicon ? *base_.lexicon : empty_lexicon, topts);
                std::map<std::string, std::vector<NativeNameHypothesis>> hyps;
                for (const auto& item : ds.items) {
                    if (detect_script(item.mention.raw_name) != Script::latin) continue;
                    const bool use_email = mode == "email" && item.mention.email &&
                                           !item.mention.email->empty();
                    hyps[item.id] = agent.retrieve_native_name(item.mention, use_email);
                }
                MetricCell cell = score_native_cell(ds, hyps);
                cell.provider = provider;
                cell.strategy = mode;
                cell.backend = backend;
                cell.validate();
                report.cells.push_back(std::move(cell));
            }
        }
    }
    return report;
}

MetricReport EvalHarness::eval_disambiguation_accuracy(const PairDataset& ds) const {
    ds.validate();
    if (ds.items.empty()) throw DatasetError("empty dataset: " + ds.name);

    ScoringOptions sopts;
    sopts.threshold = base_.threshold;
    sopts.llm_keyword_tier = base_.llm_keyword_fallback;
    sopts.llm_institution_fallback = base_.llm_institution_fallback;
    sopts.max_retries = base_.max_retries;
    sopts.llm = llm_;
    sopts.prompts = prompts_;
    sopts.provider = base_.provider;
    sopts.lexicon = base_.lexicon;

    std::vector<MatchDecision> decisions;
    decisions.reserve(ds.items.size());
    for (const auto& pair : ds.items) decisions.push_back(compare(pair.a, pair.b, sopts));

    MetricCell cell = score_pairs_cell(ds, decisions);
    cell.provider = base_.provider;
    cell.strategy = "points@" + std::to_string(base_.threshold);
    cell.backend = "-";
    cell.validate();

    MetricReport report;
    report.title = "Name disambiguation accuracy";
    report.dataset = ds.name;
    report.note = "accuracy over decided pairs; pairs without enough evidence to decide "
                  "are excluded from the denominator and counted separately";
    report.cells.push_back(std::move(cell));
    return report;
}

}  // namespace scholarlink
