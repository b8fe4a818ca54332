#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace scholarlink {

enum class Script { latin, native_cjk, mixed };

std::string to_string(Script s);

/// Classifies a name string. native_cjk: at least one CJK codepoint and no
/// Latin letters; latin: every letter is Latin; mixed otherwise.
/// Throws EmptyName on whitespace-only input.
Script detect_script(const std::string& name);

/// Tone-free Hanyu Pinyin data: a syllable inventory, a character-to-syllables
/// map (homophones and polyphones as sets), and a romanized surname list used
/// for partitioning undelimited names. Immutable after load.
class RomanizationTable {
public:
    // table file: UTF-8 TSV `character<TAB>syllable[,syllable...]`
    // surname file: one romanized surname per line
    static RomanizationTable load(const std::string& table_path, const std::string& surname_path);

    bool is_syllable(const std::string& s) const { return syllables_.count(s) > 0; }
    const std::vector<std::string>* syllables_for(const std::string& utf8_char) const;
    bool is_surname(const std::string& romanized) const { return surnames_.count(romanized) > 0; }

    // Minimal-count decomposition of a lowercase letter string into inventory
    // syllables, leftmost-longest on ties. Empty when no decomposition exists.
    std::vector<std::string> segment(const std::string& letters) const;

    const std::unordered_map<std::string, std::vector<std::string>>& characters() const {
        return char_map_;
    }
    size_t max_surname_length() const { return max_surname_len_; }

private:
    std::unordered_set<std::string> syllables_;
    std::unordered_map<std::string, std::vector<std::string>> char_map_;
    std::unordered_set<std::string> surnames_;
    size_t max_surname_len_ = 0;
};

/// A romanized name reduced to its syllable partition, plus the rendering
/// variants derivable from it. Unsegmentable names keep the raw string as an
/// opaque token and match by case-folded equality only.
struct NameVariantSet {
    std::optional<std::string> native;
    std::vector<std::string> syllables;  // lowercase, surname syllables first
    size_t surname_len = 0;
    std::string opaque_token;  // set iff syllables is empty

    bool segmented() const { return !syllables.empty(); }
    std::vector<std::string> surname_syllables() const {
        return {syllables.begin(), syllables.begin() + static_cast<long>(surname_len)};
    }
    std::vector<std::string> given_syllables() const {
        return {syllables.begin() + static_cast<long>(surname_len), syllables.end()};
    }
};

/// Splits "Surname, Given" at the comma; undelimited forms partition against
/// the surname inventory (first token preferred, then last). Names with no
/// valid decomposition come back as opaque tokens, never an error.
NameVariantSet parse_romanized(const std::string& name, const RomanizationTable& table);

/// Enumerates rendering variants: "Zhang Yihui", "Yihui Zhang",
/// "Zhang, Yihui", "Zhang Yi-hui", "Y. Zhang", "Zhang Y.", lowercase forms.
std::vector<std::string> generate_variants(const NameVariantSet& v);

enum class Consistency { consistent, inconsistent, indeterminate };

std::string to_string(Consistency c);

struct SyllableAlignment {
    std::string character;  // one native character
    std::string syllable;   // the romanized syllable it matched
};

struct ConsistencyResult {
    Consistency verdict = Consistency::indeterminate;
    std::vector<SyllableAlignment> alignment;  // filled when consistent
    std::string note;                          // reason when indeterminate

    explicit operator bool() const { return verdict == Consistency::consistent; }
};

/// True iff the romanized name's letters can be produced by choosing one
/// syllable per native character, in either name order. A native character
/// missing from the table yields indeterminate, not false.
ConsistencyResult consistent(const std::string& romanized, const std::string& native,
                             const RomanizationTable& table);

}  // namespace scholarlink
