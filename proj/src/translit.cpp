#include "scholarlink/translit.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "scholarlink/errors.hpp"
#include "scholarlink/strings.hpp"

namespace scholarlink {

namespace {

// Standard tone-free Mandarin syllable inventory ("v" for "ü", plus the
// byline spellings lv/lu and nv/nu). The table file's character map may only
// cover a subset; segmentation uses the full inventory.
const char* kSyllables[] = {
    "a", "ai", "an", "ang", "ao",
    "ba", "bai", "ban", "bang", "bao", "bei", "ben", "beng", "bi", "bian", "biao", "bie", "bin",
    "bing", "bo", "bu",
    "ca", "cai", "can", "cang", "cao", "ce", "cen", "ceng", "cha", "chai", "chan", "chang", "chao",
    "che", "chen", "cheng", "chi", "chong", "chou", "chu", "chua", "chuai", "chuan", "chuang",
    "chui", "chun", "chuo", "ci", "cong", "cou", "cu", "cuan", "cui", "cun", "cuo",
    "da", "dai", "dan", "dang", "dao", "de", "dei", "den", "deng", "di", "dia", "dian", "diao",
    "die", "ding", "diu", "dong", "dou", "du", "duan", "dui", "dun", "duo",
    "e", "ei", "en", "eng", "er",
    "fa", "fan", "fang", "fei", "fen", "feng", "fo", "fou", "fu",
    "ga", "gai", "gan", "gang", "gao", "ge", "gei", "gen", "geng", "gong", "gou", "gu", "gua",
    "guai", "guan", "guang", "gui", "gun", "guo",
    "ha", "hai", "han", "hang", "hao", "he", "hei", "hen", "heng", "hong", "hou", "hu", "hua",
    "huai", "huan", "huang", "hui", "hun", "huo",
    "ji", "jia", "jian", "jiang", "jiao", "jie", "jin", "jing", "jiong", "jiu", "ju", "juan",
    "jue", "jun",
    "ka", "kai", "kan", "kang", "kao", "ke", "kei", "ken", "keng", "kong", "kou", "ku", "kua",
    "kuai", "kuan", "kuang", "kui", "kun", "kuo",
    "la", "lai", "lan", "lang", "lao", "le", "lei", "leng", "li", "lia", "lian", "liang", "liao",
    "lie", "lin", "ling", "liu", "lo", "long", "lou", "lu", "luan", "lun", "luo", "lv", "lve",
    "ma", "mai", "man", "mang", "mao", "me", "mei", "men", "meng", "mi", "mian", "miao", "mie",
    "min", "ming", "miu", "mo", "mou", "mu",
    "na", "nai", "nan", "nang", "nao", "ne", "nei", "nen", "neng", "ni", "nian", "niang", "niao",
    "nie", "nin", "ning", "niu", "nong", "nou", "nu", "nuan", "nuo", "nv", "nve",
    "o", "ou",
    "pa", "pai", "pan", "pang", "pao", "pei", "pen", "peng", "pi", "pian", "piao", "pie", "pin",
    "ping", "po", "pou", "pu",
    "qi", "qia", "qian", "qiang", "qiao", "qie", "qin", "qing", "qiong", "qiu", "qu", "quan",
    "que", "qun",
    "ran", "rang", "rao", "re", "ren", "reng", "ri", "rong", "rou", "ru", "rua", "ruan", "rui",
    "run", "ruo",
    "sa", "sai", "san", "sang", "sao", "se", "sen", "seng", "sha", "shai", "shan", "shang",
    "shao", "she", "shei", "shen", "sheng", "shi", "shou", "shu", "shua", "shuai", "shuan",
    "shuang", "shui", "shun", "shuo", "si", "song", "sou", "su", "suan", "sui", "sun", "suo",
    "ta", "tai", "tan", "tang", "tao", "te", "tei", "teng", "ti", "tian", "tiao", "tie", "ting",
    "tong", "tou", "tu", "tuan", "tui", "tun", "tuo",
    "wa", "wai", "wan", "wang", "wei", "wen", "weng", "wo", "wu",
    "xi", "xia", "xian", "xiang", "xiao", "xie", "xin", "xing", "xiong", "xiu", "xu", "xuan",
    "xue", "xun",
    "ya", "yan", "yang", "yao", "ye", "yi", "yin", "ying", "yo", "yong", "you", "yu", "yuan",
    "yue", "yun",
    "za", "zai", "zan", "zang", "zao", "ze", "zei", "zen", "zeng", "zha", "zhai", "zhan",
    "zhang", "zhao", "zhe", "zhei", "zhen", "zheng", "zhi", "zhong", "zhou", "zhu", "zhua",
    "zhuai", "zhuan", "zhuang", "zhui", "zhun", "zhuo", "zi", "zong", "zou", "zu", "zuan", "zui",
    "zun", "zuo",
};

constexpr size_t kMaxSyllableLen = 6;

std::vector<std::string> letter_tokens(const std::string& name) {
    std::vector<std::string> out;
    std::string cur;
    size_t i = 0;
    while (i < name.size()) {
        size_t start = i;
        char32_t cp = strings::decode_utf8(name, i);
        if (strings::is_latin_letter(cp)) {
            cur += strings::to_lower(name.substr(start, i - start));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += p;
    return out;
}

}  // namespace

std::string to_string(Script s) {
    switch (s) {
        case Script::latin: return "latin";
        case Script::native_cjk: return "native_cjk";
        case Script::mixed: return "mixed";
    }
    return "latin";
}

std::string to_string(Consistency c) {
    switch (c) {
        case Consistency::consistent: return "consistent";
        case Consistency::inconsistent: return "inconsistent";
        case Consistency::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

Script detect_script(const std::string& name) {
    if (strings::normalize_ws(name).empty()) throw EmptyName();
    bool has_cjk = false, has_latin = false, has_other_letter = false;
    size_t i = 0;
    while (i < name.size()) {
        char32_t cp = strings::decode_utf8(name, i);
        if (strings::is_cjk(cp)) {
            has_cjk = true;
        } else if (strings::is_latin_letter(cp)) {
            has_latin = true;
        } else if (cp >= 0x370 && !(cp >= 0x2000 && cp <= 0x206F) &&
                   !(cp >= 0x3000 && cp <= 0x303F) && !(cp >= 0xFF00 && cp <= 0xFFEF)) {
            has_other_letter = true;  // non-Latin alphabets; CJK punctuation excluded
        }
    }
    if (has_cjk && !has_latin) return Script::native_cjk;
    if (!has_cjk && !has_other_letter) return Script::latin;
    return Script::mixed;
}

RomanizationTable RomanizationTable::load(const std::string& table_path,
                                          const std::string& surname_path) {
    RomanizationTable t;
    for (const char* s : kSyllables) t.syllables_.insert(s);

    std::ifstream table(table_path);
    if (!table) throw ConfigError("cannot open romanization table: " + table_path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(table, line)) {
        ++lineno;
        line = strings::trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError("romanization table line " + std::to_string(lineno) +
                             ": expected character<TAB>syllables");
        std::string ch = strings::trim(line.substr(0, tab));
        std::vector<std::string> syls;
        for (auto& s : strings::split(line.substr(tab + 1), ',')) {
            std::string syl = strings::to_lower(strings::trim(s));
            if (syl.empty()) continue;
            syls.push_back(syl);
            t.syllables_.insert(syl);  // inventory stays closed under the map's range
        }
        if (ch.empty() || syls.empty())
            throw ParseError("romanization table line " + std::to_string(lineno) +
                             ": empty character or syllable list");
        auto& slot = t.char_map_[ch];
        for (auto& s : syls)
            if (std::find(slot.begin(), slot.end(), s) == slot.end()) slot.push_back(s);
    }

    std::ifstream surnames(surname_path);
    if (!surnames) throw ConfigError("cannot open surname list: " + surname_path);
    while (std::getline(surnames, line)) {
        std::string s = strings::to_lower(strings::trim(line));
        if (s.empty() || s[0] == '#') continue;
        t.surnames_.insert(s);
        t.max_surname_len_ = std::max(t.max_surname_len_, s.size());
    }
    return t;
}

const std::vector<std::string>* RomanizationTable::syllables_for(
    const std::string& utf8_char) const {
    auto it = char_map_.find(utf8_char);
    return it == char_map_.end() ? nullptr : &it->second;
}

std::vector<std::string> RomanizationTable::segment(const std::string& letters) const {
    if (letters.empty()) return {};
    const size_t n = letters.size();
    const int kInf = std::numeric_limits<int>::max();
    std::vector<int> best(n + 1, kInf);  // min syllables needed from position i
    best[n] = 0;
    for (size_t i = n; i-- > 0;) {
        size_t max_len = std::min(kMaxSyllableLen, n - i);
        for (size_t len = 1; len <= max_len; ++len) {
            if (best[i + len] == kInf) continue;
            if (!is_syllable(letters.substr(i, len))) continue;
            best[i] = std::min(best[i], best[i + len] + 1);
        }
    }
    if (best[0] == kInf) return {};

    std::vector<std::string> out;
    size_t pos = 0;
    while (pos < n) {
        size_t max_len = std::min(kMaxSyllableLen, n - pos);
        for (size_t len = max_len; len >= 1; --len) {  // leftmost-longest tie break
            if (best[pos + len] != kInf && best[pos + len] + 1 == best[pos] &&
                is_syllable(letters.substr(pos, len))) {
                out.push_back(letters.substr(pos, len));
                pos += len;
                break;
            }
        }
    }
    return out;
}

namespace {

NameVariantSet opaque(const std::string& name) {
    NameVariantSet v;
    v.opaque_token = strings::normalize_ws(name);
    return v;
}

// Tries to read `tokens` as surname-first; each token segmented separately so
// hyphenated given names keep their printed syllable split.
std::optional<NameVariantSet> assemble(const std::vector<std::string>& surname_tokens,
                                       const std::vector<std::string>& given_tokens,
                                       const RomanizationTable& table) {
    NameVariantSet v;
    for (const auto& tok : surname_tokens) {
        auto syls = table.segment(tok);
        if (syls.empty()) return std::nullopt;
        v.syllables.insert(v.syllables.end(), syls.begin(), syls.end());
    }
    v.surname_len = v.syllables.size();
    if (v.surname_len == 0) return std::nullopt;
    for (const auto& tok : given_tokens) {
        auto syls = table.segment(tok);
        if (syls.empty()) return std::nullopt;
        v.syllables.insert(v.syllables.end(), syls.begin(), syls.end());
    }
    if (v.syllables.size() == v.surname_len) return std::nullopt;  // no given name
    return v;
}

}  // namespace

NameVariantSet parse_romanized(const std::string& name, const RomanizationTable& table) {
    std::string trimmed = strings::normalize_ws(name);
    if (trimmed.empty()) throw EmptyName();

    auto comma = trimmed.find(',');
    if (comma != std::string::npos) {
        auto sur = letter_tokens(trimmed.substr(0, comma));
        auto given = letter_tokens(trimmed.substr(comma + 1));
        if (auto v = assemble(sur, given, table)) return *v;
        return opaque(name);
    }

    auto toks = letter_tokens(trimmed);
    if (toks.empty()) return opaque(name);

    if (toks.size() == 1) {
        // Undelimited single token: longest known surname prefix, rest is given.
        const std::string& word = toks[0];
        size_t limit = std::min(word.size() - 1, table.max_surname_length());
        for (size_t len = limit; len >= 1; --len) {
            if (!table.is_surname(word.substr(0, len))) continue;
            if (auto v = assemble({word.substr(0, len)}, {word.substr(len)}, table)) return *v;
        }
        return opaque(name);
    }

    // Undelimited multi-token: surname position decided by the inventory,
    // first token preferred (byline order), then last (western order).
    if (table.is_surname(toks.front())) {
        std::vector<std::string> given(toks.begin() + 1, toks.end());
        if (auto v = assemble({toks.front()}, given, table)) return *v;
    }
    if (table.is_surname(toks.back())) {
        std::vector<std::string> given(toks.begin(), toks.end() - 1);
        if (auto v = assemble({toks.back()}, given, table)) return *v;
    }
    return opaque(name);
}

std::vector<std::string> generate_variants(const NameVariantSet& v) {
    std::vector<std::string> out;
    auto add = [&out](const std::string& s) {
        if (!s.empty() && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    };

    if (!v.segmented()) {
        add(v.opaque_token);
        add(strings::to_lower(v.opaque_token));
        return out;
    }

    std::string surname = strings::title_case_word(join(v.surname_syllables()));
    auto given = v.given_syllables();
    std::string given_cat = strings::title_case_word(join(given));
    std::string given_hyphen = strings::title_case_word(given[0]);
    for (size_t i = 1; i < given.size(); ++i) given_hyphen += "-" + given[i];
    std::string initial(1, static_cast<char>(std::toupper(given[0][0])));

    add(surname + " " + given_cat);        // Zhang Yihui
    add(given_cat + " " + surname);        // Yihui Zhang
    add(surname + ", " + given_cat);       // Zhang, Yihui
    if (given.size() > 1) {
        add(surname + " " + given_hyphen);  // Zhang Yi-hui
        add(given_hyphen + " " + surname);
    }
    add(initial + ". " + surname);         // Y. Zhang
    add(surname + " " + initial + ".");    // Zhang Y.
    add(strings::to_lower(surname + " " + given_cat));
    add(strings::to_lower(given_cat + " " + surname));
    add(strings::to_lower(surname + ", " + given_cat));
    return out;
}

ConsistencyResult consistent(const std::string& romanized, const std::string& native,
                             const RomanizationTable& table) {
    if (strings::normalize_ws(romanized).empty() || strings::normalize_ws(native).empty())
        throw EmptyName();

    ConsistencyResult res;
    std::vector<std::string> chars;
    for (const auto& c : strings::utf8_chars(native)) {
        size_t i = 0;
        if (strings::is_cjk(strings::decode_utf8(c, i))) chars.push_back(c);
    }
    if (chars.empty()) {
        res.note = "no CJK characters in native name";
        return res;
    }
    std::vector<const std::vector<std::string>*> choices;
    for (const auto& c : chars) {
        const auto* syls = table.syllables_for(c);
        if (!syls) {
            res.note = "character not in romanization table: " + c;
            return res;
        }
        choices.push_back(syls);
    }

    auto toks = letter_tokens(romanized);
    if (toks.empty()) {
        res.note = "no Latin letters in romanized name";
        return res;
    }
    std::vector<std::string> candidates;
    candidates.push_back(join(toks));
    if (toks.size() > 1) {
        std::vector<std::string> rev(toks.rbegin(), toks.rend());
        candidates.push_back(join(rev));
    }

    // Match one syllable choice per character against the letter string.
    std::vector<std::string> picked(chars.size());
    auto match = [&](const std::string& target) {
        auto rec = [&](auto&& self, size_t ci, size_t pos) -> bool {
            if (ci == chars.size()) return pos == target.size();
            for (const auto& syl : *choices[ci]) {
                if (target.compare(pos, syl.size(), syl) == 0) {
                    picked[ci] = syl;
                    if (self(self, ci + 1, pos + syl.size())) return true;
                }
            }
            return false;
        };
        return rec(rec, 0, 0);
    };

    for (const auto& cand : candidates) {
        if (match(cand)) {
            res.verdict = Consistency::consistent;
            for (size_t i = 0; i < chars.size(); ++i)
                res.alignment.push_back({chars[i], picked[i]});
            return res;
        }
    }
    res.verdict = Consistency::inconsistent;
    return res;
}

}  // namespace scholarlink
