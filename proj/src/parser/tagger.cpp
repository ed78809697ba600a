#include "dexgrasp/parser/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>
#include <set>
#include <string>
#include <unordered_map>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::parser {
namespace {

const std::set<std::string_view> kStopWords = {
    "a",     "an",    "the",   "it",    "its",   "it's",  "itself", "this",   "that",  "these", "those",
    "is",    "are",   "was",   "were",  "be",    "been",  "being",  "am",     "has",   "have",  "had",
    "having", "do",   "does",  "did",   "to",    "which", "who",    "whom",   "whose", "what",  "there",
    "here",  "i",     "me",    "my",    "we",    "our",   "you",    "your",   "he",    "him",   "his",
    "she",   "her",   "they",  "them",  "their", "so",    "as",     "then",   "such",  "each",  "if",
    "own",   "one's", "some",  "any",   "all",   "both",  "also",   "really", "just",
};

const std::unordered_map<std::string_view, std::string_view> kIrregularLemmas = {
    {"feet", "foot"},     {"teeth", "tooth"},   {"children", "child"}, {"men", "man"},
    {"women", "woman"},   {"knives", "knife"},  {"leaves", "leaf"},    {"halves", "half"},
    {"mice", "mouse"},    {"dice", "dice"},     {"shelves", "shelf"},  {"loaves", "loaf"},
    {"quarters", "quarter"},
};

const std::set<std::string_view> kUninflected = {
    "canvas", "lens",  "always", "perhaps", "series", "species", "news", "physics", "whereas", "yes",
    "bus",    "gas",   "atlas",  "chaos",   "vs",     "across",  "towards", "afterwards", "sometimes",
    "various",
};

const std::unordered_map<std::string_view, double> kNumberWords = {
    {"zero", 0},       {"one", 1},        {"two", 2},        {"three", 3},      {"four", 4},
    {"five", 5},       {"six", 6},        {"seven", 7},      {"eight", 8},      {"nine", 9},
    {"ten", 10},       {"eleven", 11},    {"twelve", 12},    {"thirteen", 13},  {"fourteen", 14},
    {"fifteen", 15},   {"sixteen", 16},   {"seventeen", 17}, {"eighteen", 18},  {"nineteen", 19},
    {"twenty", 20},    {"thirty", 30},    {"forty", 40},     {"fifty", 50},     {"sixty", 60},
    {"seventy", 70},   {"eighty", 80},    {"ninety", 90},    {"hundred", 100},  {"thousand", 1000},
    {"half", 0.5},     {"quarter", 0.25},
};

// Closed-class words and the adjectives/nouns the suffix rules get wrong.
const std::unordered_map<std::string_view, std::string_view> kWordTags = {
    // prepositions
    {"of", "IN"}, {"with", "IN"}, {"about", "IN"}, {"than", "IN"}, {"in", "IN"}, {"on", "IN"},
    {"at", "IN"}, {"for", "IN"}, {"from", "IN"}, {"around", "IN"}, {"over", "IN"}, {"under", "IN"},
    {"into", "IN"}, {"like", "IN"}, {"per", "IN"}, {"by", "IN"}, {"between", "IN"}, {"through", "IN"},
    {"without", "IN"}, {"along", "IN"}, {"near", "IN"}, {"across", "IN"}, {"inside", "IN"},
    {"outside", "IN"}, {"up", "IN"}, {"onto", "IN"}, {"because", "IN"}, {"while", "IN"},
    // coordinating conjunctions
    {"and", "CC"}, {"or", "CC"}, {"x", "CC"}, {"\xc3\x97", "CC"}, {"but", "CC"}, {"nor", "CC"},
    {"plus", "CC"},
    // adverbs
    {"very", "RB"}, {"not", "RB"}, {"almost", "RB"}, {"slightly", "RB"}, {"quite", "RB"},
    {"fairly", "RB"}, {"somewhat", "RB"}, {"rather", "RB"}, {"too", "RB"}, {"extremely", "RB"},
    {"approximately", "RB"}, {"roughly", "RB"}, {"nearly", "RB"}, {"only", "RB"},
    {"well", "RB"}, {"still", "RB"}, {"even", "RB"}, {"often", "RB"}, {"always", "RB"},
    {"moderately", "RB"}, {"pretty", "RB"}, {"bit", "RB"}, {"somewhere", "RB"}, {"when", "RB"},
    // comparatives and superlatives
    {"more", "JJR"}, {"less", "JJR"}, {"fewer", "JJR"}, {"bigger", "JJR"}, {"larger", "JJR"},
    {"smaller", "JJR"}, {"longer", "JJR"}, {"shorter", "JJR"}, {"wider", "JJR"}, {"thicker", "JJR"},
    {"heavier", "JJR"}, {"lighter", "JJR"}, {"taller", "JJR"}, {"higher", "JJR"},
    {"most", "JJS"}, {"least", "JJS"}, {"largest", "JJS"}, {"smallest", "JJS"}, {"longest", "JJS"},
    // modals
    {"could", "MD"}, {"would", "MD"}, {"should", "MD"}, {"may", "MD"}, {"might", "MD"},
    {"must", "MD"}, {"will", "MD"}, {"shall", "MD"},
    // verbs
    {"weigh", "VB"}, {"measure", "VB"}, {"feel", "VB"}, {"look", "VB"}, {"appear", "VB"},
    {"seem", "VB"}, {"come", "VB"}, {"hold", "VB"}, {"fit", "VB"}, {"use", "VB"}, {"contain", "VB"},
    {"sit", "VB"}, {"span", "VB"}, {"stand", "VB"}, {"run", "VB"}, {"go", "VB"}, {"get", "VB"},
    {"break", "VB"}, {"bend", "VB"}, {"squeeze", "VB"}, {"crush", "VB"}, {"grip", "VB"},
    {"say", "VB"}, {"think", "VB"}, {"keep", "VB"}, {"give", "VB"}, {"take", "VB"}, {"tip", "VB"},
    {"made", "JJ"}, {"built", "JJ"}, {"covered", "JJ"}, {"shaped", "JJ"}, {"sold", "JJ"},
    // adjectives
    {"long", "JJ"}, {"wide", "JJ"}, {"thick", "JJ"}, {"tall", "JJ"}, {"high", "JJ"}, {"deep", "JJ"},
    {"short", "JJ"}, {"small", "JJ"}, {"large", "JJ"}, {"big", "JJ"}, {"heavy", "JJ"}, {"light", "JJ"},
    {"soft", "JJ"}, {"hard", "JJ"}, {"rough", "JJ"}, {"smooth", "JJ"}, {"fragile", "JJ"},
    {"sturdy", "JJ"}, {"rigid", "JJ"}, {"floppy", "JJ"}, {"thin", "JJ"}, {"flat", "JJ"},
    {"round", "JJ"}, {"wooden", "JJ"}, {"compact", "JJ"}, {"medium", "JJ"}, {"delicate", "JJ"},
    {"solid", "JJ"}, {"stiff", "JJ"}, {"squishy", "JJ"}, {"spongy", "JJ"}, {"glossy", "JJ"},
    {"shiny", "JJ"}, {"matte", "JJ"}, {"coarse", "JJ"}, {"fuzzy", "JJ"}, {"bumpy", "JJ"},
    {"slim", "JJ"}, {"narrow", "JJ"}, {"broad", "JJ"}, {"tiny", "JJ"}, {"little", "JJ"},
    {"square", "JJ"}, {"oval", "JJ"}, {"hollow", "JJ"}, {"empty", "JJ"}, {"full", "JJ"},
    {"new", "JJ"}, {"old", "JJ"}, {"slippery", "JJ"}, {"sleek", "JJ"}, {"slick", "JJ"},
    {"grainy", "JJ"}, {"robust", "JJ"}, {"tough", "JJ"}, {"limp", "JJ"}, {"plain", "JJ"},
    {"sticky", "JJ"}, {"fresh", "JJ"}, {"ripe", "JJ"}, {"green", "JJ"}, {"red", "JJ"}, {"blue", "JJ"},
    {"black", "JJ"}, {"white", "JJ"}, {"yellow", "JJ"}, {"brown", "JJ"}, {"silver", "JJ"},
    {"clear", "JJ"}, {"dark", "JJ"}, {"bright", "JJ"}, {"sharp", "JJ"}, {"blunt", "JJ"},
    {"firm", "JJ"}, {"brittle", "JJ"}, {"furry", "JJ"}, {"ridged", "JJ"},
    {"cubic", "JJ"}, {"elongated", "JJ"}, {"spherical", "JJ"}, {"cylindrical", "JJ"},
    {"rectangular", "JJ"}, {"circular", "JJ"}, {"metallic", "JJ"}, {"ceramic", "JJ"},
    {"durable", "JJ"}, {"breakable", "JJ"}, {"squeezable", "JJ"}, {"flexible", "JJ"},
    {"other", "JJ"}, {"same", "JJ"}, {"whole", "JJ"}, {"overall", "JJ"}, {"handheld", "JJ"},
    // nouns the suffix rules would mistag
    {"metal", "NN"}, {"plastic", "NN"}, {"fabric", "NN"}, {"crystal", "NN"}, {"pedal", "NN"},
    {"string", "NN"}, {"ring", "NN"}, {"thing", "NN"}, {"spring", "NN"}, {"wing", "NN"},
    {"ceiling", "NN"}, {"clothing", "NN"}, {"packaging", "NN"}, {"handle", "NN"}, {"family", "NN"},
    {"animal", "NN"}, {"material", "NN"}, {"total", "NN"}, {"bowl", "NN"}, {"shell", "NN"},
    {"texture", "NN"}, {"feeling", "NN"}, {"coating", "NN"}, {"casing", "NN"}, {"opening", "NN"},
    {"building", "NN"}, {"wiring", "NN"}, {"filling", "NN"}, {"bedding", "NN"}, {"lid", "NN"},
};

const std::regex& token_pattern() {
    // numbers with optional thousands groups and decimals | words with inner
    // apostrophes or hyphens | multiplication sign | punctuation | any other symbol
    static const std::regex pattern(
        R"((\d+(?:,\d{3})*(?:\.\d+)?|\.\d+)|([a-z]+(?:['\-][a-z0-9]+)*)|()"
        "\xc3\x97"
        R"()|([.,;:!?()\[\]"])|(\S))",
        std::regex::ECMAScript | std::regex::optimize);
    return pattern;
}

bool ends_with(std::string_view word, std::string_view suffix) {
    return word.size() >= suffix.size() && word.substr(word.size() - suffix.size()) == suffix;
}

bool is_number_word(std::string_view lemma) {
    if (kNumberWords.count(lemma) != 0) return true;
    const auto dash = lemma.find('-');
    if (dash == std::string_view::npos) return false;
    return kNumberWords.count(lemma.substr(0, dash)) != 0 && kNumberWords.count(lemma.substr(dash + 1)) != 0;
}

std::string suffix_tag(const std::string& surface, const std::string& lemma) {
    if (auto it = kWordTags.find(lemma); it != kWordTags.end()) {
        // Inflected verbs keep their form in the tag.
        if (it->second == "VB" && surface != lemma) {
            if (ends_with(surface, "s")) return "VBZ";
            if (ends_with(surface, "ed")) return "JJ";
            if (ends_with(surface, "ing")) return "VBG";
        }
        return std::string(it->second);
    }
    if (auto it = kWordTags.find(surface); it != kWordTags.end()) return std::string(it->second);
    if (ends_with(lemma, "ly") && lemma.size() > 4) return "RB";
    if (ends_with(lemma, "ed") && lemma.size() > 4) return "JJ";
    if (ends_with(lemma, "ing") && lemma.size() > 5) return "VBG";
    for (std::string_view suffix : {"ous", "ful", "ive", "able", "ible", "ical", "ish", "less", "ic"}) {
        if (ends_with(lemma, suffix) && lemma.size() > suffix.size() + 2) return "JJ";
    }
    return "NN";
}

}  // namespace

bool is_stop_word(std::string_view lemma) { return kStopWords.count(lemma) != 0; }

std::string lemmatize(std::string_view word) {
    const auto dash = word.rfind('-');
    if (dash != std::string_view::npos && dash + 1 < word.size()) {
        return std::string(word.substr(0, dash + 1)) + lemmatize(word.substr(dash + 1));
    }
    if (auto it = kIrregularLemmas.find(word); it != kIrregularLemmas.end()) return std::string(it->second);
    std::string lemma(word);
    if (ends_with(lemma, "'s")) lemma.resize(lemma.size() - 2);
    if (lemma.size() <= 3 || !ends_with(lemma, "s") || kUninflected.count(lemma) != 0) return lemma;
    if (ends_with(lemma, "ss") || ends_with(lemma, "us") || ends_with(lemma, "is")) return lemma;
    if (ends_with(lemma, "ies") && lemma.size() > 4) return lemma.substr(0, lemma.size() - 3) + "y";
    for (std::string_view suffix : {"ches", "shes", "sses", "xes", "zes", "oes"}) {
        if (ends_with(lemma, suffix)) return lemma.substr(0, lemma.size() - 2);
    }
    return lemma.substr(0, lemma.size() - 1);
}

std::optional<double> number_token_value(std::string_view lemma) {
    if (lemma.empty()) return std::nullopt;
    if (std::isdigit(static_cast<unsigned char>(lemma.front())) != 0 || lemma.front() == '.') {
        std::string digits;
        for (char ch : lemma) {
            if (ch != ',') digits += ch;
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
        return value;
    }
    if (auto it = kNumberWords.find(lemma); it != kNumberWords.end()) return it->second;
    const auto dash = lemma.find('-');
    if (dash != std::string_view::npos) {
        const auto tens = kNumberWords.find(lemma.substr(0, dash));
        const auto units = kNumberWords.find(lemma.substr(dash + 1));
        if (tens != kNumberWords.end() && units != kNumberWords.end() && tens->second >= 20 && tens->second < 100 &&
            units->second >= 1 && units->second < 10) {
            return tens->second + units->second;
        }
    }
    return std::nullopt;
}

std::vector<TaggedToken> tokenize_and_tag(std::string_view description) {
    std::string lowered(description);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lowered.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError("empty description");

    std::vector<TaggedToken> tokens;
    for (auto it = std::sregex_iterator(lowered.begin(), lowered.end(), token_pattern());
         it != std::sregex_iterator(); ++it) {
        const auto& match = *it;
        TaggedToken token;
        token.surface = match.str();
        token.begin = static_cast<std::size_t>(match.position());
        token.end = token.begin + token.surface.size();
        if (match[1].matched) {
            token.lemma = token.surface;
            token.tag = "CD";
        } else if (match[2].matched) {
            token.lemma = lemmatize(token.surface);
            if (is_stop_word(token.surface) || is_stop_word(token.lemma)) continue;
            token.tag = is_number_word(token.lemma) ? "CD" : suffix_tag(token.surface, token.lemma);
        } else if (match[3].matched) {
            token.lemma = token.surface;
            token.tag = "CC";
        } else if (match[4].matched) {
            token.lemma = token.surface;
            const char ch = token.surface.front();
            if (ch == '"' && !tokens.empty() && tokens.back().tag == "CD" && tokens.back().end == token.begin) {
                // 6" is six inches
                token.lemma = "inch";
                token.tag = "NN";
            } else if (ch == '.' || ch == '!' || ch == '?') {
                token.tag = ".";
            } else if (ch == ',' || ch == ';') {
                token.tag = ",";
            } else {
                token.tag = ":";
            }
        } else {
            token.lemma = token.surface;
            token.tag = ":";
        }
        tokens.push_back(std::move(token));
    }

    // "15 by 8" joins two numbers like "15 x 8".
    for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
        if (tokens[i].lemma == "by" && tokens[i - 1].tag == "CD" && tokens[i + 1].tag == "CD") tokens[i].tag = "CC";
    }
    return tokens;
}

}  // namespace dexgrasp::parser
