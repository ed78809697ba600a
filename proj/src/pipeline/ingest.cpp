#include "dexgrasp/pipeline/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <regex>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"
#include "dexgrasp/parser/description_parser.hpp"
#include "dexgrasp/parser/tagger.hpp"

namespace dexgrasp::pipeline {
namespace {

using kb::Attribute;

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

std::optional<double> unit_factor(std::string_view unit, parser::UnitKind kind) {
    auto u = lower(unit);
    if (u == "in" || u == "\"" || u == "inches") u = "inch";
    const auto found = parser::unit_of(parser::lemmatize(u));
    if (!found || found->kind != kind) return std::nullopt;
    return found->factor;
}

struct Candidate {
    std::size_t offset;
    std::string snippet;
    std::vector<double> values;
    bool labelled;
};

// True when `keyword` appears on the same line shortly before `offset`.
bool labelled_by(const std::string& text, std::size_t offset, std::initializer_list<std::string_view> keywords) {
    const std::size_t line = text.rfind('\n', offset == 0 ? 0 : offset - 1);
    const std::size_t from = std::max(line == std::string::npos ? 0 : line + 1, offset > 60 ? offset - 60 : 0);
    const auto window = lower(std::string_view(text).substr(from, offset - from));
    for (auto k : keywords) {
        if (window.find(k) != std::string::npos) return true;
    }
    return false;
}

const Candidate* choose(const std::vector<Candidate>& found, std::string_view what, std::vector<std::string>& notes) {
    if (found.empty()) return nullptr;
    const Candidate* pick = &found.front();
    for (const auto& c : found) {
        if (c.labelled) {
            pick = &c;
            break;
        }
    }
    std::size_t distinct = 0;
    for (const auto& c : found) distinct += c.values != pick->values;
    if (distinct > 0) {
        notes.push_back(fmt::format("{} {} candidates; used '{}'", found.size(), what, pick->snippet));
    }
    return pick;
}

const std::regex& dimension_pattern() {
    static const std::regex re(
        R"((\d+(?:\.\d+)?)\s*(?:x|\xC3\x97|by|\*)\s*(\d+(?:\.\d+)?)(?:\s*(?:x|\xC3\x97|by|\*)\s*(\d+(?:\.\d+)?))?\s*(millimeters?|millimetres?|centimeters?|centimetres?|meters?|metres?|inch(?:es)?|mm|cm|in|m|")(?![a-z]))",
        std::regex::icase);
    return re;
}

const std::regex& weight_pattern() {
    static const std::regex re(
        R"((\d+(?:\.\d+)?)\s*(kilograms?|kg|grams?|g|ounces?|oz|pounds?|lbs?)(?![a-z]))", std::regex::icase);
    return re;
}

std::string label_of(const std::string& raw, bool html) {
    if (!html) return {};
    static const std::regex title(R"(<title[^>]*>([\s\S]*?)</title>)", std::regex::icase);
    std::smatch m;
    if (!std::regex_search(raw, m, title)) return {};
    auto text = lower(strip_html(m[1].str()));
    text.erase(0, text.find_first_not_of(" \t\r\n"));
    text.erase(text.find_last_not_of(" \t\r\n") + 1);
    return text;
}

}  // namespace

std::string strip_html(std::string_view html) {
    static const std::regex blocks(R"(<(script|style)[^>]*>[\s\S]*?</\1\s*>)", std::regex::icase);
    static const std::regex tags(R"(<[^>]*>)");
    std::string text = std::regex_replace(std::string(html), blocks, " ");
    text = std::regex_replace(text, tags, " ");
    static const std::pair<std::string_view, std::string_view> entities[] = {
        {"&nbsp;", " "}, {"&times;", "x"}, {"&#215;", "x"}, {"&quot;", "\""}, {"&#34;", "\""},
        {"&lt;", "<"},   {"&gt;", ">"},    {"&#39;", "'"},  {"&amp;", "&"},
    };
    for (const auto& [from, to] : entities) {
        for (std::size_t at = text.find(from); at != std::string::npos; at = text.find(from, at + to.size())) {
            text.replace(at, from.size(), to);
        }
    }
    std::string out;
    for (char c : text) {
        if (c == '\r') continue;
        if ((c == ' ' || c == '\t') && !out.empty() && (out.back() == ' ' || out.back() == '\n')) continue;
        if (c == '\n' && !out.empty() && out.back() == ' ') out.pop_back();
        out.push_back(c == '\t' ? ' ' : c);
    }
    return out;
}

PageExtraction extract_page(std::string_view content, bool html, const parser::DescriptorLexicon& lexicon) {
    PageExtraction page;
    page.text = html ? strip_html(content) : std::string(content);
    const auto& text = page.text;
    auto& features = page.draft.features;

    std::vector<Candidate> dims;
    for (std::sregex_iterator it(text.begin(), text.end(), dimension_pattern()), end; it != end; ++it) {
        const auto& m = *it;
        const auto factor = unit_factor(m[4].str(), parser::UnitKind::length);
        if (!factor) continue;
        Candidate c{static_cast<std::size_t>(m.position(0)), m.str(0), {}, false};
        for (int g = 1; g <= 3; ++g) {
            if (m[g].matched) c.values.push_back(round_to(std::stod(m[g].str()) * *factor, 0.01));
        }
        std::sort(c.values.begin(), c.values.end(), std::greater<>());
        c.labelled = labelled_by(text, c.offset, {"dimension", "size", "l x w"});
        dims.push_back(std::move(c));
    }
    if (const auto* pick = choose(dims, "dimension", page.notes)) {
        for (std::size_t i = 0; i < pick->values.size(); ++i) {
            features.dimension(i) = pick->values[i];
            page.values.push_back({static_cast<Attribute>(i), fmt::format("{:g}", pick->values[i]), pick->snippet,
                                   pick->offset});
        }
    }

    std::vector<Candidate> weights;
    for (std::sregex_iterator it(text.begin(), text.end(), weight_pattern()), end; it != end; ++it) {
        const auto& m = *it;
        const auto offset = static_cast<std::size_t>(m.position(0));
        const bool inside_dims = std::any_of(dims.begin(), dims.end(), [&](const Candidate& d) {
            return offset >= d.offset && offset < d.offset + d.snippet.size();
        });
        const auto factor = unit_factor(m[2].str(), parser::UnitKind::mass);
        if (inside_dims || !factor) continue;
        weights.push_back({offset, m.str(0), {round_to(std::stod(m[1].str()) * *factor, 0.1)},
                           labelled_by(text, offset, {"weight", "mass", "weighs", "dimension"})});
    }
    if (const auto* pick = choose(weights, "weight", page.notes)) {
        features.mass = pick->values[0];
        page.values.push_back({Attribute::mass, fmt::format("{:g}", pick->values[0]), pick->snippet, pick->offset});
    }

    std::vector<Candidate> materials;
    try {
        const auto tokens = parser::tokenize_and_tag(text);
        for (std::size_t i = 0; i < tokens.size();) {
            const auto match = lexicon.match(tokens, i, tokens.size());
            if (!match || match->entry->field != Attribute::material) {
                ++i;
                continue;
            }
            const auto begin = tokens[i].begin;
            const auto end = tokens[i + match->length - 1].end;
            const auto value = kb::parse_material(match->entry->value);
            if (value) {
                materials.push_back({begin, text.substr(begin, end - begin),
                                     {static_cast<double>(*value)}, labelled_by(text, begin, {"material"})});
            }
            i += match->length;
        }
    } catch (const ParseError&) {
    }
    if (const auto* pick = choose(materials, "material", page.notes)) {
        const auto material = static_cast<kb::Material>(static_cast<int>(pick->values[0]));
        features.material = material;
        page.values.push_back({Attribute::material, std::string(kb::to_string(material)), pick->snippet, pick->offset});
    }

    page.draft.label = label_of(std::string(content), html);
    for (std::size_t i = 0; i < kb::kAttributeCount; ++i) {
        const auto attribute = static_cast<Attribute>(i);
        if (!features.has(attribute)) page.missing.push_back(attribute);
    }
    return page;
}

IngestResult ingest_pages(const std::filesystem::path& directory, const parser::DescriptorLexicon& lexicon,
                          int first_id) {
    if (!std::filesystem::is_directory(directory)) {
        throw DataError(fmt::format("page directory {} not found", directory.string()));
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    IngestResult result;
    int next_id = first_id;
    for (const auto& path : files) {
        const auto ext = lower(path.extension().string());
        const bool html = ext == ".html" || ext == ".htm";
        PageExtraction page;
        auto skip = [&](std::string reason) {
            page.skipped = true;
            page.reason = std::move(reason);
            page.source = path;
        };
        std::ifstream in(path, std::ios::binary);
        const std::string raw{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        if (!html && ext != ".txt") {
            skip("unsupported file type");
        } else if (!in) {
            skip("unreadable file");
        } else if (raw.find('\0') != std::string::npos) {
            skip("binary content");
        } else if (raw.find_first_not_of(" \t\r\n") == std::string::npos) {
            skip("empty file");
        } else {
            page = extract_page(raw, html, lexicon);
            page.source = path;
            if (page.values.empty()) {
                skip("no attributes found");
            } else {
                page.draft.id = next_id++;
                if (page.draft.label.empty()) {
                    page.draft.label = path.stem().string();
                    std::replace(page.draft.label.begin(), page.draft.label.end(), '_', ' ');
                }
                result.drafts.push_back(page.draft);
            }
        }
        result.pages.push_back(std::move(page));
    }
    return result;
}

}  // namespace dexgrasp::pipeline
