#include "dexgrasp/parser/description_parser.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"

namespace dexgrasp::parser {
namespace {

using kb::Attribute;

const std::unordered_map<std::string_view, Unit> kUnits = {
    {"mm", {UnitKind::length, 0.1}},       {"millimeter", {UnitKind::length, 0.1}},
    {"millimetre", {UnitKind::length, 0.1}}, {"cm", {UnitKind::length, 1.0}},
    {"centimeter", {UnitKind::length, 1.0}}, {"centimetre", {UnitKind::length, 1.0}},
    {"m", {UnitKind::length, 100.0}},      {"meter", {UnitKind::length, 100.0}},
    {"metre", {UnitKind::length, 100.0}},  {"inch", {UnitKind::length, 2.54}},
    {"foot", {UnitKind::length, 30.48}},   {"ft", {UnitKind::length, 30.48}},
    {"mg", {UnitKind::mass, 0.001}},       {"milligram", {UnitKind::mass, 0.001}},
    {"g", {UnitKind::mass, 1.0}},          {"gram", {UnitKind::mass, 1.0}},
    {"gramme", {UnitKind::mass, 1.0}},     {"kg", {UnitKind::mass, 1000.0}},
    {"kilogram", {UnitKind::mass, 1000.0}}, {"kilo", {UnitKind::mass, 1000.0}},
    {"oz", {UnitKind::mass, 28.349523125}}, {"ounce", {UnitKind::mass, 28.349523125}},
    {"lb", {UnitKind::mass, 453.59237}},   {"lbs", {UnitKind::mass, 453.59237}},
    {"pound", {UnitKind::mass, 453.59237}},
};

// Keyword lemma -> attribute a quantity describes.
const std::unordered_map<std::string_view, Attribute> kQuantityKeywords = {
    {"long", Attribute::a},     {"length", Attribute::a},    {"tall", Attribute::a},
    {"height", Attribute::a},   {"high", Attribute::a},      {"wide", Attribute::b},
    {"width", Attribute::b},    {"diameter", Attribute::b},  {"across", Attribute::b},
    {"broad", Attribute::b},    {"thick", Attribute::c},     {"thickness", Attribute::c},
    {"deep", Attribute::c},     {"depth", Attribute::c},     {"weigh", Attribute::mass},
    {"weight", Attribute::mass}, {"mass", Attribute::mass},  {"heavy", Attribute::mass},
};

enum class NumberKind { digits, unit, teen, tens, hundred, thousand, fraction };

NumberKind kind_of(const std::string& lemma, double value) {
    if (lemma == "half" || lemma == "quarter") return NumberKind::fraction;
    if (std::isdigit(static_cast<unsigned char>(lemma.front())) != 0 || lemma.front() == '.') return NumberKind::digits;
    if (lemma == "hundred") return NumberKind::hundred;
    if (lemma == "thousand") return NumberKind::thousand;
    if (lemma.find('-') != std::string::npos) return NumberKind::teen;  // "twenty-five" takes no more words
    if (value < 10) return NumberKind::unit;
    if (value < 20) return NumberKind::teen;
    return NumberKind::tens;
}

bool is_punctuation(const TaggedToken& token) { return token.tag == "," || token.tag == "." || token.tag == ":"; }

struct Quantity {
    double value = 0.0;
    std::optional<Attribute> role;
    std::string keyword;
    Span span;
};

std::string format_number(double value) { return fmt::format("{}", value); }

template <typename Enum>
std::optional<Enum> parse_value(const std::string& value);
template <>
std::optional<kb::Shape> parse_value(const std::string& value) { return kb::parse_shape(value); }
template <>
std::optional<kb::Rigidity> parse_value(const std::string& value) { return kb::parse_rigidity(value); }
template <>
std::optional<kb::Texture> parse_value(const std::string& value) { return kb::parse_texture(value); }
template <>
std::optional<kb::Fragility> parse_value(const std::string& value) { return kb::parse_fragility(value); }
template <>
std::optional<kb::Material> parse_value(const std::string& value) { return kb::parse_material(value); }

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::optional<Unit> unit_of(std::string_view lemma) {
    if (auto it = kUnits.find(lemma); it != kUnits.end()) return it->second;
    return std::nullopt;
}

std::vector<NumberSpan> parse_numbers(const std::vector<TaggedToken>& tokens, std::size_t first, std::size_t last) {
    last = std::min(last, tokens.size());
    std::vector<NumberSpan> numbers;
    std::optional<NumberSpan> current;
    NumberKind kind = NumberKind::digits;
    bool pending_and = false;

    auto flush = [&] {
        if (current) numbers.push_back(*current);
        current.reset();
        pending_and = false;
    };
    auto start = [&](double value, NumberKind k, std::size_t i) {
        flush();
        current = NumberSpan{value, i, i + 1};
        kind = k;
    };

    for (std::size_t i = first; i < last; ++i) {
        const auto& token = tokens[i];
        if (token.tag == "CD") {
            const auto value = number_token_value(token.lemma);
            if (!value) {
                flush();
                continue;
            }
            const NumberKind k = kind_of(token.lemma, *value);
            bool joined = false;
            if (current) {
                switch (k) {
                    case NumberKind::fraction:
                        // "one and a half", "2 and a quarter"
                        if (pending_and && kind != NumberKind::fraction) {
                            current->value += *value;
                            kind = NumberKind::fraction;
                            joined = true;
                        }
                        break;
                    case NumberKind::hundred:
                        if (!pending_and && current->value < 100.0 &&
                            (kind == NumberKind::unit || kind == NumberKind::teen || kind == NumberKind::tens)) {
                            current->value *= 100.0;
                            kind = NumberKind::hundred;
                            joined = true;
                        }
                        break;
                    case NumberKind::thousand:
                        if (!pending_and && kind != NumberKind::digits && kind != NumberKind::fraction &&
                            kind != NumberKind::thousand) {
                            current->value *= 1000.0;
                            kind = NumberKind::thousand;
                            joined = true;
                        }
                        break;
                    case NumberKind::unit:
                        if ((kind == NumberKind::tens && !pending_and) || kind == NumberKind::hundred ||
                            kind == NumberKind::thousand) {
                            current->value += *value;
                            kind = NumberKind::unit;
                            joined = true;
                        }
                        break;
                    case NumberKind::teen:
                    case NumberKind::tens:
                        if (kind == NumberKind::hundred || kind == NumberKind::thousand) {
                            current->value += *value;
                            kind = k;
                            joined = true;
                        }
                        break;
                    case NumberKind::digits: break;
                }
            }
            if (joined) {
                current->last = i + 1;
                pending_and = false;
            } else {
                start(*value, k, i);
            }
        } else if (token.tag == "CC" && token.lemma == "and" && current && !pending_and && i + 1 < last &&
                   tokens[i + 1].tag == "CD") {
            pending_and = true;
        } else {
            flush();
        }
    }
    flush();
    return numbers;
}

DescriptionParser::DescriptionParser(DescriptorLexicon lexicon, ChunkPattern quantitative, ChunkPattern qualitative)
    : lexicon_(std::move(lexicon)), quantitative_(std::move(quantitative)), qualitative_(std::move(qualitative)) {}

std::vector<Chunk> DescriptionParser::chunk(const std::vector<TaggedToken>& tokens) const {
    return chunk_description(tokens, quantitative_, qualitative_);
}

ParseResult DescriptionParser::extract_fields(const std::vector<TaggedToken>& tokens,
                                              const std::vector<Chunk>& chunks) const {
    ParseResult result;
    std::vector<bool> consumed(tokens.size(), false);
    std::vector<Quantity> dimensions;
    std::optional<Quantity> mass;

    std::string keyword;
    auto keyword_at = [&](std::size_t i) -> std::optional<Attribute> {
        if (consumed[i]) return std::nullopt;
        if (auto it = kQuantityKeywords.find(tokens[i].lemma); it != kQuantityKeywords.end()) {
            keyword = tokens[i].lemma;
            return it->second;
        }
        return std::nullopt;
    };

    // Quantitative chunks joined only by conjunctions are read as one run,
    // so "8 x 5 x 2 cm" and "one hundred and seven and a half" stay whole.
    std::vector<Chunk> runs;
    for (const auto& c : chunks) {
        if (!c.quantitative) continue;
        if (!runs.empty()) {
            bool joined = true;
            for (std::size_t i = runs.back().last; i < c.first && joined; ++i) joined = tokens[i].tag == "CC";
            if (joined) {
                runs.back().last = c.last;
                continue;
            }
        }
        runs.push_back(c);
    }

    for (const auto& c : runs) {
        const auto numbers = parse_numbers(tokens, c.first, c.last);
        for (std::size_t n = 0; n < numbers.size(); ++n) {
            const auto& number = numbers[n];
            const std::size_t region_end = n + 1 < numbers.size() ? numbers[n + 1].first : c.last;
            const std::size_t region_begin = n > 0 ? numbers[n - 1].last : c.first;

            // Unit: the first unit word after the number, looking past other
            // numbers so "8 x 5 x 2 cm" shares one unit.
            std::optional<Unit> unit;
            std::size_t unit_index = number.last;
            bool shared_unit = false;
            for (std::size_t i = number.last; i < tokens.size(); ++i) {
                if ((unit = unit_of(tokens[i].lemma))) {
                    unit_index = i;
                    break;
                }
                if (tokens[i].tag != "CD" && tokens[i].tag != "CC") break;
                shared_unit = true;
            }
            if (unit && !shared_unit) consumed[unit_index] = true;

            // Keyword: after the number within its region, else before it.
            std::optional<Attribute> role;
            for (std::size_t i = number.last; i < region_end && !role; ++i) {
                if ((role = keyword_at(i))) consumed[i] = true;
            }
            if (!role && n == 0) {
                std::size_t steps = 0;
                for (std::size_t i = number.first; i > 0 && steps < 3 + (number.first - c.first); ++steps) {
                    --i;
                    if (is_punctuation(tokens[i]) || tokens[i].tag == "CD" || consumed[i]) break;
                    if ((role = keyword_at(i))) {
                        consumed[i] = true;
                        break;
                    }
                }
            } else if (!role) {
                for (std::size_t i = number.first; i > region_begin && !role;) {
                    --i;
                    if ((role = keyword_at(i))) consumed[i] = true;
                }
            }
            for (std::size_t i = number.first; i < number.last; ++i) consumed[i] = true;

            Quantity quantity;
            if (role) quantity.keyword = keyword;
            quantity.span = Span{tokens[number.first].begin,
                                 unit && !shared_unit ? tokens[unit_index].end : tokens[number.last - 1].end};
            const bool mass_role = role == Attribute::mass;
            if (unit) {
                quantity.value = number.value * unit->factor;
                if (unit->kind == UnitKind::mass) {
                    quantity.role = Attribute::mass;
                } else {
                    quantity.role = mass_role ? std::nullopt : role;
                }
            } else if (mass_role) {
                quantity.value = number.value;  // grams
                quantity.role = Attribute::mass;
            } else if (role) {
                quantity.value = number.value;  // centimeters
                quantity.role = role;
            } else {
                result.warnings.push_back(fmt::format("ignored number {} without unit or keyword",
                                                      format_number(number.value)));
                continue;
            }
            if (quantity.value <= 0.0) {
                result.warnings.push_back(fmt::format("ignored non-positive value {}", format_number(quantity.value)));
                continue;
            }
            if (quantity.role == Attribute::mass) {
                if (!mass) {
                    mass = quantity;
                } else if (mass->value != quantity.value) {
                    result.warnings.push_back(fmt::format("mass stated twice ({} and {}); kept the first",
                                                          format_number(mass->value), format_number(quantity.value)));
                }
            } else {
                dimensions.push_back(quantity);
                if (quantity.keyword == "diameter" || quantity.keyword == "across") {
                    // A round cross-section spans two extents.
                    Quantity second = quantity;
                    second.role.reset();
                    second.keyword.clear();
                    dimensions.push_back(second);
                }
            }
        }
    }

    // Dimensions: keyed values take their slot, the rest fill free slots.
    std::array<std::optional<Quantity>, 3> slots;
    std::vector<Quantity> unkeyed;
    for (const auto& q : dimensions) {
        if (!q.role) {
            unkeyed.push_back(q);
            continue;
        }
        auto& slot = slots[kb::index_of(*q.role)];
        if (!slot) {
            slot = q;
        } else if (slot->keyword != q.keyword) {
            // "long" and "tall" on one object are two different extents.
            unkeyed.push_back(q);
        } else if (slot->value != q.value) {
            result.warnings.push_back(fmt::format("{} stated twice ({} and {}); kept the first", kb::to_string(*q.role),
                                                  format_number(slot->value), format_number(q.value)));
        }
    }
    for (const auto& q : unkeyed) {
        auto free = std::find_if(slots.begin(), slots.end(), [](const auto& s) { return !s.has_value(); });
        if (free == slots.end()) {
            result.warnings.push_back(fmt::format("extra dimension {} ignored", format_number(q.value)));
            continue;
        }
        *free = q;
    }
    std::vector<std::size_t> present;
    std::vector<Quantity> values;
    for (std::size_t i = 0; i < 3; ++i) {
        if (slots[i]) {
            present.push_back(i);
            values.push_back(*slots[i]);
        }
    }
    std::stable_sort(values.begin(), values.end(), [](const auto& x, const auto& y) { return x.value > y.value; });
    for (std::size_t k = 0; k < present.size(); ++k) {
        const auto attribute = static_cast<Attribute>(present[k]);
        result.query.dimension(present[k]) = values[k].value;
        result.provenance[attribute] = values[k].span;
    }
    if (mass) {
        result.query.mass = mass->value;
        result.provenance[Attribute::mass] = mass->span;
    }

    // Qualitative descriptors from every chunk.
    auto assign = [&](Attribute field, const std::string& value, Span span) {
        auto set = [&](auto& slot) {
            using Enum = typename std::decay_t<decltype(slot)>::value_type;
            const auto parsed = parse_value<Enum>(value);
            if (!slot) {
                slot = parsed;
                result.provenance[field] = span;
            } else if (*slot != *parsed) {
                result.warnings.push_back(fmt::format("{} stated twice ({} and {}); kept the first", kb::to_string(field),
                                                      kb::to_string(*slot), value));
            }
        };
        switch (field) {
            case Attribute::shape: set(result.query.shape); break;
            case Attribute::rigidity: set(result.query.rigidity); break;
            case Attribute::texture: set(result.query.texture); break;
            case Attribute::fragility: set(result.query.fragility); break;
            case Attribute::material: set(result.query.material); break;
            default: break;
        }
    };
    for (const auto& c : chunks) {
        for (std::size_t i = c.first; i < c.last;) {
            if (consumed[i]) {
                ++i;
                continue;
            }
            std::size_t end = i;
            while (end < c.last && !consumed[end]) ++end;
            const auto match = lexicon_.match(tokens, i, end);
            if (!match) {
                ++i;
                continue;
            }
            const bool negated = i > 0 && tokens[i - 1].lemma == "not";
            if (negated) {
                result.warnings.push_back(fmt::format("ignored negated descriptor '{}'", match->entry->phrase));
            } else {
                assign(match->entry->field, match->entry->value,
                       Span{tokens[i].begin, tokens[i + match->length - 1].end});
            }
            for (std::size_t k = i; k < i + match->length; ++k) consumed[k] = true;
            i += match->length;
        }
    }
    return result;
}

ParseResult DescriptionParser::parse(std::string_view description) const {
    const auto tokens = tokenize_and_tag(description);
    return extract_fields(tokens, chunk(tokens));
}

ParseResult DescriptionParser::parse(std::string_view description,
                                     const std::vector<kb::ObjectRecord>& records) const {
    return impute(parse(description), records);
}

std::string DescriptionParser::render(const kb::FeatureQuery& query) const {
    std::vector<std::string> parts;
    const char* const keywords[3] = {"long", "wide", "thick"};
    for (std::size_t i = 0; i < 3; ++i) {
        if (const auto& d = query.dimension(i)) parts.push_back(fmt::format("{} cm {}", format_number(*d), keywords[i]));
    }
    if (query.mass) parts.push_back(fmt::format("{} g", format_number(*query.mass)));

    auto phrase = [&](Attribute field, std::string_view value) {
        const auto text = lexicon_.canonical_phrase(field, std::string(value));
        if (!text) throw ParseError(fmt::format("lexicon has no keyword for {}:{}", kb::to_string(field), value));
        return *text;
    };
    if (query.material) parts.push_back("made of " + phrase(Attribute::material, kb::to_string(*query.material)));
    if (query.shape) parts.push_back(phrase(Attribute::shape, kb::to_string(*query.shape)));
    if (query.texture) parts.push_back(phrase(Attribute::texture, kb::to_string(*query.texture)));
    if (query.fragility) parts.push_back(phrase(Attribute::fragility, kb::to_string(*query.fragility)));
    if (query.rigidity) parts.push_back(phrase(Attribute::rigidity, kb::to_string(*query.rigidity)));

    std::string text;
    for (const auto& part : parts) {
        if (!text.empty()) text += ", ";
        text += part;
    }
    return text + ".";
}

ParseResult impute(ParseResult partial, const std::vector<kb::ObjectRecord>& records) {
    auto& q = partial.query;
    const std::size_t count = q.dimension_count();
    if (count == 0 || count == 3) return partial;

    if (q.shape == kb::Shape::radial && count == 1) {
        std::size_t source = 0;
        while (!q.dimension(source)) ++source;
        const double diameter = *q.dimension(source);
        const auto source_attribute = static_cast<Attribute>(source);
        const auto span = partial.provenance.find(source_attribute);
        const bool stated = span != partial.provenance.end();
        const Span stated_span = stated ? span->second : Span{};
        if (stated) partial.provenance.erase(span);
        partial.imputed.erase(source_attribute);
        q.dimension(source).reset();
        q.a = diameter;
        q.b = diameter;
        // The stated value keeps its provenance in the slot it lands in.
        const auto kept = source == 2 ? Attribute::a : source_attribute;
        if (stated) {
            partial.provenance[kept] = stated_span;
        } else {
            partial.imputed.insert(kept);
        }
        partial.imputed.insert(kept == Attribute::a ? Attribute::b : Attribute::a);
    }

    std::array<bool, 3> fixed{};
    for (std::size_t i = 0; i < 3; ++i) fixed[i] = q.dimension(i).has_value();
    std::array<double, 3> value{};
    for (std::size_t i = 0; i < 3; ++i) value[i] = fixed[i] ? *q.dimension(i) : 0.0;

    std::array<bool, 3> filled{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (fixed[i]) continue;
        // Nearest present dimension, the smaller one on ties.
        std::optional<std::size_t> anchor;
        for (std::size_t j = 0; j < 3; ++j) {
            if (!fixed[j]) continue;
            const auto distance = [&](std::size_t k) { return k > i ? k - i : i - k; };
            if (!anchor || distance(j) <= distance(*anchor)) anchor = j;
        }
        if (!anchor) break;
        auto ratios_for = [&](bool same_shape) {
            std::vector<double> ratios;
            for (const auto& record : records) {
                const auto& f = record.features;
                if (same_shape && f.shape != q.shape) continue;
                const auto& target = f.dimension(i);
                const auto& base = f.dimension(*anchor);
                if (target && base && *base > 0.0) ratios.push_back(*target / *base);
            }
            return ratios;
        };
        auto ratios = q.shape ? ratios_for(true) : std::vector<double>{};
        if (ratios.empty()) ratios = ratios_for(false);
        if (ratios.empty()) {
            partial.warnings.push_back(fmt::format("no prior for {}; left missing", kb::to_string(static_cast<Attribute>(i))));
            continue;
        }
        value[i] = median(std::move(ratios)) * value[*anchor];
        filled[i] = true;
    }

    if (filled[1]) {
        if (fixed[2] || filled[2]) value[1] = std::max(value[1], fixed[2] ? value[2] : 0.0);
        if (fixed[0]) value[1] = std::min(value[1], value[0]);
    }
    if (filled[0] && (fixed[1] || filled[1])) value[0] = std::max(value[0], value[1]);
    if (filled[0] && fixed[2]) value[0] = std::max(value[0], value[2]);
    if (filled[2] && (fixed[1] || filled[1])) value[2] = std::min(value[2], value[1]);
    if (filled[2] && fixed[0]) value[2] = std::min(value[2], value[0]);

    for (std::size_t i = 0; i < 3; ++i) {
        if (!filled[i]) continue;
        q.dimension(i) = value[i];
        partial.imputed.insert(static_cast<Attribute>(i));
    }
    return partial;
}

}  // namespace dexgrasp::parser
