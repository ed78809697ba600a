#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "dexgrasp/common/error.hpp"
#include "dexgrasp/common/random.hpp"
#include "dexgrasp/kb/knowledge_base.hpp"
#include "dexgrasp/parser/description_parser.hpp"
#include "dexgrasp/parser/scoring.hpp"
#include "fixtures.hpp"

using namespace dexgrasp;
using namespace dexgrasp::parser;
using kb::Attribute;

namespace {

const DescriptionParser& default_parser() {
    static const DescriptionParser parser(DescriptorLexicon::load(fixtures::data_path("lexicon/descriptors.txt")));
    return parser;
}

std::vector<std::string> lemmas(const std::vector<TaggedToken>& tokens) {
    std::vector<std::string> out;
    for (const auto& t : tokens) out.push_back(t.lemma);
    return out;
}

std::vector<std::string> tags(const std::vector<TaggedToken>& tokens) {
    std::vector<std::string> out;
    for (const auto& t : tokens) out.push_back(t.tag);
    return out;
}

// English words for 1..999, written independently of the tagger tables.
std::string spell(int n) {
    static const char* const small[] = {"zero",    "one",     "two",       "three",    "four",
                                        "five",    "six",     "seven",     "eight",    "nine",
                                        "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
                                        "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
    static const char* const tens[] = {"", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};
    std::string out;
    if (n >= 100) {
        out = std::string(small[n / 100]) + " hundred";
        n %= 100;
        if (n == 0) return out;
        out += " and ";
    }
    if (n < 20) return out + small[n];
    out += tens[n / 10];
    if (n % 10 != 0) out += std::string(" ") + small[n % 10];
    return out;
}

}  // namespace

TEST_CASE("tokenize drops stop words and tags the rest") {
    const auto tokens = tokenize_and_tag("it is about ten centimeters long");
    CHECK(lemmas(tokens) == std::vector<std::string>{"about", "ten", "centimeter", "long"});
    CHECK(tags(tokens) == std::vector<std::string>{"IN", "CD", "NN", "JJ"});

    const auto made = tokenize_and_tag("it is made of plastic");
    CHECK(lemmas(made) == std::vector<std::string>{"made", "of", "plastic"});
    CHECK(tags(made) == std::vector<std::string>{"JJ", "IN", "NN"});

    CHECK_THROWS_AS(tokenize_and_tag(""), ParseError);
    CHECK_THROWS_AS(tokenize_and_tag("  \n"), ParseError);
}

TEST_CASE("tokenize keeps byte offsets of the original text") {
    const std::string text = "A Tennis BALL, 6.4 cm across.";
    const auto tokens = tokenize_and_tag(text);
    for (const auto& t : tokens) {
        std::string original = text.substr(t.begin, t.end - t.begin);
        std::transform(original.begin(), original.end(), original.begin(), [](unsigned char c) { return std::tolower(c); });
        CHECK(original == t.surface);
    }
    CHECK(tokens.front().lemma == "tennis");
    CHECK(tags(tokens) == std::vector<std::string>{"NN", "NN", ",", "CD", "NN", "IN", "."});
}

TEST_CASE("every token gets exactly one tag from the documented set") {
    const std::vector<std::string> tagset = {"NN", "JJ", "JJR", "JJS", "RB", "IN", "CC",  "CD", "VB",
                                             "VBZ", "VBD", "VBG", "MD", "PRP", "WDT", ",", ".", ":"};
    const auto tokens = tokenize_and_tag(
        "The glasses weigh roughly 2.5 lbs; it's shockingly heavy, wider than 8\" and feels like polished steel!");
    for (const auto& t : tokens) {
        CHECK_MESSAGE(std::find(tagset.begin(), tagset.end(), t.tag) != tagset.end(), t.surface);
    }
    CHECK(lemmatize("glasses") == "glass");
    CHECK(lemmatize("inches") == "inch");
    CHECK(lemmatize("batteries") == "battery");
    CHECK(lemmatize("feet") == "foot");
    CHECK(lemmatize("grams") == "gram");
}

TEST_CASE("number words") {
    CHECK(number_token_value("ten") == 10.0);
    CHECK(number_token_value("twenty-five") == 25.0);
    CHECK(number_token_value("1,200") == 1200.0);
    CHECK(number_token_value("15.5") == 15.5);
    CHECK(number_token_value("half") == 0.5);
    CHECK(!number_token_value("plastic"));

    auto values = [](const std::string& text) {
        const auto tokens = tokenize_and_tag(text);
        std::vector<double> out;
        for (const auto& n : parse_numbers(tokens, 0, tokens.size())) out.push_back(n.value);
        return out;
    };
    CHECK(values("fifteen and half") == std::vector<double>{15.5});
    CHECK(values("one and a half") == std::vector<double>{1.5});
    CHECK(values("two and a quarter") == std::vector<double>{2.25});
    CHECK(values("one hundred and sixteen") == std::vector<double>{116});
    CHECK(values("two hundred twenty five") == std::vector<double>{225});
    CHECK(values("8 x 5 x 2") == std::vector<double>{8, 5, 2});
    CHECK(values("15 and 8") == std::vector<double>{15, 8});
    CHECK(values("ten and twenty") == std::vector<double>{10, 20});
    CHECK(values("3 and a half") == std::vector<double>{3.5});
}

TEST_CASE("chunk examples") {
    const ChunkPattern quantitative;
    CHECK(quantitative.pattern() ==
          "<JJ.?>*<IN>*<CD.?><CD.?>*<CC.?>*<CD.?>*<NN.?>*<RB.?>*<JJ.?>*<IN>*<NN.?>*<JJ.?>*<NN.?>?");

    // Tags CD NN JJ: <CD.?> takes "ten", <NN.?>* takes "centimeter", <JJ.?>* takes "long".
    const auto ten = tokenize_and_tag("ten centimeters long");
    const auto one = chunk(ten, quantitative);
    REQUIRE(one.size() == 1);
    CHECK(one[0].first == 0);
    CHECK(one[0].last == 3);

    CHECK(chunk(tokenize_and_tag("quickly and slowly"), quantitative).empty());
    CHECK(default_parser().chunk(tokenize_and_tag("quickly and slowly")).empty());

    // CD CC CD NN JJ , CD NN JJ: the comma ends the first chunk.
    const auto two = chunk(tokenize_and_tag("fifteen and half centimeters long, 8 centimeters wide"), quantitative);
    REQUIRE(two.size() == 2);
    CHECK(two[0].size() == 5);
    CHECK(two[1].size() == 3);
}

TEST_CASE("qualitative chunks fill the gaps between quantitative ones") {
    const auto tokens = tokenize_and_tag("A calculator made of plastic. It is 15 cm long and very rough.");
    const auto chunks = default_parser().chunk(tokens);
    std::size_t quantitative = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (chunks[i].quantitative) ++quantitative;
        if (i > 0) CHECK(chunks[i - 1].last <= chunks[i].first);
    }
    CHECK(quantitative == 1);
    CHECK(chunks.size() >= 3);
}

TEST_CASE("chunk patterns are configurable and validated") {
    CHECK_THROWS_AS(ChunkPattern("<NN"), ParseError);
    CHECK_THROWS_AS(ChunkPattern("<NN>("), ParseError);
    const ChunkPattern nouns("<NN>+");
    const auto chunks = chunk(tokenize_and_tag("tennis ball with fabric cover"), nouns);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].size() == 2);
    CHECK(chunks[1].size() == 2);
}

TEST_CASE("extract the calculator description") {
    const auto result = default_parser().parse(
        "A scientific calculator with plastic body. It is about fifteen and half centimeters long, 8 centimeters "
        "wide and appears to be more than one and half centimeters thick.");
    const auto& q = result.query;
    CHECK(q.a == 15.5);
    CHECK(q.b == 8.0);
    CHECK(q.c == 1.5);
    CHECK(q.material == kb::Material::plastic);
    CHECK(!q.mass);
    for (auto attribute : {Attribute::a, Attribute::b, Attribute::c, Attribute::material}) {
        CHECK(result.provenance.count(attribute) == 1);
    }
    CHECK(result.imputed.empty());
}

TEST_CASE("extract single quantities") {
    const auto two = default_parser().parse("two centimeters long").query;
    CHECK(two.a == 2.0);
    CHECK(!two.b);
    CHECK(!two.c);

    const auto bottle = default_parser().parse("weighs about 660 grams");
    CHECK(bottle.query.mass == 660.0);
    CHECK(bottle.query.dimension_count() == 0);
    CHECK(bottle.query.mass == fixtures::kb_rows()[1].features.mass);

    const auto heavy = default_parser().parse("It weighs one hundred and sixteen.").query;
    CHECK(heavy.mass == 116.0);

    const auto ball = default_parser().parse("a rubber ball with a diameter of 6.4 cm");
    CHECK(ball.query.b == 6.4);
    CHECK(ball.query.shape == kb::Shape::radial);
    CHECK(ball.query.material == kb::Material::rubber);

    const auto dims = default_parser().parse("a wooden box, 8 x 5 x 2 cm, 1.2 kg").query;
    CHECK(dims.a == 8.0);
    CHECK(dims.b == 5.0);
    CHECK(dims.c == 2.0);
    CHECK(dims.mass == 1200.0);
    CHECK(dims.material == kb::Material::wood);
}

TEST_CASE("provenance spans point at the stated text") {
    const std::string text = "A soft ball, 7 cm across, weighing 40 grams.";
    const auto result = default_parser().parse(text);
    CHECK(text.substr(result.provenance.at(Attribute::b).begin,
                      result.provenance.at(Attribute::b).end - result.provenance.at(Attribute::b).begin) == "7 cm");
    CHECK(text.substr(result.provenance.at(Attribute::mass).begin,
                      result.provenance.at(Attribute::mass).end - result.provenance.at(Attribute::mass).begin) ==
          "40 grams");
    CHECK(text.substr(result.provenance.at(Attribute::rigidity).begin, 4) == "soft");
}

TEST_CASE("conflicting duplicates keep the first value and warn") {
    const auto result = default_parser().parse("It is 10 cm long. Actually it is 12 cm long. Made of wood, or metal.");
    CHECK(result.query.a == 10.0);
    CHECK(result.query.material == kb::Material::wood);
    CHECK(result.warnings.size() == 2);

    const auto same = default_parser().parse("It is 10 cm long, yes 10 cm long.");
    CHECK(same.warnings.empty());
}

TEST_CASE("negated descriptors are ignored") {
    const auto result = default_parser().parse("a mug that is not fragile, made of ceramic");
    CHECK(!result.query.fragility);
    CHECK(result.query.material == kb::Material::other);
    CHECK(result.warnings.size() == 1);
}

TEST_CASE("dimensions are ordered regardless of mention order") {
    const std::vector<std::string> phrases = {"3 cm thick", "12 cm wide", "20 cm long", "weighs 80 grams",
                                              "made of wood", "very rough"};
    std::vector<std::size_t> order = {0, 1, 2, 3, 4, 5};
    Rng rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        rng.shuffle(order);
        std::string text;
        for (auto i : order) text += phrases[i] + ", ";
        const auto q = default_parser().parse(text).query;
        CHECK(q.a == 20.0);
        CHECK(q.b == 12.0);
        CHECK(q.c == 3.0);
        CHECK(q.mass == 80.0);
        CHECK(q.texture == kb::Texture::rough);
    }

    // Keywords that disagree with the sizes are re-sorted.
    Rng values(43);
    for (int trial = 0; trial < 200; ++trial) {
        const double x = std::round(values.uniform(0.5, 60.0) * 10) / 10;
        const double y = std::round(values.uniform(0.5, 60.0) * 10) / 10;
        const double z = std::round(values.uniform(0.5, 60.0) * 10) / 10;
        const auto q = default_parser()
                           .parse(fmt::format("{} cm thick and {} cm long, and it is {} cm wide", x, y, z))
                           .query;
        REQUIRE(q.dimension_count() == 3);
        CHECK(*q.a >= *q.b);
        CHECK(*q.b >= *q.c);
        std::vector<double> got = {*q.a, *q.b, *q.c};
        std::vector<double> want = {x, y, z};
        std::sort(want.rbegin(), want.rend());
        CHECK(got == want);
    }
}

TEST_CASE("rendered output parses back to the same query") {
    const auto& parser = default_parser();
    Rng rng(8);
    for (int trial = 0; trial < 300; ++trial) {
        kb::FeatureQuery q;
        if (rng.uniform() < 0.8) q.a = rng.uniform(0.1, 80.0);
        if (rng.uniform() < 0.8) q.b = rng.uniform(0.1, 80.0);
        if (rng.uniform() < 0.8) q.c = rng.uniform(0.1, 80.0);
        if (rng.uniform() < 0.8) q.mass = rng.uniform(0.5, 3000.0);
        if (rng.uniform() < 0.8) q.shape = static_cast<kb::Shape>(rng.index(5));
        if (rng.uniform() < 0.8) q.rigidity = static_cast<kb::Rigidity>(rng.index(3));
        if (rng.uniform() < 0.8) q.texture = static_cast<kb::Texture>(rng.index(3));
        if (rng.uniform() < 0.8) q.fragility = static_cast<kb::Fragility>(rng.index(3));
        if (rng.uniform() < 0.8) q.material = static_cast<kb::Material>(rng.index(8));
        q.normalize();
        const auto text = parser.render(q);
        const auto first = parser.parse(text);
        CHECK_MESSAGE(first.query == q, text);
        CHECK(first.warnings.empty());
        CHECK(parser.parse(parser.render(first.query)).query == first.query);
    }
}

TEST_CASE("inches convert by exactly 2.54") {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const double inches = std::round(rng.uniform(0.25, 40.0) * 100) / 100;
        const auto q = default_parser().parse(fmt::format("{} inches long", inches)).query;
        CHECK(q.a == inches * 2.54);
    }
    CHECK(default_parser().parse("a 6\" long ruler").query.a == 6 * 2.54);
    CHECK(default_parser().parse("fifteen and half inches long").query.a == 15.5 * 2.54);
}

TEST_CASE("word numbers agree with digits") {
    const auto& parser = default_parser();
    for (int n = 1; n < 1000; n += (n < 30 ? 1 : 7)) {
        for (const auto& [suffix, fraction] : std::vector<std::pair<std::string, double>>{
                 {"", 0.0}, {" and half", 0.5}, {" and a half", 0.5}, {" and a quarter", 0.25}}) {
            const std::string label = spell(n) + suffix;
            const auto words = parser.parse(label + " centimeters").query;
            const auto digits = parser.parse(fmt::format("{} centimeters", n + fraction)).query;
            REQUIRE_MESSAGE(words.a.has_value(), label);
            CHECK_MESSAGE(words == digits, label);
        }
    }
}

TEST_CASE("impute examples") {
    const auto table = fixtures::kb_rows();

    ParseResult radial = default_parser().parse("a ball of 6.4 cm");
    REQUIRE(radial.query.shape == kb::Shape::radial);
    REQUIRE(radial.query.dimension_count() == 1);
    const auto filled = impute(radial, table);
    CHECK(filled.query.a == 6.4);
    CHECK(filled.query.b == 6.4);
    // The only radial row is the tennis ball, c/b = 1.
    CHECK(filled.query.c == doctest::Approx(6.4));
    CHECK(filled.imputed == std::set<Attribute>{Attribute::b, Attribute::c});
    CHECK(filled.provenance.count(Attribute::a) == 1);

    // A stated diameter already covers two extents.
    const auto diameter = default_parser().parse("a ball, 6.4 cm in diameter");
    CHECK(diameter.query.a == 6.4);
    CHECK(diameter.query.b == 6.4);
    CHECK(!diameter.query.c);
    const auto cylinder = default_parser().parse("a can 12 cm tall and 6.6 cm in diameter").query;
    CHECK(cylinder.a == 12.0);
    CHECK(cylinder.b == 6.6);
    CHECK(cylinder.c == 6.6);

    const auto full = default_parser().parse("15.4 cm long, 7.9 cm wide, 1.5 cm thick");
    const auto unchanged = impute(full, table);
    CHECK(unchanged.query == full.query);
    CHECK(unchanged.imputed.empty());

    const auto thin = default_parser().parse("a thin device 15.4 cm long and 7.9 cm wide");
    REQUIRE(thin.query.shape == kb::Shape::thin);
    const auto thin_filled = impute(thin, table);
    // Thin rows are the calculator (c/b = 1.5/7.9) and the scale (1.8/20).
    const double ratio = 0.5 * (1.5 / 7.9 + 1.8 / 20.0);
    CHECK(thin_filled.query.c == doctest::Approx(ratio * 7.9).epsilon(1e-12));
    CHECK(thin_filled.imputed == std::set<Attribute>{Attribute::c});

    const auto nothing = impute(default_parser().parse("made of metal"), table);
    CHECK(nothing.query.dimension_count() == 0);
    CHECK(nothing.imputed.empty());
}

TEST_CASE("impute keeps stated fields and the a >= b >= c order") {
    const auto records = kb::load_records(fixtures::data_path("kb.csv"));
    Rng rng(77);
    const char* const keywords[] = {"long", "wide", "thick"};
    const char* const shapes[] = {"", "thin", "compact", "cylindrical", "elongated", "ball"};
    for (int trial = 0; trial < 300; ++trial) {
        std::string text = shapes[rng.index(6)];
        for (int k = 0; k < 3; ++k) {
            if (rng.uniform() < 0.5) text += fmt::format(", {} cm {}", std::round(rng.uniform(0.3, 50) * 10) / 10, keywords[k]);
        }
        if (text.empty()) text = "object";
        const auto partial = default_parser().parse(text);
        const auto filled = impute(partial, records);
        for (const auto& [attribute, span] : partial.provenance) {
            if (partial.query.shape == kb::Shape::radial && partial.query.dimension_count() == 1) break;
            CHECK(filled.provenance.at(attribute) == span);
            CHECK(filled.imputed.count(attribute) == 0);
        }
        for (auto attribute : kb::kAllAttributes) {
            if (!filled.query.has(attribute)) continue;
            CHECK((filled.provenance.count(attribute) + filled.imputed.count(attribute)) == 1);
        }
        if (partial.query.dimension_count() > 0) CHECK(filled.query.dimension_count() == 3);
        if (filled.query.dimension_count() == 3) {
            CHECK(*filled.query.a >= *filled.query.b);
            CHECK(*filled.query.b >= *filled.query.c);
        }
    }
}

TEST_CASE("lexicon file format") {
    std::istringstream good("# comment\nvery rough -> texture:rough\nstainless steel -> material:metal\n");
    const auto lexicon = DescriptorLexicon::read(good);
    REQUIRE(lexicon.entries().size() == 2);
    CHECK(lexicon.entries()[1].lemmas == std::vector<std::string>{"stainless", "steel"});
    CHECK(lexicon.canonical_phrase(Attribute::texture, "rough") == "very rough");

    std::istringstream bad_value("sparkly -> texture:glitter\n");
    CHECK_THROWS_AS(DescriptorLexicon::read(bad_value), DataError);
    std::istringstream bad_line("sparkly texture\n");
    CHECK_THROWS_AS(DescriptorLexicon::read(bad_line), DataError);
}

TEST_CASE("r squared") {
    CHECK(r_squared({1, 2, 3}, {1, 2, 3}) == 1.0);
    CHECK(r_squared({1, 2, 3}, {2, 2, 2}) == doctest::Approx(0.0));
    CHECK(r_squared({1, 2, 3, 4}, {1, 2, 3, 5}) == doctest::Approx(1.0 - 1.0 / 5.0));
    CHECK(std::isnan(r_squared({}, {})));
}

TEST_CASE("score_parser on exact descriptions is perfect") {
    const auto table = fixtures::kb_rows();
    const auto& parser = default_parser();
    std::vector<CorpusEntry> corpus;
    for (const auto& record : table) corpus.push_back(CorpusEntry{parser.render(record.features), record});
    const auto score = score_parser(corpus, parser, table);
    CHECK(score.descriptions == 10);
    CHECK(score.r2_dimensions == 1.0);
    CHECK(score.r2_mass == 1.0);
    CHECK(score.dimension_pairs == 30);
    CHECK(score.material.accuracy() == 1.0);
    CHECK(score.shape.accuracy() == 1.0);
    CHECK(score.rigidity.accuracy() == 1.0);
}

TEST_CASE("a description without material is scored as other") {
    const auto table = fixtures::kb_rows();
    std::vector<CorpusEntry> corpus = {{"a calculator, 15 cm long", table[0]}, {"a mouse made of plastic", table[3]}};
    const auto score = score_parser(corpus, default_parser(), table);
    const auto plastic = static_cast<std::size_t>(kb::Material::plastic);
    const auto other = static_cast<std::size_t>(kb::Material::other);
    CHECK(score.material.counts[plastic][other] == 1);
    CHECK(score.material.counts[plastic][plastic] == 1);
    CHECK(score.shape.counts[static_cast<std::size_t>(kb::Shape::thin)][5] == 1);
    CHECK(score.shape.predicted_labels.back() == "unspecified");
}

TEST_CASE("corpus reader resolves ids") {
    const auto table = fixtures::kb_rows();
    std::istringstream in(R"({"text": "a calculator", "truth_id": 1})" "\n" R"({"text": "x", "truth_id": 99})" "\n");
    CHECK_THROWS_AS(read_corpus_jsonl(in, table), DataError);
    std::istringstream ok(R"({"text": "a calculator", "truth_id": 1})" "\n");
    const auto corpus = read_corpus_jsonl(ok, table);
    REQUIRE(corpus.size() == 1);
    CHECK(corpus[0].truth.label == "calculator");
}
