#include "support.hpp"

#include "depsig/text.hpp"

using depsig::filter_stopwords;
using depsig::tokenize;
using Tokens = std::vector<std::string>;

TEST_CASE("tokenize drops URLs and keeps emoji whole", "[text]") {
    CHECK(tokenize("Stay Home! \xF0\x9F\x98\xB7 http://x.y") == Tokens{"stay", "home", "\xF0\x9F\x98\xB7"});
}

TEST_CASE("tokenize of empty text is empty", "[text]") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t\n").empty());
}

TEST_CASE("hashtag marker is stripped and the word kept", "[text]") {
    CHECK(tokenize("#StayAtHome") == Tokens{"stayathome"});
    CHECK(tokenize("so #tired of this") == Tokens{"so", "tired", "of", "this"});
}

TEST_CASE("tokenize keeps contractions and decimal numbers together", "[text]") {
    CHECK(tokenize("I'm fine, can't sleep") == Tokens{"i'm", "fine", "can't", "sleep"});
    CHECK(tokenize("only 3.5 hours") == Tokens{"only", "3.5", "hours"});
    CHECK(tokenize("it\xE2\x80\x99s late") == Tokens{"it's", "late"});
}

TEST_CASE("tokenize lowercases non-ASCII letters", "[text]") {
    CHECK(tokenize("CAF\xC3\x89 Stra\xC3\x9F" "e") == Tokens{"caf\xC3\xA9", "stra\xC3\x9F" "e"});
}

TEST_CASE("emoji sequences with modifiers and joiners stay one token", "[text]") {
    const std::string thumbs = "\xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD";  // thumbs up, medium skin tone
    const std::string family = "\xF0\x9F\x91\xA8\xE2\x80\x8D\xF0\x9F\x91\xA9";
    CHECK(tokenize("ok" + thumbs + family) == Tokens{"ok", thumbs, family});
}

TEST_CASE("www and https links are removed", "[text]") {
    CHECK(tokenize("see www.example.com/a?b=c and https://t.co/xyz now") == Tokens{"see", "and", "now"});
}

TEST_CASE("tokenize is deterministic", "[text]") {
    const std::string s = "Lockdown day 12 \xF0\x9F\x98\x94 #mentalhealth, can't focus... https://a.b";
    CHECK(tokenize(s) == tokenize(s));
}

TEST_CASE("filter_stopwords keeps whitelisted pronouns", "[text]") {
    const auto out = filter_stopwords({"i", "feel", "the", "sad"}, depsig::default_stoplist(),
                                      depsig::default_pronoun_whitelist());
    CHECK(out == Tokens{"i", "feel", "sad"});
}

TEST_CASE("filter_stopwords without stopwords is the identity", "[text]") {
    const Tokens in = {"lonely", "tired", "hopeless"};
    CHECK(filter_stopwords(in, depsig::default_stoplist(), depsig::default_pronoun_whitelist()) == in);
}

TEST_CASE("all-stopword input with empty whitelist yields nothing", "[text]") {
    CHECK(filter_stopwords({"the", "and", "i", "of"}, depsig::default_stoplist(), {}).empty());
}

TEST_CASE("filter_stopwords is idempotent and order preserving", "[text]") {
    const Tokens in = {"we", "were", "so", "tired", "and", "they", "left", "the", "room"};
    const auto& stop = depsig::default_stoplist();
    const auto& white = depsig::default_pronoun_whitelist();
    const auto once = filter_stopwords(in, stop, white);
    CHECK(once == Tokens{"we", "tired", "they", "left", "room"});
    CHECK(filter_stopwords(once, stop, white) == once);
}

TEST_CASE("contains_sequence matches contiguous runs only", "[text]") {
    const Tokens hay = {"covid", "and", "mental", "health"};
    CHECK(depsig::contains_sequence(hay, {"mental", "health"}));
    CHECK_FALSE(depsig::contains_sequence(hay, {"covid", "health"}));
    CHECK_FALSE(depsig::contains_sequence(hay, {}));
}
