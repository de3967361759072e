#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "textsplat/common.hpp"
#include "textsplat/font5x7.hpp"
#include "textsplat/image.hpp"
#include "textsplat/ocr.hpp"
#include "textsplat/rng.hpp"
#include "test_util.hpp"

using namespace textsplat;

namespace {

std::vector<TextItem> items(const std::vector<std::string>& words) {
    std::vector<TextItem> out;
    for (const auto& w : words) out.emplace_back(w);
    return out;
}

// Classic full-matrix edit distance over bytes (all-ASCII inputs only).
int64_t reference_edit_distance(const std::string& a, const std::string& b) {
    size_t n = a.size(), m = b.size();
    std::vector<std::vector<int64_t>> d(n + 1, std::vector<int64_t>(m + 1, 0));
    for (size_t i = 0; i <= n; ++i) d[i][0] = int64_t(i);
    for (size_t j = 0; j <= m; ++j) d[0][j] = int64_t(j);
    for (size_t i = 1; i <= n; ++i)
        for (size_t j = 1; j <= m; ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return d[n][m];
}

std::string random_word(Rng& rng, int max_len) {
    int len = int(rng.uniform_index(uint64_t(max_len + 1)));
    std::string s;
    for (int i = 0; i < len; ++i) s.push_back(char('a' + rng.uniform_index(4)));
    return s;
}

// Paints a white-on-black image with `raster` ink placed at (x0, y0).
void stamp(Image3& img, const GlyphRaster& raster, int y0, int x0) {
    for (int y = 0; y < raster.ink.height; ++y)
        for (int x = 0; x < raster.ink.width; ++x)
            if (raster.ink.at(y, x))
                for (int c = 0; c < 3; ++c) img.px(y0 + y, x0 + x)[c] = 0.95;
}

}  // namespace

TEST_CASE("levenshtein: textbook cases") {
    CHECK(levenshtein("", "abc") == 3);
    CHECK(levenshtein("abc", "") == 3);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("same", "same") == 0);
    CHECK(levenshtein("", "") == 0);
}

TEST_CASE("levenshtein: counts codepoints, not bytes") {
    CHECK(levenshtein("h\xc3\xa9llo", "hello") == 1);  // héllo
    CHECK(levenshtein("\xc3\xa9", "") == 1);
    CHECK_THROWS_AS(levenshtein("\xff", "a"), ParseError);
    CHECK_THROWS_AS(levenshtein("\xc3", "a"), ParseError);  // truncated sequence
}

TEST_CASE("levenshtein: agrees with the full-matrix reference") {
    Rng rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        std::string a = random_word(rng, 12);
        std::string b = random_word(rng, 12);
        std::string c = random_word(rng, 12);
        int64_t ab = levenshtein(a, b);
        CHECK(ab == reference_edit_distance(a, b));
        // Metric properties: symmetry and the triangle inequality.
        CHECK(ab == levenshtein(b, a));
        CHECK(ab <= levenshtein(a, c) + levenshtein(c, b));
        CHECK((ab == 0) == (a == b));
    }
}

TEST_CASE("score_view: perfect recall with extra detections costs nothing") {
    ViewScore s = score_view(items({"hello"}), items({"hello", "noise", "extra"}), "v");
    CHECK(s.gt_chars == 5);
    CHECK(s.edit_cost == 0);
    CHECK(s.cer == 0.0);
    CHECK(s.view == "v");
}

TEST_CASE("score_view: missing everything costs the full length") {
    ViewScore s = score_view(items({"hello", "world"}), {}, "v");
    CHECK(s.gt_chars == 10);
    CHECK(s.edit_cost == 10);
    CHECK(s.cer == 1.0);
}

TEST_CASE("score_view: partial matches use the edit distance") {
    ViewScore s = score_view(items({"kitten"}), items({"sitting"}), "v");
    CHECK(s.gt_chars == 6);
    CHECK(s.edit_cost == 3);
    CHECK(s.cer == 0.5);
}

TEST_CASE("score_view: matching is case-insensitive and trimmed") {
    ViewScore s = score_view(items({"Hello"}), items({"  hELLO \n"}), "v");
    CHECK(s.cer == 0.0);
}

TEST_CASE("score_view: a recognized word serves at most one ground-truth word") {
    // Longest ground truth chooses first: "abc" takes the only detection,
    // leaving "ab" unmatched (cost 2), total 2/5.
    ViewScore s = score_view(items({"ab", "abc"}), items({"abc"}), "v");
    CHECK(s.gt_chars == 5);
    CHECK(s.edit_cost == 2);
    CHECK(s.cer == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("score_view: a match is only taken when it beats leaving the word unmatched") {
    // d("a","zzz") = 3 > len("a") = 1, so the word stays unmatched.
    ViewScore s = score_view(items({"a"}), items({"zzz"}), "v");
    CHECK(s.edit_cost == 1);
    CHECK(s.cer == 1.0);
}

TEST_CASE("score_view: the rate never exceeds one") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> gt, rec;
        for (int i = 0; i < 3; ++i) gt.push_back(random_word(rng, 6));
        for (int i = 0; i < 5; ++i) rec.push_back(random_word(rng, 9));
        ViewScore s = score_view(items(gt), items(rec), "v");
        CHECK(s.cer >= 0.0);
        CHECK(s.cer <= 1.0);
    }
}

TEST_CASE("score_view: improving a detection never raises the score") {
    ViewScore rough = score_view(items({"mango"}), items({"mxngq"}), "v");
    ViewScore close = score_view(items({"mango"}), items({"mangq"}), "v");
    ViewScore exact = score_view(items({"mango"}), items({"mango"}), "v");
    CHECK(close.cer <= rough.cer);
    CHECK(exact.cer <= close.cer);
    CHECK(exact.cer == 0.0);
}

TEST_CASE("aggregate: scene score is the plain mean over scored views") {
    ViewScore a = score_view(items({"kitten"}), items({"sitting"}), "a");   // 0.5
    ViewScore b = score_view(items({"ab", "cd"}), items({"ab", "xd"}), "b");  // 1/4
    CerReport r = aggregate({a, b});
    REQUIRE(r.scene_cer.has_value());
    CHECK(*r.scene_cer == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(r.counted_views == 2);
    CHECK(r.views.size() == 2);
}

TEST_CASE("aggregate: views without ground truth are not counted") {
    ViewScore empty = score_view({}, items({"whatever"}), "e");
    ViewScore scored = score_view(items({"ab"}), items({"ab"}), "s");
    CerReport r = aggregate({empty, scored});
    REQUIRE(r.scene_cer.has_value());
    CHECK(*r.scene_cer == 0.0);
    CHECK(r.counted_views == 1);

    CerReport none = aggregate({empty});
    CHECK_FALSE(none.scene_cer.has_value());
    CHECK(none.counted_views == 0);

    CerReport single = aggregate({scored});
    REQUIRE(single.scene_cer.has_value());
    CHECK(*single.scene_cer == 0.0);
    CHECK(single.counted_views == 1);
}

TEST_CASE("recognize_builtin: reads a clean rasterized word") {
    GlyphRaster word = rasterize_glyphs("HELLO", 21);
    Image3 img(word.ink.height + 20, word.ink.width + 24, 0.0);
    stamp(img, word, 10, 12);
    auto got = recognize_builtin(img);
    REQUIRE(got.size() == 1);
    CHECK(got[0].text == "HELLO");
    CHECK(got[0].has_bbox);
    CHECK(got[0].x0 >= 12);
    CHECK(got[0].y0 >= 10);
}

TEST_CASE("recognize_builtin: separates words on a blank cell") {
    // Compose "AB CD" by hand: a one-glyph-wide gap between the two rasters.
    int s = 3;
    GlyphRaster ab = rasterize_glyphs("AB", 7 * s);
    GlyphRaster cd = rasterize_glyphs("CD", 7 * s);
    Image3 img(7 * s + 16, 29 * s + 16, 0.0);
    stamp(img, ab, 8, 8);
    stamp(img, cd, 8, 8 + 18 * s);  // cells: A B blank C D
    auto got = recognize_builtin(img);
    REQUIRE(got.size() == 2);
    CHECK(got[0].text == "AB");
    CHECK(got[1].text == "CD");
    CHECK(got[0].x1 < got[1].x0);
}

TEST_CASE("recognize_builtin: stacked lines come out top to bottom") {
    int s = 2;
    GlyphRaster top = rasterize_glyphs("UP", 7 * s);
    GlyphRaster bottom = rasterize_glyphs("DOWN", 7 * s);
    Image3 img(40 * s, 40 * s, 0.0);
    stamp(img, top, 4, 6);
    stamp(img, bottom, 20 * s, 6);
    auto got = recognize_builtin(img);
    REQUIRE(got.size() == 2);
    CHECK(got[0].text == "UP");
    CHECK(got[1].text == "DOWN");
}

TEST_CASE("recognize_builtin: blank and noise images give nothing") {
    Image3 blank(32, 32, 0.0);
    CHECK(recognize_builtin(blank).empty());

    Image3 dark(32, 32, 0.3);  // below the luma threshold everywhere
    CHECK(recognize_builtin(dark).empty());

    // A checkerboard blob is ink but matches no glyph template.
    Image3 noise(24, 40, 0.0);
    for (int y = 8; y < 15; ++y)
        for (int x = 6; x < 26; ++x)
            if ((x + y) % 2 == 0)
                for (int c = 0; c < 3; ++c) noise.px(y, x)[c] = 1.0;
    CHECK(recognize_builtin(noise).empty());
}

TEST_CASE("recognize_external: whitespace output becomes one item per word") {
    Image3 img(4, 4, 0.0);
    testutil::TempDir tmp("ocr_ext");
    auto png = tmp.sub("img.png");
    write_png_rgb(png, img);

    auto one = recognize_external(png, "echo hello");
    REQUIRE(one.size() == 1);
    CHECK(one[0].text == "hello");
    CHECK_FALSE(one[0].has_bbox);

    auto two = recognize_external(png, "printf 'a\\nb\\n'");
    REQUIRE(two.size() == 2);
    CHECK(two[0].text == "a");
    CHECK(two[1].text == "b");

    CHECK(recognize_external(png, "true").empty());
}

TEST_CASE("recognize_external: substitutes the image path") {
    testutil::TempDir tmp("ocr_sub");
    auto path = tmp.sub("with space.txt");
    std::ofstream(path) << "WORD1 WORD2\n";
    auto got = recognize_external(path, "cat {image}");
    REQUIRE(got.size() == 2);
    CHECK(got[0].text == "WORD1");
    CHECK(got[1].text == "WORD2");
}

TEST_CASE("recognize_external: JSON output carries text and boxes") {
    testutil::TempDir tmp("ocr_json");
    auto png = tmp.sub("img.png");
    write_png_rgb(png, Image3(4, 4, 0.0));
    auto got = recognize_external(
        png, "echo '[{\"text\":\"abc\"},{\"text\":\"de\",\"bbox\":[1,2,3,4]}]'");
    REQUIRE(got.size() == 2);
    CHECK(got[0].text == "abc");
    CHECK_FALSE(got[0].has_bbox);
    CHECK(got[1].text == "de");
    CHECK(got[1].has_bbox);
    CHECK(got[1].x0 == 1);
    CHECK(got[1].y1 == 4);

    CHECK_THROWS_AS(recognize_external(png, "echo '[oops'"), ParseError);
}

TEST_CASE("recognize_external: failures surface the tool's stderr") {
    testutil::TempDir tmp("ocr_fail");
    auto png = tmp.sub("img.png");
    write_png_rgb(png, Image3(4, 4, 0.0));
    CHECK_THROWS_WITH_AS(recognize_external(png, "echo boom >&2; exit 3"),
                         doctest::Contains("boom"), Error);
}
