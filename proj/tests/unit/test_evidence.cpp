#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <doctest.h>

#include <atomic>
#include <map>
#include <thread>

#include "mwv/error.hpp"
#include "mwv/evidence/collector.hpp"
#include "mwv/util.hpp"
#include "support.hpp"

using namespace mwv;
using namespace mwv::evidence;

namespace {

// Canned responses keyed by URL; unknown URLs fail like an unreachable host.
class ScriptedClient final : public HttpClient {
public:
    std::map<std::string, HttpResponse> pages;
    std::map<std::string, int> failures_left;  // transient failures before success
    std::atomic<int> calls{0};

    HttpResponse get(const std::string& url) override {
        ++calls;
        if (auto it = failures_left.find(url); it != failures_left.end() && it->second > 0) {
            --it->second;
            throw Error(ErrorCode::ProviderUnavailable, "scripted failure");
        }
        auto it = pages.find(url);
        if (it == pages.end()) throw Error(ErrorCode::ProviderUnavailable, "unreachable " + url);
        return it->second;
    }
};

HttpOptions quick_options() {
    HttpOptions o;
    o.polite_delay = std::chrono::milliseconds(0);
    o.retries = 2;
    o.timeout = std::chrono::milliseconds(2000);
    return o;
}

BuiltQuery query(const std::string& text) {
    BuiltQuery q;
    q.claim_id = "c1";
    q.text = text + " fake news";
    q.content = text;
    return q;
}

Timestamp fixed_time() { return Timestamp{std::chrono::seconds{1600000000}}; }

std::vector<EvidenceTitle> titles(Platform p, int n) {
    std::vector<EvidenceTitle> out;
    for (int i = 1; i <= n; ++i) {
        out.push_back({p, i, "title number " + std::to_string(i), "https://example.org/" + std::to_string(i), fixed_time()});
    }
    return out;
}

}  // namespace

TEST_CASE("page titles are decoded and normalized") {
    CHECK(parse_page_title("<html><head><title>5G Claim Is Fake News</title></head>") == "5g claim is fake news");
    CHECK_FALSE(parse_page_title("<html><body>no title</body></html>").has_value());
    CHECK(parse_page_title("<TITLE>Salt &amp; Pepper</TITLE>") == "salt pepper");
    CHECK(decode_entities("a &amp; b &lt;c&gt; &#65;&#x42; &bogus;") == "a & b <c> AB &bogus;");
    CHECK_FALSE(parse_page_title("<title>   </title>").has_value());
    CHECK(parse_page_title("<title>unterminated").has_value() == parse_page_title("<title>unterminated").has_value());
}

TEST_CASE("google results keep pages with a title") {
    const std::vector<FetchedPage> pages{{"https://a.org", "<title>First &amp; Best</title>"},
                                         {"https://b.org", "<p>none</p>"},
                                         {"https://c.org", "<head><title>Third?</title>"}};
    const auto r = parse_google_results(pages);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == ResultLink{"https://a.org", "first best"});
    CHECK(r[1] == ResultLink{"https://c.org", "third?"});
}

TEST_CASE("search result links") {
    const std::string serp =
        "<a href=\"/url?q=https://news.example/a&amp;sa=U\">x</a>"
        "<a href=\"https://www.google.com/preferences\">prefs</a>"
        "<a href=\"https://other.example/b\">b</a>"
        "<a href=\"/url?q=https://news.example/a&amp;sa=U\">dup</a>"
        "<a href=\"/url?q=https%3A%2F%2Fenc.example%2Fc&amp;sa=U\">c</a>";
    const auto links = extract_result_links(serp);
    CHECK(links == std::vector<std::string>{"https://news.example/a", "https://other.example/b", "https://enc.example/c"});
    CHECK(extract_result_links(serp, 1).size() == 1);
}

TEST_CASE("youtube anchors") {
    // Titles come back normalized, like page titles.
    const std::string html =
        "<a id=\"video-title\" href=\"/watch?v=1\" title=\"One &amp; Only\">x</a>"
        "<a id=\"other\" href=\"/watch?v=9\" title=\"skip\"></a>"
        "<a id=\"video-title\" href=\"https://youtu.be/2\">Two</a>"
        "<a id=\"video-title\" title=\"No Href\"></a>";
    const auto r = parse_youtube_results(html);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == ResultLink{"https://www.youtube.com/watch?v=1", "one only"});
    CHECK(r[1] == ResultLink{"https://youtu.be/2", "two"});
    CHECK(r[2] == ResultLink{"", "no href"});
    CHECK(parse_youtube_results("<html></html>").empty());
}

TEST_CASE("youtube initial data fallback") {
    const std::string html =
        R"(<script>var ytInitialData = {"contents":[{"videoRenderer":{"videoId":"abc","title":{"runs":[{"text":"Garlic cure debunked"}]}}},)"
        R"({"videoRenderer":{"videoId":"def","title":{"runs":[{"text":"Part "},{"text":"two"}]}}}]};</script>)";
    const auto r = parse_youtube_initial_data(html);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == ResultLink{"https://www.youtube.com/watch?v=abc", "garlic cure debunked"});
    CHECK(r[1].title == "part two");
}

TEST_CASE("scan_tags never throws on malformed markup") {
    Rng rng(31);
    const std::string alphabet = "<>/=\"' abtitle-!";
    for (int i = 0; i < 500; ++i) {
        std::string s;
        const std::size_t n = rng.below(60);
        for (std::size_t k = 0; k < n; ++k) s += alphabet[rng.below(alphabet.size())];
        CHECK_NOTHROW(scan_tags(s));
        CHECK_NOTHROW(parse_page_title(s));
        CHECK_NOTHROW(parse_youtube_results(s));
    }
}

TEST_CASE("rfc3339 round trip") {
    const auto t = fixed_time();
    CHECK(format_rfc3339(t) == "2020-09-13T12:26:40Z");
    CHECK(parse_rfc3339("2020-09-13T12:26:40Z") == t);
    CHECK(parse_rfc3339("2020-09-13T14:26:40+02:00") == t);
    CHECK(parse_rfc3339("2020-09-13T12:26:40.250Z") == t);
    CHECK_FALSE(parse_rfc3339("yesterday").has_value());
}

TEST_CASE("platform names") {
    CHECK(parse_platform("YouTube") == Platform::YouTube);
    CHECK(parse_platform_list("google, youtube") == std::vector<Platform>{Platform::Google, Platform::YouTube});
    CHECK_THROWS_AS(parse_platform_list("google,twitter"), Error);
    CHECK(canonical_query("  Corona   CURE fake news ") == "corona cure fake news");
}

TEST_CASE("fixture key is the digest of platform and canonical query") {
    CHECK(FixtureStore::key(Platform::Google, "Corona  cure fake news") ==
          sha256_hex("google\ncorona cure fake news"));
    CHECK(FixtureStore::key(Platform::Google, "q") != FixtureStore::key(Platform::YouTube, "q"));
}

TEST_CASE("replay returns the stored bundle unchanged") {
    const auto dir = testing::scratch_dir("replay");
    auto store = std::make_shared<FixtureStore>(dir);
    const auto q = query("corona cure");
    store->save(Platform::Google, q.text, titles(Platform::Google, 10));
    store->save(Platform::YouTube, q.text, titles(Platform::YouTube, 4));
    const EvidenceCollector c(store);
    const auto g = c.collect(q, Platform::Google, EvidenceMode::Replay);
    CHECK(g.titles == titles(Platform::Google, 10));
    CHECK(c.collect(q, Platform::YouTube, EvidenceMode::Replay).titles.size() == 4);
    // Referential transparency.
    CHECK(c.collect(q, Platform::Google, EvidenceMode::Replay).titles == g.titles);
    CHECK(read_file(store->path_for(Platform::Google, q.text)) ==
          FixtureStore::encode(Platform::Google, q.text, titles(Platform::Google, 10)));
    try {
        c.collect(query("nothing here"), Platform::Google, EvidenceMode::Replay);
        FAIL("expected MissingFixture");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingFixture);
        CHECK(e.message().find("nothing here fake news") != std::string::npos);
    }
}

TEST_CASE("an empty fixture replays as an empty bundle") {
    auto store = std::make_shared<FixtureStore>(testing::scratch_dir("empty"));
    const auto q = query("silent");
    store->save(Platform::YouTube, q.text, {});
    const EvidenceCollector c(store);
    const auto b = c.collect(q, Platform::YouTube, EvidenceMode::Replay);
    CHECK(b.empty_evidence());
}

TEST_CASE("fixture decoding rejects bad files") {
    const std::string good = FixtureStore::encode(Platform::Google, "q", titles(Platform::Google, 2));
    CHECK(FixtureStore::decode(good, Platform::Google, "q").size() == 2);
    auto expect_parse_error = [](const std::string& body, Platform p) {
        try {
            FixtureStore::decode(body, p, "q");
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
        }
    };
    expect_parse_error(good, Platform::YouTube);
    expect_parse_error(good.substr(0, good.size() / 2 - 5), Platform::Google);
    expect_parse_error(FixtureStore::encode(Platform::Google, "other", titles(Platform::Google, 1)), Platform::Google);
    auto gap = titles(Platform::Google, 3);
    gap.erase(gap.begin() + 1);
    expect_parse_error(FixtureStore::encode(Platform::Google, "q", gap), Platform::Google);
    expect_parse_error(FixtureStore::encode(Platform::Google, "q", titles(Platform::Google, 11)), Platform::Google);
}

TEST_CASE("record then replay round trip through the providers") {
    auto client = std::make_shared<ScriptedClient>();
    const auto q = query("garlic cure");
    const std::string serp_url = "https://www.google.com/search?q=" + url_encode(q.text) + "&num=10&hl=en";
    std::string serp;
    for (int i = 1; i <= 12; ++i) {
        const std::string u = "https://site" + std::to_string(i) + ".example/p";
        serp += "<a href=\"/url?q=" + u + "&amp;sa=U\">r</a>";
        client->pages[u] = {200, "<title>Garlic Result " + std::to_string(i) + "</title>"};
    }
    client->pages["https://site3.example/p"] = {200, "<p>no title here</p>"};
    client->pages[serp_url] = {200, serp};
    client->failures_left["https://site1.example/p"] = 1;  // recovers on retry

    const std::string yt_url = "https://www.youtube.com/results?search_query=" + url_encode(q.text);
    client->pages[yt_url] = {200, "<a id=\"video-title\" href=\"/watch?v=a\" title=\"Garlic Myth!\"></a>"};

    auto store = std::make_shared<FixtureStore>(testing::scratch_dir("record"));
    EvidenceCollector c(store, fixed_time);
    c.register_provider(std::make_unique<GoogleProvider>(client, quick_options()));
    c.register_provider(std::make_unique<YouTubeProvider>(client, quick_options()));

    const auto recorded = c.collect(q, Platform::Google, EvidenceMode::Record);
    // Ten result links, one without a title.
    REQUIRE(recorded.titles.size() == 9);
    CHECK(recorded.titles[0].title == "garlic result 1");
    CHECK(recorded.titles[2].title == "garlic result 4");
    for (std::size_t i = 0; i < recorded.titles.size(); ++i) CHECK(recorded.titles[i].rank == static_cast<int>(i) + 1);
    const auto replayed = c.collect(q, Platform::Google, EvidenceMode::Replay);
    CHECK(replayed.titles == recorded.titles);

    const auto yt = c.collect(q, Platform::YouTube, EvidenceMode::Record);
    REQUIRE(yt.titles.size() == 1);
    CHECK(yt.titles[0].title == "garlic myth");
    CHECK(c.collect(q, Platform::YouTube, EvidenceMode::Replay).titles == yt.titles);
}

TEST_CASE("provider failures surface after the retries") {
    auto client = std::make_shared<ScriptedClient>();
    EvidenceCollector c(nullptr, fixed_time);
    c.register_provider(std::make_unique<YouTubeProvider>(client, quick_options()));
    try {
        c.collect(query("x"), Platform::YouTube, EvidenceMode::Live);
        FAIL("expected ProviderUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProviderUnavailable);
    }
    CHECK(client->calls == 3);
    CHECK_THROWS_AS(c.collect(query("x"), Platform::Google, EvidenceMode::Live), Error);
    CHECK_THROWS_AS(c.collect(query("x"), Platform::YouTube, EvidenceMode::Replay), Error);
}

TEST_CASE("get_with_retry returns client errors without retrying") {
    ScriptedClient client;
    client.pages["https://x.example/"] = {404, "missing"};
    CHECK(get_with_retry(client, "https://x.example/", quick_options()).status == 404);
    CHECK(client.calls == 1);
    client.pages["https://y.example/"] = {503, "busy"};
    CHECK_THROWS_AS(get_with_retry(client, "https://y.example/", quick_options()), Error);
    CHECK(client.calls == 4);
}

TEST_CASE("merge_bundles concatenates in query order and caps at ten") {
    std::vector<EvidenceBundle> bundles{{query("a"), Platform::Google, titles(Platform::Google, 6)},
                                        {query("b"), Platform::Google, titles(Platform::Google, 7)}};
    const auto m = merge_bundles(bundles);
    REQUIRE(m.titles.size() == 10);
    CHECK(m.titles[5].query_index == 0);
    CHECK(m.titles[6].query_index == 1);
    CHECK(m.titles[6].title.title == "title number 1");
    for (std::size_t i = 0; i < m.titles.size(); ++i) CHECK(m.titles[i].title.rank == static_cast<int>(i) + 1);
    CHECK(merge_bundles({}).titles.empty());
}

TEST_CASE("network client against a loopback server") {
    httplib::Server server;
    server.Get("/page", [](const httplib::Request& req, httplib::Response& res) {
        res.set_content("<title>Agent " + req.get_header_value("User-Agent") + "</title>", "text/html");
    });
    server.Get("/moved", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/page"); });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    auto opts = quick_options();
    opts.user_agent = "unit-test";
    const auto client = make_network_client(opts);
    const std::string base = "http://127.0.0.1:" + std::to_string(port);
    const auto r = client->get(base + "/page");
    CHECK(r.status == 200);
    CHECK(parse_page_title(r.body) == "agent unit test");
    CHECK(client->get(base + "/moved").status == 200);
    CHECK(client->get(base + "/missing").status == 404);
    server.stop();
    t.join();
    CHECK_THROWS_AS(client->get(base + "/page"), Error);
    CHECK_THROWS_AS(client->get("not a url"), Error);
}
