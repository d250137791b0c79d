#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "graphtune/errors.hpp"
#include "graphtune/gateway.hpp"
#include "graphtune/text.hpp"

using namespace graphtune;

namespace {
// Tests must behave identically under ctest (which sets the variables) and
// under direct invocation.
struct TestEnv {
    TestEnv() {
        ::setenv("GT_OFFLINE", "1", 1);
        ::setenv("GT_QUIET", "1", 1);
    }
} test_env_;
} // namespace
namespace fs = std::filesystem;

TEST_CASE("registry ships three qa and three graph templates plus defaults") {
    TemplateRegistry registry = TemplateRegistry::with_defaults();
    CHECK(registry.ids(TemplateRole::qa_system).size() == 3);
    CHECK(registry.ids(TemplateRole::graph_extraction).size() == 3);
    CHECK(registry.has(TemplateRole::grading, "default"));
    CHECK(registry.has(TemplateRole::summarization, "default"));
    CHECK_THROWS_AS(registry.get(TemplateRole::qa_system, "nope"), UnknownTemplateError);
}

TEST_CASE("render is pure textual substitution") {
    PromptTemplate tmpl{"t", TemplateRole::qa_system, "Answer: {q}"};
    CHECK(render(tmpl, {{"q", "x"}}) == "Answer: x");
    CHECK(render(tmpl, {{"q", "x"}}) == "Answer: x"); // pure
    CHECK_THROWS_AS(render(tmpl, {}), UnboundPlaceholderError);

    PromptTemplate braces{"t2", TemplateRole::qa_system, "json {{}} and {name} and {not closed"};
    CHECK(render(braces, {{"name", "v"}}) == "json {{}} and v and {not closed");

    PromptTemplate multi{"t3", TemplateRole::qa_system, "{a}{a}{b}"};
    CHECK(render(multi, {{"a", "1"}, {"b", "2"}}) == "112");
}

TEST_CASE("prompt directory overlay uses file stems as ids") {
    fs::path root = fs::temp_directory_path() / "gt_prompts_test";
    fs::create_directories(root / "qa");
    std::ofstream(root / "qa" / "extra.txt") << "Custom: {question} {context}\n";
    std::ofstream(root / "qa" / "default.txt") << "Overridden {question} {context}";

    TemplateRegistry registry = TemplateRegistry::with_defaults();
    registry.load_directory(root);
    CHECK(registry.has(TemplateRole::qa_system, "extra"));
    CHECK(registry.get(TemplateRole::qa_system, "default").body.rfind("Overridden", 0) == 0);
    // trailing newline stripped
    CHECK(registry.get(TemplateRole::qa_system, "extra").body.back() == '}');
    fs::remove_all(root);
}

TEST_CASE("repository prompt files align with the built-in registry") {
    TemplateRegistry builtin = TemplateRegistry::with_defaults();
    TemplateRegistry loaded = TemplateRegistry::with_defaults();
    loaded.load_directory(fs::path(GT_REPO_ROOT) / "prompts");
    for (auto role : {TemplateRole::qa_system, TemplateRole::graph_extraction,
                      TemplateRole::grading, TemplateRole::summarization}) {
        auto ids = builtin.ids(role);
        CHECK(loaded.ids(role) == ids);
        for (const auto& id : ids)
            CHECK(loaded.get(role, id).body == builtin.get(role, id).body);
    }
}

TEST_CASE("request digests are stable (golden values)") {
    struct Golden {
        const char* model;
        const char* rendered;
        double temperature;
        int max_tokens;
        const char* digest;
    };
    // pinned against an independent SHA-256 computation
    static const Golden goldens[] = {
        {"default-model", "Answer: x", 0.0, 1024,
         "e360f8b67225298b515554008d222d4b3a58959e2c863ee1388533fd437b0de7"},
        {"default-model", "Answer: x", 0.0, 512,
         "f4c6bd8cdc89495033dcf8157b2cdf157403a8d42a50422c19d9d472ecd66539"},
        {"gpt-test", "Answer: x", 0.0, 1024,
         "580c4d1738b2534727c05f4300999e5225bab3b70f6f3238a16ed9a1a1f7f67d"},
        {"default-model", "Answer: y", 0.0, 1024,
         "e19d6384bd2de77e1a25f3882d3f081cc1fbaba162856feee94127ae87df729c"},
        {"default-model", "embedding:red car", 0.0, 0,
         "8237003bd44724af08fd33c1dcc483a3bab843e1d977d7327fe7efc8a6cdcacc"},
    };
    for (const auto& g : goldens) {
        Decoding d{g.temperature, g.max_tokens};
        CHECK(request_digest(g.model, g.rendered, d) == g.digest);
    }
}

namespace {

CompletionRequest qa_request(const std::string& tmpl, const std::string& question,
                             const std::string& context) {
    CompletionRequest r;
    r.role = TemplateRole::qa_system;
    r.template_id = tmpl;
    r.variables = {{"question", question}, {"context", context}};
    return r;
}

} // namespace

TEST_CASE("mock qa rule: highest-overlap span, template-modulated format") {
    auto mock = make_mock_gateway(TemplateRegistry::with_defaults());
    const std::string context =
        "The harbor bells ring twice at dusk.\n---\nParis is the capital of France. "
        "It lies on the Seine.";
    const std::string question = "What is the capital of France?";

    // hand case 1: concise strips question tokens, keeps the informative span part
    CHECK(mock->complete(qa_request("concise", question, context)) == "Paris");
    // hand case 2: default returns the full best span
    CHECK(mock->complete(qa_request("default", question, context)) ==
          "Paris is the capital of France.");
    // hand case 3: justified appends the justification clause
    CHECK(mock->complete(qa_request("justified", question, context)) ==
          "Paris is the capital of France. This is supported by the retrieved context.");
    // hand case 4: empty context abstains with the fixed string
    CHECK(mock->complete(qa_request("concise", question, "")) == "unknown");
    // hand case 5: separator-only context is treated as empty
    CHECK(mock->complete(qa_request("default", question, "---\n---")) == "unknown");
    // determinism
    CHECK(mock->complete(qa_request("concise", question, context)) ==
          mock->complete(qa_request("concise", question, context)));
}

TEST_CASE("mock extraction produces the documented forced output") {
    auto mock = make_mock_gateway(TemplateRegistry::with_defaults());
    CompletionRequest r;
    r.role = TemplateRole::graph_extraction;
    r.template_id = "default";
    r.variables = {{"text", "Paris is the capital of France."}};
    std::string block = mock->complete(r);
    CHECK(block.find("ENTITY Paris |") != std::string::npos);
    CHECK(block.find("ENTITY France |") != std::string::npos);
    CHECK(block.find("REL Paris | capital_of | France") != std::string::npos);
    CHECK(block.rfind("```", 0) == 0); // fenced

    r.variables = {{"text", "\xe2\x80\xa6"}}; // just an ellipsis
    std::string empty_block = mock->complete(r);
    CHECK(empty_block.find("ENTITY") == std::string::npos);
    CHECK(empty_block.find("REL") == std::string::npos);
}

TEST_CASE("mock summarization returns the first sentence") {
    auto mock = make_mock_gateway(TemplateRegistry::with_defaults());
    CompletionRequest r;
    r.role = TemplateRole::summarization;
    r.template_id = "default";
    r.variables = {{"text", "First things first. Second sentence here."}};
    CHECK(mock->complete(r) == "First things first.");
    r.variables = {{"text", "Only one sentence."}};
    CHECK(mock->complete(r) == "Only one sentence.");
}

TEST_CASE("mock embeddings: determinism, self-similarity, topical signal") {
    auto mock = make_mock_gateway(TemplateRegistry::with_defaults());
    auto a = mock->embed_text("red car");
    auto b = mock->embed_text("red car");
    CHECK(a == b);
    CHECK(a.size() == 256);

    auto cosine = [](const std::vector<double>& x, const std::vector<double>& y) {
        double dot = 0;
        for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
        return dot;
    };
    CHECK(cosine(a, a) == doctest::Approx(1.0).epsilon(1e-9));

    // feature-hash oracle: "red car" shares 2 of 3 content tokens with
    // "red car driver" and none with "quantum physics"
    double related = cosine(a, mock->embed_text("red car driver"));
    double unrelated = cosine(a, mock->embed_text("quantum physics"));
    CHECK(related > unrelated);
    CHECK(related == doctest::Approx(2.0 / std::sqrt(2.0 * 3.0)));

    // dimension constant across calls
    CHECK(mock->embed_text("anything else").size() == 256);
}

TEST_CASE("call counters track roles and embeddings") {
    auto mock = make_mock_gateway(TemplateRegistry::with_defaults());
    mock->complete(qa_request("default", "q", "ctx sentence."));
    mock->embed_text("x");
    mock->embed_text("y");
    CHECK(mock->call_counts().qa_system == 1);
    CHECK(mock->call_counts().embeddings == 2);
    CHECK(mock->call_counts().summarization == 0);
    CHECK(mock->request_clock() == 3);
    mock->reset_call_counts();
    CHECK(mock->request_clock() == 0);
}

TEST_CASE("replay gateway: cache round-trip, strict misses, atomic files") {
    fs::path cache = fs::temp_directory_path() / "gt_replay_test";
    fs::remove_all(cache);

    // record pass: mock upstream, non-strict
    {
        auto replay = make_replay_gateway(TemplateRegistry::with_defaults(), cache,
                                          make_mock_gateway(TemplateRegistry::with_defaults()),
                                          /*strict=*/false);
        // under GT_OFFLINE=1 the replay forces strict regardless, so this
        // test exercises the strict path first
        CHECK_THROWS_AS(replay->complete(qa_request("default", "q", "Paris is nice.")),
                        CacheMissError);
    }

    // seed the cache by writing through a non-offline-style recording pass:
    // simulate by calling the mock directly and planting the envelope
    {
        auto mock = make_mock_gateway(TemplateRegistry::with_defaults());
        CompletionRequest request = qa_request("default", "q", "Paris is nice.");
        const PromptTemplate& tmpl =
            mock->registry().get(TemplateRole::qa_system, request.template_id);
        std::string rendered = render(tmpl, request.variables);
        std::string digest = request_digest("default-model", rendered, request.decoding);
        std::string response = mock->complete(request);
        fs::create_directories(cache);
        std::ofstream out(cache / digest, std::ios::binary);
        out << "GRAPHTUNE-CACHE v1\nkind: completion\nmodel: default-model\n"
            << "request_bytes: " << rendered.size() << "\nresponse_bytes: " << response.size()
            << "\n--- request\n"
            << rendered << "\n--- response\n"
            << response << "\n";
    }

    // strict replay now serves the cached completion with zero upstream calls
    {
        auto replay = make_replay_gateway(TemplateRegistry::with_defaults(), cache, nullptr,
                                          /*strict=*/true);
        std::string text = replay->complete(qa_request("default", "q", "Paris is nice."));
        CHECK(text == "Paris is nice.");
        std::string again = replay->complete(qa_request("default", "q", "Paris is nice."));
        CHECK(again == text);
        // unseen request still misses
        CHECK_THROWS_AS(replay->complete(qa_request("default", "q2", "Other context.")),
                        CacheMissError);
        // no stray temp files
        for (const auto& entry : fs::directory_iterator(cache))
            CHECK(entry.path().extension() != ".tmp");
    }
    fs::remove_all(cache);
}

TEST_CASE("replay records through an in-process upstream: one call, then cache") {
    // recording mode requires offline to be lifted; the upstream here is the
    // in-process mock, so no network is involved either way
    ::unsetenv("GT_OFFLINE");
    fs::path cache = fs::temp_directory_path() / "gt_replay_record_test";
    fs::remove_all(cache);
    {
        auto upstream = make_mock_gateway(TemplateRegistry::with_defaults());
        Gateway* upstream_probe = upstream.get();
        auto replay = make_replay_gateway(TemplateRegistry::with_defaults(), cache,
                                          std::move(upstream), /*strict=*/false);
        CHECK(replay->backend_name() == "replay");

        std::string first = replay->complete(qa_request("default", "q", "Paris is nice."));
        std::string second = replay->complete(qa_request("default", "q", "Paris is nice."));
        CHECK(first == second);
        CHECK(upstream_probe->call_counts().qa_system == 1); // second came from cache

        auto v1 = replay->embed_text("red car");
        auto v2 = replay->embed_text("red car");
        CHECK(v1 == v2);
        CHECK(upstream_probe->call_counts().embeddings == 1);

        // one file per request, named by its hex digest
        std::size_t files = 0;
        for (const auto& entry : fs::directory_iterator(cache)) {
            CHECK(entry.path().filename().string().size() == 64);
            ++files;
        }
        CHECK(files == 2);
    }
    // a fresh strict replayer over the same cache serves both requests
    {
        ::setenv("GT_OFFLINE", "1", 1);
        auto strict = make_replay_gateway(TemplateRegistry::with_defaults(), cache, nullptr, true);
        CHECK(strict->complete(qa_request("default", "q", "Paris is nice.")) == "Paris is nice.");
        CHECK(strict->embed_text("red car") == hashed_unigram_embedding("red car", 256));
    }
    fs::remove_all(cache);
}

TEST_CASE("live gateway refuses to start under GT_OFFLINE=1") {
    LiveConfig config;
    config.base_url = "http://localhost:1";
    CHECK_THROWS_AS(make_live_gateway(TemplateRegistry::with_defaults(), config),
                    OfflineViolationError);
}

TEST_CASE("unknown template and unbound placeholder surface through complete") {
    auto mock = make_mock_gateway(TemplateRegistry::with_defaults());
    CompletionRequest r;
    r.role = TemplateRole::qa_system;
    r.template_id = "missing";
    CHECK_THROWS_AS(mock->complete(r), UnknownTemplateError);
    r.template_id = "default";
    r.variables = {{"question", "q"}}; // context unbound
    CHECK_THROWS_AS(mock->complete(r), UnboundPlaceholderError);
}
