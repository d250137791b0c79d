#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace graphtune {

enum class TemplateRole { graph_extraction, qa_system, grading, summarization };

std::string role_name(TemplateRole role);
TemplateRole role_from_name(const std::string& name);

struct PromptTemplate {
    std::string id;
    TemplateRole role = TemplateRole::qa_system;
    std::string body; // text with {named} placeholders
};

/// Holds the prompt templates by (role, id). Ships with the three qa_system and
/// three graph_extraction variants plus grading and summarization defaults;
/// load_directory() overlays templates from prompt files (ids are file stems).
class TemplateRegistry {
public:
    static TemplateRegistry with_defaults();

    void add(PromptTemplate tmpl);
    const PromptTemplate& get(TemplateRole role, const std::string& id) const;
    bool has(TemplateRole role, const std::string& id) const;
    std::vector<std::string> ids(TemplateRole role) const;

    /// Loads *.txt files from <root>/qa, <root>/graph, <root>/grading and
    /// <root>/summary; missing subdirectories are skipped.
    void load_directory(const std::filesystem::path& root);

private:
    std::map<std::pair<int, std::string>, PromptTemplate> templates_;
};

/// Pure textual substitution of {placeholder} occurrences; throws
/// UnboundPlaceholderError if the body references an unbound name. Literal
/// braces that do not form a known placeholder pattern pass through.
std::string render(const PromptTemplate& tmpl, const std::map<std::string, std::string>& variables);

struct Decoding {
    double temperature = 0.0; // study calls pin temperature to 0
    int max_output_tokens = 1024;
};

struct CompletionRequest {
    TemplateRole role = TemplateRole::qa_system; // template ids are scoped per role
    std::string template_id;
    std::map<std::string, std::string> variables;
    Decoding decoding;
};

/// Stable cache key: pure function of (model id, rendered request text,
/// decoding parameters). Hex-encoded SHA-256.
std::string request_digest(const std::string& model, const std::string& rendered,
                           const Decoding& decoding);

/// Returns true when GT_OFFLINE=1 forbids all network activity.
bool offline_mode();

/// Single boundary for all model calls. Subclasses provide the transport; the
/// base validates templates, renders, and keeps per-role call counters used by
/// protocol-fidelity probes.
class Gateway {
public:
    explicit Gateway(TemplateRegistry registry) : registry_(std::move(registry)) {}
    virtual ~Gateway() = default;

    /// Renders the request's template and produces a completion.
    std::string complete(const CompletionRequest& request);

    /// Embeds text into the study's fixed-dimension vector space.
    std::vector<double> embed_text(const std::string& text);

    const TemplateRegistry& registry() const { return registry_; }
    TemplateRegistry& registry() { return registry_; }

    struct CallCounts {
        std::uint64_t graph_extraction = 0;
        std::uint64_t qa_system = 0;
        std::uint64_t grading = 0;
        std::uint64_t summarization = 0;
        std::uint64_t embeddings = 0;
        std::uint64_t total() const {
            return graph_extraction + qa_system + grading + summarization + embeddings;
        }
    };
    const CallCounts& call_counts() const { return counts_; }
    void reset_call_counts() { counts_ = {}; }

    /// Monotone logical clock: total requests issued so far. Deterministic
    /// backends use it as trial timing so study logs are bit-stable.
    std::uint64_t request_clock() const { return counts_.total(); }

    virtual std::string backend_name() const = 0;

protected:
    virtual std::string do_complete(const PromptTemplate& tmpl, const CompletionRequest& request,
                                    const std::string& rendered) = 0;
    virtual std::vector<double> do_embed(const std::string& text) = 0;

private:
    TemplateRegistry registry_;
    CallCounts counts_;
};

/// Deterministic rule-engine backend; see mock_gateway.cpp for the rules.
std::unique_ptr<Gateway> make_mock_gateway(TemplateRegistry registry, std::size_t embed_dim = 256);

/// Record/replay backend over `cache_dir`. In strict mode (or when
/// GT_OFFLINE=1) a miss raises CacheMissError; otherwise it falls through to
/// `upstream` and persists the response (write-temp-then-rename).
std::unique_ptr<Gateway> make_replay_gateway(TemplateRegistry registry,
                                             std::filesystem::path cache_dir,
                                             std::unique_ptr<Gateway> upstream, bool strict);

struct LiveConfig {
    std::string base_url;    // GT_LLM_BASE_URL
    std::string model;       // GT_LLM_MODEL
    std::string api_key;     // GT_LLM_API_KEY
    std::string embed_model; // GT_EMBED_MODEL
    int max_retries = 3;     // bounded retries on transient failures
    static LiveConfig from_env();
};

/// OpenAI-compatible chat-completions/embeddings backend. Construction fails
/// under GT_OFFLINE=1.
std::unique_ptr<Gateway> make_live_gateway(TemplateRegistry registry, LiveConfig config);

/// Deterministic feature-hash embedding shared by the mock backend and the
/// stores module: lowercased word unigrams hashed into `dim` buckets,
/// L2-normalized. Empty text yields the zero vector.
std::vector<double> hashed_unigram_embedding(const std::string& text, std::size_t dim);

} // namespace graphtune
