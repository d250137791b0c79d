#include <cstdlib>
#include <fstream>
#include <sstream>

#include "graphtune/errors.hpp"
#include "graphtune/gateway.hpp"

namespace graphtune {

namespace {

// One file per request, filename = hex digest. The envelope is a structured
// text format with byte-counted sections so arbitrary request/response bodies
// round-trip exactly while staying diff-able.
//
//   GRAPHTUNE-CACHE v1
//   kind: completion
//   model: gpt-x
//   request_bytes: 120
//   response_bytes: 17
//   --- request
//   <request bytes>
//   --- response
//   <response bytes>

std::string envelope(const std::string& kind, const std::string& model,
                     const std::string& request, const std::string& response) {
    std::ostringstream out;
    out << "GRAPHTUNE-CACHE v1\n";
    out << "kind: " << kind << "\n";
    out << "model: " << model << "\n";
    out << "request_bytes: " << request.size() << "\n";
    out << "response_bytes: " << response.size() << "\n";
    out << "--- request\n" << request << "\n";
    out << "--- response\n" << response << "\n";
    return out.str();
}

std::string read_response(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read cache file: " + file.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    auto header_value = [&](const std::string& key) -> std::string {
        std::size_t pos = content.find("\n" + key + ": ");
        if (pos == std::string::npos) throw ParseError(file.string(), "missing header " + key);
        std::size_t start = pos + key.size() + 3;
        std::size_t end = content.find('\n', start);
        return content.substr(start, end - start);
    };

    std::size_t request_bytes = 0;
    std::size_t response_bytes = 0;
    try {
        request_bytes = std::stoull(header_value("request_bytes"));
        response_bytes = std::stoull(header_value("response_bytes"));
    } catch (const std::logic_error&) {
        throw ParseError(file.string(), "corrupt byte-count header");
    }

    const std::string req_marker = "--- request\n";
    std::size_t req_pos = content.find(req_marker);
    if (req_pos == std::string::npos) throw ParseError(file.string(), "missing request section");
    std::size_t resp_marker_pos = req_pos + req_marker.size() + request_bytes + 1;
    const std::string resp_marker = "--- response\n";
    if (content.compare(resp_marker_pos, resp_marker.size(), resp_marker) != 0)
        throw ParseError(file.string(), "corrupt response section");
    return content.substr(resp_marker_pos + resp_marker.size(), response_bytes);
}

void write_atomic(const std::filesystem::path& file, const std::string& content) {
    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write cache file: " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, file);
}

std::string serialize_embedding(const std::vector<double>& v) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ' ';
        out << v[i];
    }
    return out.str();
}

std::vector<double> parse_embedding(const std::string& text) {
    std::vector<double> v;
    std::istringstream in(text);
    double x;
    while (in >> x) v.push_back(x);
    return v;
}

class ReplayGateway final : public Gateway {
public:
    ReplayGateway(TemplateRegistry registry, std::filesystem::path cache_dir,
                  std::unique_ptr<Gateway> upstream, bool strict)
        : Gateway(std::move(registry)),
          cache_dir_(std::move(cache_dir)),
          upstream_(std::move(upstream)),
          strict_(strict || offline_mode()) {
        std::filesystem::create_directories(cache_dir_);
        const char* model = std::getenv("GT_LLM_MODEL");
        model_ = model ? model : "default-model";
        const char* embed_model = std::getenv("GT_EMBED_MODEL");
        embed_model_ = embed_model ? embed_model : "default-embedding";
    }

    std::string backend_name() const override { return strict_ ? "replay-strict" : "replay"; }

protected:
    std::string do_complete(const PromptTemplate& /*tmpl*/, const CompletionRequest& request,
                            const std::string& rendered) override {
        std::string digest = request_digest(model_, rendered, request.decoding);
        std::filesystem::path file = cache_dir_ / digest;
        if (std::filesystem::exists(file)) return read_response(file);
        if (strict_ || !upstream_) throw CacheMissError(digest);
        std::string response = upstream_->complete(request);
        write_atomic(file, envelope("completion", model_, rendered, response));
        return response;
    }

    std::vector<double> do_embed(const std::string& text) override {
        // Embedding requests key through the same digest function with a kind
        // prefix so they can never collide with completions.
        std::string digest = request_digest(embed_model_, "embedding:" + text, Decoding{0.0, 0});
        std::filesystem::path file = cache_dir_ / digest;
        if (std::filesystem::exists(file)) return parse_embedding(read_response(file));
        if (strict_ || !upstream_) throw CacheMissError(digest);
        std::vector<double> v = upstream_->embed_text(text);
        write_atomic(file, envelope("embedding", embed_model_, text, serialize_embedding(v)));
        return v;
    }

private:
    std::filesystem::path cache_dir_;
    std::unique_ptr<Gateway> upstream_;
    bool strict_;
    std::string model_;
    std::string embed_model_;
};

} // namespace

std::unique_ptr<Gateway> make_replay_gateway(TemplateRegistry registry,
                                             std::filesystem::path cache_dir,
                                             std::unique_ptr<Gateway> upstream, bool strict) {
    return std::make_unique<ReplayGateway>(std::move(registry), std::move(cache_dir),
                                           std::move(upstream), strict);
}

} // namespace graphtune
