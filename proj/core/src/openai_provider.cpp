#include "structmem/openai_provider.hpp"

#include "structmem/errors.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

namespace structmem {

namespace {

using nlohmann::json;

bool is_timeout(httplib::Error err) {
    return err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
           err == httplib::Error::Write;
}

double jitter_factor() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    return 1.0 + 0.25 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

OpenAiProvider::OpenAiProvider(Clock& clock, ProviderConfig config)
    : Provider(clock), config_(std::move(config)) {
    const auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("provider endpoint must include a scheme: " + config_.endpoint);
    }
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        host_ = config_.endpoint;
        base_path_.clear();
    } else {
        host_ = config_.endpoint.substr(0, path_start);
        base_path_ = config_.endpoint.substr(path_start);
        while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
    }
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
        api_key_ = key;
    }
}

std::string OpenAiProvider::post_json(const std::string& path, const std::string& body) {
    const int max_attempts = std::max(1, config_.max_attempts);
    std::exception_ptr last_error;

    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        if (attempt > 1) {
            const double delay = config_.backoff_base_secs *
                                 std::pow(2.0, attempt - 2) * jitter_factor();
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        try {
            httplib::Client client(host_);
            client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_secs));
            client.set_read_timeout(std::chrono::duration<double>(config_.timeout_secs));
            httplib::Headers headers;
            if (!api_key_.empty()) {
                headers.emplace("Authorization", "Bearer " + api_key_);
            }
            auto res = client.Post(base_path_ + path, headers, body, "application/json");
            if (!res) {
                if (is_timeout(res.error())) {
                    throw TimeoutError("request to " + host_ + path + " timed out");
                }
                throw ProviderError("transport failure for " + host_ + path + ": " +
                                    httplib::to_string(res.error()));
            }
            if (res->status == 429) {
                throw RateLimitedError("rate limited by " + host_);
            }
            if (res->status >= 500) {
                throw HttpError(res->status, res->body);
            }
            if (res->status != 200) {
                // Client errors are not retryable.
                throw HttpError(res->status, res->body);
            }
            return res->body;
        } catch (const RateLimitedError&) {
            last_error = std::current_exception();
        } catch (const TimeoutError&) {
            last_error = std::current_exception();
        } catch (const HttpError& e) {
            if (e.status() < 500) throw;
            last_error = std::current_exception();
        } catch (const ProviderError&) {
            last_error = std::current_exception();
        }
    }
    std::rethrow_exception(last_error);
}

ChatResult OpenAiProvider::do_complete(const ChatCall& call) {
    const json request{
        {"model", call.model_name.empty() ? config_.chat_model : call.model_name},
        {"temperature", call.temperature},
        {"messages",
         json::array({
             json{{"role", "system"}, {"content", call.system_prompt}},
             json{{"role", "user"}, {"content", call.user_prompt}},
         })},
    };
    const std::string body = post_json("/chat/completions", request.dump());

    json response;
    try {
        response = json::parse(body);
    } catch (const json::exception& ex) {
        throw MalformedResponseError(std::string("chat response is not JSON: ") + ex.what());
    }
    try {
        ChatResult result;
        result.text = response.at("choices").at(0).at("message").at("content")
                          .get<std::string>();
        if (response.contains("usage")) {
            result.input_tokens = response["usage"].value("prompt_tokens", 0);
            result.output_tokens = response["usage"].value("completion_tokens", 0);
        }
        return result;
    } catch (const json::exception& ex) {
        throw MalformedResponseError(std::string("unexpected chat response shape: ") +
                                     ex.what());
    }
}

Provider::EmbedBatch OpenAiProvider::do_embed(const std::vector<std::string>& texts) {
    json request{
        {"model", config_.embedding_model},
        {"input", texts},
    };
    if (config_.embedding_dimension > 0) {
        request["dimensions"] = config_.embedding_dimension;
    }
    const std::string body = post_json("/embeddings", request.dump());

    json response;
    try {
        response = json::parse(body);
    } catch (const json::exception& ex) {
        throw MalformedResponseError(std::string("embedding response is not JSON: ") +
                                     ex.what());
    }
    try {
        EmbedBatch batch;
        batch.vectors.resize(texts.size());
        for (const auto& item : response.at("data")) {
            const auto index = item.at("index").get<std::size_t>();
            if (index >= texts.size()) {
                throw MalformedResponseError("embedding index out of range");
            }
            auto vec = item.at("embedding").get<std::vector<float>>();
            double norm = 0.0;
            for (float v : vec) norm += static_cast<double>(v) * v;
            if (norm > 0.0) {
                const double inv = 1.0 / std::sqrt(norm);
                for (float& v : vec) v = static_cast<float>(v * inv);
            }
            batch.vectors[index] = std::move(vec);
        }
        for (const auto& v : batch.vectors) {
            if (v.empty()) throw MalformedResponseError("missing embedding in response");
        }
        if (response.contains("usage")) {
            batch.input_tokens = response["usage"].value("prompt_tokens", 0);
        }
        return batch;
    } catch (const json::exception& ex) {
        throw MalformedResponseError(std::string("unexpected embedding response shape: ") +
                                     ex.what());
    }
}

}  // namespace structmem
