#include "edgar/text_extract.hpp"

#include <spdlog/spdlog.h>

#include "edgar/error.hpp"
#include "edgar/metadata_store.hpp"
#include "edgar/object_store.hpp"
#include "edgar/text_codec.hpp"

namespace edgar {

std::string_view to_string(ExtractionStatus status) noexcept
{
    switch (status) {
    case ExtractionStatus::extracted: return "extracted";
    case ExtractionStatus::unextracted: return "unextracted";
    case ExtractionStatus::failed: return "failed";
    }
    return "unextracted";
}

std::string_view to_string(ExtractorKind kind) noexcept
{
    switch (kind) {
    case ExtractorKind::native_text: return "native_text";
    case ExtractorKind::native_html: return "native_html";
    case ExtractorKind::external_service: return "external_service";
    }
    return "native_text";
}

ExternalExtractor::ExternalExtractor(std::string url, std::shared_ptr<HttpTransport> transport)
    : url_(std::move(url)), transport_(std::move(transport))
{
    parse_url(url_);
    if (!transport_) {
        throw Error(ErrorCode::InvalidArgument, "extractor needs a transport");
    }
}

std::string ExternalExtractor::extract(std::string_view body, std::string_view content_type) const
{
    HttpRequest request;
    request.method = "PUT";
    request.url = url_;
    request.headers = {{"Content-Type", std::string(content_type)}, {"Accept", "text/plain"}};
    request.body = std::string(body);
    HttpResponse response;
    try {
        response = transport_->send(request);
    } catch (const Error& e) {
        throw Error(ErrorCode::ServiceUnavailable, std::string("extraction service: ") + e.what());
    }
    if (response.status < 200 || response.status >= 300) {
        throw Error(ErrorCode::ServiceUnavailable,
                    "extraction service answered HTTP " + std::to_string(response.status));
    }
    return std::move(response.body);
}

namespace {

std::string media_type(std::string_view content_type)
{
    const auto semi = content_type.find(';');
    return to_lower_ascii(trim(content_type.substr(0, semi)));
}

ExtractionResult extracted(std::string text, ExtractorKind kind)
{
    ExtractionResult result;
    result.status = ExtractionStatus::extracted;
    result.text = std::move(text);
    result.extractor = kind;
    return result;
}

} // namespace

ExtractionResult extract_text(std::string_view body, std::string_view content_type, const ExternalExtractor* service)
{
    const auto type = media_type(content_type);
    ExtractionResult result;
    if (type == "text/html" || type == "application/xhtml+xml") {
        std::vector<std::string> warnings;
        result = extracted(html_to_text(body, &warnings), ExtractorKind::native_html);
        if (!warnings.empty()) {
            result.detail = std::to_string(warnings.size()) + " warning(s), first: " + warnings.front();
        }
    } else if (type.starts_with("text/")) {
        result = extracted(normalize_plain_text(body), ExtractorKind::native_text);
    } else if (service) {
        try {
            result = extracted(normalize_plain_text(service->extract(body, type)), ExtractorKind::external_service);
        } catch (const Error& e) {
            result.status = ExtractionStatus::failed;
            result.detail = e.what();
        }
    } else {
        result.status = ExtractionStatus::unextracted;
        result.detail = "no extractor for " + type;
    }
    return result;
}

BodyExtraction extract_body(const std::string& sha1, const std::string& content_type, MetadataStore& metadata,
                            ObjectStore& objects, const ExternalExtractor* service, bool compress)
{
    BodyExtraction outcome;
    const auto text_key = key_for_text(sha1);
    if (objects.exists(text_key)) {
        outcome.status = ExtractionStatus::extracted;
        outcome.rows_marked = metadata.set_extract_state(sha1, ExtractState::extracted);
        return outcome;
    }

    std::string body;
    try {
        body = objects.get(key_for_document(sha1));
    } catch (const Error& e) {
        outcome.status = ExtractionStatus::failed;
        outcome.detail = e.what();
        outcome.rows_marked = metadata.set_extract_state(sha1, ExtractState::failed, outcome.detail);
        return outcome;
    }

    outcome.computed = true;
    auto result = extract_text(body, content_type, service);
    outcome.status = result.status;
    switch (result.status) {
    case ExtractionStatus::extracted:
        objects.put(text_key, *result.text, compress);
        outcome.rows_marked = metadata.set_extract_state(sha1, ExtractState::extracted);
        break;
    case ExtractionStatus::unextracted:
        outcome.detail = result.detail;
        outcome.rows_marked = metadata.set_extract_state(sha1, ExtractState::unextracted, result.detail);
        break;
    case ExtractionStatus::failed:
        outcome.detail = result.detail;
        outcome.rows_marked = metadata.set_extract_state(sha1, ExtractState::failed, result.detail);
        spdlog::warn("extraction of {} failed: {}", sha1, result.detail.value_or(""));
        break;
    }
    return outcome;
}

ExtractSummary extract_pending(MetadataStore& metadata, ObjectStore& objects, const ExternalExtractor* service,
                               const ExtractOptions& options)
{
    ExtractSummary summary;
    for (const auto& pending : metadata.pending_extractions(options.batch_limit, options.retry_unextracted)) {
        ++summary.bodies_considered;
        const auto outcome = extract_body(pending.sha1, pending.content_type, metadata, objects, service, options.compress);
        summary.computations += outcome.computed ? 1 : 0;
        summary.rows_marked += outcome.rows_marked;
        summary.unextracted += outcome.status == ExtractionStatus::unextracted ? 1 : 0;
        summary.failed += outcome.status == ExtractionStatus::failed ? 1 : 0;
    }
    return summary;
}

} // namespace edgar
