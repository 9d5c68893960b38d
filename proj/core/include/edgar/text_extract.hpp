#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgar/http_transport.hpp"

namespace edgar {

class MetadataStore;
class ObjectStore;

enum class ExtractionStatus { extracted, unextracted, failed };
enum class ExtractorKind { native_text, native_html, external_service };

std::string_view to_string(ExtractionStatus status) noexcept;
std::string_view to_string(ExtractorKind kind) noexcept;

struct ExtractionResult {
    std::string sha1;
    ExtractionStatus status = ExtractionStatus::unextracted;
    std::optional<std::string> text;
    std::optional<ExtractorKind> extractor;
    std::optional<std::string> detail;
};

/// Client for a REST extraction server: PUT the raw bytes with their
/// Content-Type, read back text/plain.
class ExternalExtractor {
public:
    ExternalExtractor(std::string url, std::shared_ptr<HttpTransport> transport);

    /// Throws ServiceUnavailable when the service cannot be reached or
    /// answers with a non-2xx status.
    std::string extract(std::string_view body, std::string_view content_type) const;

    const std::string& url() const noexcept { return url_; }

private:
    std::string url_;
    std::shared_ptr<HttpTransport> transport_;
};

/// Charset: declared <meta> charset, else UTF-8 if valid, else Latin-1.
std::string decode_html_bytes(std::string_view html);

/// Strips tags, drops script/style/comments, decodes entities, turns
/// block-level tags into line breaks and collapses whitespace. Unknown
/// entities are kept verbatim and reported in `warnings`.
std::string html_to_text(std::string_view html, std::vector<std::string>* warnings = nullptr);

/// UTF-8 normalisation and LF line endings; content otherwise untouched.
std::string normalize_plain_text(std::string_view body);

/// Named HTML 4 entity lookup (plus &apos;).
std::optional<char32_t> lookup_html_entity(std::string_view name) noexcept;

ExtractionResult extract_text(std::string_view body, std::string_view content_type,
                              const ExternalExtractor* service = nullptr);

struct ExtractSummary {
    std::size_t bodies_considered = 0;
    std::size_t computations = 0;
    std::size_t rows_marked = 0;
    std::size_t unextracted = 0;
    std::size_t failed = 0;
};

struct ExtractOptions {
    std::optional<std::size_t> batch_limit;
    bool retry_unextracted = false;
    bool compress = true;
};

/// Outcome of extracting one distinct body.
struct BodyExtraction {
    ExtractionStatus status = ExtractionStatus::unextracted;
    bool computed = false;   // false when the text object already existed
    std::size_t rows_marked = 0;
    std::optional<std::string> detail;
};

/// Loads documents/raw/<sha1>, extracts, writes documents/text/<sha1> and
/// updates every row carrying that digest.
BodyExtraction extract_body(const std::string& sha1, const std::string& content_type, MetadataStore& metadata,
                            ObjectStore& objects, const ExternalExtractor* service, bool compress = true);

/// Processes every distinct pending body once. Per-body failures are
/// recorded on the rows and counted; the batch carries on.
ExtractSummary extract_pending(MetadataStore& metadata, ObjectStore& objects, const ExternalExtractor* service,
                               const ExtractOptions& options = {});

} // namespace edgar
