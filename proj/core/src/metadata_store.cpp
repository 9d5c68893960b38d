#include "edgar/metadata_store.hpp"

#include <sqlite3.h>

#include <variant>

#include "edgar/error.hpp"
#include "edgar/text_codec.hpp"

namespace edgar {

std::string_view to_string(ExtractState state) noexcept
{
    switch (state) {
    case ExtractState::pending: return "pending";
    case ExtractState::extracted: return "extracted";
    case ExtractState::unextracted: return "unextracted";
    case ExtractState::failed: return "failed";
    }
    return "pending";
}

namespace {

ExtractState parse_extract_state(std::string_view text)
{
    for (auto s : {ExtractState::pending, ExtractState::extracted, ExtractState::unextracted, ExtractState::failed}) {
        if (to_string(s) == text) {
            return s;
        }
    }
    return ExtractState::pending;
}

using Value = std::variant<std::monostate, std::int64_t, std::string>;

Value opt(const std::optional<std::string>& text)
{
    return text ? Value(*text) : Value();
}

Value opt(const std::optional<Date>& date)
{
    return date ? Value(to_iso(*date)) : Value();
}

Date required_date(const std::optional<std::string>& text, std::string_view column)
{
    auto date = text ? parse_iso_date(*text) : std::nullopt;
    if (!date) {
        throw Error(ErrorCode::StorageFailure, "column " + std::string(column) + " holds no valid date");
    }
    return *date;
}

std::optional<Date> optional_date(const std::optional<std::string>& text)
{
    return text ? parse_iso_date(*text) : std::nullopt;
}

} // namespace

class MetadataStore::Statement {
public:
    Statement(sqlite3* db, std::string_view sql) : db_(db)
    {
        if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK) {
            throw Error(ErrorCode::StorageFailure, std::string("prepare failed: ") + sqlite3_errmsg(db));
        }
    }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;
    ~Statement() { sqlite3_finalize(stmt_); }

    Statement& bind(std::initializer_list<Value> values)
    {
        int index = 1;
        for (const auto& value : values) {
            bind_one(index++, value);
        }
        return *this;
    }

    Statement& bind_all(const std::vector<std::string>& values)
    {
        int index = 1;
        for (const auto& value : values) {
            bind_one(index++, value);
        }
        return *this;
    }

    /// True while a row is available.
    bool step()
    {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) {
            return true;
        }
        if (rc == SQLITE_DONE) {
            return false;
        }
        const int primary = rc & 0xFF;
        const auto code = primary == SQLITE_CONSTRAINT ? ErrorCode::ConstraintViolation : ErrorCode::StorageFailure;
        throw Error(code, sqlite3_errmsg(db_));
    }

    void run()
    {
        while (step()) {
        }
    }

    int columns() const { return sqlite3_column_count(stmt_); }
    std::string column_name(int i) const { return sqlite3_column_name(stmt_, i); }
    bool is_null(int i) const { return sqlite3_column_type(stmt_, i) == SQLITE_NULL; }
    std::int64_t integer(int i) const { return sqlite3_column_int64(stmt_, i); }

    std::string text(int i) const
    {
        const auto* data = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, i));
        return data ? std::string(data, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, i))) : std::string();
    }

    std::optional<std::string> optional_text(int i) const
    {
        return is_null(i) ? std::nullopt : std::optional<std::string>(text(i));
    }

    std::optional<std::int64_t> optional_integer(int i) const
    {
        return is_null(i) ? std::nullopt : std::optional<std::int64_t>(integer(i));
    }

private:
    void bind_one(int index, const Value& value)
    {
        int rc = SQLITE_OK;
        if (std::holds_alternative<std::monostate>(value)) {
            rc = sqlite3_bind_null(stmt_, index);
        } else if (const auto* i = std::get_if<std::int64_t>(&value)) {
            rc = sqlite3_bind_int64(stmt_, index, *i);
        } else {
            const auto& s = std::get<std::string>(value);
            rc = sqlite3_bind_text(stmt_, index, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
        }
        if (rc != SQLITE_OK) {
            throw Error(ErrorCode::StorageFailure, std::string("bind failed: ") + sqlite3_errmsg(db_));
        }
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

namespace {

class Transaction {
public:
    explicit Transaction(sqlite3* db) : db_(db) { exec("BEGIN IMMEDIATE"); }
    Transaction(const Transaction&) = delete;
    Transaction& operator=(const Transaction&) = delete;
    ~Transaction()
    {
        if (!done_) {
            sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
        }
    }
    void commit()
    {
        exec("COMMIT");
        done_ = true;
    }

private:
    void exec(const char* sql)
    {
        char* message = nullptr;
        if (sqlite3_exec(db_, sql, nullptr, nullptr, &message) != SQLITE_OK) {
            std::string text = message ? message : "unknown";
            sqlite3_free(message);
            throw Error(ErrorCode::StorageFailure, std::string(sql) + ": " + text);
        }
    }

    sqlite3* db_;
    bool done_ = false;
};

constexpr std::string_view kFilingColumns =
    "accession_number, cik, form_type, date_filed, edgar_path, raw_object_key, is_processed, is_error, "
    "document_count, error_detail";

constexpr std::string_view kIndexColumns =
    "edgar_path, year, quarter, index_type, date_downloaded, is_processed, is_error, row_count, error_detail";

constexpr std::string_view kDocumentColumns =
    "d.accession_number, d.sequence, d.doc_type, d.description, d.filename, d.sha1, d.content_type, "
    "d.is_extracted, d.extract_state, d.extract_detail";

template <typename S>
Filing read_filing(const S& s)
{
    Filing f;
    f.accession_number = s.text(0);
    f.cik = static_cast<std::uint64_t>(s.integer(1));
    f.form_type = s.text(2);
    f.date_filed = optional_date(s.optional_text(3));
    f.edgar_path = s.text(4);
    f.raw_object_key = s.optional_text(5);
    f.is_processed = s.integer(6) != 0;
    f.is_error = s.integer(7) != 0;
    f.document_count = s.optional_integer(8);
    f.error_detail = s.optional_text(9);
    return f;
}

template <typename S>
FilingIndex read_index(const S& s)
{
    FilingIndex fi;
    fi.edgar_path = s.text(0);
    fi.year = static_cast<int>(s.integer(1));
    fi.quarter = static_cast<int>(s.integer(2));
    fi.index_type = parse_index_type(s.text(3)).value_or(IndexType::master);
    fi.date_downloaded = optional_date(s.optional_text(4));
    fi.is_processed = s.integer(5) != 0;
    fi.is_error = s.integer(6) != 0;
    fi.row_count = s.optional_integer(7);
    fi.error_detail = s.optional_text(8);
    return fi;
}

template <typename S>
FilingDocument read_document(const S& s)
{
    FilingDocument d;
    d.accession_number = s.text(0);
    d.sequence = static_cast<std::uint32_t>(s.integer(1));
    d.doc_type = s.optional_text(2);
    d.description = s.optional_text(3);
    d.filename = s.optional_text(4);
    d.sha1 = s.text(5);
    d.content_type = s.text(6);
    d.is_extracted = s.integer(7) != 0;
    d.extract_state = parse_extract_state(s.text(8));
    d.extract_detail = s.optional_text(9);
    return d;
}

template <typename S>
CompanyInfo read_info(const S& s)
{
    CompanyInfo info;
    info.cik = static_cast<std::uint64_t>(s.integer(0));
    info.as_of = required_date(s.optional_text(1), "company_info.as_of");
    info.name = s.text(2);
    info.state_of_incorporation = s.optional_text(3);
    info.sic = s.optional_text(4);
    return info;
}

std::int64_t to_i64(std::uint64_t value)
{
    if (value > static_cast<std::uint64_t>(INT64_MAX)) {
        throw Error(ErrorCode::InvalidArgument, "value out of range: " + std::to_string(value));
    }
    return static_cast<std::int64_t>(value);
}

// Table name and the ORDER BY that makes its dump deterministic.
constexpr std::pair<std::string_view, std::string_view> kTables[] = {
    {"company", "cik"},
    {"company_info", "cik, as_of"},
    {"filing_index", "edgar_path"},
    {"filing", "accession_number"},
    {"filing_document", "accession_number, sequence"},
    {"search_query", "label"},
    {"search_query_term", "query_id, term"},
    {"search_query_result", "query_id, term, accession_number, sequence"},
};

} // namespace

MetadataStore::MetadataStore(const std::filesystem::path& path)
{
    if (path != ":memory:" && path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                        nullptr) != SQLITE_OK) {
        std::string message = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(ErrorCode::StorageFailure, "cannot open database " + path.string() + ": " + message);
    }
    sqlite3_busy_timeout(db_, 30000);
    exec("PRAGMA foreign_keys = ON");
    if (path != ":memory:") {
        exec("PRAGMA journal_mode = WAL");
        exec("PRAGMA synchronous = NORMAL");
    }
    exec(schema_sql());
}

MetadataStore::~MetadataStore() { sqlite3_close(db_); }

void MetadataStore::exec(std::string_view sql)
{
    char* message = nullptr;
    const std::string text(sql);
    if (sqlite3_exec(db_, text.c_str(), nullptr, nullptr, &message) != SQLITE_OK) {
        std::string detail = message ? message : "unknown";
        sqlite3_free(message);
        throw Error(ErrorCode::StorageFailure, detail);
    }
}

// ---- companies ------------------------------------------------------------

Company MetadataStore::upsert_company(std::uint64_t cik, Date seen_on)
{
    if (cik == 0) {
        throw Error(ErrorCode::InvalidArgument, "cik must be positive");
    }
    std::lock_guard lock(mutex_);
    Statement(db_,
              "INSERT INTO company (cik, date_first_seen) VALUES (?, ?) "
              "ON CONFLICT (cik) DO UPDATE SET date_first_seen = min(date_first_seen, excluded.date_first_seen)")
        .bind({to_i64(cik), to_iso(seen_on)})
        .run();
    return *company(cik);
}

std::optional<Company> MetadataStore::company(std::uint64_t cik)
{
    std::lock_guard lock(mutex_);
    Statement s(db_, "SELECT cik, date_first_seen FROM company WHERE cik = ?");
    s.bind({to_i64(cik)});
    if (!s.step()) {
        return std::nullopt;
    }
    return Company{static_cast<std::uint64_t>(s.integer(0)), required_date(s.optional_text(1), "date_first_seen")};
}

std::vector<Company> MetadataStore::companies()
{
    std::lock_guard lock(mutex_);
    Statement s(db_, "SELECT cik, date_first_seen FROM company ORDER BY cik");
    std::vector<Company> out;
    while (s.step()) {
        out.push_back({static_cast<std::uint64_t>(s.integer(0)), required_date(s.optional_text(1), "date_first_seen")});
    }
    return out;
}

AppendResult MetadataStore::append_company_info(std::uint64_t cik, std::string name, std::optional<std::string> state,
                                                std::optional<std::string> sic, Date as_of)
{
    std::lock_guard lock(mutex_);
    if (!company(cik)) {
        throw Error(ErrorCode::ConstraintViolation, "company " + std::to_string(cik) + " is not registered");
    }
    CompanyInfo info{cik, std::move(name), std::move(state), std::move(sic), as_of};
    // Latest row at or before as_of decides whether anything changed.
    Statement latest(db_,
                     "SELECT cik, as_of, name, state_of_incorporation, sic FROM company_info "
                     "WHERE cik = ? AND as_of <= ? ORDER BY as_of DESC LIMIT 1");
    latest.bind({to_i64(cik), to_iso(as_of)});
    if (latest.step()) {
        auto previous = read_info(latest);
        if (previous.name == info.name && previous.state_of_incorporation == info.state_of_incorporation &&
            previous.sic == info.sic) {
            return {previous, false};
        }
    }
    Statement(db_,
              "INSERT INTO company_info (cik, as_of, name, state_of_incorporation, sic) VALUES (?, ?, ?, ?, ?) "
              "ON CONFLICT (cik, as_of) DO UPDATE SET name = excluded.name, "
              "state_of_incorporation = excluded.state_of_incorporation, sic = excluded.sic")
        .bind({to_i64(cik), to_iso(as_of), info.name, opt(info.state_of_incorporation), opt(info.sic)})
        .run();
    return {info, true};
}

std::optional<CompanyInfo> MetadataStore::latest_company_info(std::uint64_t cik)
{
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "SELECT cik, as_of, name, state_of_incorporation, sic FROM company_info WHERE cik = ? "
                "ORDER BY as_of DESC LIMIT 1");
    s.bind({to_i64(cik)});
    if (!s.step()) {
        return std::nullopt;
    }
    return read_info(s);
}

std::vector<CompanyInfo> MetadataStore::company_info_history(std::uint64_t cik)
{
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "SELECT cik, as_of, name, state_of_incorporation, sic FROM company_info WHERE cik = ? ORDER BY as_of");
    s.bind({to_i64(cik)});
    std::vector<CompanyInfo> out;
    while (s.step()) {
        out.push_back(read_info(s));
    }
    return out;
}

// ---- index files ----------------------------------------------------------

FilingIndex MetadataStore::register_filing_index(const IndexDescriptor& descriptor)
{
    if (descriptor.path.empty() || descriptor.quarter < 1 || descriptor.quarter > 4) {
        throw Error(ErrorCode::InvalidArgument, "invalid index descriptor '" + descriptor.path + "'");
    }
    std::lock_guard lock(mutex_);
    Statement(db_,
              "INSERT INTO filing_index (edgar_path, year, quarter, index_type) VALUES (?, ?, ?, ?) "
              "ON CONFLICT (edgar_path) DO NOTHING")
        .bind({descriptor.path, std::int64_t{descriptor.year}, std::int64_t{descriptor.quarter},
               std::string(to_string(descriptor.index_type))})
        .run();
    return *filing_index_locked(descriptor.path);
}

FilingIndex MetadataStore::mark_filing_index_processed(const std::string& edgar_path, std::int64_t row_count,
                                                       Date downloaded)
{
    std::lock_guard lock(mutex_);
    if (!filing_index_locked(edgar_path)) {
        throw Error(ErrorCode::IllegalTransition, "index '" + edgar_path + "' was never registered");
    }
    Statement(db_,
              "UPDATE filing_index SET is_processed = 1, is_error = 0, error_detail = NULL, row_count = ?, "
              "date_downloaded = ? WHERE edgar_path = ?")
        .bind({row_count, to_iso(downloaded), edgar_path})
        .run();
    return *filing_index_locked(edgar_path);
}

FilingIndex MetadataStore::mark_filing_index_error(const std::string& edgar_path, const std::string& detail,
                                                   std::optional<Date> downloaded)
{
    std::lock_guard lock(mutex_);
    if (!filing_index_locked(edgar_path)) {
        throw Error(ErrorCode::IllegalTransition, "index '" + edgar_path + "' was never registered");
    }
    Statement(db_,
              "UPDATE filing_index SET is_processed = 0, is_error = 1, error_detail = ?, row_count = NULL, "
              "date_downloaded = coalesce(?, date_downloaded) WHERE edgar_path = ?")
        .bind({detail, opt(downloaded), edgar_path})
        .run();
    return *filing_index_locked(edgar_path);
}

std::optional<FilingIndex> MetadataStore::filing_index_locked(const std::string& edgar_path)
{
    Statement s(db_, "SELECT " + std::string(kIndexColumns) + " FROM filing_index WHERE edgar_path = ?");
    s.bind({edgar_path});
    if (!s.step()) {
        return std::nullopt;
    }
    return read_index(s);
}

std::optional<FilingIndex> MetadataStore::filing_index(const std::string& edgar_path)
{
    std::lock_guard lock(mutex_);
    return filing_index_locked(edgar_path);
}

std::vector<FilingIndex> MetadataStore::filing_indexes(std::optional<int> year)
{
    std::lock_guard lock(mutex_);
    Statement s(db_, "SELECT " + std::string(kIndexColumns) +
                         " FROM filing_index WHERE (?1 IS NULL OR year = ?1) ORDER BY edgar_path");
    s.bind({year ? Value(std::int64_t{*year}) : Value()});
    std::vector<FilingIndex> out;
    while (s.step()) {
        out.push_back(read_index(s));
    }
    return out;
}

// ---- filings --------------------------------------------------------------

Filing MetadataStore::record_filing_locked(const ParsedFiling& parsed, const std::string& raw_key,
                                           const FilingSource& source)
{
    if (!parsed.header) {
        throw Error(ErrorCode::ConstraintViolation, "filing has no header to key it by");
    }
    const auto& header = *parsed.header;
    const auto cik = header.cik.value_or(source.cik);
    if (cik == 0) {
        throw Error(ErrorCode::ConstraintViolation, "filing " + header.accession_number + " has no CIK");
    }
    const auto form_type = header.form_type.empty() ? source.form_type : header.form_type;
    const auto date_filed = header.date_filed ? header.date_filed : source.date_filed;
    Statement(db_,
              "INSERT INTO filing (accession_number, cik, form_type, date_filed, edgar_path, raw_object_key) "
              "VALUES (?, ?, ?, ?, ?, ?) "
              "ON CONFLICT (accession_number) DO UPDATE SET cik = excluded.cik, form_type = excluded.form_type, "
              "date_filed = excluded.date_filed, edgar_path = excluded.edgar_path, "
              "raw_object_key = excluded.raw_object_key")
        .bind({header.accession_number, to_i64(cik), form_type, opt(date_filed), source.edgar_path, raw_key})
        .run();
    return *filing_locked(header.accession_number);
}

Filing MetadataStore::record_filing(const ParsedFiling& parsed, const std::string& raw_key, const FilingSource& source)
{
    std::lock_guard lock(mutex_);
    return record_filing_locked(parsed, raw_key, source);
}

std::vector<FilingDocument> MetadataStore::record_documents_locked(const std::string& accession_number,
                                                                   std::span<const ParsedDocument> documents)
{
    if (!filing_locked(accession_number)) {
        throw Error(ErrorCode::ConstraintViolation, "filing " + accession_number + " is not recorded");
    }
    for (const auto& doc : documents) {
        Statement(db_,
                  "INSERT INTO filing_document (accession_number, sequence, doc_type, description, filename, sha1, "
                  "content_type) VALUES (?, ?, ?, ?, ?, ?, ?) "
                  "ON CONFLICT (accession_number, sequence) DO UPDATE SET doc_type = excluded.doc_type, "
                  "description = excluded.description, filename = excluded.filename, "
                  "content_type = excluded.content_type, "
                  "is_extracted = CASE WHEN filing_document.sha1 = excluded.sha1 THEN filing_document.is_extracted "
                  "ELSE 0 END, "
                  "extract_state = CASE WHEN filing_document.sha1 = excluded.sha1 THEN filing_document.extract_state "
                  "ELSE 'pending' END, "
                  "extract_detail = CASE WHEN filing_document.sha1 = excluded.sha1 "
                  "THEN filing_document.extract_detail ELSE NULL END, "
                  "sha1 = excluded.sha1")
            .bind({accession_number, std::int64_t{doc.sequence}, opt(doc.doc_type), opt(doc.description),
                   opt(doc.filename), doc.sha1, doc.content_type})
            .run();
    }
    Statement(db_,
              "UPDATE filing SET document_count = (SELECT count(*) FROM filing_document WHERE accession_number = ?1) "
              "WHERE accession_number = ?1")
        .bind({accession_number})
        .run();
    return documents_locked("d.accession_number = ?", {accession_number}, std::nullopt);
}

std::vector<FilingDocument> MetadataStore::record_documents(const std::string& accession_number,
                                                            std::span<const ParsedDocument> documents)
{
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    auto out = record_documents_locked(accession_number, documents);
    tx.commit();
    return out;
}

Filing MetadataStore::mark_filing_processed_locked(const std::string& accession_number)
{
    const auto current = filing_locked(accession_number);
    if (!current) {
        throw Error(ErrorCode::IllegalTransition, "filing " + accession_number + " is not recorded");
    }
    if (!current->raw_object_key) {
        throw Error(ErrorCode::IllegalTransition, "filing " + accession_number + " has no raw object");
    }
    Statement(db_,
              "UPDATE filing SET is_processed = 1, is_error = 0, error_detail = NULL, "
              "document_count = (SELECT count(*) FROM filing_document WHERE accession_number = ?1) "
              "WHERE accession_number = ?1")
        .bind({accession_number})
        .run();
    return *filing_locked(accession_number);
}

Filing MetadataStore::mark_filing_processed(const std::string& accession_number)
{
    std::lock_guard lock(mutex_);
    return mark_filing_processed_locked(accession_number);
}

Filing MetadataStore::ingest_filing(const ParsedFiling& parsed, const std::string& raw_key, const FilingSource& source)
{
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    const auto filing = record_filing_locked(parsed, raw_key, source);
    record_documents_locked(filing.accession_number, parsed.documents);
    auto out = mark_filing_processed_locked(filing.accession_number);
    tx.commit();
    return out;
}

Filing MetadataStore::mark_filing_error(const FilingSource& source, const std::string& detail,
                                        std::optional<std::string> raw_key)
{
    if (source.accession_number.empty() || source.cik == 0) {
        throw Error(ErrorCode::InvalidArgument, "filing source needs an accession number and a CIK");
    }
    std::lock_guard lock(mutex_);
    Statement(db_,
              "INSERT INTO filing (accession_number, cik, form_type, date_filed, edgar_path, raw_object_key, "
              "is_processed, is_error, error_detail) VALUES (?, ?, ?, ?, ?, ?, 0, 1, ?) "
              "ON CONFLICT (accession_number) DO UPDATE SET is_processed = 0, is_error = 1, "
              "error_detail = excluded.error_detail, "
              "raw_object_key = coalesce(excluded.raw_object_key, filing.raw_object_key)")
        .bind({source.accession_number, to_i64(source.cik), source.form_type, opt(source.date_filed),
               source.edgar_path, opt(raw_key), detail})
        .run();
    return *filing_locked(source.accession_number);
}

std::optional<Filing> MetadataStore::filing_locked(const std::string& accession_number)
{
    Statement s(db_, "SELECT " + std::string(kFilingColumns) + " FROM filing WHERE accession_number = ?");
    s.bind({accession_number});
    if (!s.step()) {
        return std::nullopt;
    }
    return read_filing(s);
}

std::optional<Filing> MetadataStore::filing(const std::string& accession_number)
{
    std::lock_guard lock(mutex_);
    return filing_locked(accession_number);
}

std::vector<Filing> MetadataStore::find_filings(const FilingQuery& query)
{
    std::lock_guard lock(mutex_);
    Statement s(db_, "SELECT " + std::string(kFilingColumns) +
                         " FROM filing WHERE (?1 IS NULL OR form_type = ?1) AND (?2 IS NULL OR date_filed >= ?2) "
                         "AND (?3 IS NULL OR date_filed <= ?3) AND (?4 IS NULL OR cik = ?4) "
                         "ORDER BY date_filed, accession_number");
    s.bind({query.form_type ? Value(to_upper_ascii(*query.form_type)) : Value(), opt(query.filed_from),
            opt(query.filed_to), query.cik ? Value(to_i64(*query.cik)) : Value()});
    std::vector<Filing> out;
    while (s.step()) {
        out.push_back(read_filing(s));
    }
    return out;
}

std::vector<FilingDocument> MetadataStore::documents_locked(const std::string& where,
                                                            const std::vector<std::string>& params,
                                                            std::optional<std::size_t> limit)
{
    std::string sql = "SELECT " + std::string(kDocumentColumns) +
                      " FROM filing_document d JOIN filing f ON f.accession_number = d.accession_number";
    if (!where.empty()) {
        sql += " WHERE " + where;
    }
    sql += " ORDER BY f.date_filed, d.accession_number, d.sequence";
    if (limit) {
        sql += " LIMIT " + std::to_string(*limit);
    }
    Statement s(db_, sql);
    s.bind_all(params);
    std::vector<FilingDocument> out;
    while (s.step()) {
        out.push_back(read_document(s));
    }
    return out;
}

std::vector<FilingDocument> MetadataStore::documents_for(const std::string& accession_number)
{
    std::lock_guard lock(mutex_);
    return documents_locked("d.accession_number = ?", {accession_number}, std::nullopt);
}

std::vector<FilingDocument> MetadataStore::find_documents_by_description(std::string_view substring,
                                                                         std::size_t limit)
{
    if (limit == 0) {
        throw Error(ErrorCode::InvalidArgument, "limit must be positive");
    }
    std::lock_guard lock(mutex_);
    return documents_locked("instr(lower(d.description), ?) > 0", {to_lower_ascii(substring)}, limit);
}

std::vector<FilingDocument> MetadataStore::documents_in_scope(const DocumentScope& scope, bool extracted_only)
{
    std::string where;
    std::vector<std::string> params;
    const auto add = [&](const std::string& clause) {
        where += where.empty() ? clause : " AND " + clause;
    };
    if (scope.description_like) {
        add("instr(lower(d.description), ?) > 0");
        params.push_back(to_lower_ascii(*scope.description_like));
    }
    if (scope.form_type) {
        add("f.form_type = ?");
        params.push_back(to_upper_ascii(*scope.form_type));
    }
    if (extracted_only) {
        add("d.is_extracted = 1");
    }
    std::lock_guard lock(mutex_);
    return documents_locked(where, params, scope.limit);
}

// ---- extraction -----------------------------------------------------------

std::vector<PendingBody> MetadataStore::pending_extractions(std::optional<std::size_t> limit, bool retry_unextracted)
{
    std::lock_guard lock(mutex_);
    std::string sql =
        "SELECT sha1, min(content_type), count(*) FROM filing_document GROUP BY sha1 "
        "HAVING sum(extract_state IN ('pending', 'failed')) > 0 OR (?1 AND sum(extract_state = 'unextracted') > 0) "
        "ORDER BY sha1";
    if (limit) {
        sql += " LIMIT " + std::to_string(*limit);
    }
    Statement s(db_, sql);
    s.bind({std::int64_t{retry_unextracted ? 1 : 0}});
    std::vector<PendingBody> out;
    while (s.step()) {
        out.push_back({s.text(0), s.text(1), static_cast<std::size_t>(s.integer(2))});
    }
    return out;
}

std::size_t MetadataStore::set_extract_state(const std::string& sha1, ExtractState state,
                                             std::optional<std::string> detail)
{
    std::lock_guard lock(mutex_);
    Statement(db_,
              "UPDATE filing_document SET extract_state = ?, is_extracted = ?, extract_detail = ? WHERE sha1 = ? "
              "AND (extract_state IS NOT ? OR is_extracted IS NOT ? OR extract_detail IS NOT ?)")
        .bind({std::string(to_string(state)), std::int64_t{state == ExtractState::extracted ? 1 : 0}, opt(detail), sha1,
               std::string(to_string(state)), std::int64_t{state == ExtractState::extracted ? 1 : 0}, opt(detail)})
        .run();
    return static_cast<std::size_t>(sqlite3_changes(db_));
}

// ---- search ---------------------------------------------------------------

SearchQuery MetadataStore::upsert_search_query(const std::string& label, Date created,
                                               std::span<const SearchQueryTerm> terms)
{
    if (label.empty()) {
        throw Error(ErrorCode::InvalidArgument, "search query label is empty");
    }
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    Statement(db_, "INSERT INTO search_query (label, created) VALUES (?, ?) ON CONFLICT (label) DO NOTHING")
        .bind({label, to_iso(created)})
        .run();
    Statement id(db_, "SELECT id FROM search_query WHERE label = ?");
    id.bind({label});
    id.step();
    const auto query_id = id.integer(0);
    for (const auto& term : terms) {
        if (term.term.empty()) {
            throw Error(ErrorCode::InvalidArgument, "search term is empty");
        }
        Statement(db_,
                  "INSERT INTO search_query_term (query_id, term, case_sensitive) VALUES (?, ?, ?) "
                  "ON CONFLICT (query_id, term) DO UPDATE SET case_sensitive = excluded.case_sensitive")
            .bind({query_id, term.term, std::int64_t{term.case_sensitive ? 1 : 0}})
            .run();
    }
    tx.commit();
    return *search_query(query_id);
}

std::optional<SearchQuery> MetadataStore::search_query(std::int64_t id)
{
    std::lock_guard lock(mutex_);
    Statement s(db_, "SELECT id, created, label FROM search_query WHERE id = ?");
    s.bind({id});
    if (!s.step()) {
        return std::nullopt;
    }
    SearchQuery query;
    query.id = s.integer(0);
    query.created = required_date(s.optional_text(1), "search_query.created");
    query.label = s.text(2);
    Statement t(db_, "SELECT term, case_sensitive FROM search_query_term WHERE query_id = ? ORDER BY term");
    t.bind({id});
    while (t.step()) {
        query.terms.push_back({t.text(0), t.integer(1) != 0});
    }
    return query;
}

std::size_t MetadataStore::save_search_results(std::int64_t query_id, std::span<const SearchQueryResult> results)
{
    std::lock_guard lock(mutex_);
    Transaction tx(db_);
    std::size_t stored = 0;
    for (const auto& r : results) {
        if (r.count < 0) {
            throw Error(ErrorCode::InvalidArgument, "negative search count");
        }
        if (r.count == 0) {
            Statement(db_,
                      "DELETE FROM search_query_result WHERE query_id = ? AND term = ? AND accession_number = ? "
                      "AND sequence = ?")
                .bind({query_id, r.term, r.accession_number, std::int64_t{r.sequence}})
                .run();
            continue;
        }
        Statement(db_,
                  "INSERT INTO search_query_result (query_id, term, accession_number, sequence, count) "
                  "VALUES (?, ?, ?, ?, ?) ON CONFLICT (query_id, term, accession_number, sequence) "
                  "DO UPDATE SET count = excluded.count")
            .bind({query_id, r.term, r.accession_number, std::int64_t{r.sequence}, r.count})
            .run();
        ++stored;
    }
    tx.commit();
    return stored;
}

std::vector<SearchQueryResult> MetadataStore::search_results(std::int64_t query_id)
{
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "SELECT term, accession_number, sequence, count FROM search_query_result WHERE query_id = ? "
                "ORDER BY term, accession_number, sequence");
    s.bind({query_id});
    std::vector<SearchQueryResult> out;
    while (s.step()) {
        out.push_back({s.text(0), s.text(1), static_cast<std::uint32_t>(s.integer(2)), s.integer(3)});
    }
    return out;
}

// ---- introspection --------------------------------------------------------

std::map<std::string, std::int64_t> MetadataStore::row_counts()
{
    std::lock_guard lock(mutex_);
    std::map<std::string, std::int64_t> counts;
    for (const auto& [table, order] : kTables) {
        Statement s(db_, "SELECT count(*) FROM " + std::string(table));
        s.step();
        counts[std::string(table)] = s.integer(0);
    }
    return counts;
}

std::string MetadataStore::dump()
{
    std::lock_guard lock(mutex_);
    std::string out;
    for (const auto& [table, order] : kTables) {
        Statement s(db_, "SELECT * FROM " + std::string(table) + " ORDER BY " + std::string(order));
        out += "## ";
        out += table;
        out += '\n';
        for (int i = 0; i < s.columns(); ++i) {
            out += (i ? "|" : "") + s.column_name(i);
        }
        out += '\n';
        while (s.step()) {
            for (int i = 0; i < s.columns(); ++i) {
                if (i) {
                    out += '|';
                }
                out += s.is_null(i) ? "\\N" : s.text(i);
            }
            out += '\n';
        }
    }
    return out;
}

} // namespace edgar
