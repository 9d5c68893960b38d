#include "edgar/digest.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "edgar/error.hpp"

namespace edgar {

namespace {

std::string evp_digest(const EVP_MD* md, std::string_view data)
{
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int out_len = 0;
    if (EVP_Digest(data.data(), data.size(), out, &out_len, md, nullptr) != 1) {
        throw Error(ErrorCode::InvalidArgument, "digest computation failed");
    }
    return to_hex(std::string_view(reinterpret_cast<const char*>(out), out_len));
}

} // namespace

std::string to_hex(std::string_view bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0x0F]);
    }
    return out;
}

std::string sha1_hex(std::string_view data) { return evp_digest(EVP_sha1(), data); }

std::string sha256_hex(std::string_view data) { return evp_digest(EVP_sha256(), data); }

std::string hmac_sha256(std::string_view key, std::string_view data)
{
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int out_len = 0;
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
             reinterpret_cast<const unsigned char*>(data.data()), data.size(), out, &out_len) == nullptr) {
        throw Error(ErrorCode::InvalidArgument, "HMAC computation failed");
    }
    return std::string(reinterpret_cast<const char*>(out), out_len);
}

bool is_sha1_hex(std::string_view text) noexcept
{
    if (text.size() != 40) {
        return false;
    }
    for (char c : text) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
            return false;
        }
    }
    return true;
}

} // namespace edgar
