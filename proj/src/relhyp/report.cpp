#include "relhyp/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>

#include "relhyp/error.hpp"

namespace relhyp {

std::string git_blob_sha1(std::string_view content) {
    std::string header = "blob " + std::to_string(content.size());
    header.push_back('\0');
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) fail(ErrorCode::kInternal, "cannot allocate a digest context");
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                    EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, md, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) fail(ErrorCode::kInternal, "SHA-1 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

Json json_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace relhyp
