#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "cascade/cli.hpp"
#include "cascade/error.hpp"

namespace cascade::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 initialisation failed");

  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0 &&
        EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount())) != 1)
      throw IoError("SHA-256 update failed");
  }
  if (in.bad()) throw IoError("error reading " + path.string());

  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1)
    throw IoError("SHA-256 finalisation failed");

  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest,
                    const std::map<std::string, std::string>& resolved,
                    const std::vector<ArtifactEntry>& artifacts) {
  const auto path = dir / "manifest.txt";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "command=" << to_string(manifest.command) << '\n';
  out << "seed=" << manifest.seed << '\n';
  for (const auto& [key, value] : resolved) out << "param." << key << '=' << value << '\n';
  for (const auto& a : artifacts)
    out << "file=" << a.file << " sha256=" << a.sha256 << " bytes=" << a.bytes << '\n';
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace cascade::cli
