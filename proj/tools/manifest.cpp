#include "manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <sstream>

#include "symtop/errors.hpp"
#include "symtop/molecule_io.hpp"

namespace symtop::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::str() const {
  std::ostringstream os;
  os << "# symtop run manifest\n";
  os << "[run]\n";
  os << "tool_version = " << tool_version << '\n';
  os << "command = " << command << '\n';
  os << "command_line = " << command_line << '\n';
  os << "started_utc = " << started_utc << '\n';
  os << "finished_utc = " << finished_utc << '\n';
  os << "exit_code = " << exit_code << '\n';
  os << "\n[config]\n";
  for (const auto& [key, value] : config) os << key << " = " << value << '\n';
  os << "\n[molecule]\n";
  write_molecule(os, constants);
  os << "\n[outputs]\n";
  for (const auto& [name, digest] : outputs) os << name << " = sha256:" << digest << '\n';
  return os.str();
}

}  // namespace symtop::cli
