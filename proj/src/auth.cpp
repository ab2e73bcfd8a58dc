#include "collector/auth.hpp"

#include <sodium.h>

#include <array>
#include <mutex>
#include <regex>

#include "collector/error.hpp"

namespace collector::auth {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error(ErrorCode::kStorageFailure, "", "libsodium initialisation failed");
  });
}

const std::string& dummy_digest() {
  static const std::string digest = hash_password("collector-dummy-password");
  return digest;
}

}  // namespace

bool is_valid_username(std::string_view username) {
  static const std::regex pattern("^[A-Za-z0-9_]{3,32}$");
  return std::regex_match(username.begin(), username.end(), pattern);
}

std::string hash_password(std::string_view password) {
  ensure_sodium();
  std::array<char, crypto_pwhash_STRBYTES> out{};
  if (crypto_pwhash_str(out.data(), password.data(), password.size(), crypto_pwhash_OPSLIMIT_INTERACTIVE,
                        crypto_pwhash_MEMLIMIT_INTERACTIVE) != 0) {
    throw Error(ErrorCode::kStorageFailure, "", "password hashing ran out of memory");
  }
  return std::string(out.data());
}

bool verify_password(std::string_view digest, std::string_view password) {
  ensure_sodium();
  const std::string terminated(digest);
  return crypto_pwhash_str_verify(terminated.c_str(), password.data(), password.size()) == 0;
}

void simulate_password_check(std::string_view password) { (void)verify_password(dummy_digest(), password); }

std::string new_session_token() {
  ensure_sodium();
  std::array<unsigned char, 32> raw{};
  randombytes_buf(raw.data(), raw.size());
  std::array<char, raw.size() * 2 + 1> hex{};
  sodium_bin2hex(hex.data(), hex.size(), raw.data(), raw.size());
  return std::string(hex.data());
}

}  // namespace collector::auth
