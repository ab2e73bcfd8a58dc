#pragma once

#include <string>
#include <string_view>

namespace collector::auth {

inline constexpr std::size_t kMinPasswordLength = 8;

/// Whitelist for account names: ^[A-Za-z0-9_]{3,32}$.
bool is_valid_username(std::string_view username);

/// Salted Argon2id digest in the self-describing "$argon2id$..." form.
std::string hash_password(std::string_view password);
bool verify_password(std::string_view digest, std::string_view password);

/// Burns roughly the cost of one verify_password call, so a login for an
/// unknown account takes as long as one with a wrong password.
void simulate_password_check(std::string_view password);

/// 256 random bits, hex encoded.
std::string new_session_token();

}  // namespace collector::auth
