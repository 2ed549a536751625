#pragma once

// Tamper-evident local ledger: append-only file of hash-chained blocks.
//
// On disk every block is framed as a little-endian 4-byte record length
// followed by the canonical block bytes:
//
//   index: <decimal>\n
//   prev: <64 lowercase hex chars>\n
//   kind: <session_open|orders|coalitions|transactions|settlement>\n
//   payload_bytes: <decimal>\n
//   <payload bytes>
//   hash: <64 lowercase hex chars>\n
//
// The hash is SHA-256 over everything before the hash line. Block 0 carries
// an all-zero prev digest; block i carries block i-1's hash. Any single-byte
// change to the file breaks either the framing or a digest.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "peermarket/domain.hpp"

namespace peermarket {

enum class PayloadKind : std::uint8_t {
    SessionOpen,
    Orders,
    Coalitions,
    Transactions,
    Settlement,
};

const char* payload_kind_name(PayloadKind k);
std::optional<PayloadKind> parse_payload_kind(const std::string& name);

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(const std::string& data);
std::string to_hex(const Digest& d);
std::optional<Digest> from_hex(const std::string& hex);

struct LedgerBlock {
    std::uint64_t index{0};
    Digest prev_hash{};
    PayloadKind kind{PayloadKind::SessionOpen};
    std::string payload;
    Digest hash{};

    /// Canonical block bytes including the hash line.
    std::string to_bytes() const;
    /// The exact byte string the hash covers.
    std::string hash_preimage() const;
};

/// Single-writer append handle; every append is flushed before returning.
class LedgerWriter {
  public:
    /// Creates or truncates the file.
    explicit LedgerWriter(std::string path);

    LedgerBlock append(PayloadKind kind, std::string payload);
    std::uint64_t block_count() const { return next_index_; }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::uint64_t next_index_{0};
    Digest last_hash_{}; // all zero before the first block
};

struct VerificationReport {
    bool ok{true};
    std::uint64_t verified_blocks{0};
    std::optional<std::uint64_t> first_bad_block;
    std::string detail;
};

/// Parses a ledger file; throws SimError{MalformedInput} naming the first
/// structurally broken block.
std::vector<LedgerBlock> read_ledger(const std::string& path);

/// Single O(n) scan. Structural damage and digest mismatches both fail the
/// report; corruption never throws. An empty ledger passes vacuously.
VerificationReport verify_chain(const std::string& path);

} // namespace peermarket
