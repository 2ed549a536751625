#include "peermarket/ledger.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace peermarket {

const char* payload_kind_name(PayloadKind k) {
    switch (k) {
    case PayloadKind::SessionOpen:
        return "session_open";
    case PayloadKind::Orders:
        return "orders";
    case PayloadKind::Coalitions:
        return "coalitions";
    case PayloadKind::Transactions:
        return "transactions";
    case PayloadKind::Settlement:
        return "settlement";
    }
    return "?";
}

std::optional<PayloadKind> parse_payload_kind(const std::string& name) {
    for (PayloadKind k : {PayloadKind::SessionOpen, PayloadKind::Orders, PayloadKind::Coalitions,
                          PayloadKind::Transactions, PayloadKind::Settlement}) {
        if (name == payload_kind_name(k))
            return k;
    }
    return std::nullopt;
}

Digest sha256(const std::string& data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size())
        throw SimError(ErrorCode::StorageFailure, "sha256 computation failed");
    return out;
}

std::string to_hex(const Digest& d) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : d) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0xf]);
    }
    return out;
}

std::optional<Digest> from_hex(const std::string& hex) {
    if (hex.size() != 64)
        return std::nullopt;
    Digest out{};
    for (std::size_t i = 0; i < 32; ++i) {
        int hi = -1;
        int lo = -1;
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9')
                return c - '0';
            if (c >= 'a' && c <= 'f')
                return c - 'a' + 10;
            return -1;
        };
        hi = nibble(hex[2 * i]);
        lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

std::string LedgerBlock::hash_preimage() const {
    std::string out;
    out += "index: " + std::to_string(index) + "\n";
    out += "prev: " + to_hex(prev_hash) + "\n";
    out += "kind: " + std::string(payload_kind_name(kind)) + "\n";
    out += "payload_bytes: " + std::to_string(payload.size()) + "\n";
    out += payload;
    return out;
}

std::string LedgerBlock::to_bytes() const {
    return hash_preimage() + "hash: " + to_hex(hash) + "\n";
}

LedgerWriter::LedgerWriter(std::string path) : path_(std::move(path)) {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out)
        throw SimError(ErrorCode::StorageFailure, "cannot create ledger file " + path_);
}

LedgerBlock LedgerWriter::append(PayloadKind kind, std::string payload) {
    LedgerBlock block;
    block.index = next_index_;
    block.prev_hash = last_hash_;
    block.kind = kind;
    block.payload = std::move(payload);
    block.hash = sha256(block.hash_preimage());

    const std::string bytes = block.to_bytes();
    if (bytes.size() > UINT32_MAX)
        throw SimError(ErrorCode::StorageFailure, "ledger block too large");
    const std::uint32_t len = static_cast<std::uint32_t>(bytes.size());
    unsigned char frame[4] = {
        static_cast<unsigned char>(len & 0xff),
        static_cast<unsigned char>((len >> 8) & 0xff),
        static_cast<unsigned char>((len >> 16) & 0xff),
        static_cast<unsigned char>((len >> 24) & 0xff),
    };

    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out)
        throw SimError(ErrorCode::StorageFailure, "cannot open ledger file " + path_);
    out.write(reinterpret_cast<const char*>(frame), 4);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.flush())
        throw SimError(ErrorCode::StorageFailure, "short write to ledger file " + path_);

    ++next_index_;
    last_hash_ = block.hash;
    return block;
}

namespace {

struct ParsedBlock {
    LedgerBlock block;
    std::string error; // empty when the block parsed cleanly
};

/// Parses one framed record's bytes; structural problems land in `error`.
ParsedBlock parse_block_bytes(const std::string& bytes) {
    ParsedBlock out;
    std::size_t pos = 0;
    auto read_line = [&bytes, &pos](const std::string& key) -> std::optional<std::string> {
        const std::string prefix = key + ": ";
        if (bytes.compare(pos, prefix.size(), prefix) != 0)
            return std::nullopt;
        const std::size_t eol = bytes.find('\n', pos);
        if (eol == std::string::npos)
            return std::nullopt;
        std::string value = bytes.substr(pos + prefix.size(), eol - pos - prefix.size());
        pos = eol + 1;
        return value;
    };

    const auto index_s = read_line("index");
    const auto prev_s = index_s ? read_line("prev") : std::nullopt;
    const auto kind_s = prev_s ? read_line("kind") : std::nullopt;
    const auto len_s = kind_s ? read_line("payload_bytes") : std::nullopt;
    if (!index_s || !prev_s || !kind_s || !len_s) {
        out.error = "malformed block header";
        return out;
    }
    try {
        out.block.index = std::stoull(*index_s);
    } catch (...) {
        out.error = "bad block index";
        return out;
    }
    const auto prev = from_hex(*prev_s);
    const auto kind = parse_payload_kind(*kind_s);
    if (!prev || !kind) {
        out.error = "bad prev digest or kind";
        return out;
    }
    out.block.prev_hash = *prev;
    out.block.kind = *kind;
    std::size_t payload_len = 0;
    try {
        payload_len = std::stoull(*len_s);
    } catch (...) {
        out.error = "bad payload length";
        return out;
    }
    if (pos + payload_len > bytes.size()) {
        out.error = "payload overruns record";
        return out;
    }
    out.block.payload = bytes.substr(pos, payload_len);
    pos += payload_len;
    const auto hash_s = read_line("hash");
    if (!hash_s || pos != bytes.size()) {
        out.error = "malformed hash line";
        return out;
    }
    const auto hash = from_hex(*hash_s);
    if (!hash) {
        out.error = "bad hash hex";
        return out;
    }
    out.block.hash = *hash;
    return out;
}

struct ScanResult {
    std::vector<LedgerBlock> blocks;
    std::optional<std::uint64_t> bad_block;
    std::string detail;
};

ScanResult scan_ledger(const std::string& path) {
    ScanResult result;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        result.bad_block = 0;
        result.detail = "cannot open ledger file " + path;
        return result;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();

    std::size_t pos = 0;
    std::uint64_t block_no = 0;
    Digest prev{};
    while (pos < data.size()) {
        if (pos + 4 > data.size()) {
            result.bad_block = block_no;
            result.detail = "truncated record length";
            return result;
        }
        const std::uint32_t len = static_cast<std::uint8_t>(data[pos]) |
                                  static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos + 1])) << 8 |
                                  static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos + 2])) << 16 |
                                  static_cast<std::uint32_t>(static_cast<std::uint8_t>(data[pos + 3])) << 24;
        pos += 4;
        if (pos + len > data.size()) {
            result.bad_block = block_no;
            result.detail = "record overruns file";
            return result;
        }
        ParsedBlock parsed = parse_block_bytes(data.substr(pos, len));
        pos += len;
        if (!parsed.error.empty()) {
            result.bad_block = block_no;
            result.detail = parsed.error;
            return result;
        }
        const LedgerBlock& block = parsed.block;
        if (block.index != block_no) {
            result.bad_block = block_no;
            result.detail = "block index mismatch";
            return result;
        }
        if (block.prev_hash != prev) {
            result.bad_block = block_no;
            result.detail = "previous-hash link broken";
            return result;
        }
        if (sha256(block.hash_preimage()) != block.hash) {
            result.bad_block = block_no;
            result.detail = "digest mismatch";
            return result;
        }
        prev = block.hash;
        result.blocks.push_back(parsed.block);
        ++block_no;
    }
    return result;
}

} // namespace

std::vector<LedgerBlock> read_ledger(const std::string& path) {
    ScanResult result = scan_ledger(path);
    if (result.bad_block)
        throw SimError(ErrorCode::MalformedInput, "ledger " + path + " broken at block " +
                                                      std::to_string(*result.bad_block) + ": " +
                                                      result.detail);
    return std::move(result.blocks);
}

VerificationReport verify_chain(const std::string& path) {
    ScanResult result = scan_ledger(path);
    VerificationReport report;
    report.verified_blocks = result.blocks.size();
    if (result.bad_block) {
        report.ok = false;
        report.first_bad_block = result.bad_block;
        report.detail = result.detail;
    }
    return report;
}

} // namespace peermarket
