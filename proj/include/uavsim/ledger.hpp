#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "uavsim/types.hpp"

namespace uavsim {

class LedgerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a over the canonical block serialization. Stable, not
/// cryptographic: it guards linkage integrity inside the simulation only.
using Digest = std::uint64_t;

std::string digest_hex(Digest d);
std::optional<Digest> parse_digest_hex(std::string_view hex);

enum class TxKind { IdentityRegistration, DeliveryReceipt, ContractSignature };
enum class IdentityStatus { Active, Revoked };

std::string_view tx_kind_name(TxKind k);
std::string_view identity_status_name(IdentityStatus s);

struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    bool contains(const Vec2& p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

struct IdentityRecord {
    std::string drone_id;
    std::string provider;
    std::string credential;
    IdentityStatus status = IdentityStatus::Active;

    friend bool operator==(const IdentityRecord&, const IdentityRecord&) = default;
};

struct DeliveryReceipt {
    std::uint64_t session_id = 0;
    std::string src;
    std::string dst;
    std::uint32_t packets_sent = 0;
    std::uint32_t packets_delivered = 0;
    std::vector<std::string> relays;

    friend bool operator==(const DeliveryReceipt&, const DeliveryReceipt&) = default;
};

struct DroneContract {
    std::string provider;
    std::string drone_id;
    Rect service_area;
    std::string resource_commitment;
    double valid_from_s = 0.0;
    double valid_to_s = 0.0;

    bool active_at(double t_s) const { return t_s >= valid_from_s && t_s < valid_to_s; }
    friend bool operator==(const DroneContract&, const DroneContract&) = default;
};

using TxPayload = std::variant<IdentityRecord, DeliveryReceipt, DroneContract>;

struct Transaction {
    TxPayload payload;
    std::string author;
    std::string credential_token;

    TxKind kind() const;
    friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Block {
    std::uint64_t index = 0;
    Digest prev_hash = 0;
    Digest hash = 0;
    std::vector<Transaction> transactions;
    std::string proposer;
    SimTime timestamp_us = 0;

    friend bool operator==(const Block&, const Block&) = default;
};

enum class ChainMode { Public, Private };

std::string_view chain_mode_name(ChainMode m);

struct Chain {
    std::vector<Block> blocks;
    ChainMode mode = ChainMode::Public;
    std::set<std::string> members;

    const Block& tip() const { return blocks.back(); }
    bool is_member(const std::string& id) const { return mode == ChainMode::Public || members.contains(id); }
    friend bool operator==(const Chain&, const Chain&) = default;
};

/// Byte-exact canonical form hashed into a block digest:
///   "blk|" index "|" prev_hex "|" txcount "|" tx... "|" len:proposer "|" timestamp_us
/// where every string is length-prefixed ("5:hello") and doubles use the
/// shortest round-trip decimal form.
std::string canonical_transaction(const Transaction& tx);
std::string canonical_block(const Block& block);
Digest compute_block_hash(const Block& block);

Chain genesis(ChainMode mode, std::set<std::string> members = {});

/// Returns a new chain with one more block; `chain` is untouched.
Chain append_block(const Chain& chain, std::vector<Transaction> txs, const std::string& proposer,
                   std::optional<SimTime> timestamp_us = std::nullopt);

bool verify_chain(const Chain& chain);

/// Index of the first block whose hash, linkage or index is wrong.
std::optional<std::uint64_t> first_invalid_block(const Chain& chain);

struct ConsensusParams {
    int validators = 4;
    int faulty = 0;
};

struct ConsensusResult {
    bool committed = false;
    std::uint64_t messages = 0;
};

/// Three-phase BFT round over `validators` replicas: the primary's pre-prepare
/// to every backup, then all-to-all prepare and commit. Commits iff
/// validators >= 3·faulty + 1. The full message pattern is charged either way.
ConsensusResult consensus_commit(int validators, int faulty, std::span<const Transaction> txs);

/// Latest identity record per drone, by replaying IdentityRegistration
/// transactions in chain order.
using IdentityRegistry = std::map<std::string, IdentityRecord>;
IdentityRegistry replay_registry(const Chain& chain);

template <typename T>
struct Committed {
    Chain chain;
    T value;
    ConsensusResult consensus;
};

Committed<IdentityRecord> register_identity(const Chain& chain, const std::string& drone_id,
                                            const std::string& provider, const std::string& credential,
                                            const ConsensusParams& consensus, SimTime timestamp_us = 0);

Committed<IdentityRecord> revoke_identity(const Chain& chain, const std::string& drone_id,
                                          const ConsensusParams& consensus, SimTime timestamp_us = 0);

constexpr int kAuthControlMessages = 2;

struct AuthResult {
    bool authentic = false;
    int control_messages = kAuthControlMessages;
};

/// Challenge/response identity check against the registry replayed from `chain`.
AuthResult authenticate(const Chain& chain, const std::string& drone_id, const std::string& presented_credential);
AuthResult authenticate(const IdentityRegistry& registry, const std::string& drone_id,
                        const std::string& presented_credential);

/// Commits a ContractSignature. `area` bounds the permitted service area.
Committed<DroneContract> sign_contract(const Chain& chain, const DroneContract& terms, const Rect& area,
                                       const ConsensusParams& consensus, SimTime timestamp_us = 0);

/// Registers a fleet and signs its contracts in one block (one consensus
/// round). Every contract must name a drone registered in the same batch or
/// already Active on the chain; the block is proposed by `proposer`.
Committed<std::size_t> provision_fleet(const Chain& chain, std::span<const IdentityRecord> identities,
                                       std::span<const DroneContract> contracts, const Rect& area,
                                       const ConsensusParams& consensus, const std::string& proposer,
                                       SimTime timestamp_us = 0);

std::vector<DroneContract> contracts_for(const Chain& chain, const std::string& provider, const std::string& drone_id);

}  // namespace uavsim
