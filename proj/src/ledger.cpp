#include "uavsim/ledger.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "uavsim/rng.hpp"

namespace uavsim {

std::string digest_hex(Digest d) {
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(d));
    return std::string(buf.data(), 16);
}

std::optional<Digest> parse_digest_hex(std::string_view hex) {
    if (hex.size() != 16) return std::nullopt;
    Digest d = 0;
    auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), d, 16);
    if (ec != std::errc{} || ptr != hex.data() + hex.size()) return std::nullopt;
    return d;
}

std::string_view tx_kind_name(TxKind k) {
    switch (k) {
        case TxKind::IdentityRegistration: return "IdentityRegistration";
        case TxKind::DeliveryReceipt: return "DeliveryReceipt";
        case TxKind::ContractSignature: return "ContractSignature";
    }
    return "?";
}

std::string_view identity_status_name(IdentityStatus s) {
    return s == IdentityStatus::Active ? "Active" : "Revoked";
}

std::string_view chain_mode_name(ChainMode m) { return m == ChainMode::Public ? "public" : "private"; }

TxKind Transaction::kind() const {
    switch (payload.index()) {
        case 0: return TxKind::IdentityRegistration;
        case 1: return TxKind::DeliveryReceipt;
        default: return TxKind::ContractSignature;
    }
}

namespace {

class Canon {
public:
    Canon& str(std::string_view s) {
        out_ += std::to_string(s.size());
        out_ += ':';
        out_ += s;
        return sep();
    }
    Canon& u64(std::uint64_t v) {
        out_ += std::to_string(v);
        return sep();
    }
    Canon& i64(std::int64_t v) {
        out_ += std::to_string(v);
        return sep();
    }
    Canon& f64(double v) {
        std::array<char, 64> buf{};
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        out_.append(buf.data(), ptr);
        return sep();
    }
    Canon& raw(std::string_view s) {
        out_ += s;
        return sep();
    }
    std::string take() { return std::move(out_); }

private:
    Canon& sep() {
        out_ += '|';
        return *this;
    }
    std::string out_;
};

void canon_payload(Canon& c, const IdentityRecord& r) {
    c.str(r.drone_id).str(r.provider).str(r.credential).raw(identity_status_name(r.status));
}

void canon_payload(Canon& c, const DeliveryReceipt& r) {
    c.u64(r.session_id).str(r.src).str(r.dst).u64(r.packets_sent).u64(r.packets_delivered).u64(r.relays.size());
    for (const auto& relay : r.relays) c.str(relay);
}

void canon_payload(Canon& c, const DroneContract& k) {
    c.str(k.provider).str(k.drone_id);
    c.f64(k.service_area.x0).f64(k.service_area.y0).f64(k.service_area.x1).f64(k.service_area.y1);
    c.str(k.resource_commitment).f64(k.valid_from_s).f64(k.valid_to_s);
}

ConsensusResult require_commit(const ConsensusParams& p, std::span<const Transaction> txs) {
    auto r = consensus_commit(p.validators, p.faulty, txs);
    if (!r.committed) {
        throw LedgerError("consensus did not commit: " + std::to_string(p.validators) + " validators cannot tolerate " +
                          std::to_string(p.faulty) + " faulty");
    }
    return r;
}

void check_contract_terms(const DroneContract& terms, const Rect& area) {
    if (!(terms.valid_from_s < terms.valid_to_s)) throw LedgerError("contract validity window is empty or inverted");
    const Rect& s = terms.service_area;
    if (!(s.x0 <= s.x1 && s.y0 <= s.y1) || s.x0 < area.x0 || s.y0 < area.y0 || s.x1 > area.x1 || s.y1 > area.y1) {
        throw LedgerError("contract service area lies outside the simulation area");
    }
}

}  // namespace

std::string canonical_transaction(const Transaction& tx) {
    Canon c;
    c.raw("tx").raw(tx_kind_name(tx.kind())).str(tx.author).str(tx.credential_token);
    std::visit([&](const auto& p) { canon_payload(c, p); }, tx.payload);
    return c.take();
}

std::string canonical_block(const Block& block) {
    Canon c;
    c.raw("blk").u64(block.index).raw(digest_hex(block.prev_hash)).u64(block.transactions.size());
    for (const auto& tx : block.transactions) c.raw(canonical_transaction(tx));
    c.str(block.proposer).i64(block.timestamp_us);
    return c.take();
}

Digest compute_block_hash(const Block& block) { return fnv1a64(canonical_block(block)); }

Chain genesis(ChainMode mode, std::set<std::string> members) {
    if (mode == ChainMode::Private && members.empty()) throw LedgerError("private chain requires at least one member");
    Chain chain;
    chain.mode = mode;
    if (mode == ChainMode::Private) chain.members = std::move(members);
    Block g;
    g.index = 0;
    g.prev_hash = 0;
    g.proposer = "genesis";
    g.timestamp_us = 0;
    g.hash = compute_block_hash(g);
    chain.blocks.push_back(std::move(g));
    return chain;
}

Chain append_block(const Chain& chain, std::vector<Transaction> txs, const std::string& proposer,
                   std::optional<SimTime> timestamp_us) {
    if (chain.blocks.empty()) throw LedgerError("chain has no genesis block");
    if (txs.empty()) throw LedgerError("cannot append a block with no transactions");
    if (!chain.is_member(proposer)) throw LedgerError("proposer '" + proposer + "' is not a member of the private chain");
    for (const auto& tx : txs) {
        if (!chain.is_member(tx.author)) {
            throw LedgerError("transaction author '" + tx.author + "' is not a member of the private chain");
        }
    }
    const Block& prev = chain.tip();
    Block b;
    b.index = prev.index + 1;
    b.prev_hash = prev.hash;
    b.transactions = std::move(txs);
    b.proposer = proposer;
    b.timestamp_us = timestamp_us.value_or(prev.timestamp_us);
    if (b.timestamp_us < prev.timestamp_us) throw LedgerError("block timestamp precedes its predecessor");
    b.hash = compute_block_hash(b);

    Chain next = chain;
    next.blocks.push_back(std::move(b));
    return next;
}

std::optional<std::uint64_t> first_invalid_block(const Chain& chain) {
    if (chain.blocks.empty()) return 0;
    for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
        const Block& b = chain.blocks[i];
        if (b.index != i) return i;
        if (b.hash != compute_block_hash(b)) return i;
        if (i == 0 ? b.prev_hash != 0 : b.prev_hash != chain.blocks[i - 1].hash) return i;
    }
    return std::nullopt;
}

bool verify_chain(const Chain& chain) { return !first_invalid_block(chain).has_value(); }

ConsensusResult consensus_commit(int validators, int faulty, std::span<const Transaction> /*txs*/) {
    if (validators < 1) throw LedgerError("consensus requires at least one validator");
    if (faulty < 0 || faulty > validators) throw LedgerError("faulty validator count out of range");

    const auto n = static_cast<std::uint64_t>(validators);
    std::uint64_t messages = 0;
    // pre-prepare: primary (replica 0) to each backup
    for (std::uint64_t to = 1; to < n; ++to) ++messages;
    // prepare, then commit: every replica to every other replica
    for (int phase = 0; phase < 2; ++phase) {
        for (std::uint64_t from = 0; from < n; ++from) {
            for (std::uint64_t to = 0; to < n; ++to) {
                if (from != to) ++messages;
            }
        }
    }
    // A quorum of 2f+1 matching votes among the n−f honest replicas.
    const bool committed = validators - faulty >= 2 * faulty + 1;
    return {committed, messages};
}

IdentityRegistry replay_registry(const Chain& chain) {
    IdentityRegistry registry;
    for (const auto& block : chain.blocks) {
        for (const auto& tx : block.transactions) {
            if (const auto* rec = std::get_if<IdentityRecord>(&tx.payload)) registry[rec->drone_id] = *rec;
        }
    }
    return registry;
}

Committed<IdentityRecord> register_identity(const Chain& chain, const std::string& drone_id,
                                            const std::string& provider, const std::string& credential,
                                            const ConsensusParams& consensus, SimTime timestamp_us) {
    const auto registry = replay_registry(chain);
    if (auto it = registry.find(drone_id); it != registry.end() && it->second.status == IdentityStatus::Active) {
        throw LedgerError("drone '" + drone_id + "' already has an active identity");
    }
    IdentityRecord rec{drone_id, provider, credential, IdentityStatus::Active};
    std::vector<Transaction> txs{Transaction{rec, provider, credential}};
    auto result = require_commit(consensus, txs);
    auto next = append_block(chain, std::move(txs), provider, timestamp_us);
    return {std::move(next), rec, result};
}

Committed<IdentityRecord> revoke_identity(const Chain& chain, const std::string& drone_id,
                                          const ConsensusParams& consensus, SimTime timestamp_us) {
    const auto registry = replay_registry(chain);
    auto it = registry.find(drone_id);
    if (it == registry.end() || it->second.status != IdentityStatus::Active) {
        throw LedgerError("drone '" + drone_id + "' has no active identity to revoke");
    }
    IdentityRecord rec = it->second;
    rec.status = IdentityStatus::Revoked;
    std::vector<Transaction> txs{Transaction{rec, rec.provider, rec.credential}};
    auto result = require_commit(consensus, txs);
    auto next = append_block(chain, std::move(txs), rec.provider, timestamp_us);
    return {std::move(next), rec, result};
}

AuthResult authenticate(const IdentityRegistry& registry, const std::string& drone_id,
                        const std::string& presented_credential) {
    auto it = registry.find(drone_id);
    const bool ok = it != registry.end() && it->second.status == IdentityStatus::Active &&
                    it->second.credential == presented_credential;
    return {ok, kAuthControlMessages};
}

AuthResult authenticate(const Chain& chain, const std::string& drone_id, const std::string& presented_credential) {
    return authenticate(replay_registry(chain), drone_id, presented_credential);
}

Committed<DroneContract> sign_contract(const Chain& chain, const DroneContract& terms, const Rect& area,
                                       const ConsensusParams& consensus, SimTime timestamp_us) {
    const auto registry = replay_registry(chain);
    auto it = registry.find(terms.drone_id);
    if (it == registry.end() || it->second.status != IdentityStatus::Active) {
        throw LedgerError("drone '" + terms.drone_id + "' is not registered");
    }
    check_contract_terms(terms, area);
    std::vector<Transaction> txs{Transaction{terms, terms.provider, it->second.credential}};
    auto result = require_commit(consensus, txs);
    auto next = append_block(chain, std::move(txs), terms.provider, timestamp_us);
    return {std::move(next), terms, result};
}

Committed<std::size_t> provision_fleet(const Chain& chain, std::span<const IdentityRecord> identities,
                                       std::span<const DroneContract> contracts, const Rect& area,
                                       const ConsensusParams& consensus, const std::string& proposer,
                                       SimTime timestamp_us) {
    auto registry = replay_registry(chain);
    std::vector<Transaction> txs;
    for (const auto& rec : identities) {
        if (auto it = registry.find(rec.drone_id); it != registry.end() && it->second.status == IdentityStatus::Active) {
            throw LedgerError("drone '" + rec.drone_id + "' already has an active identity");
        }
        if (rec.status != IdentityStatus::Active) throw LedgerError("provisioned identities must be Active");
        registry[rec.drone_id] = rec;
        txs.push_back(Transaction{rec, rec.provider, rec.credential});
    }
    for (const auto& terms : contracts) {
        auto it = registry.find(terms.drone_id);
        if (it == registry.end() || it->second.status != IdentityStatus::Active) {
            throw LedgerError("drone '" + terms.drone_id + "' is not registered");
        }
        check_contract_terms(terms, area);
        txs.push_back(Transaction{terms, terms.provider, it->second.credential});
    }
    const std::size_t count = txs.size();
    auto result = require_commit(consensus, txs);
    auto next = append_block(chain, std::move(txs), proposer, timestamp_us);
    return {std::move(next), count, result};
}

std::vector<DroneContract> contracts_for(const Chain& chain, const std::string& provider, const std::string& drone_id) {
    std::vector<DroneContract> out;
    for (const auto& block : chain.blocks) {
        for (const auto& tx : block.transactions) {
            if (const auto* k = std::get_if<DroneContract>(&tx.payload)) {
                if (k->provider == provider && k->drone_id == drone_id) out.push_back(*k);
            }
        }
    }
    return out;
}

}  // namespace uavsim
