#include "uavsim/chain_io.hpp"

#include <sstream>

#include <json.hpp>

namespace uavsim {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kFormat = "uavsim-chain/1";

ordered_json payload_json(const Transaction& tx) {
    ordered_json p = ordered_json::object();
    if (const auto* r = std::get_if<IdentityRecord>(&tx.payload)) {
        p["drone_id"] = r->drone_id;
        p["provider"] = r->provider;
        p["credential"] = r->credential;
        p["status"] = std::string(identity_status_name(r->status));
    } else if (const auto* d = std::get_if<DeliveryReceipt>(&tx.payload)) {
        p["session_id"] = d->session_id;
        p["src"] = d->src;
        p["dst"] = d->dst;
        p["packets_sent"] = d->packets_sent;
        p["packets_delivered"] = d->packets_delivered;
        p["relays"] = d->relays;
    } else {
        const auto& k = std::get<DroneContract>(tx.payload);
        p["provider"] = k.provider;
        p["drone_id"] = k.drone_id;
        p["service_area"] = {k.service_area.x0, k.service_area.y0, k.service_area.x1, k.service_area.y1};
        p["resource_commitment"] = k.resource_commitment;
        p["valid_from_s"] = k.valid_from_s;
        p["valid_to_s"] = k.valid_to_s;
    }
    return p;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ChainParseError("line " + std::to_string(line) + ": " + what);
}

template <typename T>
T field(const ordered_json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(line, std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(line, std::string("field '") + key + "' has the wrong type");
    }
}

Digest digest_field(const ordered_json& obj, const char* key, std::size_t line) {
    auto d = parse_digest_hex(field<std::string>(obj, key, line));
    if (!d) fail(line, std::string("field '") + key + "' is not a 16-digit hex digest");
    return *d;
}

Transaction parse_tx(const ordered_json& j, std::size_t line) {
    if (!j.is_object()) fail(line, "transaction is not an object");
    Transaction tx;
    tx.author = field<std::string>(j, "author", line);
    tx.credential_token = field<std::string>(j, "credential_token", line);
    const auto kind = field<std::string>(j, "kind", line);
    auto pit = j.find("payload");
    if (pit == j.end()) fail(line, "missing field 'payload'");
    const auto& p = *pit;
    if (!p.is_object()) fail(line, "payload is not an object");
    if (kind == tx_kind_name(TxKind::IdentityRegistration)) {
        IdentityRecord r;
        r.drone_id = field<std::string>(p, "drone_id", line);
        r.provider = field<std::string>(p, "provider", line);
        r.credential = field<std::string>(p, "credential", line);
        const auto status = field<std::string>(p, "status", line);
        if (status == "Active") {
            r.status = IdentityStatus::Active;
        } else if (status == "Revoked") {
            r.status = IdentityStatus::Revoked;
        } else {
            fail(line, "unknown identity status '" + status + "'");
        }
        tx.payload = r;
    } else if (kind == tx_kind_name(TxKind::DeliveryReceipt)) {
        DeliveryReceipt d;
        d.session_id = field<std::uint64_t>(p, "session_id", line);
        d.src = field<std::string>(p, "src", line);
        d.dst = field<std::string>(p, "dst", line);
        d.packets_sent = field<std::uint32_t>(p, "packets_sent", line);
        d.packets_delivered = field<std::uint32_t>(p, "packets_delivered", line);
        d.relays = field<std::vector<std::string>>(p, "relays", line);
        tx.payload = d;
    } else if (kind == tx_kind_name(TxKind::ContractSignature)) {
        DroneContract k;
        k.provider = field<std::string>(p, "provider", line);
        k.drone_id = field<std::string>(p, "drone_id", line);
        const auto area = field<std::vector<double>>(p, "service_area", line);
        if (area.size() != 4) fail(line, "service_area must have 4 numbers");
        k.service_area = {area[0], area[1], area[2], area[3]};
        k.resource_commitment = field<std::string>(p, "resource_commitment", line);
        k.valid_from_s = field<double>(p, "valid_from_s", line);
        k.valid_to_s = field<double>(p, "valid_to_s", line);
        tx.payload = k;
    } else {
        fail(line, "unknown transaction kind '" + kind + "'");
    }
    return tx;
}

}  // namespace

std::string export_chain(const Chain& chain) {
    std::string out;
    ordered_json header = ordered_json::object();
    header["format"] = std::string(kFormat);
    header["mode"] = std::string(chain_mode_name(chain.mode));
    header["members"] = ordered_json::array();
    for (const auto& m : chain.members) header["members"].push_back(m);
    out += header.dump();
    out += '\n';

    for (const auto& b : chain.blocks) {
        ordered_json j = ordered_json::object();
        j["index"] = b.index;
        j["prev_hash"] = digest_hex(b.prev_hash);
        j["hash"] = digest_hex(b.hash);
        j["proposer"] = b.proposer;
        j["timestamp_us"] = b.timestamp_us;
        j["transactions"] = ordered_json::array();
        for (const auto& tx : b.transactions) {
            ordered_json t = ordered_json::object();
            t["kind"] = std::string(tx_kind_name(tx.kind()));
            t["author"] = tx.author;
            t["credential_token"] = tx.credential_token;
            t["payload"] = payload_json(tx);
            j["transactions"].push_back(std::move(t));
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

Chain import_chain(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    bool have_header = false;
    Chain chain;

    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(raw);
        } catch (const nlohmann::json::parse_error& e) {
            fail(line, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) fail(line, "expected a JSON object");

        if (!have_header) {
            if (field<std::string>(j, "format", line) != kFormat) fail(line, "unsupported chain format");
            const auto mode = field<std::string>(j, "mode", line);
            if (mode == "public") {
                chain.mode = ChainMode::Public;
            } else if (mode == "private") {
                chain.mode = ChainMode::Private;
            } else {
                fail(line, "unknown chain mode '" + mode + "'");
            }
            for (const auto& m : field<std::vector<std::string>>(j, "members", line)) chain.members.insert(m);
            have_header = true;
            continue;
        }

        Block b;
        b.index = field<std::uint64_t>(j, "index", line);
        b.prev_hash = digest_field(j, "prev_hash", line);
        b.hash = digest_field(j, "hash", line);
        b.proposer = field<std::string>(j, "proposer", line);
        b.timestamp_us = field<std::int64_t>(j, "timestamp_us", line);
        const auto txs = j.find("transactions");
        if (txs == j.end() || !txs->is_array()) fail(line, "missing transactions array");
        for (const auto& t : *txs) b.transactions.push_back(parse_tx(t, line));
        chain.blocks.push_back(std::move(b));
    }

    if (!have_header) throw ChainParseError("empty chain export");
    if (chain.blocks.empty()) throw ChainParseError("chain export has no blocks");
    return chain;
}

}  // namespace uavsim
