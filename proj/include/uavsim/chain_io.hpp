#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "uavsim/ledger.hpp"

namespace uavsim {

class ChainParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Line-delimited JSON export. Line 1 is a header
///   {"format":"uavsim-chain/1","mode":"public"|"private","members":[...]}
/// followed by one block per line with keys in the order
///   index, prev_hash, hash, proposer, timestamp_us, transactions.
/// Digests are 16 lowercase hex digits.
std::string export_chain(const Chain& chain);

/// Parses an export without verifying it; throws ChainParseError on malformed input.
Chain import_chain(std::string_view text);

}  // namespace uavsim
