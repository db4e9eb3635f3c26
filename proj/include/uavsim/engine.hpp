#pragma once

#include "uavsim/config.hpp"
#include "uavsim/ledger.hpp"
#include "uavsim/metrics.hpp"

namespace uavsim {

/// Report plus the ledgers a run produced. Both chains hold only their
/// genesis block for schemes without a ledger.
struct RunResult {
    MetricsReport report;
    /// Permissioned chain of the providers: identities and drone contracts.
    Chain private_chain;
    /// Open chain of delivery receipts.
    Chain public_chain;
};

/// Simulates `config.duration_s` seconds. A pure function of the config,
/// seed included. Throws ConfigValidationError for an invalid config.
RunResult run_with_ledger(const SimConfig& config);

MetricsReport run(const SimConfig& config);

}  // namespace uavsim
