#pragma once

#include <string>

namespace jdlab {

struct CampaignOutcome {
    int exit_code = 0;      // 0 ok, 2 validation, 3 numeric, 4 io
    std::string message;    // human-readable error description when nonzero
};

// Parses and validates a campaign configuration, runs the requested
// command, and writes result CSVs plus a manifest into out_dir. Validation
// problems are collected and reported together. Nothing is written when
// the run fails.
CampaignOutcome run_campaign(const std::string& config_text, const std::string& out_dir,
                             int workers);

} // namespace jdlab
