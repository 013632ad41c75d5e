#pragma once

#include <string>

#include <json.hpp>

#include "iit/pipeline.hpp"

namespace iit {

// Machine-readable run record: resolved parameters, per-plane energy triples
// at source/exemplar/output, solver reports, clamp count and timings.
// Schema is versioned under the "schema" key.
nlohmann::json run_report(const TransferDiagnostics& diag);

void write_report(const std::string& path, const TransferDiagnostics& diag);

}  // namespace iit
