#pragma once

// JSON snapshot format:
//   {"nodes":    [{"id": int}, ...],
//    "channels": [{"id": int, "u": int, "v": int, "cap_uv": int, "cap_vu": int}, ...],
//    "fees":     [{"node": int, "fee": int}, ...],
//    "fee_mode": "fixed" | "proportional"}        (optional, default fixed)
// Amounts are integer base units. Channel entries repeating an id are merged
// (last one wins).

#include <filesystem>
#include <string>

#include "cryptomaze/pcn/graph.hpp"

namespace cryptomaze::pcn {

/// Throws ParseError (with line or field path) or ValidationError.
PaymentGraph load_snapshot(const std::filesystem::path& path);
PaymentGraph parse_snapshot(const std::string& text);

std::string dump_snapshot(const PaymentGraph& graph);
void save_snapshot(const PaymentGraph& graph, const std::filesystem::path& path);

}  // namespace cryptomaze::pcn
