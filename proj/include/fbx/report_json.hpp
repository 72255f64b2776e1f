#pragma once

// JSON views of the report structs. Field names are stable; numbers are
// emitted with full round-trip precision and non-finite values as null.

#include <json.hpp>

#include "fbx/awgn_bounds.hpp"
#include "fbx/feedback_sim.hpp"
#include "fbx/hypothesis.hpp"
#include "fbx/parallel.hpp"

namespace fbx {

nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const ParallelBoundReport& r);
nlohmann::json to_json(const PowerAllocation& a, const ParallelSpec& spec);
nlohmann::json to_json(const StrongConverseReport& r);
nlohmann::json to_json(const MetaconverseReport& r);
nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const MgfPoint& p);
nlohmann::json to_json(const BerryEsseenRow& r);
nlohmann::json to_json(const VarianceEstimate& v);

/// Summary of a batch without the per-trial traces.
nlohmann::json summary_json(const SimBatch& batch);

}  // namespace fbx
