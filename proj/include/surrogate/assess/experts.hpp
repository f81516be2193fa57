#pragma once

#include "surrogate/assess/agent.hpp"
#include "surrogate/assess/arat.hpp"

namespace surrogate {

/// Drives up to the shelf, grasps the bottle, lifts it, turns to the
/// mannequin and brings the straw tip to the mouth. Throws AgentFailure.
void selfcare_expert(Agent& agent, Side side = Side::right);

/// One ARAT item with the assessment restriction in force (head, one gripper,
/// one hand): place the object on the target, tip the glass over the target
/// glass, or touch the target point.
void arat_expert(Agent& agent, const AratItem& item, Side side);

/// Slower, noisier operator for the same scripts: click scatter and a pause
/// before each manipulation command.
AgentOptions mid_skill_options(std::uint64_t seed = 11);

}  // namespace surrogate
