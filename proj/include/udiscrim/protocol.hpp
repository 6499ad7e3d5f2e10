#pragma once

// LOCC discrimination of black-box gates: oracle, transcripts, input
// construction, the two-step local measurement and full protocol runs.

#include "udiscrim/protocol/discriminate.hpp"
#include "udiscrim/protocol/local_input.hpp"
#include "udiscrim/protocol/oracle.hpp"
#include "udiscrim/protocol/plan.hpp"
#include "udiscrim/protocol/state.hpp"
#include "udiscrim/protocol/walgate.hpp"
