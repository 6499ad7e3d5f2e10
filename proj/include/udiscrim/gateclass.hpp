#pragma once

// Structural analysis of gates: operator-Schmidt primitivity, two-qubit
// canonical decomposition and Lie-algebra closure.

#include "udiscrim/gateclass/kak.hpp"
#include "udiscrim/gateclass/schmidt.hpp"
#include "udiscrim/gateclass/lie.hpp"
