// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header: pilot sequence construction, measurement operator
// algebra, sparse recovery, and the Monte Carlo experiment harness.

#pragma once

#include "pilotcs/channel.hpp"
#include "pilotcs/correlation.hpp"
#include "pilotcs/fft.hpp"
#include "pilotcs/harness.hpp"
#include "pilotcs/measurement.hpp"
#include "pilotcs/pilot.hpp"
#include "pilotcs/recovery.hpp"
#include "pilotcs/rng.hpp"
#include "pilotcs/seqgen.hpp"
#include "pilotcs/sequence.hpp"
