#pragma once

// Umbrella header for the SPR layered-media toolkit.

#include "spr/constants.hpp"
#include "spr/csv.hpp"
#include "spr/error.hpp"
#include "spr/golden_section.hpp"
#include "spr/inversion.hpp"
#include "spr/layer.hpp"
#include "spr/linear_fit.hpp"
#include "spr/optics.hpp"
#include "spr/resonance.hpp"
#include "spr/root_bracket.hpp"
#include "spr/sensogram.hpp"
#include "spr/stack_io.hpp"
