#pragma once

#include "beq/commands.hpp"
#include "beq/config.hpp"
#include "beq/core.hpp"
#include "beq/diagnostics.hpp"
#include "beq/grid.hpp"
#include "beq/integrate.hpp"
#include "beq/interp.hpp"
#include "beq/multiplier.hpp"
#include "beq/output.hpp"
#include "beq/scenarios.hpp"
#include "beq/version.hpp"
