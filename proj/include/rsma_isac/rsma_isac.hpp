#pragma once

#include "rsma_isac/calibration.hpp"
#include "rsma_isac/channels.hpp"
#include "rsma_isac/comms.hpp"
#include "rsma_isac/error.hpp"
#include "rsma_isac/export.hpp"
#include "rsma_isac/geometry.hpp"
#include "rsma_isac/precoder.hpp"
#include "rsma_isac/radar.hpp"
#include "rsma_isac/region.hpp"
#include "rsma_isac/rng.hpp"
#include "rsma_isac/scenario.hpp"
