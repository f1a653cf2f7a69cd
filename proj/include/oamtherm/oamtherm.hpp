#pragma once

#include "oamtherm/config.hpp"
#include "oamtherm/io.hpp"
#include "oamtherm/kernel.hpp"
#include "oamtherm/modes.hpp"
#include "oamtherm/optics.hpp"
#include "oamtherm/pipeline.hpp"
#include "oamtherm/reconstruct.hpp"
#include "oamtherm/rng.hpp"
#include "oamtherm/stats.hpp"
#include "oamtherm/thermal.hpp"
