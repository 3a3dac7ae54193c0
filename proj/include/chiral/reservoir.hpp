#pragma once

#include "chiral/reservoir/bdg.hpp"
#include "chiral/reservoir/channels.hpp"
#include "chiral/reservoir/physical.hpp"
#include "chiral/reservoir/plane_wave.hpp"
#include "chiral/reservoir/validity.hpp"
