#pragma once

#include "chiral/trajectories/trajectory.hpp"
#include "chiral/trajectories/unravel.hpp"
