#pragma once

#include "branches.hpp"
#include "chirp.hpp"
#include "config.hpp"
#include "control.hpp"
#include "crossings.hpp"
#include "ensemble.hpp"
#include "error.hpp"
#include "io.hpp"
#include "lab_frame.hpp"
#include "ladder.hpp"
#include "linalg.hpp"
#include "propagator.hpp"
#include "synthesis.hpp"
#include "tridiagonal.hpp"
