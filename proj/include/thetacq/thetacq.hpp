#pragma once

#include "thetacq/checks.hpp"
#include "thetacq/csv.hpp"
#include "thetacq/experiments.hpp"
#include "thetacq/fem1d.hpp"
#include "thetacq/mittag_leffler.hpp"
#include "thetacq/polynomial.hpp"
#include "thetacq/stepper.hpp"
#include "thetacq/weights.hpp"
