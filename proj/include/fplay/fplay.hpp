#pragma once

#include "fplay/analysis.hpp"
#include "fplay/dynamics.hpp"
#include "fplay/errors.hpp"
#include "fplay/experiments.hpp"
#include "fplay/gap.hpp"
#include "fplay/io.hpp"
#include "fplay/matrix.hpp"
#include "fplay/random.hpp"
#include "fplay/verify.hpp"
