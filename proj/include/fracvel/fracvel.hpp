#pragma once

#include "fracvel/errors.hpp"
#include "fracvel/numeric_core.hpp"
#include "fracvel/exact_scalar.hpp"
#include "fracvel/signal.hpp"
#include "fracvel/derham.hpp"
#include "fracvel/scaleops.hpp"
#include "fracvel/fraccalc.hpp"
