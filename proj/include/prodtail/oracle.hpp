#pragma once

#include "prodtail/montecarlo.hpp"
#include "prodtail/quadrature.hpp"
