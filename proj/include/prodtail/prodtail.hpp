#pragma once

// Right-tail probabilities P(X_1 ... X_n > x) for independent normal
// factors: closed-form asymptotics, exact per-pattern saddle sums, and
// quadrature / Monte Carlo ground truth.

#include "prodtail/asymptotic.hpp"
#include "prodtail/errors.hpp"
#include "prodtail/estimate.hpp"
#include "prodtail/logspace.hpp"
#include "prodtail/model.hpp"
#include "prodtail/normal.hpp"
#include "prodtail/oracle.hpp"
#include "prodtail/saddle.hpp"
#include "prodtail/signpat.hpp"
