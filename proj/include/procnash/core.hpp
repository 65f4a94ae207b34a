#pragma once

#include "procnash/core/errors.hpp"
#include "procnash/core/exploitability.hpp"
#include "procnash/core/payoff_matrix.hpp"
#include "procnash/core/strategy.hpp"
#include "procnash/core/tolerances.hpp"
#include "procnash/core/transforms.hpp"
