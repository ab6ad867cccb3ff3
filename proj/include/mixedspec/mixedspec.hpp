#pragma once

// Umbrella header.

#include "mixedspec/assembly.hpp"
#include "mixedspec/basis.hpp"
#include "mixedspec/dispersion.hpp"
#include "mixedspec/eigensolve.hpp"
#include "mixedspec/linalg.hpp"
#include "mixedspec/operators.hpp"
#include "mixedspec/quadrature.hpp"
#include "mixedspec/report.hpp"
#include "mixedspec/study.hpp"
#include "mixedspec/version.hpp"
