#pragma once

#include "locc/audit.hpp"
#include "locc/counterexamples.hpp"
#include "locc/decide.hpp"
#include "locc/errors.hpp"
#include "locc/lp.hpp"
#include "locc/monotones.hpp"
#include "locc/report.hpp"
#include "locc/sampling.hpp"
#include "locc/states.hpp"
#include "locc/tolerance.hpp"
