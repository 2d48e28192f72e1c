#pragma once

#include "lm/bounded_set.hpp"
#include "lm/core.hpp"
#include "lm/errors.hpp"
#include "lm/expr.hpp"
#include "lm/laws.hpp"
#include "lm/parse.hpp"
#include "lm/q88.hpp"
#include "lm/rational.hpp"
#include "lm/vm.hpp"
