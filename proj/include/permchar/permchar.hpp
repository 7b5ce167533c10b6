#pragma once

#include "permchar/errors.hpp"
#include "permchar/rng.hpp"
#include "permchar/measures.hpp"
#include "permchar/permutations.hpp"
#include "permchar/wreath.hpp"
#include "permchar/diophantine.hpp"
#include "permchar/stats.hpp"
#include "permchar/evaluator.hpp"
#include "permchar/io.hpp"
#include "permchar/harness.hpp"
