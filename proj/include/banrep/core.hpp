#pragma once

#include "banrep/core/atoms.hpp"
#include "banrep/core/errors.hpp"
#include "banrep/core/linalg.hpp"
#include "banrep/core/loss.hpp"
#include "banrep/core/problem.hpp"
#include "banrep/core/types.hpp"
