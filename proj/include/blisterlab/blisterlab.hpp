#pragma once
// Everything at once.

#include "chebyshev.hpp"
#include "construct1d.hpp"
#include "construct2d.hpp"
#include "core.hpp"
#include "energy.hpp"
#include "minimize.hpp"
#include "parallel.hpp"
#include "scaling.hpp"
