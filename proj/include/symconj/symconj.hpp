#pragma once

#include "errors.hpp"
#include "word.hpp"
#include "shift_space.hpp"
#include "cylinder_function.hpp"
#include "shift_map.hpp"
#include "orbit_equiv.hpp"
#include "invariants.hpp"
