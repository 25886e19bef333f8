// ambiguity.hpp -- umbrella header for the ambiguity-kit library.
#pragma once

#include "ambiguity/ambiguity_function.hpp"
#include "ambiguity/attitudes.hpp"
#include "ambiguity/core.hpp"
#include "ambiguity/duality.hpp"
#include "ambiguity/models.hpp"
#include "ambiguity/risksharing.hpp"
