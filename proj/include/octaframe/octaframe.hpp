#pragma once

#include "descent.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "octahedral.hpp"
#include "projection.hpp"
#include "random.hpp"
#include "semisymmetry.hpp"
#include "sh3.hpp"
