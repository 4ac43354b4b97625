#pragma once

#include "owl/dataset.hpp"
#include "owl/duality.hpp"
#include "owl/screening.hpp"
#include "owl/serialize.hpp"
#include "owl/solvers.hpp"
#include "owl/sorted_l1.hpp"
#include "owl/types.hpp"
