#pragma once

#include "beric/bakry_emery.hpp"
#include "beric/chart.hpp"
#include "beric/config.hpp"
#include "beric/cosmology.hpp"
#include "beric/error.hpp"
#include "beric/expr.hpp"
#include "beric/field_eq.hpp"
#include "beric/geometry.hpp"
#include "beric/jet.hpp"
#include "beric/model.hpp"
#include "beric/random_model.hpp"
#include "beric/report.hpp"
#include "beric/variation.hpp"
