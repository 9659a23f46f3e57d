#pragma once

#include "abconv/config.hpp"
#include "abconv/elementary.hpp"
#include "abconv/objective.hpp"
#include "abconv/search.hpp"
#include "abconv/conjugate.hpp"
#include "abconv/duality.hpp"
#include "abconv/lagrange.hpp"
#include "abconv/harness.hpp"
#include "abconv/report.hpp"
