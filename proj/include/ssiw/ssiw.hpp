#pragma once

#include <ssiw/core.hpp>
#include <ssiw/curves.hpp>
#include <ssiw/linalg.hpp>
#include <ssiw/mazur_tate.hpp>
#include <ssiw/modsym.hpp>
#include <ssiw/padic_poly.hpp>
#include <ssiw/report.hpp>
#include <ssiw/selftest.hpp>
