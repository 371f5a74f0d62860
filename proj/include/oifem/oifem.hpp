#pragma once

#include <oifem/error.hpp>
#include <oifem/nfunction.hpp>
#include <oifem/constitutive.hpp>
#include <oifem/mesh.hpp>
#include <oifem/space.hpp>
#include <oifem/assembly.hpp>
#include <oifem/solver.hpp>
#include <oifem/dualcheck.hpp>
#include <oifem/config.hpp>
#include <oifem/driver.hpp>
