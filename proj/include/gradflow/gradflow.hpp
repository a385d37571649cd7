#pragma once

#include "gradflow/admissibility.hpp"
#include "gradflow/controller.hpp"
#include "gradflow/kinematics.hpp"
#include "gradflow/potential.hpp"
#include "gradflow/simulator.hpp"
