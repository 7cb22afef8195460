// qdicke.hpp — umbrella header

#pragma once

#include "qdicke/model.hpp"
#include "qdicke/meanfield.hpp"
#include "qdicke/spectrum.hpp"
#include "qdicke/finite_size.hpp"
#include "qdicke/circuit.hpp"
#include "qdicke/sweep.hpp"
