#pragma once

#include "adiabatic/analysis.hpp"
#include "adiabatic/counterexample.hpp"
#include "adiabatic/errors.hpp"
#include "adiabatic/hamiltonian.hpp"
#include "adiabatic/io.hpp"
#include "adiabatic/numerics.hpp"
#include "adiabatic/pipeline.hpp"
#include "adiabatic/propagation.hpp"
#include "adiabatic/spectral.hpp"
#include "adiabatic/spinhalf.hpp"
