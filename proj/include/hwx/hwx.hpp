#pragma once

#include "hwx/error.hpp"
#include "hwx/interval.hpp"
#include "hwx/quadrature.hpp"
#include "hwx/modulus.hpp"
#include "hwx/poly.hpp"
#include "hwx/compact_set.hpp"
#include "hwx/jets.hpp"
#include "hwx/discrepancy.hpp"
#include "hwx/certify.hpp"
#include "hwx/bump.hpp"
#include "hwx/whitney.hpp"
#include "hwx/perturb.hpp"
#include "hwx/lift.hpp"
#include "hwx/counterexample.hpp"
#include "hwx/io.hpp"
