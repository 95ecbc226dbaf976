#pragma once

#include <panopt/alm.hpp>
#include <panopt/box.hpp>
#include <panopt/lbfgs.hpp>
#include <panopt/panoc.hpp>
#include <panopt/problem.hpp>
#include <panopt/problems/analytic.hpp>
#include <panopt/problems/chain.hpp>
#include <panopt/problems/mpc.hpp>
#include <panopt/problems/suite.hpp>
#include <panopt/prox.hpp>
#include <panopt/structured.hpp>
#include <panopt/types.hpp>
#include <panopt/variants.hpp>
