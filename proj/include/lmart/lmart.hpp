#pragma once

#include "lmart/cli.hpp"
#include "lmart/errors.hpp"
#include "lmart/expectation.hpp"
#include "lmart/gundy.hpp"
#include "lmart/harness.hpp"
#include "lmart/martingale.hpp"
#include "lmart/riemann.hpp"
#include "lmart/riesz.hpp"
#include "lmart/serialize.hpp"
#include "lmart/weaktype.hpp"
