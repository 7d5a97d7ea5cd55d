#pragma once

#include "mqb/analytics.hpp"
#include "mqb/collision.hpp"
#include "mqb/dissipation.hpp"
#include "mqb/hilbert.hpp"
#include "mqb/io.hpp"
#include "mqb/observables.hpp"
#include "mqb/runner.hpp"
#include "mqb/verify.hpp"
